//! Moment experiments: each mean-value statement as `lhs`, predicted `main`,
//! residual and an error-term shape with unit constant.
//!
//! Integrals over the critical line use the binary64 [`CriticalLine`] with
//! panel breaks at the Riemann–Siegel block changes; exponential sums over
//! divisor weights come from a [`DivisorTable`].

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use astro_float::BigFloat;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::divisor::{d3_coefficients, DivisorTable};
use crate::error::{Error, Result};
use crate::hp_numerics::fast::RS_THRESHOLD;
use crate::hp_numerics::CriticalLine;
use crate::mp::{to_f64, ComplexValue, Mp};
use crate::oscillatory::{default_tol, integrate_with_breaks, theta_rate};
use crate::precision::PrecisionContext;

/// End of the head `[0, t₀]` of `∫₀^T` integrals.
pub const HEAD_END: f64 = 10.0;
pub const DEFAULT_EPS_SLACK: f64 = 0.05;
/// Precision reported for the binary64 quadrature tier.
pub const BINARY64_BITS: u32 = 53;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MomentKind {
    Th1,
    Th2,
    Th3,
    Th4,
    HardyZ,
    SecondMoment,
    Z3Dyadic,
    JDyadic,
    IDyadic,
    S1Bound,
}

impl MomentKind {
    pub const ALL: [MomentKind; 10] = [
        MomentKind::Th1,
        MomentKind::Th2,
        MomentKind::Th3,
        MomentKind::Th4,
        MomentKind::HardyZ,
        MomentKind::SecondMoment,
        MomentKind::Z3Dyadic,
        MomentKind::JDyadic,
        MomentKind::IDyadic,
        MomentKind::S1Bound,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MomentKind::Th1 => "TH1",
            MomentKind::Th2 => "TH2",
            MomentKind::Th3 => "TH3",
            MomentKind::Th4 => "TH4",
            MomentKind::HardyZ => "HARDY_Z",
            MomentKind::SecondMoment => "SECOND_MOMENT",
            MomentKind::Z3Dyadic => "Z3_DYADIC",
            MomentKind::JDyadic => "J_DYADIC",
            MomentKind::IDyadic => "I_DYADIC",
            MomentKind::S1Bound => "S1_BOUND",
        }
    }

    /// Kinds whose statement is an upper bound only (`main = 0`).
    pub fn is_bound_only(&self) -> bool {
        matches!(self, MomentKind::Th4 | MomentKind::HardyZ | MomentKind::S1Bound)
    }
}

impl fmt::Display for MomentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MomentKind {
    type Err = Error;

    /// Case-insensitive; `-` and `_` are interchangeable.
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.trim().chars().map(|c| if c == '-' { '_' } else { c.to_ascii_uppercase() }).collect();
        MomentKind::ALL
            .iter()
            .find(|k| k.name() == norm)
            .copied()
            .ok_or_else(|| Error::UnknownKind(String::from(s)))
    }
}

/// One experiment. `t` is T (T₁ for S1_BOUND), `n` is N (TH2 only), `a` is
/// A (TH2 only), `alpha` is α (TH4 and S1_BOUND).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSpec {
    pub kind: MomentKind,
    pub t: Option<f64>,
    pub n: Option<u64>,
    pub a: Option<f64>,
    pub alpha: Option<f64>,
    pub eps_slack: f64,
}

impl MomentSpec {
    fn with_t(kind: MomentKind, t: f64) -> Self {
        MomentSpec { kind, t: Some(t), n: None, a: None, alpha: None, eps_slack: DEFAULT_EPS_SLACK }
    }

    pub fn th1(t: f64) -> Self {
        Self::with_t(MomentKind::Th1, t)
    }

    pub fn j_dyadic(t: f64) -> Self {
        Self::with_t(MomentKind::JDyadic, t)
    }

    pub fn th2(n: u64, a: f64) -> Self {
        MomentSpec { kind: MomentKind::Th2, t: None, n: Some(n), a: Some(a), alpha: None, eps_slack: DEFAULT_EPS_SLACK }
    }

    pub fn th3(t: f64) -> Self {
        Self::with_t(MomentKind::Th3, t)
    }

    pub fn i_dyadic(t: f64) -> Self {
        Self::with_t(MomentKind::IDyadic, t)
    }

    pub fn th4(t: f64, alpha: f64) -> Self {
        MomentSpec { alpha: Some(alpha), ..Self::with_t(MomentKind::Th4, t) }
    }

    pub fn hardy_z(t: f64) -> Self {
        Self::with_t(MomentKind::HardyZ, t)
    }

    pub fn second_moment(t: f64) -> Self {
        Self::with_t(MomentKind::SecondMoment, t)
    }

    pub fn z3_dyadic(t: f64) -> Self {
        Self::with_t(MomentKind::Z3Dyadic, t)
    }

    /// `δ = 1/(3/2 − α)`, `c = 3/2 − α`.
    pub fn s1_bound(t1: u64, alpha: f64) -> Self {
        MomentSpec { alpha: Some(alpha), ..Self::with_t(MomentKind::S1Bound, t1 as f64) }
    }

    pub fn with_eps_slack(mut self, eps: f64) -> Self {
        self.eps_slack = eps;
        self
    }

    /// Parameter presence and ranges.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.eps_slack >= 0.0 && self.eps_slack.is_finite()) {
            return bad(alloc::format!("eps_slack = {} must be >= 0", self.eps_slack));
        }
        let k = self.kind;
        let wants_t = k != MomentKind::Th2;
        let wants_alpha = matches!(k, MomentKind::Th4 | MomentKind::S1Bound);
        if self.t.is_some() != wants_t {
            return bad(alloc::format!("{k}: T must be {}", if wants_t { "given" } else { "absent" }));
        }
        if self.n.is_some() != !wants_t || self.a.is_some() != !wants_t {
            return bad(alloc::format!("{k}: N and A are for TH2 only"));
        }
        if self.alpha.is_some() != wants_alpha {
            return bad(alloc::format!("{k}: alpha must be {}", if wants_alpha { "given" } else { "absent" }));
        }
        if k == MomentKind::Th2 {
            let (n, a) = (self.n.unwrap(), self.a.unwrap());
            if n < 2 {
                return bad(alloc::format!("N = {n} must be >= 2"));
            }
            if !(a.is_finite() && a >= (n as f64).powf(-0.25)) {
                return bad(alloc::format!("A = {a} below N^(-1/4)"));
            }
            return Ok(());
        }
        let t = self.t.unwrap();
        let (lo, hi) = match k {
            MomentKind::Th3 | MomentKind::IDyadic => (1e2, 3e4),
            MomentKind::Z3Dyadic => (1e2, 1e4),
            MomentKind::S1Bound => (1.0, 1e6),
            _ => (1e2, 1e5),
        };
        if !(t >= lo && t <= hi) {
            return bad(alloc::format!("{k}: T = {t} outside [{lo}, {hi}]"));
        }
        if let Some(al) = self.alpha {
            let ok = match k {
                MomentKind::Th4 => (-0.45..=0.45).contains(&al),
                _ => al > -0.5 && al < 0.5 && al != 0.5,
            };
            if !ok {
                return bad(alloc::format!("{k}: alpha = {al} out of range"));
            }
        }
        if k == MomentKind::S1Bound && t.fract() != 0.0 {
            return bad(alloc::format!("T1 = {t} must be an integer"));
        }
        Ok(())
    }

    /// Largest `t` at which Z or ζ is evaluated (0 for pure sums).
    pub fn t_max(&self) -> f64 {
        match self.kind {
            MomentKind::Th2 | MomentKind::S1Bound => 0.0,
            MomentKind::Th1 | MomentKind::Th3 | MomentKind::HardyZ | MomentKind::SecondMoment => self.t.unwrap_or(0.0),
            _ => 2.0 * self.t.unwrap_or(0.0),
        }
    }

    /// Divisor-table size the experiment reads.
    pub fn table_needed(&self) -> u64 {
        let t = self.t.unwrap_or(0.0);
        match self.kind {
            MomentKind::JDyadic => (t / PI).sqrt().floor() as u64,
            MomentKind::IDyadic => (t / PI).floor() as u64,
            MomentKind::Z3Dyadic => (t / PI).powf(1.5).floor() as u64,
            MomentKind::S1Bound => 2 * t as u64,
            MomentKind::Th2 => th2_lhs_window(self.n.unwrap_or(0)).1,
            _ => 1,
        }
    }
}

/// Outcome of one experiment. `residual = |lhs − main|`,
/// `ratio = residual / bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub spec: MomentSpec,
    pub lhs: Complex64,
    pub main: Complex64,
    pub residual: f64,
    pub bound: f64,
    pub ratio: f64,
    pub runtime_ms: u64,
    pub prec_bits: u32,
    /// Summed quadrature error estimate (0 for exact sums).
    pub err_est: f64,
    /// A window endpoint of the predicted sum was an integer and its term was halved.
    pub halved_endpoint: bool,
}

impl MomentReport {
    pub fn new(spec: MomentSpec, lhs: Complex64, main: Complex64, bound: f64, prec_bits: u32) -> Self {
        let residual = (lhs - main).norm();
        MomentReport {
            spec,
            lhs,
            main,
            residual,
            bound,
            ratio: residual / bound,
            runtime_ms: 0,
            prec_bits,
            err_est: 0.0,
            halved_endpoint: false,
        }
    }

    /// Recomputes residual and ratio from the stored fields and compares exactly.
    pub fn is_consistent(&self) -> bool {
        let r = (self.lhs - self.main).norm();
        r == self.residual && r / self.bound == self.ratio && self.ratio.is_finite()
    }
}

/// Shared read-only inputs of an experiment.
#[derive(Debug, Clone, Copy)]
pub struct MomentDeps<'a> {
    pub line: &'a CriticalLine,
    pub table: &'a DivisorTable,
    pub ctx: PrecisionContext,
    /// Absolute quadrature tolerance per integral; `default_tol` when `None`.
    pub tol: Option<f64>,
}

impl<'a> MomentDeps<'a> {
    pub fn new(line: &'a CriticalLine, table: &'a DivisorTable, ctx: PrecisionContext) -> Self {
        MomentDeps { line, table, ctx, tol: None }
    }

    fn need_table(&self, n: u64) -> Result<()> {
        if self.table.limit() < n {
            return Err(Error::TableTooSmall { needed: n, limit: self.table.limit() });
        }
        Ok(())
    }
}

/// Runs the experiment described by `spec`.
pub fn verify(spec: &MomentSpec, deps: &MomentDeps) -> Result<MomentReport> {
    spec.validate()?;
    let eps = spec.eps_slack;
    let mut r = match spec.kind {
        MomentKind::Th1 => verify_theorem1(spec.t.unwrap(), deps)?,
        MomentKind::JDyadic => verify_j_dyadic(spec.t.unwrap(), deps)?,
        MomentKind::Th2 => verify_theorem2(spec.n.unwrap(), spec.a.unwrap(), eps, deps)?,
        MomentKind::Th3 => verify_theorem3(spec.t.unwrap(), eps, deps)?,
        MomentKind::IDyadic => verify_i_dyadic(spec.t.unwrap(), deps)?,
        MomentKind::Th4 => verify_theorem4(spec.t.unwrap(), spec.alpha.unwrap(), eps, deps)?,
        MomentKind::HardyZ | MomentKind::SecondMoment | MomentKind::Z3Dyadic => {
            verify_hardy_and_calibrations(spec.kind, spec.t.unwrap(), eps, deps)?
        }
        MomentKind::S1Bound => {
            let delta = 1.0 / (1.5 - spec.alpha.unwrap());
            check_s1_bound(spec.t.unwrap() as u64, delta, 1.0 / delta, eps, deps.table)?
        }
    };
    r.spec = *spec;
    Ok(r)
}

// ---------------------------------------------------------------------------
// critical-line integrals

/// Breakpoints in `(t1, t2)`: Riemann–Siegel block changes `2πn²` and the tier switch.
fn line_breaks(t1: f64, t2: f64) -> Vec<f64> {
    let mut b = Vec::new();
    if t1 < RS_THRESHOLD && RS_THRESHOLD < t2 {
        b.push(RS_THRESHOLD);
    }
    let mut n = (t1.max(RS_THRESHOLD) / (2.0 * PI)).sqrt().floor() as u64;
    loop {
        let s = 2.0 * PI * (n * n) as f64;
        if s >= t2 {
            break;
        }
        if s > t1 && s > RS_THRESHOLD {
            b.push(s);
        }
        n += 1;
    }
    b
}

/// `∫_{t1}^{t2} g(Z(t), θ(t)) dt`, `m` the rate multiplier of the integrand.
/// A head on `[0, HEAD_END]` is integrated separately at a 100x tighter tolerance.
fn line_integral<G>(deps: &MomentDeps, m: f64, t1: f64, t2: f64, g: G) -> Result<(Complex64, f64)>
where
    G: Fn(f64, f64) -> Complex64,
{
    let f = |t: f64| {
        let (z, th) = deps.line.z_theta(t);
        g(z, th)
    };
    let tol = deps.tol.unwrap_or_else(|| default_tol(t1, t2));
    if t1 < HEAD_END && t2 > HEAD_END {
        let share = (HEAD_END - t1) / (t2 - t1);
        let (h, eh) = integrate_with_breaks(f, t1, HEAD_END, 0.01 * tol * share, theta_rate(m), &[])?;
        let (v, ev) = integrate_with_breaks(f, HEAD_END, t2, tol, theta_rate(m), &line_breaks(HEAD_END, t2))?;
        return Ok((h + v, eh + ev));
    }
    integrate_with_breaks(f, t1, t2, tol, theta_rate(m), &line_breaks(t1, t2))
}

/// Z(t)ζ(1/2+it) = Z² e^{−iθ}.
fn z_zeta(z: f64, th: f64) -> Complex64 {
    Complex64::from_polar(z * z, -th)
}

fn z2_zeta(z: f64, th: f64) -> Complex64 {
    Complex64::from_polar(z * z * z, -th)
}

/// Snaps `x` to the nearest integer when it is within rounding of it, so
/// that windows like `(T/2π)^{1/2}` at `T = 2πm²` see the integer `m`.
fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 * x.abs().max(1.0) {
        r
    } else {
        x
    }
}

fn is_int(x: f64) -> bool {
    x.fract() == 0.0
}

fn check_range(name: &str, t: f64, lo: f64, hi: f64) -> Result<()> {
    if !(t >= lo && t <= hi) {
        return Err(Error::InvalidParameter(alloc::format!("{name}: T = {t} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// `∫₀^T Zζ` against `(2√2π/3) e^{πi/8} (T/2π)^{3/4} (½ log(T/2π) + 2γ − 2 log 2 − 2/3)`,
/// bound `T^{1/2} log² T`.
pub fn verify_theorem1(t: f64, deps: &MomentDeps) -> Result<MomentReport> {
    check_range("TH1", t, 1e2, 1e5)?;
    let (lhs, err) = line_integral(deps, 3.0, 0.0, t, z_zeta)?;
    let g = deps.table.constants().euler_gamma;
    let q = t / (2.0 * PI);
    let amp = 2.0 * 2f64.sqrt() * PI / 3.0 * q.powf(0.75) * (0.5 * q.ln() + 2.0 * g - 2.0 * 2f64.ln() - 2.0 / 3.0);
    let main = Complex64::from_polar(amp, PI / 8.0);
    let bound = t.sqrt() * t.ln().powi(2);
    let mut r = MomentReport::new(MomentSpec::th1(t), lhs, main, bound, BINARY64_BITS);
    r.err_est = err;
    Ok(r)
}

/// `∫_T^{2T} Zζ` against `2√2π e^{πi/8} Σ′_{(T/2π)^{1/2} ≤ k ≤ (T/π)^{1/2}} (−1)^k d(k) k^{1/2}`,
/// bound `T^{1/2} log T`.
pub fn verify_j_dyadic(t: f64, deps: &MomentDeps) -> Result<MomentReport> {
    check_range("J_DYADIC", t, 1e2, 1e5)?;
    let lo = snap((t / (2.0 * PI)).sqrt());
    let hi = snap((t / PI).sqrt());
    deps.need_table(hi.floor() as u64)?;
    let s = deps.table.sum_alt_d_sqrt_halved(lo, hi)?;
    let (lhs, err) = line_integral(deps, 3.0, t, 2.0 * t, z_zeta)?;
    let main = Complex64::from_polar(2.0 * 2f64.sqrt() * PI * s, PI / 8.0);
    let bound = t.sqrt() * t.ln();
    let mut r = MomentReport::new(MomentSpec::j_dyadic(t), lhs, main, bound, BINARY64_BITS);
    r.err_est = err;
    r.halved_endpoint = is_int(lo) || is_int(hi);
    Ok(r)
}

/// `∫₀^T Z²ζ` against `T(½L² + a₁L + a₂)`, `L = log(T/2π)`, bound `T^{3/4+ε}`.
pub fn verify_theorem3(t: f64, eps: f64, deps: &MomentDeps) -> Result<MomentReport> {
    check_range("TH3", t, 1e2, 3e4)?;
    let (lhs, err) = line_integral(deps, 4.0, 0.0, t, z2_zeta)?;
    let (a1, a2) = d3_coefficients(deps.table.constants());
    let l = (t / (2.0 * PI)).ln();
    let main = Complex64::new(t * (0.5 * l * l + a1 * l + a2), 0.0);
    let bound = t.powf(0.75 + eps);
    let mut r = MomentReport::new(MomentSpec::th3(t).with_eps_slack(eps), lhs, main, bound, BINARY64_BITS);
    r.err_est = err;
    Ok(r)
}

/// `∫_T^{2T} Z²ζ` against `2π Σ′_{T/2π ≤ k ≤ T/π} d₃(k)`, bound `T^{3/4} log² T`.
pub fn verify_i_dyadic(t: f64, deps: &MomentDeps) -> Result<MomentReport> {
    check_range("I_DYADIC", t, 1e2, 3e4)?;
    let lo = snap(t / (2.0 * PI));
    let hi = snap(t / PI);
    deps.need_table(hi.floor() as u64)?;
    let s = deps.table.sum_d3_halved(lo, hi)?;
    let (lhs, err) = line_integral(deps, 4.0, t, 2.0 * t, z2_zeta)?;
    let main = Complex64::new(2.0 * PI * s, 0.0);
    let bound = t.powf(0.75) * t.ln().powi(2);
    let mut r = MomentReport::new(MomentSpec::i_dyadic(t), lhs, main, bound, BINARY64_BITS);
    r.err_est = err;
    r.halved_endpoint = is_int(lo) || is_int(hi);
    Ok(r)
}

/// TH4 error shape: `T^{1−α/6+ε}` for α ≥ 0, `T^{1+α/6+ε}` for α ≤ 0.
pub fn theorem4_bound(t: f64, alpha: f64, eps: f64) -> f64 {
    if alpha >= 0.0 {
        t.powf(1.0 - alpha / 6.0 + eps)
    } else {
        t.powf(1.0 + alpha / 6.0 + eps)
    }
}

/// `∫_T^{2T} Z³ χ^α(1/2+it)`, `χ^α = e^{−2iαθ}`; main term 0.
pub fn verify_theorem4(t: f64, alpha: f64, eps: f64, deps: &MomentDeps) -> Result<MomentReport> {
    let spec = MomentSpec::th4(t, alpha).with_eps_slack(eps);
    spec.validate()?;
    let (lhs, err) = line_integral(deps, 3.0 + 2.0 * alpha.abs(), t, 2.0 * t, |z, th| {
        Complex64::from_polar(z * z * z, -2.0 * alpha * th)
    })?;
    let mut r = MomentReport::new(spec, lhs, Complex64::new(0.0, 0.0), theorem4_bound(t, alpha, eps), BINARY64_BITS);
    r.err_est = err;
    Ok(r)
}

/// The calibration statements:
/// - HARDY_Z: `∫₀^T Z` against 0, bound `T^{1/4+ε}`;
/// - SECOND_MOMENT: `∫₀^T Z²` against `T log T + (2γ − 1 − log 2π)T`, bound `T^{1/3+ε}`;
/// - Z3_DYADIC: `∫_T^{2T} Z³` against
///   `2π√(2/3) Σ_{(T/2π)^{3/2} ≤ n ≤ (T/π)^{3/2}} d₃(n) n^{−1/6} cos(3πn^{2/3} + π/8)`,
///   bound `T^{3/4+ε}`.
pub fn verify_hardy_and_calibrations(kind: MomentKind, t: f64, eps: f64, deps: &MomentDeps) -> Result<MomentReport> {
    let spec = MomentSpec::with_t(kind, t).with_eps_slack(eps);
    spec.validate()?;
    let (lhs, main, err, bound) = match kind {
        MomentKind::HardyZ => {
            let (v, e) = line_integral(deps, 1.0, 0.0, t, |z, _| Complex64::new(z, 0.0))?;
            (v, Complex64::new(0.0, 0.0), e, t.powf(0.25 + eps))
        }
        MomentKind::SecondMoment => {
            let (v, e) = line_integral(deps, 2.0, 0.0, t, |z, _| Complex64::new(z * z, 0.0))?;
            let g = deps.table.constants().euler_gamma;
            let main = t * t.ln() + (2.0 * g - 1.0 - (2.0 * PI).ln()) * t;
            (v, Complex64::new(main, 0.0), e, t.powf(1.0 / 3.0 + eps))
        }
        MomentKind::Z3Dyadic => {
            let lo = snap((t / (2.0 * PI)).powf(1.5));
            let hi = snap((t / PI).powf(1.5));
            deps.need_table(hi.floor() as u64)?;
            let s = z3_window_sum(deps.table, lo.ceil() as u64, hi.floor() as u64);
            let (v, e) = line_integral(deps, 3.0, t, 2.0 * t, |z, _| Complex64::new(z * z * z, 0.0))?;
            (v, Complex64::new(2.0 * PI * (2.0f64 / 3.0).sqrt() * s, 0.0), e, t.powf(0.75 + eps))
        }
        _ => return Err(Error::InvalidParameter(alloc::format!("{kind} is not a calibration kind"))),
    };
    let mut r = MomentReport::new(spec, lhs, main, bound, BINARY64_BITS);
    r.err_est = err;
    Ok(r)
}

/// Compensated summation (Neumaier).
#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    s: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// `cos 2πx` and `sin 2πx` after reducing `x` mod 1.
fn cis_turns(x: f64) -> Complex64 {
    let f = x - x.round();
    Complex64::from_polar(1.0, 2.0 * PI * f)
}

/// `Σ_{lo ≤ n ≤ hi} d₃(n) n^{−1/6} cos(3πn^{2/3} + π/8)`.
fn z3_window_sum(table: &DivisorTable, lo: u64, hi: u64) -> f64 {
    let d3 = table.d3_values();
    let mut acc = Neumaier::default();
    for n in lo.max(1)..=hi {
        let nf = n as f64;
        let p = nf.cbrt();
        // 3πn^{2/3} + π/8 in turns
        let w = cis_turns(1.5 * p * p + 1.0 / 16.0);
        acc.add(d3[n as usize] as f64 * w.re / p.sqrt());
    }
    acc.value()
}

// ---------------------------------------------------------------------------
// TH2: exact finite sums

/// `N ≤ k ≤ 2√2N`, i.e. `N ≤ k` and `k² ≤ 8N²`.
pub fn th2_lhs_window(n: u64) -> (u64, u64) {
    let hi = isqrt_u128(8 * (n as u128) * (n as u128)) as u64;
    (n, hi)
}

fn isqrt_u128(x: u128) -> u128 {
    let mut r = (x as f64).sqrt() as u128;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// `A^{4/3}N^{1/3} ≤ k ≤ √2 A^{4/3}N^{1/3}`, decided exactly: `k³ ≥ A⁴N` and `k⁶ ≤ 8A⁸N²`.
/// Empty windows come back as `lo > hi`.
pub fn th2_main_window(n: u64, a: f64) -> (u64, u64) {
    // A⁸N² of a binary64 A needs at most 8·53 + 2·64 bits
    let m = Mp::new(640);
    let a4n = m.mul(&m.powi(&m.f(a), 4), &m.int(n as i64));
    let top = m.mul_f64(&m.mul(&a4n, &a4n), 8.0);
    let kf = |k: u64| m.int(k as i64);
    let cube = |k: u64| m.powi(&kf(k), 3);
    let sixth = |k: u64| m.powi(&kf(k), 6);
    let guess = to_f64(&a4n).cbrt();
    let mut lo = (guess.floor() as u64).max(1);
    while lo > 1 && cmp(&cube(lo - 1), &a4n) >= 0 {
        lo -= 1;
    }
    while cmp(&cube(lo), &a4n) < 0 {
        lo += 1;
    }
    let mut hi = (guess * 2f64.sqrt()).floor() as u64 + 1;
    while hi > 0 && cmp(&sixth(hi), &top) > 0 {
        hi -= 1;
    }
    while cmp(&sixth(hi + 1), &top) <= 0 {
        hi += 1;
    }
    (lo, hi)
}

fn cmp(a: &BigFloat, b: &BigFloat) -> i64 {
    a.cmp(b).unwrap_or(0) as i64
}

/// The two sides of the TH2 identity at working precision.
#[derive(Debug, Clone)]
pub struct Theorem2Sums {
    pub lhs: ComplexValue,
    pub main: ComplexValue,
    pub lhs_terms: u64,
    pub main_terms: u64,
    /// `max |term|` of the left sum.
    pub lhs_max_term: f64,
}

/// `Σ_{N≤k≤2√2N} d(k) k^{−1/6} e^{3πi(Ak)^{2/3}}` and
/// `√3 A^{−4/3} Σ_{A^{4/3}N^{1/3}≤k≤√2A^{4/3}N^{1/3}} d(k) k^{1/2} e^{−πi(k/A)²}`,
/// ascending k unless `reversed`.
pub fn theorem2_sums(n: u64, a: f64, reversed: bool, table: &DivisorTable, ctx: PrecisionContext) -> Result<Theorem2Sums> {
    let (l0, l1) = th2_lhs_window(n);
    let (m0, m1) = th2_main_window(n, a);
    let need = l1.max(m1);
    if table.limit() < need {
        return Err(Error::TableTooSmall { needed: need, limit: table.limit() });
    }
    let d = table.d_values();
    let m = Mp::new(ctx.prec_bits() as usize + 32);
    let two_pi = m.mul_f64(&m.pi(), 2.0);
    let ln_a = m.ln(&m.f(a));
    let sixth = m.ratio(1, 6);
    let two_thirds = m.ratio(2, 3);

    // e^{2πi·x}, x reduced mod 1 first so that sin/cos see a small argument
    let turn = |x: &BigFloat| {
        let f = x.fract();
        m.cis(&m.mul(&two_pi, &f))
    };

    let order = |lo: u64, hi: u64| -> Vec<u64> {
        let mut v: Vec<u64> = (lo..=hi).collect();
        if reversed {
            v.reverse();
        }
        v
    };

    // 3π(Ak)^{2/3} = 2π·(3/2)A^{2/3}(k^{1/6})⁴
    let c_phase = m.mul_f64(&m.exp(&m.mul(&two_thirds, &ln_a)), 1.5);
    let mut lhs = m.complex(0.0, 0.0);
    let mut lhs_max: f64 = 0.0;
    for k in order(l0, l1) {
        let r6 = m.exp(&m.mul(&sixth, &m.ln(&m.int(k as i64))));
        let amp = m.div(&m.int(d[k as usize] as i64), &r6);
        let r2 = m.mul(&r6, &r6);
        let x = m.mul(&c_phase, &m.mul(&r2, &r2));
        lhs = m.cadd(&lhs, &m.cscale(&turn(&x), &amp));
        lhs_max = lhs_max.max(to_f64(&amp));
    }

    let mut main = m.complex(0.0, 0.0);
    if m0 <= m1 {
        let inv_a = m.div(&m.one(), &m.f(a));
        for k in order(m0, m1) {
            let kf = m.int(k as i64);
            let amp = m.mul(&m.int(d[k as usize] as i64), &m.sqrt(&kf));
            // −π(k/A)² = 2π·(−½(k/A)²)
            let q = m.mul(&kf, &inv_a);
            let x = m.mul_f64(&m.mul(&q, &q), -0.5);
            main = m.cadd(&main, &m.cscale(&turn(&x), &amp));
        }
        // √3 A^{−4/3}
        let c = m.mul(&m.sqrt(&m.int(3)), &m.exp(&m.mul(&m.ratio(-4, 3), &ln_a)));
        main = m.cscale(&main, &c);
    }
    Ok(Theorem2Sums {
        lhs,
        main,
        lhs_terms: l1 + 1 - l0,
        main_terms: if m0 <= m1 { m1 + 1 - m0 } else { 0 },
        lhs_max_term: lhs_max,
    })
}

/// TH2 error shape `A^{−1/3}N^{1/2+ε} + A^{1/3}N^{1/6} log N + A^{−1/9}N^{2/9+ε}`.
pub fn theorem2_bound(n: u64, a: f64, eps: f64) -> f64 {
    let nf = n as f64;
    a.powf(-1.0 / 3.0) * nf.powf(0.5 + eps)
        + a.powf(1.0 / 3.0) * nf.powf(1.0 / 6.0) * nf.ln()
        + a.powf(-1.0 / 9.0) * nf.powf(2.0 / 9.0 + eps)
}

/// Final size shape `A^{2/3} N^{1/2} log N` of the left sum.
pub fn theorem2_size_shape(n: u64, a: f64) -> f64 {
    let nf = n as f64;
    a.powf(2.0 / 3.0) * nf.sqrt() * nf.ln()
}

pub fn verify_theorem2(n: u64, a: f64, eps: f64, deps: &MomentDeps) -> Result<MomentReport> {
    let spec = MomentSpec::th2(n, a).with_eps_slack(eps);
    spec.validate()?;
    let s = theorem2_sums(n, a, false, deps.table, deps.ctx)?;
    let bound = theorem2_bound(n, a, eps);
    Ok(MomentReport::new(spec, s.lhs.to_c64(), s.main.to_c64(), bound, deps.ctx.prec_bits()))
}

// ---------------------------------------------------------------------------
// triple sum S₁

/// `(HNM)^{1+ε}[(X/(HNM²))^{1/4} + M^{−1/2} + X^{−1}]` with `H = N = M = T₁^{1/3}`, `X = T₁^δ`.
pub fn s1_bound(t1: f64, delta: f64, eps: f64) -> f64 {
    let h = t1.cbrt();
    let hnm = h * h * h;
    let x = t1.powf(delta);
    hnm.powf(1.0 + eps) * ((x / (hnm * h)).powf(0.25) + 1.0 / h.sqrt() + 1.0 / x)
}

/// `S₁ = Σ_{T₁ ≤ k₁k₂k₃ ≤ 2T₁} e^{2πic(k₁k₂k₃)^δ} = Σ_{T₁≤n≤2T₁} d₃(n) e^{2πicn^δ}`;
/// main term 0.
pub fn check_s1_bound(t1: u64, delta: f64, c: f64, eps: f64, table: &DivisorTable) -> Result<MomentReport> {
    if t1 > 1_000_000 {
        return Err(Error::CapacityExceeded { requested: t1, limit: 1_000_000 });
    }
    if t1 == 0 || !delta.is_finite() || delta == 0.0 || delta == 1.0 || !c.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("T1 = {t1}, delta = {delta}, c = {c}")));
    }
    if table.limit() < 2 * t1 {
        return Err(Error::TableTooSmall { needed: 2 * t1, limit: table.limit() });
    }
    let d3 = table.d3_values();
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for n in t1..=2 * t1 {
        let w = if c == 0.0 { Complex64::new(1.0, 0.0) } else { cis_turns(c * (n as f64).powf(delta)) };
        let dn = d3[n as usize] as f64;
        re.add(dn * w.re);
        im.add(dn * w.im);
    }
    let lhs = Complex64::new(re.value(), im.value());
    let alpha = 1.5 - 1.0 / delta;
    let spec = MomentSpec::s1_bound(t1, alpha).with_eps_slack(eps);
    Ok(MomentReport::new(spec, lhs, Complex64::new(0.0, 0.0), s1_bound(t1 as f64, delta, eps), BINARY64_BITS))
}

// ---------------------------------------------------------------------------
// fits

/// Least-squares slope of `log y` against `log x`. `None` with fewer than two
/// usable points (positive, finite, distinct x).
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Fitted constant (max ratio) and the growth exponent of the ratio along `x`.
pub fn fit_constant(x: &[f64], ratios: &[f64]) -> (f64, Option<f64>) {
    let c = ratios.iter().cloned().fold(0.0, f64::max);
    (c, log_log_slope(x, ratios))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in MomentKind::ALL {
            assert_eq!(k.name().parse::<MomentKind>().unwrap(), k);
        }
        assert_eq!("th1".parse::<MomentKind>().unwrap(), MomentKind::Th1);
        assert_eq!("hardy-z".parse::<MomentKind>().unwrap(), MomentKind::HardyZ);
        assert!("th5".parse::<MomentKind>().is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(MomentSpec::th1(1e3).validate().is_ok());
        assert!(MomentSpec::th1(50.0).validate().is_err());
        assert!(MomentSpec::th2(1000, 1.0).validate().is_ok());
        // 1000^{-1/4} ≈ 0.178
        assert!(MomentSpec::th2(1000, 0.1).validate().is_err());
        assert!(MomentSpec::th4(1e3, 0.3).validate().is_ok());
        assert!(MomentSpec::th4(1e3, 0.49).validate().is_err());
        let mut s = MomentSpec::th3(1e3);
        s.alpha = Some(0.1);
        assert!(s.validate().is_err());
        let mut s = MomentSpec::th1(1e3);
        s.a = Some(1.0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn windows_are_exact_at_cubes() {
        // A = 1, N = 1000: A^{4/3}N^{1/3} = 10 exactly
        let (lo, hi) = th2_main_window(1000, 1.0);
        assert_eq!(lo, 10);
        assert_eq!(hi, 14); // √2·10 ≈ 14.14
        // A = 2, N = 1000: 2^{4/3}·10 ≈ 25.198
        assert_eq!(th2_main_window(1000, 2.0), (26, 35));
        assert_eq!(th2_lhs_window(1000), (1000, 2828));
        // A⁴N = 1 gives the window [1, 1.414]
        assert_eq!(th2_main_window(16, 0.5), (1, 1));
    }

    #[test]
    fn bounds() {
        assert_eq!(theorem4_bound(1e3, 0.0, 0.05), theorem4_bound(1e3, -0.0, 0.05));
        assert!((theorem4_bound(1e3, 0.3, 0.0) - 1e3f64.powf(0.95)).abs() < 1e-9);
        assert!((theorem4_bound(1e3, -0.3, 0.0) - 1e3f64.powf(0.95)).abs() < 1e-9);
        let b = s1_bound(1e6, 2.0 / 3.0, 0.0);
        // 1e6·(1e4/1e8)^{1/4} + 1e6/10 + 1e6/1e4
        assert!((b - (1e5 + 1e5 + 100.0)).abs() < 1e-6, "{b}");
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(0.4)).collect();
        assert!((log_log_slope(&x, &y).unwrap() - 0.4).abs() < 1e-12);
        assert!(log_log_slope(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn line_breaks_cover_block_changes() {
        let b = line_breaks(10.0, 1000.0);
        assert_eq!(b[0], RS_THRESHOLD);
        // 2π·7² ≈ 307.9, …, 2π·12² ≈ 904.8
        assert_eq!(b.len(), 1 + 6);
        assert!(line_breaks(410.0, 450.0).is_empty());
    }
}
