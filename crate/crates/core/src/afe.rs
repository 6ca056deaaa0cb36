//! Smoothed approximate functional equation for ζ^k, k ∈ {1, 2, 3}:
//!
//! `ζ^k(s) ≈ Σ ρ(m/x) d_k(m) m^{−s} + χ^k(s) Σ ρ(m/y) d_k(m) m^{s−1}`,
//! `xy = (t/2π)^k`. Both sums stop exactly at `2x` and `2y`, where ρ vanishes.

use alloc::vec::Vec;
use core::f64::consts::PI;

use astro_float::BigFloat;
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::divisor::DivisorTable;
use crate::error::{Error, Result};
use crate::hp_numerics::{ComplexArg, Evaluator};
use crate::mp::{ComplexValue, Mp, RealValue};
use crate::precision::PrecisionContext;
use crate::smoothing::SmoothingKernel;

/// Smallest `t` the equation is used at.
pub const T0: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfeSplit {
    pub k: u32,
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl AfeSplit {
    /// Split with the given `x`; `y = (t/2π)^k / x`.
    pub fn new(k: u32, t: f64, x: f64) -> Result<Self> {
        if !(1..=3).contains(&k) {
            return Err(Error::InvalidParameter(alloc::format!("k = {k} not in 1..=3")));
        }
        if !(t >= T0 && t.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("t = {t} below {T0}")));
        }
        let y = (t / (2.0 * PI)).powi(k as i32) / x;
        if !(x >= 1.0 && y >= 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("x = {x}, y = {y} must both be >= 1")));
        }
        Ok(AfeSplit { k, x, y, t })
    }

    /// `x = y = (t/2π)^{k/2}`.
    pub fn symmetric(k: u32, t: f64) -> Result<Self> {
        Self::new(k, t, (t / (2.0 * PI)).powf(k as f64 / 2.0))
    }

    /// `x = 2(t/2π)^{k/2}`, `y = ½(t/2π)^{k/2}` for k = 2, 3; symmetric for k = 1.
    pub fn moment_split(k: u32, t: f64) -> Result<Self> {
        if k == 1 {
            return Self::symmetric(1, t);
        }
        Self::new(k, t, 2.0 * (t / (2.0 * PI)).powf(k as f64 / 2.0))
    }

    /// Largest `m` either sum touches.
    pub fn max_m(&self) -> u64 {
        (2.0 * self.x.max(self.y)).ceil() as u64
    }
}

/// The two smoothed sums and `χ^k(s)`.
#[derive(Debug, Clone)]
pub struct AfeParts {
    pub first: ComplexValue,
    pub chi_k: ComplexValue,
    pub second: ComplexValue,
}

fn dk(table: &DivisorTable, k: u32, m: usize) -> u32 {
    match k {
        1 => 1,
        2 => table.d_values()[m],
        _ => table.d3_values()[m],
    }
}

/// `Σ_{m<2L} ρ(m/L) d_k(m) m^{−w}`, ascending m.
fn smoothed_sum(
    ev: &mut Evaluator,
    w: &ComplexValue,
    len: &BigFloat,
    k: u32,
    table: &DivisorTable,
    kernel: &SmoothingKernel,
) -> Result<ComplexValue> {
    let m = ev.mp().clone();
    let lf = crate::mp::to_f64(len);
    let top = (kernel.upper_edge * lf).ceil() as usize;
    let pw: Vec<ComplexValue> = ev.powers(w, top);
    let mut acc = m.complex(0.0, 0.0);
    for (n, p) in pw.iter().enumerate().skip(1) {
        let u = n as f64 / lf;
        let r = if u <= 0.9 * kernel.lower_edge {
            m.one()
        } else if u >= 1.1 * kernel.upper_edge {
            continue;
        } else {
            kernel.rho_mp(&m.div(&m.int(n as i64), len), &m)?
        };
        if r.is_zero() {
            continue;
        }
        let c = m.mul(&r, &m.int(dk(table, k, n) as i64));
        acc = m.cadd(&acc, &m.cscale(p, &c));
    }
    Ok(acc)
}

/// Both sums of the equation and `χ^k(σ+it)` at the split's `t`.
pub fn afe_parts(
    split: &AfeSplit,
    sigma: f64,
    table: &DivisorTable,
    kernel: &SmoothingKernel,
    ctx: PrecisionContext,
) -> Result<AfeParts> {
    if !(0.5..1.0).contains(&sigma) {
        return Err(Error::InvalidParameter(alloc::format!("sigma = {sigma} not in [1/2, 1)")));
    }
    let need = split.max_m();
    if split.k > 1 && table.limit() < need {
        return Err(Error::TableTooSmall { needed: need, limit: table.limit() });
    }
    let mut ev = Evaluator::new(ctx);
    let m: Mp = ev.mp().clone();
    let s = ComplexArg { sigma: RealValue::from_f64(sigma), t: RealValue::from_f64(split.t) };
    let w = ComplexValue::new(s.sigma.0.clone(), s.t.0.clone());
    let w_ref = ComplexValue::new(m.sub(&m.one(), &w.re), w.im.neg());

    // y from x at working precision so that xy = (t/2π)^k holds to it
    let x = m.f(split.x);
    let q = m.div(&s.t.0, &m.mul_f64(&m.pi(), 2.0));
    let mut qk = m.one();
    for _ in 0..split.k {
        qk = m.mul(&qk, &q);
    }
    let y = m.div(&qk, &x);

    let first = smoothed_sum(&mut ev, &w, &x, split.k, table, kernel)?;
    let second = smoothed_sum(&mut ev, &w_ref, &y, split.k, table, kernel)?;
    let chi = ev.chi(&s)?;
    let m = ev.mp();
    let mut chi_k = chi.clone();
    for _ in 1..split.k {
        chi_k = m.cmul(&chi_k, &chi);
    }
    Ok(AfeParts { first, chi_k, second })
}

/// ζ^k(σ+it) from the smoothed approximate functional equation.
pub fn zeta_power_afe(
    split: &AfeSplit,
    sigma: f64,
    table: &DivisorTable,
    kernel: &SmoothingKernel,
    ctx: PrecisionContext,
) -> Result<ComplexValue> {
    let p = afe_parts(split, sigma, table, kernel, ctx)?;
    let m = Mp::new(ctx.prec_bits() as usize + 64);
    Ok(m.cadd(&p.first, &m.cmul(&p.chi_k, &p.second)))
}

/// `t^{k(1−σ)/3−1} + t^{k(1/2−σ)−2} y^σ log^{k−1} t`, unit constants.
pub fn afe_error_budget(split: &AfeSplit, sigma: f64) -> f64 {
    let k = split.k as f64;
    let t = split.t;
    t.powf(k * (1.0 - sigma) / 3.0 - 1.0)
        + t.powf(k * (0.5 - sigma) - 2.0) * split.y.powf(sigma) * t.ln().powi(split.k as i32 - 1)
}
