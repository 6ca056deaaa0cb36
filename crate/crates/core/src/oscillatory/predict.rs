//! Main terms of the single-k integrals met in the dyadic arguments,
//!
//! `G(k) = ∫_T^{2T} ρ(k/L(t)) exp(iλ(t log(t/2π) − t − t log K)) dt`,
//!
//! where `λ`, `K` and the sum length `L(t) = c(t/2π)^p` depend on the kind.
//! The phase is stationary at `t₀ = 2πK`, where the main term is
//! `e^{±πi/4} ρ(k/L(t₀)) (2πt₀/|λ|)^{1/2} e^{−iλt₀}`.

use core::f64::consts::{FRAC_1_SQRT_2, PI};
use core::str::FromStr;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use super::stationary::PhaseProblem;
use crate::error::{Error, Result};
use crate::smoothing::SmoothingKernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredictKind {
    /// first sum of ∫ Zζ, `x = 2(t/2π)`
    J1,
    /// second sum of ∫ Zζ, `y = ½(t/2π)`
    J2,
    /// first sum of ∫ Zζ A^{it}, `x = 8A(t/2π)^{1/2}`
    JA1,
    /// second sum of ∫ Zζ A^{it}, `y = (8A)^{−1}(t/2π)^{3/2}`
    JA2First,
    /// second sum of ∫ Zζ A^{it}, `y = 4A^{−1}(t/2π)^{3/2}`
    JA2Second,
    /// first sum of ∫ Z²ζ, `x = 2(t/2π)^{3/2}`
    I1Th3,
    /// second sum of ∫ Z²ζ, `y = ½(t/2π)^{3/2}`
    I2Th3,
    /// first sum of ∫ Z³χ^α, `x = 2(t/2π)^{3/2}`
    I1Th4Alpha,
}

impl FromStr for PredictKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "j1" => PredictKind::J1,
            "j2" => PredictKind::J2,
            "ja1" => PredictKind::JA1,
            "ja2_first" => PredictKind::JA2First,
            "ja2_second" => PredictKind::JA2Second,
            "i1_th3" => PredictKind::I1Th3,
            "i2_th3" => PredictKind::I2Th3,
            "i1_th4_alpha" => PredictKind::I1Th4Alpha,
            _ => return Err(Error::UnknownKind(s.into())),
        })
    }
}

/// `T` (the integral runs over `[T, 2T]`), plus `A` or `α` where the kind needs one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictParams {
    pub t: f64,
    pub a: Option<f64>,
    pub alpha: Option<f64>,
}

impl PredictParams {
    pub fn new(t: f64) -> Self {
        PredictParams { t, a: None, alpha: None }
    }
}

/// One resonance integral, as data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub k: f64,
    pub lambda: f64,
    /// `log K`
    pub log_k: f64,
    /// `L(t) = len_c (t/2π)^{len_p}`
    pub len_c: f64,
    pub len_p: f64,
    pub t: f64,
}

fn need(v: Option<f64>, what: &str) -> Result<f64> {
    v.ok_or_else(|| Error::InvalidParameter(alloc::format!("{what} required for this kind")))
}

impl Resonance {
    pub fn new(kind: PredictKind, k: u64, p: &PredictParams) -> Result<Self> {
        if k == 0 || !(p.t > 0.0) {
            return Err(Error::InvalidParameter("need k >= 1 and T > 0".into()));
        }
        let kf = k as f64;
        let lk = kf.ln();
        let (lambda, log_k, len_c, len_p) = match kind {
            PredictKind::J1 => (0.5, 2.0 * lk, 2.0, 1.0),
            PredictKind::J2 => (-1.5, 2.0 / 3.0 * lk, 0.5, 1.0),
            PredictKind::JA1 => {
                let a = need(p.a, "A")?;
                (0.5, 2.0 * (lk - a.ln()), 8.0 * a, 0.5)
            }
            PredictKind::JA2First => {
                let a = need(p.a, "A")?;
                (-1.5, 2.0 / 3.0 * (a.ln() + lk), 1.0 / (8.0 * a), 1.5)
            }
            PredictKind::JA2Second => {
                let a = need(p.a, "A")?;
                (-1.5, 2.0 / 3.0 * (a.ln() + lk), 4.0 / a, 1.5)
            }
            PredictKind::I1Th3 => (1.0, lk, 2.0, 1.5),
            PredictKind::I2Th3 => (-2.0, 0.5 * lk, 0.5, 1.5),
            PredictKind::I1Th4Alpha => {
                let al = need(p.alpha, "alpha")?;
                let l = 1.5 - al;
                (l, lk / l, 2.0, 1.5)
            }
        };
        Ok(Resonance { k: kf, lambda, log_k, len_c, len_p, t: p.t })
    }

    /// `t log(t/2π) − t − t log K`
    pub fn base_phase(&self, t: f64) -> f64 {
        t * ((t / (2.0 * PI)).ln() - 1.0 - self.log_k)
    }

    pub fn integrand(&self, kernel: &SmoothingKernel, t: f64) -> Complex64 {
        let amp = kernel.rho(self.k / self.len(t)).unwrap_or(0.0);
        if amp == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(amp, self.lambda * self.base_phase(t))
    }

    pub fn len(&self, t: f64) -> f64 {
        self.len_c * (t / (2.0 * PI)).powf(self.len_p)
    }

    /// `t₀ = 2πK`.
    pub fn stationary_point(&self) -> f64 {
        2.0 * PI * self.log_k.exp()
    }

    /// Local phase rate `|λ log(t/2πK)|` plus one.
    pub fn rate(&self, t: f64) -> f64 {
        (self.lambda * ((t / (2.0 * PI)).ln() - self.log_k)).abs() + 1.0
    }

    /// `[f, f′, f″, f‴, f⁗]` with `f = λ/(2π) (t log(t/2π) − t − t log K)`.
    pub fn phase_derivatives(&self, t: f64) -> [f64; 5] {
        let s = self.lambda / (2.0 * PI);
        [
            s * self.base_phase(t),
            s * ((t / (2.0 * PI)).ln() - self.log_k),
            s / t,
            -s / (t * t),
            2.0 * s / (t * t * t),
        ]
    }

    /// `[φ, φ′, φ″]` for `φ(t) = ρ(u)`, `u = k / L(t)`.
    pub fn amplitude_derivatives(&self, kernel: &SmoothingKernel, t: f64) -> [f64; 3] {
        let u = self.k / self.len(t);
        let p = self.len_p;
        let r = kernel.rho(u).unwrap_or(0.0);
        let (r1, r2) = kernel.rho_derivatives(u).unwrap_or((0.0, 0.0));
        let u1 = -p * u / t;
        let u2 = p * (p + 1.0) * u / (t * t);
        [r, r1 * u1, r2 * u1 * u1 + r1 * u2]
    }

    /// Stationary-phase problem on `[T, 2T]` with `H = 1`, `U = T`, `A = T/2`.
    pub fn phase_problem<'a>(
        &self,
        f: &'a dyn Fn(f64) -> [f64; 5],
        phi: &'a dyn Fn(f64) -> [f64; 3],
    ) -> PhaseProblem<'a> {
        PhaseProblem { a: self.t, b: 2.0 * self.t, f, phi, h: 1.0, a_scale: 0.5 * self.t, u: self.t }
    }

    /// The main term.
    pub fn main_term(&self, kernel: &SmoothingKernel) -> Complex64 {
        let t0 = self.stationary_point();
        let (a, b) = (self.t, 2.0 * self.t);
        if !(t0 >= a && t0 <= b) {
            return Complex64::new(0.0, 0.0);
        }
        let amp = kernel.rho(self.k / self.len(t0)).unwrap_or(0.0);
        let rot = Complex64::new(FRAC_1_SQRT_2, self.lambda.signum() * FRAC_1_SQRT_2);
        let mag = amp * (2.0 * PI * t0 / self.lambda.abs()).sqrt();
        let v = rot * Complex64::from_polar(mag, -self.lambda * t0);
        if t0 == a || t0 == b { v * 0.5 } else { v }
    }
}

/// Main term of the single-k integral of `kind`; zero outside the resonance
/// window, halved on its edge.
pub fn predict_afe_integral(kind: PredictKind, k: u64, params: &PredictParams) -> Result<Complex64> {
    Ok(Resonance::new(kind, k, params)?.main_term(&SmoothingKernel::default()))
}
