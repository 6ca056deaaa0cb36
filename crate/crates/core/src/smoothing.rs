//! The cutoff ρ with `ρ(u) + ρ(1/u) = 1`, `ρ = 1` on `(0, 1/2]`, `ρ = 0` on `[2, ∞)`.
//!
//! `ρ(u) = ψ(log₂ u)` where `ψ(v) = B(1−v) / (B(1−v) + B(1+v))`,
//! `B(x) = e^{−1/x}` for `x > 0`. Equivalently `ψ(v) = 1/(1 + e^{g(v)})` with
//! `g(v) = 2v/(1−v²)`, and `g` is odd, which gives the partition identity.

use astro_float::BigFloat;
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::mp::Mp;

/// Upper bound for `|ρ′|` (attained near `u ≈ 0.650`).
pub const RHO_D1_BOUND: f64 = 1.6825;
/// Upper bound for `|ρ″|` (attained near `u ≈ 0.572`).
pub const RHO_D2_BOUND: f64 = 26.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingKernel {
    pub lower_edge: f64,
    pub upper_edge: f64,
}

impl Default for SmoothingKernel {
    fn default() -> Self {
        SmoothingKernel { lower_edge: 0.5, upper_edge: 2.0 }
    }
}

fn check(u: f64) -> Result<()> {
    if u > 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(alloc::format!("rho needs u > 0, got {u}")))
    }
}

/// `(ψ, ψ(1−ψ))` from `g`, without overflow for large `|g|`.
fn logistic(g: f64) -> (f64, f64) {
    let e = (-g.abs()).exp();
    let q = e / ((1.0 + e) * (1.0 + e));
    let psi = if g > 0.0 { e / (1.0 + e) } else { 1.0 / (1.0 + e) };
    (psi, q)
}

impl SmoothingKernel {
    pub fn new() -> Self {
        Self::default()
    }

    /// ψ on the log₂ scale.
    pub fn psi(&self, v: f64) -> f64 {
        if v <= -1.0 {
            1.0
        } else if v >= 1.0 {
            0.0
        } else {
            logistic(2.0 * v / (1.0 - v * v)).0
        }
    }

    /// `(ψ′(v), ψ″(v))`.
    pub fn psi_derivatives(&self, v: f64) -> (f64, f64) {
        if v <= -1.0 || v >= 1.0 {
            return (0.0, 0.0);
        }
        let w = 1.0 - v * v;
        let g = 2.0 * v / w;
        let g1 = 2.0 * (1.0 + v * v) / (w * w);
        let g2 = 4.0 * v * (3.0 + v * v) / (w * w * w);
        let (psi, q) = logistic(g);
        if q == 0.0 {
            return (0.0, 0.0);
        }
        let d1 = -q * g1;
        let d2 = -(d1 * (1.0 - 2.0 * psi) * g1 + q * g2);
        (d1, d2)
    }

    pub fn rho(&self, u: f64) -> Result<f64> {
        check(u)?;
        if u <= self.lower_edge {
            return Ok(1.0);
        }
        if u >= self.upper_edge {
            return Ok(0.0);
        }
        Ok(self.psi(u.log2()))
    }

    /// `(ρ′(u), ρ″(u))`; both vanish outside `(1/2, 2)`.
    pub fn rho_derivatives(&self, u: f64) -> Result<(f64, f64)> {
        check(u)?;
        if u <= self.lower_edge || u >= self.upper_edge {
            return Ok((0.0, 0.0));
        }
        let l = core::f64::consts::LN_2;
        let (d1, d2) = self.psi_derivatives(u.log2());
        let ul = u * l;
        Ok((d1 / ul, d2 / (ul * ul) - d1 / (u * ul)))
    }

    /// ρ in arbitrary precision.
    pub fn rho_mp(&self, u: &BigFloat, m: &Mp) -> Result<BigFloat> {
        if !u.is_positive() || u.is_zero() {
            return Err(Error::DomainError("rho needs u > 0".into()));
        }
        let uf = crate::mp::to_f64(u);
        if uf < 0.25 {
            return Ok(m.one());
        }
        if uf > 4.0 {
            return Ok(m.zero());
        }
        let v = m.div(&m.ln(u), &m.ln2());
        self.psi_mp(&v, m)
    }

    pub fn psi_mp(&self, v: &BigFloat, m: &Mp) -> Result<BigFloat> {
        let one = m.one();
        if v.cmp(&one.neg()).is_some_and(|c| c <= 0) {
            return Ok(one);
        }
        if v.cmp(&one).is_some_and(|c| c >= 0) {
            return Ok(m.zero());
        }
        let w = m.sub(&one, &m.mul(v, v));
        let g = m.div(&m.mul_f64(v, 2.0), &w);
        let e = m.exp(&g.abs().neg());
        let den = m.add(&one, &e);
        Ok(if g.is_positive() { m.div(&e, &den) } else { m.div(&one, &den) })
    }
}

/// ρ with the default kernel.
pub fn rho(u: f64) -> Result<f64> {
    SmoothingKernel::default().rho(u)
}

/// `(ρ′, ρ″)` with the default kernel.
pub fn rho_derivatives(u: f64) -> Result<(f64, f64)> {
    SmoothingKernel::default().rho_derivatives(u)
}
