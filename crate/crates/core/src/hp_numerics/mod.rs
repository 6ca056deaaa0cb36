//! ζ, χ, θ, Z and χ^α in arbitrary precision, plus constants and the
//! binary64 critical-line tier.
//!
//! The free functions build a fresh [`Evaluator`] per call. Batch callers
//! should keep an `Evaluator` around: it caches prime logarithms and
//! Bernoulli tables at its working precision.

pub mod bernoulli;
pub mod constants;
mod evaluator;
pub mod fast;
mod gamma;

pub use constants::{Constants, ConstantsF64};
pub use evaluator::{plan_em, EmPlan, Evaluator, T_MAX};
pub use fast::CriticalLine;
pub use gamma::ln_gamma;

use crate::error::Result;
use crate::mp::{ComplexValue, RealValue};
use crate::precision::PrecisionContext;

/// `s = σ + it`.
#[derive(Debug, Clone)]
pub struct ComplexArg {
    pub sigma: RealValue,
    pub t: RealValue,
}

impl ComplexArg {
    pub fn new(sigma: f64, t: f64) -> Self {
        ComplexArg { sigma: RealValue::from_f64(sigma), t: RealValue::from_f64(t) }
    }

    /// `σ = sn/sd`, `t = tn/td`, correctly rounded to `bits`.
    pub fn from_ratios(sn: i64, sd: i64, tn: i64, td: i64, bits: usize) -> Self {
        ComplexArg {
            sigma: RealValue::from_ratio(sn, sd, bits),
            t: RealValue::from_ratio(tn, td, bits),
        }
    }

    pub fn critical(t: f64) -> Self {
        Self::new(0.5, t)
    }

    /// `1 − s`.
    pub fn reflect(&self) -> Self {
        let bits = self.sigma.0.precision().unwrap_or(64).max(64) + 64;
        let m = crate::mp::Mp::new(bits);
        ComplexArg { sigma: RealValue(m.sub(&m.one(), &self.sigma.0)), t: RealValue(self.t.0.neg()) }
    }
}

/// θ(t) on the continuous branch with θ(0) = 0.
#[derive(Debug, Clone)]
pub struct ThetaPhase {
    pub t: RealValue,
    pub theta: RealValue,
}

pub fn eval_zeta(s: &ComplexArg, ctx: PrecisionContext) -> Result<ComplexValue> {
    Evaluator::new(ctx).zeta(s)
}

pub fn eval_chi(s: &ComplexArg, ctx: PrecisionContext) -> Result<ComplexValue> {
    Evaluator::new(ctx).chi(s)
}

pub fn eval_theta(t: f64, ctx: PrecisionContext) -> Result<ThetaPhase> {
    Evaluator::new(ctx).theta(&RealValue::from_f64(t))
}

#[allow(non_snake_case)]
pub fn eval_Z(t: f64, ctx: PrecisionContext) -> Result<RealValue> {
    Evaluator::new(ctx).z(&RealValue::from_f64(t))
}

pub fn eval_chi_power(t: f64, alpha: f64, ctx: PrecisionContext) -> Result<ComplexValue> {
    Evaluator::new(ctx).chi_power(&RealValue::from_f64(t), &RealValue::from_f64(alpha))
}
