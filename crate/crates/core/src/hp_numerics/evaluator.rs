use alloc::vec::Vec;
use core::f64::consts::LN_2;

use astro_float::BigFloat;
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use super::bernoulli::{ln_abs_em_coeff_bound, BernoulliCache};
use super::gamma::ln_gamma;
use super::{ComplexArg, ThetaPhase};
use crate::error::{Error, Result};
use crate::mp::{to_f64, ComplexValue, Mp, RealValue};
use crate::precision::PrecisionContext;

/// Largest |t| accepted by the arbitrary-precision evaluators.
pub const T_MAX: f64 = 1.0e7;
const N_CAP: usize = 20_000_000;
const M_CAP: usize = 250;
/// Extra working bits on top of `prec_bits`.
const BASE_GUARD: usize = 64;

/// Euler–Maclaurin plan: `N` explicit terms and `M` Bernoulli corrections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmPlan {
    pub n: usize,
    pub m: usize,
    /// natural log of the remainder bound
    pub bound_ln: f64,
}

/// Cheapest `(N, M)` whose remainder
/// `|s(s+1)…(s+2M+1) B_{2M+2}| N^{-σ-2M-1} / ((2M+2)! (σ+2M+1))`
/// is below `exp(target_ln)`.
pub fn plan_em(sigma: f64, t: f64, target_ln: f64) -> Option<EmPlan> {
    let mut best: Option<(f64, EmPlan)> = None;
    let factor_ln = |j: usize| 0.5 * ((sigma + j as f64).powi(2) + t * t).ln();
    let mut prod_ln = factor_ln(0) + factor_ln(1);
    for m in 1..=M_CAP {
        prod_ln += factor_ln(2 * m) + factor_ln(2 * m + 1);
        let d = sigma + (2 * m + 1) as f64;
        if d <= 0.5 {
            continue;
        }
        let num = prod_ln + ln_abs_em_coeff_bound(m + 1) - d.ln();
        let ln_n = (num - target_ln) / d;
        if ln_n > (N_CAP as f64).ln() {
            continue;
        }
        let n = (ln_n.exp().ceil() as usize).max(2);
        let bound_ln = num - d * (n as f64).ln();
        let nf = n as f64;
        let cost = nf + 40.0 * nf / (nf + 1.0).ln() + 4.0 * m as f64;
        if best.is_none_or(|(c, _)| cost < c) {
            best = Some((cost, EmPlan { n, m, bound_ln }));
        }
    }
    best.map(|(_, p)| p)
}

/// Stateful arbitrary-precision evaluator.
///
/// Holds Bernoulli tables, a smallest-prime-factor sieve and cached prime
/// logarithms at its working precision, so repeated evaluations are much
/// cheaper than the free functions in the parent module.
#[derive(Debug)]
pub struct Evaluator {
    ctx: PrecisionContext,
    m: Mp,
    bern: BernoulliCache,
    spf: Vec<u32>,
    ln_p: Vec<Option<BigFloat>>,
    ln_pi: BigFloat,
    /// Wider evaluator kept for arguments whose cancellation exceeds the guard bits.
    wide: Option<alloc::boxed::Box<Evaluator>>,
}

impl Evaluator {
    pub fn new(ctx: PrecisionContext) -> Self {
        Self::with_work_bits(ctx, ctx.prec_bits() as usize + BASE_GUARD)
    }

    fn with_work_bits(ctx: PrecisionContext, bits: usize) -> Self {
        let m = Mp::new(bits);
        let ln_pi = m.ln(&m.pi());
        Evaluator { ctx, m, bern: BernoulliCache::new(), spf: Vec::new(), ln_p: Vec::new(), ln_pi, wide: None }
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    /// Working-precision context used internally.
    pub fn mp(&self) -> &Mp {
        &self.m
    }

    fn ensure_sieve(&mut self, n: usize) {
        if self.spf.len() > n {
            return;
        }
        let len = (n + 1).max(2 * self.spf.len()).max(1024);
        let mut spf = alloc::vec![0u32; len];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..len {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            for &p in &primes {
                let q = p as usize * i;
                if p > spf[i] || q >= len {
                    break;
                }
                spf[q] = p;
            }
        }
        self.spf = spf;
        self.ln_p.resize(len, None);
    }

    fn ln_prime(&mut self, p: usize) -> BigFloat {
        if let Some(v) = &self.ln_p[p] {
            return v.clone();
        }
        let v = self.m.ln(&self.m.int(p as i64));
        self.ln_p[p] = Some(v.clone());
        v
    }

    /// `n^{-s}` for `n = 0..=n_max` (index 0 holds zero), built multiplicatively
    /// from prime powers.
    pub fn powers(&mut self, s: &ComplexValue, n_max: usize) -> Vec<ComplexValue> {
        self.ensure_sieve(n_max);
        let half = s.re.cmp(&self.m.f(0.5)) == Some(0);
        let zero_re = s.re.is_zero();
        let zero = self.m.complex(0.0, 0.0);
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(zero);
        if n_max == 0 {
            return out;
        }
        out.push(self.m.complex(1.0, 0.0));
        for k in 2..=n_max {
            let p = self.spf[k] as usize;
            let v = if p == k {
                let lp = self.ln_prime(p);
                let m = &self.m;
                let amp = if half {
                    m.div(&m.one(), &m.sqrt(&m.int(p as i64)))
                } else if zero_re {
                    m.one()
                } else {
                    m.exp(&m.mul(&s.re, &lp).neg())
                };
                let ph = m.mul(&s.im, &lp);
                ComplexValue::new(m.mul(&amp, &m.cos(&ph)), m.mul(&amp, &m.sin(&ph)).neg())
            } else {
                self.m.cmul(&out[p], &out[k / p])
            };
            out.push(v);
        }
        out
    }

    fn check_t(t: f64) -> Result<()> {
        if !t.is_finite() || t.abs() > T_MAX {
            return Err(Error::DomainError(alloc::format!("|t| = {t} exceeds {T_MAX}")));
        }
        Ok(())
    }

    /// ζ(s) by Euler–Maclaurin summation with a bounded remainder.
    pub fn zeta(&mut self, s: &ComplexArg) -> Result<ComplexValue> {
        let sigma = s.sigma.to_f64();
        let t = s.t.to_f64();
        Self::check_t(t)?;
        if !sigma.is_finite() {
            return Err(Error::DomainError(alloc::format!("sigma = {sigma}")));
        }
        if s.t.0.is_zero() && s.sigma.0.cmp(&self.m.one()) == Some(0) {
            return Err(Error::PoleAtOne);
        }
        let prec = self.ctx.prec_bits() as f64;
        let target_ln = -(prec + 4.0) * LN_2;
        let plan = plan_em(sigma, t, target_ln).ok_or_else(|| {
            Error::PrecisionExhausted(alloc::format!(
                "no Euler–Maclaurin plan for s = {sigma}+{t}i at {prec} bits"
            ))
        })?;
        let nf = plan.n as f64;
        // cancellation in the partial sum and phase growth of t ln n
        let need = prec
            + 40.0
            + (1.0 + t.abs()).log2()
            + (1.0 + (0.5 - sigma).max(0.0)) * (nf + 1.0).log2()
            + (1.0 + sigma.abs()).log2();
        let need = need.ceil() as usize;
        if need > self.m.prec() {
            if self.wide.as_ref().is_none_or(|w| w.m.prec() < need) {
                let bits = need.next_multiple_of(64);
                self.wide = Some(alloc::boxed::Box::new(Evaluator::with_work_bits(self.ctx, bits)));
            }
            let wide = self.wide.as_mut().unwrap();
            return Ok(wide.zeta_em(s, plan));
        }
        Ok(self.zeta_em(s, plan))
    }

    fn zeta_em(&mut self, s: &ComplexArg, plan: EmPlan) -> ComplexValue {
        let sc = ComplexValue::new(self.m.round(&s.sigma.0), self.m.round(&s.t.0));
        let n = plan.n;
        let pw = self.powers(&sc, n);
        let m = &self.m;
        let mut sum = m.complex(0.0, 0.0);
        for v in &pw[1..n] {
            sum = m.cadd(&sum, v);
        }
        let pn = &pw[n];
        let nn = m.int(n as i64);
        sum = m.cadd(&sum, &m.cscale(pn, &m.f(0.5)));
        let s_minus_1 = ComplexValue::new(m.sub(&sc.re, &m.one()), sc.im.clone());
        sum = m.cadd(&sum, &m.cdiv(&m.cscale(pn, &nn), &s_minus_1));

        let coeffs = self.bern.em(plan.m, m).to_vec();
        let inv_n = m.div(&m.one(), &nn);
        let inv_n2 = m.mul(&inv_n, &inv_n);
        let mut fac = sc.clone();
        let mut npow = m.cscale(pn, &inv_n);
        for (i, b) in coeffs.iter().enumerate() {
            let k = (i + 1) as i64;
            let term = m.cscale(&m.cmul(&fac, &npow), b);
            sum = m.cadd(&sum, &term);
            let a1 = ComplexValue::new(m.add(&sc.re, &m.int(2 * k - 1)), sc.im.clone());
            let a2 = ComplexValue::new(m.add(&sc.re, &m.int(2 * k)), sc.im.clone());
            fac = m.cmul(&m.cmul(&fac, &a1), &a2);
            npow = m.cscale(&npow, &inv_n2);
        }
        sum
    }

    pub fn ln_gamma(&mut self, z: &ComplexValue) -> Result<ComplexValue> {
        ln_gamma(z, &self.m, &mut self.bern)
    }

    /// χ(s) = π^{s-1/2} Γ((1-s)/2) / Γ(s/2), evaluated through lnΓ.
    pub fn chi(&mut self, s: &ComplexArg) -> Result<ComplexValue> {
        let sigma = s.sigma.to_f64();
        let t = s.t.to_f64();
        Self::check_t(t)?;
        if s.t.0.is_zero() && sigma == sigma.round() {
            if sigma <= 0.0 && (sigma as i64) % 2 == 0 {
                return Ok(self.m.complex(0.0, 0.0));
            }
            if sigma >= 1.0 && (sigma as i64) % 2 == 1 {
                return Err(Error::Pole);
            }
        }
        let m = &self.m;
        let half = m.f(0.5);
        let sc = ComplexValue::new(m.round(&s.sigma.0), m.round(&s.t.0));
        let a = ComplexValue::new(m.mul(&m.sub(&m.one(), &sc.re), &half), m.mul(&sc.im, &half).neg());
        let b = ComplexValue::new(m.mul(&sc.re, &half), m.mul(&sc.im, &half));
        let la = self.ln_gamma(&a)?;
        let lb = self.ln_gamma(&b)?;
        let m = &self.m;
        let mut e = m.csub(&la, &lb);
        e.re = m.add(&e.re, &m.mul(&m.sub(&sc.re, &half), &self.ln_pi));
        e.im = m.add(&e.im, &m.mul(&sc.im, &self.ln_pi));
        Ok(m.cexp(&e))
    }

    /// θ(t) = Im lnΓ(1/4 + it/2) − (t/2) log π, continuous with θ(0) = 0.
    pub fn theta(&mut self, t: &RealValue) -> Result<ThetaPhase> {
        let tf = t.to_f64();
        Self::check_t(tf)?;
        if tf < 0.0 {
            return Err(Error::DomainError(alloc::format!("theta needs t >= 0, got {tf}")));
        }
        let v = self.theta_bf(&t.0)?;
        Ok(ThetaPhase { t: t.clone(), theta: RealValue(v) })
    }

    fn theta_bf(&mut self, t: &BigFloat) -> Result<BigFloat> {
        let m = &self.m;
        let half_t = m.mul(&m.round(t), &m.f(0.5));
        let z = ComplexValue::new(m.f(0.25), half_t.clone());
        let lg = self.ln_gamma(&z)?;
        let m = &self.m;
        Ok(m.sub(&lg.im, &m.mul(&half_t, &self.ln_pi)))
    }

    /// Z(t) = e^{iθ(t)} ζ(1/2 + it), even in t.
    pub fn z(&mut self, t: &RealValue) -> Result<RealValue> {
        let (z, _) = self.z_with_residue(t)?;
        Ok(z)
    }

    /// Z(t) together with the discarded imaginary part.
    pub fn z_with_residue(&mut self, t: &RealValue) -> Result<(RealValue, f64)> {
        let ta = RealValue(t.0.abs());
        let tf = ta.to_f64();
        Self::check_t(tf)?;
        let s = ComplexArg { sigma: RealValue::from_f64(0.5), t: ta.clone() };
        let zeta = self.zeta(&s)?;
        let th = self.theta_bf(&ta.0)?;
        let m = &self.m;
        let rot = m.cmul(&m.cis(&th), &zeta);
        let residue = to_f64(&rot.im).abs();
        let tol = 100.0 * self.ctx.eps() * (1.0 + tf);
        if residue > tol {
            return Err(Error::ImaginaryResidueTooLarge { residue, tol });
        }
        Ok((RealValue(rot.re), residue))
    }

    /// χ^α(1/2+it) on the branch e^{-2iαθ(t)}.
    pub fn chi_power(&mut self, t: &RealValue, alpha: &RealValue) -> Result<ComplexValue> {
        let tf = t.to_f64();
        Self::check_t(tf)?;
        if tf < 0.0 {
            return Err(Error::DomainError(alloc::format!("chi_power needs t >= 0, got {tf}")));
        }
        if alpha.0.is_zero() {
            return Ok(self.m.complex(1.0, 0.0));
        }
        let th = self.theta_bf(&t.0)?;
        let m = &self.m;
        let ph = m.mul(&m.mul(&th, &m.round(&alpha.0)), &m.f(-2.0));
        Ok(m.cis(&ph))
    }
}
