//! γ, γ₁, π and log 2π to a requested precision.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use astro_float::BigFloat;

use super::bernoulli::BernoulliCache;
use crate::mp::{Mp, RealValue};
use crate::precision::PrecisionContext;

/// Euler's constant by the Brent–McMillan algorithm B1:
/// `γ ≈ U/V` with `U = Σ (n^k/k!)² (H_k − ln n)`, `V = Σ (n^k/k!)²`,
/// truncation error about `π e^{-4n}`.
pub fn euler_gamma(bits: usize) -> BigFloat {
    let n = (((bits + 8) as f64) * LN_2 / 4.0).ceil() as i64 + 2;
    // U and V reach e^{2n}: carry enough extra bits to keep the quotient exact
    let m = Mp::new(bits + 32 + (3.0 * n as f64 / LN_2) as usize);
    let nn = m.int(n * n);
    let mut a = m.ln(&m.int(n)).neg();
    let mut b = m.one();
    let mut u = a.clone();
    let mut v = b.clone();
    let stop = crate::mp::pow2(-((m.prec() as i32) + 4));
    let mut k = 1i64;
    loop {
        let kk = m.int(k);
        b = m.div(&m.mul(&b, &nn), &m.mul(&kk, &kk));
        a = m.div(&m.add(&m.div(&m.mul(&a, &nn), &kk), &b), &kk);
        u = m.add(&u, &a);
        v = m.add(&v, &b);
        let rb = crate::mp::to_f64(&m.div(&b, &v));
        let ra = crate::mp::to_f64(&m.div(&a, &v)).abs();
        if k > n && rb < stop && ra < stop {
            break;
        }
        k += 1;
    }
    m.div(&u, &v)
}

/// Stieltjes constant γ_n in the convention
/// `ζ(s) = 1/(s-1) + Σ (-1)^n γ_n (s-1)^n / n!` (so γ_0 = γ and γ_1 ≈ -0.0728).
///
/// Euler–Maclaurin applied to `f(x) = (ln x)^n / x`:
/// `γ_n = Σ_{k≤N} f(k) − (ln N)^{n+1}/(n+1) − f(N)/2 − Σ_j B_{2j}/(2j)! f^{(2j-1)}(N)`.
pub fn stieltjes(order: u32, bits: usize) -> BigFloat {
    let n_cut = ((bits as f64 + 16.0) * LN_2 / (2.0 * core::f64::consts::PI)).ceil() as i64 + 8;
    let m = Mp::new(bits + 64);
    let nn = m.int(n_cut);
    let order = order as usize;

    let mut g = m.zero();
    for k in 2..=n_cut {
        let kk = m.int(k);
        let l = m.ln(&kk);
        g = m.add(&g, &m.div(&powi(&m, &l, order), &kk));
    }
    if order == 0 {
        g = m.add(&g, &m.one());
    }
    let ln_n = m.ln(&nn);
    g = m.sub(&g, &m.div(&powi(&m, &ln_n, order + 1), &m.int(order as i64 + 1)));
    let f_n = m.div(&powi(&m, &ln_n, order), &nn);
    g = m.sub(&g, &m.mul_f64(&f_n, 0.5));

    // f^{(j)}(x) = x^{-1-j} P_j(ln x), P_0 = L^n, P_{j+1} = P_j' − (j+1) P_j
    let mut poly: Vec<BigFloat> = (0..=order).map(|i| if i == order { m.one() } else { m.zero() }).collect();
    let inv_n = m.div(&m.one(), &nn);
    let mut xpow = inv_n.clone(); // N^{-1-j}
    let mut bern = BernoulliCache::new();
    let terms = (core::f64::consts::PI * n_cut as f64).floor() as usize;
    let coeffs = bern.em(terms, &m).to_vec();
    let target = crate::mp::pow2(-(bits as i32) - 16);
    let mut j = 0usize;
    for (idx, b) in coeffs.iter().enumerate() {
        let want = 2 * idx + 1;
        while j < want {
            poly = derive(&m, &poly, j);
            xpow = m.mul(&xpow, &inv_n);
            j += 1;
        }
        let deriv = m.mul(&xpow, &horner(&m, &poly, &ln_n));
        let term = m.mul(b, &deriv);
        g = m.sub(&g, &term);
        if crate::mp::to_f64(&term).abs() < target {
            break;
        }
    }
    g
}

fn powi(m: &Mp, x: &BigFloat, n: usize) -> BigFloat {
    let mut r = m.one();
    for _ in 0..n {
        r = m.mul(&r, x);
    }
    r
}

fn horner(m: &Mp, c: &[BigFloat], x: &BigFloat) -> BigFloat {
    c.iter().rev().fold(m.zero(), |acc, ci| m.add(&m.mul(&acc, x), ci))
}

/// `P_{j+1} = P_j' − (j+1) P_j`.
fn derive(m: &Mp, p: &[BigFloat], j: usize) -> Vec<BigFloat> {
    let jj = m.int(j as i64 + 1);
    (0..p.len())
        .map(|i| {
            let d = if i + 1 < p.len() { m.mul(&p[i + 1], &m.int(i as i64 + 1)) } else { m.zero() };
            m.sub(&d, &m.mul(&p[i], &jj))
        })
        .collect()
}

/// Constants used by the main-term formulas.
///
/// `stieltjes_1` is the standard γ₁ (negative). The Laurent coefficient of
/// `(s-1)` in ζ(s) is `-γ₁`.
#[derive(Debug, Clone)]
pub struct Constants {
    pub euler_gamma: RealValue,
    pub stieltjes_1: RealValue,
    pub pi: RealValue,
    pub log_2pi: RealValue,
}

impl Constants {
    pub fn compute(ctx: PrecisionContext) -> Self {
        let bits = ctx.prec_bits() as usize + 32;
        let m = Mp::new(bits);
        let pi = m.pi();
        let log_2pi = m.ln(&m.mul_f64(&pi, 2.0));
        Constants {
            euler_gamma: RealValue(euler_gamma(bits)),
            stieltjes_1: RealValue(stieltjes(1, bits)),
            pi: RealValue(pi),
            log_2pi: RealValue(log_2pi),
        }
    }

    /// binary64 copies for the fast tier.
    pub fn to_f64(&self) -> ConstantsF64 {
        ConstantsF64 {
            euler_gamma: self.euler_gamma.to_f64(),
            stieltjes_1: self.stieltjes_1.to_f64(),
            pi: self.pi.to_f64(),
            log_2pi: self.log_2pi.to_f64(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsF64 {
    pub euler_gamma: f64,
    pub stieltjes_1: f64,
    pub pi: f64,
    pub log_2pi: f64,
}

impl ConstantsF64 {
    pub fn compute() -> Self {
        Constants::compute(PrecisionContext::default()).to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference digits from published tables
    const GAMMA: &str = "5.77215664901532860606512090082402431042159335939923598805767e-1";
    const GAMMA1: &str = "-7.28158454836767248605863758749013191377363383343379525990066e-2";

    fn close(x: &BigFloat, s: &str, bits: usize, tol_log2: i32) {
        let m = Mp::new(bits);
        let r = BigFloat::parse(s, astro_float::Radix::Dec, bits, crate::mp::RM, &mut astro_float::Consts::new().unwrap());
        let d = crate::mp::to_f64(&m.sub(x, &r)).abs();
        assert!(d < crate::mp::pow2(tol_log2), "{d:e}");
    }

    #[test]
    fn euler_gamma_digits() {
        close(&euler_gamma(192), GAMMA, 256, -160);
    }

    #[test]
    fn stieltjes_digits() {
        close(&stieltjes(1, 192), GAMMA1, 256, -180);
        // order zero reproduces γ through an independent route
        let m = Mp::new(256);
        let d = m.sub(&stieltjes(0, 192), &euler_gamma(192));
        assert!(crate::mp::to_f64(&d).abs() < crate::mp::pow2(-180));
    }
}
