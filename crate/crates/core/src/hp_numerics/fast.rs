//! Binary64 evaluation of θ(t), Z(t) and ζ(1/2+it) for quadrature.
//!
//! Below [`RS_THRESHOLD`] ζ(1/2+it) comes from Euler–Maclaurin in binary64.
//! Above it Z(t) comes from the Riemann–Siegel formula with corrections
//! `C_0..C_4`, whose Taylor coefficients in `p − 1/2` are generated once in
//! multiprecision from `Ψ(p) = cos(2π(p² − p − 1/16)) / cos(2πp)`.
//! The arbitrary-precision evaluator is the reference for both regimes.

use alloc::vec::Vec;
use core::f64::consts::PI;

use astro_float::BigFloat;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use super::bernoulli::BernoulliCache;
use crate::mp::{to_f64, Mp};

/// t at and above which Riemann–Siegel replaces Euler–Maclaurin.
pub const RS_THRESHOLD: f64 = 300.0;
const EM_TERMS: usize = 24;
const SERIES_DEG: usize = 72;

/// Coefficients of `C_j(p) = Σ c_{j,i} (p − 1/2)^i`, `j = 0..=4`.
#[derive(Debug, Clone)]
pub struct RsCoefficients {
    pub c: [Vec<f64>; 5],
}

impl RsCoefficients {
    pub fn compute() -> Self {
        let m = Mp::new(640);
        let pi = m.pi();
        let two_pi = m.mul_f64(&pi, 2.0);
        let d = SERIES_DEG + 12;
        let fact: Vec<BigFloat> = {
            let mut f = Vec::with_capacity(d + 1);
            f.push(m.one());
            for i in 1..=d {
                let v = m.mul(&f[i - 1], &m.int(i as i64));
                f.push(v);
            }
            f
        };
        // cos(2πx) = Σ (-1)^k (2π)^{2k} x^{2k} / (2k)!
        let mut den = alloc::vec![m.zero(); d + 1];
        let mut tp = m.one();
        for i in 0..=d {
            if i % 2 == 0 {
                let v = m.div(&tp, &fact[i]);
                den[i] = if (i / 2) % 2 == 1 { v.neg() } else { v };
            }
            tp = m.mul(&tp, &two_pi);
        }
        // numerator −cos(2πx² − 5π/8) = −cos(5π/8) cos(2πx²) − sin(5π/8) sin(2πx²)
        let ang = m.mul_f64(&pi, 0.625);
        let (ca, sa) = (m.cos(&ang), m.sin(&ang));
        let mut num = alloc::vec![m.zero(); d + 1];
        let mut tp = m.one();
        for k in 0..=d / 2 {
            let v = m.div(&tp, &fact[k]);
            let v = if (k / 2) % 2 == 1 { v.neg() } else { v };
            let coef = if k % 2 == 0 { m.mul(&ca, &v) } else { m.mul(&sa, &v) };
            num[2 * k] = coef.neg();
            tp = m.mul(&tp, &two_pi);
        }
        // series division q = num / den
        let mut q: Vec<BigFloat> = Vec::with_capacity(d + 1);
        for n in 0..=d {
            let mut acc = num[n].clone();
            for j in 1..=n {
                if !den[j].is_zero() {
                    acc = m.sub(&acc, &m.mul(&den[j], &q[n - j]));
                }
            }
            q.push(m.div(&acc, &den[0]));
        }
        let deriv = |r: usize| -> Vec<BigFloat> {
            (0..=SERIES_DEG).map(|i| m.mul(&q[i + r], &m.div(&fact[i + r], &fact[i]))).collect()
        };
        let pi2 = m.mul(&pi, &pi);
        let pi4 = m.mul(&pi2, &pi2);
        let pi6 = m.mul(&pi4, &pi2);
        let pi8 = m.mul(&pi4, &pi4);
        let comb = |terms: &[(usize, f64, &BigFloat)]| -> Vec<f64> {
            let mut out = alloc::vec![m.zero(); SERIES_DEG + 1];
            for &(r, w, p) in terms {
                let dr = deriv(r);
                let scale = m.div(&m.f(w), p);
                for i in 0..=SERIES_DEG {
                    out[i] = m.add(&out[i], &m.mul(&dr[i], &scale));
                }
            }
            out.iter().map(to_f64).collect()
        };
        let one = m.one();
        let c0 = comb(&[(0, 1.0, &one)]);
        let c1 = comb(&[(3, -1.0 / 96.0, &pi2)]);
        let c2 = comb(&[(2, 1.0 / 64.0, &pi2), (6, 1.0 / 18432.0, &pi4)]);
        let c3 = comb(&[(1, -1.0 / 64.0, &pi2), (5, -1.0 / 3840.0, &pi4), (9, -1.0 / 5308416.0, &pi6)]);
        let c4 = comb(&[
            (0, 1.0 / 128.0, &pi2),
            (4, 19.0 / 24576.0, &pi4),
            (8, 11.0 / 5898240.0, &pi6),
            (12, 1.0 / 2038431744.0, &pi8),
        ]);
        let trim = |mut v: Vec<f64>| {
            while v.len() > 1 && v.last().is_some_and(|c| c.abs() * 0.5f64.powi(v.len() as i32 - 1) < 1e-22) {
                v.pop();
            }
            v
        };
        RsCoefficients { c: [trim(c0), trim(c1), trim(c2), trim(c3), trim(c4)] }
    }

    pub fn eval(&self, j: usize, p: f64) -> f64 {
        let x = p - 0.5;
        self.c[j].iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// θ(t) in binary64: asymptotic series for t ≥ 40, Stirling with shift below.
pub fn theta(t: f64) -> f64 {
    let t = t.abs();
    if t >= 40.0 {
        let it = 1.0 / t;
        let it2 = it * it;
        0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0
            + it * (1.0 / 48.0
                + it2 * (7.0 / 5760.0 + it2 * (31.0 / 80640.0 + it2 * (127.0 / 430080.0 + it2 * (511.0 / 1216512.0)))))
    } else {
        ln_gamma_c64(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln()
    }
}

/// Principal lnΓ in binary64 (Stirling after shifting to Re z ≥ 16).
pub fn ln_gamma_c64(z: Complex64) -> Complex64 {
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut arg_sum = 0.0;
    while w.re < 16.0 {
        prod *= w;
        arg_sum += w.im.atan2(w.re);
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pw = inv;
    for c in C {
        series += pw * c;
        pw *= inv2;
    }
    let mut s = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series;
    if arg_sum != 0.0 {
        let mut lp = prod.ln();
        lp.im += ((arg_sum - lp.im) / (2.0 * PI)).round() * 2.0 * PI;
        s -= lp;
    }
    s
}

/// Binary64 critical-line evaluator.
#[derive(Debug, Clone)]
pub struct CriticalLine {
    rs: RsCoefficients,
    em: [f64; EM_TERMS],
    /// `n^{-1/2}` and `ln n` for the Riemann–Siegel main sum
    rsqrt: Vec<f64>,
    ln_n: Vec<f64>,
}

impl Default for CriticalLine {
    fn default() -> Self {
        Self::new()
    }
}

impl CriticalLine {
    pub fn new() -> Self {
        let m = Mp::new(128);
        let mut b = BernoulliCache::new();
        let mut em = [0.0; EM_TERMS];
        for (e, c) in em.iter_mut().zip(b.em(EM_TERMS, &m)) {
            *e = to_f64(c);
        }
        CriticalLine { rs: RsCoefficients::compute(), em, rsqrt: Vec::new(), ln_n: Vec::new() }
    }

    /// Prepares the main-sum tables up to `t_max` so evaluation needs `&self` only.
    pub fn with_t_max(mut self, t_max: f64) -> Self {
        let n = (t_max / (2.0 * PI)).sqrt().floor() as usize + 2;
        self.rsqrt = (0..=n).map(|k| if k == 0 { 0.0 } else { 1.0 / (k as f64).sqrt() }).collect();
        self.ln_n = (0..=n).map(|k| if k == 0 { 0.0 } else { (k as f64).ln() }).collect();
        self
    }

    pub fn rs_coefficients(&self) -> &RsCoefficients {
        &self.rs
    }

    pub fn theta(&self, t: f64) -> f64 {
        theta(t)
    }

    /// ζ(1/2+it) by binary64 Euler–Maclaurin, `N ≈ t/π`.
    pub fn zeta_em(&self, t: f64) -> Complex64 {
        let s = Complex64::new(0.5, t);
        let n = (t.abs() / PI).floor() as usize + 16;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut comp = Complex64::new(0.0, 0.0);
        for k in 1..n {
            let lk = (k as f64).ln();
            let v = Complex64::from_polar(1.0 / (k as f64).sqrt(), -t * lk);
            let y = v - comp;
            let tt = sum + y;
            comp = (tt - sum) - y;
            sum = tt;
        }
        let nf = n as f64;
        let pn = Complex64::from_polar(1.0 / nf.sqrt(), -t * nf.ln());
        sum += pn * 0.5 + pn * nf / (s - 1.0);
        let mut fac = s;
        let mut npow = pn / nf;
        let inv2 = 1.0 / (nf * nf);
        for (i, b) in self.em.iter().enumerate() {
            let k = (i + 1) as f64;
            sum += fac * npow * *b;
            fac = fac * (s + (2.0 * k - 1.0)) * (s + 2.0 * k);
            npow *= inv2;
        }
        sum
    }

    /// Riemann–Siegel Z(t), `t ≥ RS_THRESHOLD`.
    pub fn z_rs(&self, t: f64, th: f64) -> f64 {
        let tau = (t / (2.0 * PI)).sqrt();
        let n = tau.floor() as usize;
        let p = tau - n as f64;
        let mut sum = 0.0;
        if n < self.ln_n.len() {
            for k in 1..=n {
                sum += self.rsqrt[k] * (th - t * self.ln_n[k]).cos();
            }
        } else {
            for k in 1..=n {
                let kf = k as f64;
                sum += (th - t * kf.ln()).cos() / kf.sqrt();
            }
        }
        let inv = 1.0 / tau;
        let mut corr = 0.0;
        for j in (0..5).rev() {
            corr = corr * inv + self.rs.eval(j, p);
        }
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        2.0 * sum + sign * corr / tau.sqrt()
    }

    /// `(Z(t), θ(t))`, even in t.
    pub fn z_theta(&self, t: f64) -> (f64, f64) {
        let t = t.abs();
        let th = theta(t);
        if t >= RS_THRESHOLD {
            (self.z_rs(t, th), th)
        } else {
            let z = self.zeta_em(t) * Complex64::from_polar(1.0, th);
            (z.re, th)
        }
    }

    pub fn z(&self, t: f64) -> f64 {
        self.z_theta(t).0
    }

    /// ζ(1/2+it) = e^{-iθ(t)} Z(t).
    pub fn zeta(&self, t: f64) -> Complex64 {
        let (z, th) = self.z_theta(t);
        Complex64::from_polar(z, -th)
    }
}
