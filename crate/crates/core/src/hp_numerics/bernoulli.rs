//! Even-index Bernoulli numbers from tangent numbers.
//!
//! `B_{2k} = (-1)^{k-1} 2k T_k / (4^k (4^k - 1))` with the tangent numbers
//! `T_k` produced by the in-place recurrence of Brent and Harvey, which only
//! needs nonnegative integer arithmetic.

use alloc::vec::Vec;

use astro_float::BigFloat;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::mp::Mp;

/// `T_1, ..., T_n` (so `T_1 = 1, T_2 = 2, T_3 = 16, ...`).
pub fn tangent_numbers(n: usize) -> Vec<BigUint> {
    let mut t: Vec<BigUint> = Vec::with_capacity(n);
    if n == 0 {
        return t;
    }
    t.push(BigUint::one());
    for k in 2..=n {
        let prev = &t[k - 2] * BigUint::from(k - 1);
        t.push(prev);
    }
    for k in 2..=n {
        for j in k..=n {
            let v = &t[j - 2] * BigUint::from(j - k) + &t[j - 1] * BigUint::from(j - k + 2);
            t[j - 1] = v;
        }
    }
    t
}

/// `B_{2k}` as `(negative, |numerator|, denominator)`, not reduced.
pub fn bernoulli_even(k: usize, tangent: &[BigUint]) -> (bool, BigUint, BigUint) {
    assert!(k >= 1 && k <= tangent.len());
    let four_k = BigUint::one() << (2 * k);
    let num = &tangent[k - 1] * BigUint::from(2 * k);
    let den = &four_k * (&four_k - BigUint::one());
    (k.is_multiple_of(2), num, den)
}

pub(crate) fn big_to_bf(x: &BigUint, m: &Mp) -> BigFloat {
    if x.is_zero() {
        return m.zero();
    }
    if let Some(v) = x.to_u64() {
        return BigFloat::from_u64(v, m.prec());
    }
    let radix = m.f(18446744073709551616.0);
    let mut acc = m.zero();
    for d in x.to_u64_digits().iter().rev() {
        acc = m.add(&m.mul(&acc, &radix), &BigFloat::from_u64(*d, m.prec()));
    }
    acc
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |a, i| a * BigUint::from(i))
}

/// Growable tables of the two Bernoulli-derived coefficient families.
///
/// `em[k-1] = B_{2k}/(2k)!` (Euler–Maclaurin) and
/// `stirling[k-1] = B_{2k}/(2k(2k-1))` (Stirling series for lnΓ).
#[derive(Debug, Default)]
pub struct BernoulliCache {
    tangent: Vec<BigUint>,
    em: Vec<BigFloat>,
    stirling: Vec<BigFloat>,
    prec: usize,
}

impl BernoulliCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn ensure(&mut self, n: usize, m: &Mp) {
        if self.prec != m.prec() {
            self.em.clear();
            self.stirling.clear();
            self.prec = m.prec();
        }
        if self.tangent.len() < n {
            // recurrence is quadratic in n, rebuild with headroom
            self.tangent = tangent_numbers(n.max(2 * self.tangent.len()).max(32));
        }
        let mut fact = factorial(2 * self.em.len() + 1);
        while self.em.len() < n {
            let k = self.em.len() + 1;
            // fact = (2k-1)!
            let four_k = BigUint::one() << (2 * k);
            let tk = big_to_bf(&self.tangent[k - 1], m);
            let den_em = big_to_bf(&(&four_k * (&four_k - BigUint::one()) * &fact), m);
            let den_st = big_to_bf(
                &(&four_k * (&four_k - BigUint::one()) * BigUint::from(2 * k - 1)),
                m,
            );
            let mut e = m.div(&tk, &den_em);
            let mut s = m.div(&tk, &den_st);
            if k.is_multiple_of(2) {
                e = e.neg();
                s = s.neg();
            }
            self.em.push(e);
            self.stirling.push(s);
            fact *= BigUint::from(2 * k) * BigUint::from(2 * k + 1);
        }
    }

    pub fn em(&mut self, n: usize, m: &Mp) -> &[BigFloat] {
        self.ensure(n, m);
        &self.em[..n]
    }

    pub fn stirling(&mut self, n: usize, m: &Mp) -> &[BigFloat] {
        self.ensure(n, m);
        &self.stirling[..n]
    }
}

/// `ln |B_{2k}/(2k)!|`, upper bound from `2ζ(2k)/(2π)^{2k}` with `ζ(2k) ≤ ζ(2)`.
pub(crate) fn ln_abs_em_coeff_bound(k: usize) -> f64 {
    let z = if k == 1 { 1.6449340668482264 } else { 1.0 + 2.0 * crate::mp::pow2(-(2 * k as i32)) + 1e-12 };
    (2.0 * z).ln() - (2 * k) as f64 * (2.0 * core::f64::consts::PI).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_tangent_numbers() {
        let t = tangent_numbers(6);
        let want = [1u64, 2, 16, 272, 7936, 353792];
        for (a, b) in t.iter().zip(want) {
            assert_eq!(a.to_u64().unwrap(), b);
        }
    }

    #[test]
    fn bernoulli_small() {
        let t = tangent_numbers(8);
        // B_2 = 1/6, B_4 = -1/30, B_12 = -691/2730
        for &(k, neg, n, d) in &[(1usize, false, 1u64, 6u64), (2, true, 1, 30), (6, true, 691, 2730), (7, false, 7, 6)] {
            let (s, num, den) = bernoulli_even(k, &t);
            assert_eq!(s, neg, "sign of B_{}", 2 * k);
            assert_eq!(num * BigUint::from(d), den * BigUint::from(n), "B_{}", 2 * k);
        }
    }

    #[test]
    fn em_coefficients() {
        let m = Mp::new(128);
        let mut c = BernoulliCache::new();
        let e = c.em(3, &m).to_vec();
        let s = c.stirling(3, &m).to_vec();
        let f = |x: &BigFloat| crate::mp::to_f64(x);
        assert!((f(&e[0]) - 1.0 / 12.0).abs() < 1e-17);
        assert!((f(&e[1]) + 1.0 / 720.0).abs() < 1e-19);
        assert!((f(&e[2]) - 1.0 / 30240.0).abs() < 1e-21);
        assert!((f(&s[0]) - 1.0 / 12.0).abs() < 1e-17);
        assert!((f(&s[1]) + 1.0 / 360.0).abs() < 1e-18);
        assert!((f(&s[2]) - 1.0 / 1260.0).abs() < 1e-18);
        for k in 1..40 {
            let v = f(&c.em(k, &m)[k - 1]).abs().ln();
            assert!(v <= ln_abs_em_coeff_bound(k) + 1e-9, "k={k}");
        }
    }
}
