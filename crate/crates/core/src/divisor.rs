//! d(n) and d₃(n) tables with prefix sums and the summatory main terms.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hp_numerics::ConstantsF64;

/// Largest table `build_table` accepts.
pub const MAX_LIMIT: u64 = 100_000_000;

/// `exact`, the main term, and `exact − main`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summatory<E> {
    pub exact: E,
    pub main: f64,
    pub residual: f64,
}

/// Sieved d and d₃ up to `limit` with prefix sums for O(1) range queries.
#[derive(Debug, Clone)]
pub struct DivisorTable {
    limit: u64,
    d: Vec<u32>,
    d3: Vec<u32>,
    pre_d: Vec<u64>,
    pre_d3: Vec<u64>,
    pre_alt: Vec<i64>,
    // Σ (−1)^k d(k) √k as an unevaluated sum hi + lo
    pre_alt_sqrt: Vec<(f64, f64)>,
    consts: ConstantsF64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Linear sieve for the multiplicative pair (d, d₃).
fn sieve(n: usize) -> (Vec<u32>, Vec<u32>) {
    let mut d = vec![0u32; n + 1];
    let mut d3 = vec![0u32; n + 1];
    if n == 0 {
        return (d, d3);
    }
    // exponent of the least prime factor, and n with that prime power removed
    let mut e = vec![0u8; n + 1];
    let mut rest = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    d[1] = 1;
    d3[1] = 1;
    rest[1] = 1;
    for i in 2..=n {
        if e[i] == 0 {
            primes.push(i as u32);
            e[i] = 1;
            rest[i] = 1;
            d[i] = 2;
            d3[i] = 3;
        }
        for &p in &primes {
            let m = i * p as usize;
            if m > n {
                break;
            }
            let (ee, r) = if i % p as usize == 0 { (e[i] + 1, rest[i]) } else { (1, i as u32) };
            e[m] = ee;
            rest[m] = r;
            let a = ee as u32;
            d[m] = d[r as usize] * (a + 1);
            d3[m] = d3[r as usize] * ((a + 1) * (a + 2) / 2);
            if i % p as usize == 0 {
                break;
            }
        }
    }
    (d, d3)
}

/// `Σ_{n≤x} d(n)` by the hyperbola method, independent of any table.
pub fn divisor_sum_hyperbola(x: u64) -> u64 {
    let r = isqrt(x);
    2 * (1..=r).map(|a| x / a).sum::<u64>() - r * r
}

pub fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// Sieve d and d₃ up to `n_max`.
pub fn build_table(n_max: u64) -> Result<DivisorTable> {
    if n_max > MAX_LIMIT {
        return Err(Error::CapacityExceeded { requested: n_max, limit: MAX_LIMIT });
    }
    let (d, d3) = sieve(n_max as usize);
    Ok(DivisorTable::assemble(n_max, d, d3))
}

impl DivisorTable {
    /// Rebuild a table from raw `d`, `d₃` arrays (index 0 unused), e.g. after
    /// loading a cache. Checks lengths and `d(1) = d₃(1) = 1`.
    pub fn from_parts(d: Vec<u32>, d3: Vec<u32>) -> Result<Self> {
        if d.len() != d3.len() || d.is_empty() {
            return Err(Error::InvalidParameter("d and d3 lengths differ".into()));
        }
        let n = d.len() as u64 - 1;
        if n > MAX_LIMIT {
            return Err(Error::CapacityExceeded { requested: n, limit: MAX_LIMIT });
        }
        if n >= 1 && (d[1] != 1 || d3[1] != 1) {
            return Err(Error::InvalidParameter("d(1) and d3(1) must be 1".into()));
        }
        Ok(Self::assemble(n, d, d3))
    }

    fn assemble(limit: u64, d: Vec<u32>, d3: Vec<u32>) -> Self {
        let n = limit as usize;
        let mut pre_d = vec![0u64; n + 1];
        let mut pre_d3 = vec![0u64; n + 1];
        let mut pre_alt = vec![0i64; n + 1];
        let mut pre_alt_sqrt = vec![(0.0, 0.0); n + 1];
        for k in 1..=n {
            pre_d[k] = pre_d[k - 1] + d[k] as u64;
            pre_d3[k] = pre_d3[k - 1] + d3[k] as u64;
            let s = if k % 2 == 1 { -1 } else { 1 };
            pre_alt[k] = pre_alt[k - 1] + s * d[k] as i64;
            let (hi, lo) = pre_alt_sqrt[k - 1];
            let (h, l) = two_sum(hi, s as f64 * d[k] as f64 * (k as f64).sqrt());
            let (h, l2) = two_sum(h, lo + l);
            pre_alt_sqrt[k] = (h, l2);
        }
        DivisorTable {
            limit,
            d,
            d3,
            pre_d,
            pre_d3,
            pre_alt,
            pre_alt_sqrt,
            consts: ConstantsF64::compute(),
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Raw `d` array, index 0 unused.
    pub fn d_values(&self) -> &[u32] {
        &self.d
    }

    pub fn d3_values(&self) -> &[u32] {
        &self.d3
    }

    pub fn constants(&self) -> &ConstantsF64 {
        &self.consts
    }

    fn check(&self, x: u64) -> Result<usize> {
        if x == 0 || x > self.limit {
            Err(Error::OutOfRange { x: x as f64, limit: self.limit })
        } else {
            Ok(x as usize)
        }
    }

    pub fn d(&self, n: u64) -> Result<u32> {
        Ok(self.d[self.check(n)?])
    }

    pub fn d3(&self, n: u64) -> Result<u32> {
        Ok(self.d3[self.check(n)?])
    }

    /// `Σ_{n≤x} d(n)`.
    pub fn sum_d(&self, x: u64) -> Result<u64> {
        Ok(self.pre_d[self.check(x)?])
    }

    /// `Σ_{k≤x} (−1)^k d(k)` against `(x/2)(log x + 2γ − 1 − 2 log 2)`.
    pub fn sum_alt_d(&self, x: u64) -> Result<Summatory<i64>> {
        let exact = self.pre_alt[self.check(x)?];
        let xf = x as f64;
        let main = 0.5 * xf * (xf.ln() + 2.0 * self.consts.euler_gamma - 1.0 - 2.0 * LN_2);
        Ok(Summatory { exact, main, residual: exact as f64 - main })
    }

    /// `Σ_{k≤x} (−1)^k d(k) √k` against `(1/3) x^{3/2}(log x + 2γ − 2 log 2 − 2/3)`.
    pub fn sum_alt_d_sqrt(&self, x: u64) -> Result<Summatory<f64>> {
        let (hi, lo) = self.pre_alt_sqrt[self.check(x)?];
        let xf = x as f64;
        let main = xf * xf.sqrt() / 3.0
            * (xf.ln() + 2.0 * self.consts.euler_gamma - 2.0 * LN_2 - 2.0 / 3.0);
        Ok(Summatory { exact: hi + lo, main, residual: (hi - main) + lo })
    }

    /// `Σ_{n≤x} d₃(n)` against `x(½ log² x + a₁ log x + a₂)`.
    pub fn sum_d3(&self, x: u64) -> Result<Summatory<u64>> {
        let exact = self.pre_d3[self.check(x)?];
        let xf = x as f64;
        let l = xf.ln();
        let (a1, a2) = d3_coefficients(&self.consts);
        let main = xf * (0.5 * l * l + a1 * l + a2);
        Ok(Summatory { exact, main, residual: exact as f64 - main })
    }

    /// `Σ_{lo≤n≤hi} d₃(n)` exactly; zero for an empty range.
    pub fn sum_d3_range(&self, lo: u64, hi: u64) -> Result<u64> {
        if lo > hi {
            return Ok(0);
        }
        let h = self.check(hi)?;
        let l = self.check(lo.max(1))?;
        Ok(self.pre_d3[h] - self.pre_d3[l - 1])
    }

    /// `Σ′_{lo≤k≤hi} (−1)^k d(k) √k`, integral endpoints halved. When
    /// `lo = hi` is an integer the single term is halved once.
    pub fn sum_alt_d_sqrt_halved(&self, lo: f64, hi: f64) -> Result<f64> {
        self.halved(lo, hi, |k| {
            let s = if k % 2 == 1 { -1.0 } else { 1.0 };
            s * self.d[k as usize] as f64 * (k as f64).sqrt()
        }, |a, b| {
            let (h1, l1) = self.pre_alt_sqrt[b as usize];
            let (h0, l0) = self.pre_alt_sqrt[a as usize - 1];
            (h1 - h0) + (l1 - l0)
        })
    }

    /// `Σ′_{lo≤k≤hi} d₃(k)` with the same endpoint convention.
    pub fn sum_d3_halved(&self, lo: f64, hi: f64) -> Result<f64> {
        self.halved(lo, hi, |k| self.d3[k as usize] as f64, |a, b| {
            (self.pre_d3[b as usize] - self.pre_d3[a as usize - 1]) as f64
        })
    }

    fn halved(
        &self,
        lo: f64,
        hi: f64,
        term: impl Fn(u64) -> f64,
        range: impl Fn(u64, u64) -> f64,
    ) -> Result<f64> {
        if !(lo >= 1.0 && lo <= hi) {
            return Err(Error::InvalidParameter(alloc::format!("need 1 <= lo <= hi, got [{lo}, {hi}]")));
        }
        if hi > self.limit as f64 {
            return Err(Error::OutOfRange { x: hi, limit: self.limit });
        }
        let a = lo.ceil() as u64;
        let b = hi.floor() as u64;
        if a > b {
            return Ok(0.0);
        }
        let mut s = range(a, b);
        let lo_int = lo.fract() == 0.0;
        let hi_int = hi.fract() == 0.0;
        if lo_int {
            s -= 0.5 * term(a);
        }
        if hi_int && !(lo_int && a == b) {
            s -= 0.5 * term(b);
        }
        Ok(s)
    }
}

/// `(a₁, a₂)` of the d₃ summatory main term: `a₁ = 3γ − 1` and
/// `a₂ = 3c₁ + 3γ² − 3γ + 1` where `c₁ = −γ₁` is the coefficient of `(s−1)`
/// in the Laurent expansion of ζ at 1.
pub fn d3_coefficients(c: &ConstantsF64) -> (f64, f64) {
    let g = c.euler_gamma;
    (3.0 * g - 1.0, -3.0 * c.stieltjes_1 + 3.0 * g * g - 3.0 * g + 1.0)
}
