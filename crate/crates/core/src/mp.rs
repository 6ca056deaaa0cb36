//! Thin layer over `astro_float::BigFloat`.
//!
//! All arithmetic goes through an [`Mp`] working context that fixes the
//! binary precision and owns the constant cache, so call sites never thread
//! `(p, rm, &mut cc)` by hand.

use core::cell::RefCell;
use core::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_complex::Complex64;

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// Exact `2^k` as binary64 (saturating to 0 / inf outside the range).
pub fn pow2(k: i32) -> f64 {
    if k > 1023 {
        f64::INFINITY
    } else if k >= -1022 {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else if k >= -1074 {
        f64::from_bits(1u64 << (k + 1074))
    } else {
        0.0
    }
}

/// Nearest binary64 to `x` (up to one ulp).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, e, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let n = words.len();
    let top = words[n - 1] as f64;
    let next = if n >= 2 { words[n - 2] as f64 } else { 0.0 };
    // value = 0.[top next ...] * 2^e
    let mant = top * pow2(-64) + next * pow2(-128);
    let half = e / 2;
    let v = mant * pow2(half) * pow2(e - half);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Working context: precision in bits plus a constant cache.
pub struct Mp {
    p: usize,
    cc: RefCell<Consts>,
}

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mp").field("p", &self.p).finish()
    }
}

impl Clone for Mp {
    fn clone(&self) -> Self {
        Mp::new(self.p)
    }
}

impl Mp {
    /// Rounds `bits` up to a whole number of 64-bit words.
    pub fn new(bits: usize) -> Self {
        let p = bits.max(64).div_ceil(64) * 64;
        let cc = Consts::new().expect("constant cache allocation");
        Mp { p, cc: RefCell::new(cc) }
    }

    pub fn prec(&self) -> usize {
        self.p
    }

    pub fn f(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    pub fn int(&self, i: i64) -> BigFloat {
        BigFloat::from_i64(i, self.p)
    }

    pub fn ratio(&self, n: i64, d: i64) -> BigFloat {
        self.div(&self.int(n), &self.int(d))
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_word(0, self.p)
    }

    pub fn one(&self) -> BigFloat {
        BigFloat::from_word(1, self.p)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    pub fn mul_f64(&self, a: &BigFloat, x: f64) -> BigFloat {
        self.mul(a, &self.f(x))
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.p, RM)
    }

    pub fn exp(&self, a: &BigFloat) -> BigFloat {
        a.exp(self.p, RM, &mut self.cc.borrow_mut())
    }

    pub fn ln(&self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, RM, &mut self.cc.borrow_mut())
    }

    pub fn sin(&self, a: &BigFloat) -> BigFloat {
        a.sin(self.p, RM, &mut self.cc.borrow_mut())
    }

    pub fn cos(&self, a: &BigFloat) -> BigFloat {
        a.cos(self.p, RM, &mut self.cc.borrow_mut())
    }

    pub fn atan(&self, a: &BigFloat) -> BigFloat {
        a.atan(self.p, RM, &mut self.cc.borrow_mut())
    }

    pub fn pi(&self) -> BigFloat {
        self.cc.borrow_mut().pi(self.p, RM)
    }

    pub fn ln2(&self) -> BigFloat {
        self.cc.borrow_mut().ln_2(self.p, RM)
    }

    /// `x^y` for `x > 0`.
    pub fn powf(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        self.exp(&self.mul(y, &self.ln(x)))
    }

    /// `x^n` by repeated multiplication.
    pub fn powi(&self, x: &BigFloat, n: u32) -> BigFloat {
        let mut r = self.one();
        for _ in 0..n {
            r = self.mul(&r, x);
        }
        r
    }

    /// Four-quadrant arctangent in (-π, π].
    pub fn atan2(&self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        let pi = self.pi();
        if x.is_zero() {
            let half = self.mul_f64(&pi, 0.5);
            return if y.is_negative() { half.neg() } else if y.is_zero() { self.zero() } else { half };
        }
        // reduce to |ratio| <= 1 so atan converges quickly
        if y.abs().cmp(&x.abs()).unwrap_or(0) <= 0 {
            let a = self.atan(&self.div(y, x));
            if x.is_positive() {
                a
            } else if y.is_negative() {
                self.sub(&a, &pi)
            } else {
                self.add(&a, &pi)
            }
        } else {
            let half = self.mul_f64(&pi, 0.5);
            let a = self.atan(&self.div(x, y));
            if y.is_positive() {
                self.sub(&half, &a)
            } else {
                self.sub(&half.neg(), &a)
            }
        }
    }

    pub fn cadd(&self, a: &ComplexValue, b: &ComplexValue) -> ComplexValue {
        ComplexValue { re: self.add(&a.re, &b.re), im: self.add(&a.im, &b.im) }
    }

    pub fn csub(&self, a: &ComplexValue, b: &ComplexValue) -> ComplexValue {
        ComplexValue { re: self.sub(&a.re, &b.re), im: self.sub(&a.im, &b.im) }
    }

    pub fn cmul(&self, a: &ComplexValue, b: &ComplexValue) -> ComplexValue {
        let re = self.sub(&self.mul(&a.re, &b.re), &self.mul(&a.im, &b.im));
        let im = self.add(&self.mul(&a.re, &b.im), &self.mul(&a.im, &b.re));
        ComplexValue { re, im }
    }

    pub fn cscale(&self, a: &ComplexValue, r: &BigFloat) -> ComplexValue {
        ComplexValue { re: self.mul(&a.re, r), im: self.mul(&a.im, r) }
    }

    pub fn cdiv(&self, a: &ComplexValue, b: &ComplexValue) -> ComplexValue {
        let den = self.add(&self.mul(&b.re, &b.re), &self.mul(&b.im, &b.im));
        let re = self.add(&self.mul(&a.re, &b.re), &self.mul(&a.im, &b.im));
        let im = self.sub(&self.mul(&a.im, &b.re), &self.mul(&a.re, &b.im));
        ComplexValue { re: self.div(&re, &den), im: self.div(&im, &den) }
    }

    pub fn cabs(&self, a: &ComplexValue) -> BigFloat {
        self.sqrt(&self.add(&self.mul(&a.re, &a.re), &self.mul(&a.im, &a.im)))
    }

    /// `e^{iθ}`.
    pub fn cis(&self, theta: &BigFloat) -> ComplexValue {
        ComplexValue { re: self.cos(theta), im: self.sin(theta) }
    }

    pub fn cexp(&self, z: &ComplexValue) -> ComplexValue {
        let r = self.exp(&z.re);
        self.cscale(&self.cis(&z.im), &r)
    }

    /// Principal logarithm.
    pub fn cln(&self, z: &ComplexValue) -> ComplexValue {
        let m2 = self.add(&self.mul(&z.re, &z.re), &self.mul(&z.im, &z.im));
        let re = self.mul_f64(&self.ln(&m2), 0.5);
        ComplexValue { re, im: self.atan2(&z.im, &z.re) }
    }

    pub fn complex(&self, re: f64, im: f64) -> ComplexValue {
        ComplexValue { re: self.f(re), im: self.f(im) }
    }

    /// Re-rounds a value to this context's precision.
    pub fn round(&self, x: &BigFloat) -> BigFloat {
        x.add(&self.zero(), self.p, RM)
    }
}

/// Arbitrary-precision real scalar.
#[derive(Clone, Debug)]
pub struct RealValue(pub BigFloat);

impl RealValue {
    /// Exact for every finite binary64.
    pub fn from_f64(x: f64) -> Self {
        RealValue(BigFloat::from_f64(x, 64))
    }

    /// `n/d` correctly rounded to `bits`.
    pub fn from_ratio(n: i64, d: i64, bits: usize) -> Self {
        let m = Mp::new(bits);
        RealValue(m.ratio(n, d))
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0)
    }

    pub fn as_bigfloat(&self) -> &BigFloat {
        &self.0
    }

    pub fn abs_diff_f64(&self, other: &RealValue, m: &Mp) -> f64 {
        to_f64(&m.sub(&self.0, &other.0).abs())
    }
}

/// Arbitrary-precision complex scalar.
#[derive(Clone, Debug)]
pub struct ComplexValue {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl ComplexValue {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        ComplexValue { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        ComplexValue { re: BigFloat::from_f64(re, 64), im: BigFloat::from_f64(im, 64) }
    }

    pub fn re_f64(&self) -> f64 {
        to_f64(&self.re)
    }

    pub fn im_f64(&self) -> f64 {
        to_f64(&self.im)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re_f64(), self.im_f64())
    }

    pub fn conj(&self) -> Self {
        ComplexValue { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn neg(&self) -> Self {
        ComplexValue { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn is_finite(&self) -> bool {
        !(self.re.is_nan() || self.im.is_nan() || self.re.is_inf() || self.im.is_inf())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn to_f64_roundtrip() {
        for &x in &[1.0, -2.5, 1e-300, 3.141592653589793, 1e300, -7.0e-12, 123456.789] {
            assert_eq!(to_f64(&BigFloat::from_f64(x, 128)), x);
        }
    }

    #[test]
    fn atan2_quadrants() {
        let m = Mp::new(128);
        for &(y, x) in &[(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0), (3.0, 0.5), (-3.0, -0.5), (0.0, -1.0)] {
            let a = to_f64(&m.atan2(&m.f(y), &m.f(x)));
            assert!((a - f64::atan2(y, x)).abs() < 1e-15, "{y} {x} {a}");
        }
    }

    #[test]
    fn complex_log_exp() {
        let m = Mp::new(192);
        let z = m.complex(-0.75, 2.5);
        let w = m.cexp(&m.cln(&z));
        assert!((w.re_f64() + 0.75).abs() < 1e-30);
        assert!((w.im_f64() - 2.5).abs() < 1e-30);
    }
}
