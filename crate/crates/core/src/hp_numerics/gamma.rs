//! Principal branch of log Γ for complex arguments (Stirling series with an
//! upward shift).

use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use super::bernoulli::{ln_abs_em_coeff_bound, BernoulliCache};
use crate::error::{Error, Result};
use crate::mp::{ComplexValue, Mp};

const MAX_TERMS: usize = 200;
const MAX_SHIFT: usize = 4000;

/// log of the Stirling remainder bound after `k` terms at `w`:
/// `|B_{2k+2}| / ((2k+2)(2k+1)|w|^{2k+1}) * sec^{2k+2}(arg(w)/2)`,
/// given `ln_fact = ln (2k+2)!`.
fn stirling_bound_ln(k: usize, ln_fact: f64, abs_w: f64, arg_w: f64) -> f64 {
    let ln_b = ln_abs_em_coeff_bound(k + 1) + ln_fact;
    let sec2 = 1.0 / (0.5 * arg_w).cos().powi(2);
    ln_b - ((2 * k + 2) as f64 * (2 * k + 1) as f64).ln() - (2 * k + 1) as f64 * abs_w.ln()
        + (k + 1) as f64 * sec2.ln()
}

/// Picks the shift `r` and number of Stirling terms `k` with the smallest
/// combined cost whose remainder bound is below `exp(target_ln)`.
fn plan(zr: f64, zi: f64, target_ln: f64) -> Option<(usize, usize)> {
    let r0 = if zr < 1.0 { (1.0 - zr).ceil() as usize } else { 0 };
    let mut best: Option<(usize, usize)> = None;
    for r in r0..r0 + MAX_SHIFT {
        if let Some((br, bk)) = best {
            if r > br + bk {
                break;
            }
        }
        let wr = zr + r as f64;
        let aw = wr.hypot(zi);
        let arg = zi.atan2(wr);
        let mut ln_fact = 2f64.ln();
        for k in 1..=MAX_TERMS {
            ln_fact += ((2 * k + 1) as f64).ln() + ((2 * k + 2) as f64).ln();
            if stirling_bound_ln(k, ln_fact, aw, arg) <= target_ln {
                if best.is_none_or(|(br, bk)| r + k < br + bk) {
                    best = Some((r, k));
                }
                break;
            }
        }
    }
    best
}

/// Principal `ln Γ(z)`, continuous on `C \ (-∞, 0]`.
///
/// The absolute error is below `2^-(prec - 8)` where `prec` is the
/// precision of `m`, plus rounding in the final subtraction.
pub fn ln_gamma(z: &ComplexValue, m: &Mp, bern: &mut BernoulliCache) -> Result<ComplexValue> {
    let zr = z.re_f64();
    let zi = z.im_f64();
    if zi == 0.0 && zr <= 0.0 && zr == zr.round() {
        return Err(Error::Pole);
    }
    let target_ln = -((m.prec() as f64) - 8.0) * core::f64::consts::LN_2;
    let (r, k) = plan(zr, zi, target_ln).ok_or_else(|| {
        Error::PrecisionExhausted(alloc::format!("lnΓ plan failed at {zr}+{zi}i"))
    })?;

    let shift = m.int(r as i64);
    let w = ComplexValue::new(m.add(&z.re, &shift), z.im.clone());
    let ln_w = m.cln(&w);
    let half = m.f(0.5);
    let w_half = ComplexValue::new(m.sub(&w.re, &half), w.im.clone());
    let mut s = m.csub(&m.cmul(&w_half, &ln_w), &w);
    let two_pi = m.mul_f64(&m.pi(), 2.0);
    s.re = m.add(&s.re, &m.mul(&half, &m.ln(&two_pi)));

    let coeffs = bern.stirling(k, m);
    let inv_w = m.cdiv(&m.complex(1.0, 0.0), &w);
    let inv_w2 = m.cmul(&inv_w, &inv_w);
    let mut pw = inv_w;
    for c in coeffs {
        s = m.cadd(&s, &m.cscale(&pw, c));
        pw = m.cmul(&pw, &inv_w2);
    }

    if r > 0 {
        // ln Π (z+j) via one logarithm; the branch is fixed by the f64 sum of arguments
        let mut prod = z.clone();
        let mut arg_sum = zi.atan2(zr);
        for j in 1..r {
            let zj = ComplexValue::new(m.add(&z.re, &m.int(j as i64)), z.im.clone());
            prod = m.cmul(&prod, &zj);
            arg_sum += zi.atan2(zr + j as f64);
        }
        let mut lp = m.cln(&prod);
        let wraps = ((arg_sum - lp.im_f64()) / (2.0 * PI)).round();
        if wraps != 0.0 {
            lp.im = m.add(&lp.im, &m.mul_f64(&two_pi, wraps));
        }
        s = m.csub(&s, &lp);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::to_f64;

    fn lg(re: f64, im: f64) -> ComplexValue {
        let m = Mp::new(192);
        let mut b = BernoulliCache::new();
        ln_gamma(&m.complex(re, im), &m, &mut b).unwrap()
    }

    #[test]
    fn real_values() {
        // lnΓ(1) = lnΓ(2) = 0, Γ(1/2) = √π, Γ(5) = 24
        assert!(lg(1.0, 0.0).re_f64().abs() < 1e-30);
        assert!(lg(2.0, 0.0).re_f64().abs() < 1e-30);
        assert!((lg(0.5, 0.0).re_f64() - 0.5 * PI.ln()).abs() < 1e-15);
        assert!((lg(5.0, 0.0).re_f64() - 24f64.ln()).abs() < 1e-15);
        // Γ(-1/2) = -2√π: real part ln(2√π), imaginary part π on the principal branch
        let v = lg(-0.5, 1e-300);
        assert!((v.re_f64() - (2.0 * PI.sqrt()).ln()).abs() < 1e-15);
    }

    #[test]
    fn branch_is_continuous_along_vertical_line() {
        // Im lnΓ(1/4 + iy) grows like y log y with no 2π jumps
        let mut prev = 0.0;
        for i in 1..60 {
            let y = i as f64 * 0.75;
            let v = lg(0.25, y).im_f64();
            let step = v - prev;
            assert!(step.abs() < 0.75 * (2.0 + y.ln().abs()), "jump at {y}: {step}");
            prev = v;
        }
    }

    #[test]
    fn recurrence() {
        // lnΓ(z+1) = lnΓ(z) + ln z on the principal branch
        let m = Mp::new(192);
        let mut b = BernoulliCache::new();
        for &(re, im) in &[(0.3, 4.0), (-2.7, 1.5), (10.0, -30.0), (0.25, 500.0)] {
            let z = m.complex(re, im);
            let z1 = ComplexValue::new(m.add(&z.re, &m.one()), z.im.clone());
            let a = ln_gamma(&z1, &m, &mut b).unwrap();
            let c = m.cadd(&ln_gamma(&z, &m, &mut b).unwrap(), &m.cln(&z));
            let d = m.csub(&a, &c);
            assert!(to_f64(&d.re).abs() < 1e-45, "{re} {im}");
            assert!(to_f64(&d.im).abs() < 1e-45, "{re} {im}");
        }
    }
}
