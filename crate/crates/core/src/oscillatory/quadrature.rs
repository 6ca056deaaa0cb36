//! Adaptive panel quadrature for oscillatory integrands.
//!
//! Panels are sized from a local phase rate ω(t) so that each spans at most a
//! quarter oscillation, then integrated with the 15-point Kronrod rule; the
//! embedded 7-point Gauss rule gives the panel error estimate. Panels whose
//! estimate exceeds their share of `tol` are bisected.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
// Gauss weights on XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 12;

/// `tol` used when the caller has no better idea: `1e-8 (T2 − T1)^{1/2}`.
pub fn default_tol(t1: f64, t2: f64) -> f64 {
    1e-8 * (t2 - t1).abs().sqrt()
}

/// Phase-rate bound `m(½ log(t/2π) + 1)` for integrands built from `m`
/// factors of Z or ζ on the critical line.
pub fn theta_rate(m: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| m * (0.5 * (t.max(2.0 * PI) / (2.0 * PI)).ln() + 1.0)
}

/// Kronrod and Gauss estimates on `[a, b]`.
fn gk15<G: Fn(f64) -> Complex64>(g: &G, a: f64, b: f64) -> Result<(Complex64, Complex64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = Complex64::new(0.0, 0.0);
    let mut gs = Complex64::new(0.0, 0.0);
    for i in 0..8 {
        let (fa, fb) = if i == 7 {
            let v = g(c);
            (v, Complex64::new(0.0, 0.0))
        } else {
            let dx = h * XGK[i];
            (g(c - dx), g(c + dx))
        };
        for (v, x) in [(fa, c - h * XGK[i]), (fb, c + h * XGK[i])] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteSample(x));
            }
        }
        let s = fa + fb;
        k += s * WGK[i];
        if i % 2 == 1 {
            gs += s * WG[i / 2];
        }
    }
    Ok((k * h, gs * h))
}

/// Panel endpoints on `[t1, t2]` at ≤ ¼ oscillation of `rate`, with the
/// given breakpoints forced in.
pub fn panels<R: Fn(f64) -> f64>(t1: f64, t2: f64, rate: &R, breaks: &[f64]) -> Vec<f64> {
    let mut stops: Vec<f64> = breaks.iter().cloned().filter(|&b| b > t1 && b < t2).collect();
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    stops.push(t2);
    let quarter = 0.5 * PI;
    let mut out = Vec::new();
    out.push(t1);
    let mut t = t1;
    for &stop in &stops {
        while t < stop {
            let w0 = rate(t).abs().max(1e-300);
            let mut h = quarter / w0;
            let w1 = rate((t + h).min(stop)).abs();
            if w1 > w0 {
                h = quarter / w1;
            }
            // avoid a sliver before the stop
            let next = if t + 1.05 * h >= stop { stop } else { t + h };
            out.push(next);
            t = next;
        }
    }
    out
}

fn refine<G: Fn(f64) -> Complex64>(
    g: &G,
    a: f64,
    b: f64,
    est: (Complex64, Complex64),
    share: f64,
    depth: u32,
) -> Result<(Complex64, f64)> {
    let (k, gs) = est;
    let err = (k - gs).norm();
    if err <= share * (b - a) || depth >= MAX_DEPTH {
        return Ok((k, err));
    }
    let m = 0.5 * (a + b);
    let left = gk15(g, a, m)?;
    let right = gk15(g, m, b)?;
    let (e1, e2) = ((left.0 - left.1).norm(), (right.0 - right.1).norm());
    if e1 + e2 >= 0.5 * err {
        // no progress from halving: the estimate is at the rounding floor
        return Ok((left.0 + right.0, e1 + e2));
    }
    let (v1, e1) = refine(g, a, m, left, share, depth + 1)?;
    let (v2, e2) = refine(g, m, b, right, share, depth + 1)?;
    Ok((v1 + v2, e1 + e2))
}

/// `∫_{t1}^{t2} g(t) dt` with panels driven by the local phase rate.
/// Returns the value and the summed Kronrod–Gauss differences.
pub fn integrate_oscillatory<G, R>(g: G, t1: f64, t2: f64, tol: f64, rate: R) -> Result<(Complex64, f64)>
where
    G: Fn(f64) -> Complex64,
    R: Fn(f64) -> f64,
{
    integrate_with_breaks(g, t1, t2, tol, rate, &[])
}

/// As [`integrate_oscillatory`], with panel boundaries forced at `breaks`
/// (e.g. where the integrand has a small jump).
pub fn integrate_with_breaks<G, R>(
    g: G,
    t1: f64,
    t2: f64,
    tol: f64,
    rate: R,
    breaks: &[f64],
) -> Result<(Complex64, f64)>
where
    G: Fn(f64) -> Complex64,
    R: Fn(f64) -> f64,
{
    if !(t1 < t2) || !t1.is_finite() || !t2.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("need t1 < t2, got [{t1}, {t2}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("tol = {tol} must be positive")));
    }
    let knots = panels(t1, t2, &rate, breaks);
    let share = tol / (t2 - t1);
    let mut value = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in knots.windows(2) {
        let est = gk15(&g, w[0], w[1])?;
        let (v, e) = refine(&g, w[0], w[1], est, share, 0)?;
        // Neumaier summation over panels, ascending t
        let s = value + v;
        let c_re = if value.re.abs() >= v.re.abs() { (value.re - s.re) + v.re } else { (v.re - s.re) + value.re };
        let c_im = if value.im.abs() >= v.im.abs() { (value.im - s.im) + v.im } else { (v.im - s.im) + value.im };
        comp += Complex64::new(c_re, c_im);
        value = s;
        err += e;
    }
    let value = value + comp;
    if err > tol {
        return Err(Error::ToleranceNotMet { value, err_est: err, tol });
    }
    Ok((value, err))
}
