//! Stationary-phase main term for `∫_a^b φ(x) e^{2πi f(x)} dx`.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Number of interior samples used to check the sign of f″.
const SIGN_SAMPLES: usize = 64;

/// `f` with its first four derivatives and `φ` with two, on `[a, b]`, plus
/// the scale parameters `H`, `A`, `U` of the hypotheses.
pub struct PhaseProblem<'a> {
    pub a: f64,
    pub b: f64,
    /// `x ↦ [f, f′, f″, f‴, f⁗]`
    pub f: &'a dyn Fn(f64) -> [f64; 5],
    /// `x ↦ [φ, φ′, φ″]`
    pub phi: &'a dyn Fn(f64) -> [f64; 3],
    pub h: f64,
    pub a_scale: f64,
    pub u: f64,
}

impl core::fmt::Debug for PhaseProblem<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PhaseProblem")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("h", &self.h)
            .field("a_scale", &self.a_scale)
            .field("u", &self.u)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPhaseResult {
    pub main: Complex64,
    pub c: Option<f64>,
    pub error_budget: f64,
    pub halved: bool,
}

/// Empirical constants of the hypotheses on a sample grid: the largest of
/// `|f″|A`, `1/(|f″|A)`, `|f‴|AU`, `|f⁗|AU²`, `|φ|/H`, `|φ′|U/H`, `|φ″|U²/H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionConstants {
    pub f2_upper: f64,
    pub f2_lower: f64,
    pub f3: f64,
    pub f4: f64,
    pub phi0: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl PhaseProblem<'_> {
    fn validate(&self) -> Result<f64> {
        let (a, b) = (self.a, self.b);
        if !(a < b) || !(b - a <= self.u) {
            return Err(Error::ConditionViolation(alloc::format!("need a < b and b - a <= U, got [{a}, {b}], U = {}", self.u)));
        }
        if !(self.h > 0.0 && self.a_scale > 0.0 && self.a_scale < self.u) {
            return Err(Error::ConditionViolation("need H > 0 and 0 < A < U".into()));
        }
        let mut sign = 0.0;
        for i in 0..=SIGN_SAMPLES {
            let x = a + (b - a) * i as f64 / SIGN_SAMPLES as f64;
            let f2 = (self.f)(x)[2];
            if !(f2 != 0.0 && f2.is_finite()) {
                return Err(Error::ConditionViolation(alloc::format!("f'' vanishes at {x}")));
            }
            let s = f2.signum();
            if sign != 0.0 && s != sign {
                return Err(Error::ConditionViolation(alloc::format!("f'' changes sign near {x}")));
            }
            sign = s;
        }
        Ok(sign)
    }

    pub fn condition_constants(&self) -> ConditionConstants {
        let (a_s, u, h) = (self.a_scale, self.u, self.h);
        let mut c = ConditionConstants { f2_upper: 0.0, f2_lower: 0.0, f3: 0.0, f4: 0.0, phi0: 0.0, phi1: 0.0, phi2: 0.0 };
        for i in 0..=SIGN_SAMPLES {
            let x = self.a + (self.b - self.a) * i as f64 / SIGN_SAMPLES as f64;
            let f = (self.f)(x);
            let p = (self.phi)(x);
            c.f2_upper = c.f2_upper.max(f[2].abs() * a_s);
            c.f2_lower = c.f2_lower.max(1.0 / (f[2].abs() * a_s));
            c.f3 = c.f3.max(f[3].abs() * a_s * u);
            c.f4 = c.f4.max(f[4].abs() * a_s * u * u);
            c.phi0 = c.phi0.max(p[0].abs() / h);
            c.phi1 = c.phi1.max(p[1].abs() * u / h);
            c.phi2 = c.phi2.max(p[2].abs() * u * u / h);
        }
        c
    }

    /// `HAU^{−1} + H min(|f′(a)|^{−1}, √A) + H min(|f′(b)|^{−1}, √A)`.
    pub fn error_budget(&self) -> f64 {
        let ra = self.a_scale.sqrt();
        let end = |x: f64| {
            let d = (self.f)(x)[1].abs();
            if d == 0.0 { ra } else { (1.0 / d).min(ra) }
        };
        self.h * (self.a_scale / self.u + end(self.a) + end(self.b))
    }
}

/// Root of the monotone `f′` on `[a, b]` by bisection to 60 bits.
fn bisect(fp: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = fp(lo);
    let scale = lo.abs().max(hi.abs()).max(1.0);
    let tol = scale * crate::mp::pow2(-60);
    for _ in 0..400 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = fp(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Main term `e^{±πi/4} φ(c) e^{2πi f(c)} / √|f″(c)|` at the root `c` of f′,
/// halved when `c` is an endpoint and absent when f′ has no root on `[a, b]`.
pub fn stationary_phase(problem: &PhaseProblem<'_>) -> Result<StationaryPhaseResult> {
    let sign = problem.validate()?;
    let (a, b) = (problem.a, problem.b);
    let fp = |x: f64| (problem.f)(x)[1];
    let (fa, fb) = (fp(a), fp(b));
    let error_budget = problem.error_budget();
    let (c, halved) = if fa == 0.0 {
        (Some(a), true)
    } else if fb == 0.0 {
        (Some(b), true)
    } else if (fa > 0.0) != (fb > 0.0) {
        let c = bisect(fp, a, b);
        let tol = a.abs().max(b.abs()).max(1.0) * crate::mp::pow2(-58);
        let at_end = c - a <= tol || b - c <= tol;
        (Some(c), at_end)
    } else {
        (None, false)
    };
    let main = match c {
        None => Complex64::new(0.0, 0.0),
        Some(c) => {
            let fc = (problem.f)(c);
            let phi = (problem.phi)(c)[0];
            let rot = Complex64::new(FRAC_1_SQRT_2, sign * FRAC_1_SQRT_2);
            let ph = 2.0 * PI * fc[0];
            let v = rot * Complex64::from_polar(phi / fc[2].abs().sqrt(), ph);
            if halved { v * 0.5 } else { v }
        }
    };
    Ok(StationaryPhaseResult { main, c, error_budget, halved })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(x: f64) -> [f64; 5] {
        [0.5 * x * x, x, 1.0, 0.0, 0.0]
    }

    fn one(_: f64) -> [f64; 3] {
        [1.0, 0.0, 0.0]
    }

    fn problem(a: f64, b: f64) -> PhaseProblem<'static> {
        PhaseProblem { a, b, f: &quad, phi: &one, h: 1.0, a_scale: 1.0, u: 4.0 }
    }

    #[test]
    fn fresnel_cases() {
        let r = stationary_phase(&problem(-1.0, 1.0)).unwrap();
        assert!((r.main - Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert_eq!(r.c, Some(0.0));
        assert!(!r.halved);
        let r = stationary_phase(&problem(0.5, 2.0)).unwrap();
        assert_eq!(r.main, Complex64::new(0.0, 0.0));
        assert_eq!(r.c, None);
        let r = stationary_phase(&problem(0.0, 1.0)).unwrap();
        assert!(r.halved);
        assert!((r.main - 0.5 * Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn rejects_sign_change() {
        let f = |x: f64| [x * x * x / 6.0, 0.5 * x * x, x, 1.0, 0.0];
        let p = PhaseProblem { a: -1.0, b: 1.0, f: &f, phi: &one, h: 1.0, a_scale: 1.0, u: 4.0 };
        assert!(matches!(stationary_phase(&p), Err(Error::ConditionViolation(_))));
        assert!(stationary_phase(&PhaseProblem { u: 1.0, ..problem(-1.0, 1.0) }).is_err());
    }

    #[test]
    fn concave_phase_uses_conjugate_factor() {
        let f = |x: f64| [-0.5 * x * x, -x, -1.0, 0.0, 0.0];
        let p = PhaseProblem { a: -1.0, b: 1.0, f: &f, phi: &one, h: 1.0, a_scale: 1.0, u: 4.0 };
        let r = stationary_phase(&p).unwrap();
        assert!((r.main - Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2)).norm() < 1e-15);
    }
}
