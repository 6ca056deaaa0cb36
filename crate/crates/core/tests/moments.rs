use hml_core::divisor::{build_table, DivisorTable};
use hml_core::hp_numerics::CriticalLine;
use hml_core::moments::*;
use hml_core::{Error, PrecisionContext};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn table() -> &'static DivisorTable {
    static T: OnceLock<DivisorTable> = OnceLock::new();
    T.get_or_init(|| build_table(300_000).unwrap())
}

fn line() -> &'static CriticalLine {
    static L: OnceLock<CriticalLine> = OnceLock::new();
    L.get_or_init(|| CriticalLine::new().with_t_max(20_000.0))
}

fn deps() -> MomentDeps<'static> {
    MomentDeps::new(line(), table(), PrecisionContext::default())
}

#[test]
fn theorem1_main_term_has_argument_pi_over_8() {
    let r = verify_theorem1(500.0, &deps()).unwrap();
    assert!((r.main.arg() - PI / 8.0).abs() < 1e-15);
    assert!(r.is_consistent());
}

#[test]
fn theorem1_at_ten_thousand() {
    let r = verify_theorem1(1e4, &deps()).unwrap();
    // the same integral at a 5x tighter tolerance (the default is 1e-6 here)
    let tight = MomentDeps { tol: Some(2e-7), ..deps() };
    let r2 = verify_theorem1(1e4, &tight).unwrap();
    assert!((r.lhs - r2.lhs).norm() < 1e-6, "{} vs {}", r.lhs, r2.lhs);
    assert!(r.ratio <= 5.0, "{}", r.ratio);
}

#[test]
fn theorem1_difference_is_the_dyadic_integral() {
    let t = 1000.0;
    let a = verify_theorem1(t, &deps()).unwrap();
    let b = verify_theorem1(2.0 * t, &deps()).unwrap();
    let j = verify_j_dyadic(t, &deps()).unwrap();
    let gap = (b.lhs - a.lhs - j.lhs).norm();
    assert!(gap <= a.err_est + b.err_est + j.err_est, "{gap:e}");
}

#[test]
fn j_dyadic_identity() {
    let r = verify_j_dyadic(2000.0, &deps()).unwrap();
    assert!(r.ratio <= 5.0, "{}", r.ratio);
    assert!(!r.halved_endpoint);
    // non-integral window ends: Σ′ is the plain sum
    let (lo, hi) = ((2000.0 / (2.0 * PI)).sqrt(), (2000.0 / PI).sqrt());
    let plain: f64 = (lo.ceil() as u64..=hi.floor() as u64)
        .map(|k| {
            let s = if k % 2 == 1 { -1.0 } else { 1.0 };
            s * table().d(k).unwrap() as f64 * (k as f64).sqrt()
        })
        .sum();
    let main = Complex64::from_polar(2.0 * 2f64.sqrt() * PI * plain, PI / 8.0);
    assert!((r.main - main).norm() < 1e-10 * main.norm());
}

#[test]
fn j_dyadic_halves_integral_endpoints() {
    let t = 2.0 * PI * 20.0 * 20.0;
    let r = verify_j_dyadic(t, &deps()).unwrap();
    assert!(r.halved_endpoint);
    let hi = (t / PI).sqrt();
    let mut s = 0.5 * table().d(20).unwrap() as f64 * 20f64.sqrt();
    for k in 21..=hi.floor() as u64 {
        let sg = if k % 2 == 1 { -1.0 } else { 1.0 };
        s += sg * table().d(k).unwrap() as f64 * (k as f64).sqrt();
    }
    let main = Complex64::from_polar(2.0 * 2f64.sqrt() * PI * s, PI / 8.0);
    assert!((r.main - main).norm() < 1e-10 * main.norm());
}

fn direct_th2(n: u64, a: f64) -> (Complex64, Complex64) {
    // binary64 evaluation straight from the definitions, windows by f64 comparisons
    let t = table();
    let mut lhs = Complex64::new(0.0, 0.0);
    let top = 2.0 * 2f64.sqrt() * n as f64;
    let mut k = n;
    while (k as f64) <= top {
        let kf = k as f64;
        lhs += Complex64::from_polar(t.d(k).unwrap() as f64 * kf.powf(-1.0 / 6.0), 3.0 * PI * (a * kf).powf(2.0 / 3.0));
        k += 1;
    }
    let lo = a.powf(4.0 / 3.0) * (n as f64).cbrt();
    let mut main = Complex64::new(0.0, 0.0);
    for k in (lo - 1e-9).ceil() as u64..=(2f64.sqrt() * lo + 1e-9).floor() as u64 {
        let kf = k as f64;
        main += Complex64::from_polar(t.d(k).unwrap() as f64 * kf.sqrt(), -PI * (kf / a).powi(2));
    }
    (lhs, main * 3f64.sqrt() * a.powf(-4.0 / 3.0))
}

#[test]
fn theorem2_matches_direct_summation() {
    for a in [0.5, 1.0, 2.0, 4.0] {
        let r = verify_theorem2(1000, a, 0.05, &deps()).unwrap();
        let (l, m) = direct_th2(1000, a);
        assert!((r.lhs - l).norm() < 1e-9, "A = {a}: {} vs {l}", r.lhs);
        assert!((r.main - m).norm() < 1e-9, "A = {a}: {} vs {m}", r.main);
    }
}

#[test]
fn theorem2_small_n() {
    let r = verify_theorem2(1000, 1.0, 0.05, &deps()).unwrap();
    assert!(r.ratio <= 10.0, "{}", r.ratio);
    assert_eq!(r.prec_bits, 128);
    let r4 = verify_theorem2(1000, 4.0, 0.05, &deps()).unwrap();
    assert!(r4.lhs.norm() <= 10.0 * theorem2_size_shape(1000, 4.0));
}

#[test]
fn theorem2_empty_main_window() {
    // A⁴N = 1.1: the window [1.032, 1.460] holds no integer
    let a = (1.1f64 / 1000.0).powf(0.25);
    let (lo, hi) = th2_main_window(1000, a);
    assert!(lo > hi);
    let r = verify_theorem2(1000, a, 0.05, &deps()).unwrap();
    assert_eq!(r.main, Complex64::new(0.0, 0.0));
    assert!(r.ratio <= 10.0, "{}", r.ratio);
}

#[test]
fn theorem2_reversed_order_audit() {
    let ctx = PrecisionContext::default();
    for a in [0.5, 2.0] {
        let f = theorem2_sums(1000, a, false, table(), ctx).unwrap();
        let b = theorem2_sums(1000, a, true, table(), ctx).unwrap();
        let d = (f.lhs.to_c64() - b.lhs.to_c64()).norm();
        let cap = 10.0 * ctx.eps() * f.lhs_terms as f64 * f.lhs_max_term;
        assert!(d <= cap.max(f64::EPSILON * f.lhs.to_c64().norm()), "{d:e} > {cap:e}");
    }
}

#[test]
fn theorem2_preconditions() {
    let small = build_table(100).unwrap();
    let d = MomentDeps::new(line(), &small, PrecisionContext::default());
    assert!(matches!(verify_theorem2(1000, 1.0, 0.05, &d), Err(Error::TableTooSmall { .. })));
    assert!(verify_theorem2(1000, 0.1, 0.05, &deps()).is_err());
}

#[test]
fn theorem3_and_its_dyadic_identity() {
    let r = verify_theorem3(5000.0, 0.05, &deps()).unwrap();
    assert!(r.main.im == 0.0 && r.main.re > 0.0);
    assert!(r.ratio <= 5.0, "{}", r.ratio);

    let t = 1000.0;
    let a = verify_theorem3(t, 0.05, &deps()).unwrap();
    let b = verify_theorem3(2.0 * t, 0.05, &deps()).unwrap();
    let i = verify_i_dyadic(t, &deps()).unwrap();
    let diff = b.lhs - a.lhs;
    assert!((diff - i.lhs).norm() <= a.err_est + b.err_est + i.err_est);
    let d3: u64 = ((t / (2.0 * PI)).ceil() as u64..=(t / PI).floor() as u64).map(|k| table().d3(k).unwrap() as u64).sum();
    assert!((i.main.re - 2.0 * PI * d3 as f64).abs() < 1e-9 * i.main.re);
    let c = (diff - i.main).norm() / (t.powf(0.75) * t.ln().powi(2));
    assert!(c <= 5.0, "{c}");
}

#[test]
fn theorem3_main_is_positive_from_one_hundred() {
    for t in [100.0, 150.0, 1e3] {
        let r = verify_theorem3(t, 0.05, &deps()).unwrap();
        assert!(r.main.re > 0.0 && r.main.im == 0.0);
    }
}

#[test]
fn theorem4_branches() {
    assert_eq!(theorem4_bound(2e3, 0.0, 0.05), 2e3f64.powf(1.05));
    for alpha in [-0.3, 0.3] {
        let ts = [1e3, 2e3, 4e3];
        let ratios: Vec<f64> = ts.iter().map(|&t| verify_theorem4(t, alpha, 0.05, &deps()).unwrap().ratio).collect();
        let (c, slope) = fit_constant(&ts, &ratios);
        assert!(c <= 10.0, "alpha = {alpha}: {ratios:?}");
        // ratio grows no faster than T^ε along the grid
        assert!(slope.unwrap() <= 0.05, "alpha = {alpha}: slope {slope:?}");
    }
    assert!(verify_theorem4(1e3, 0.5, 0.05, &deps()).is_err());
}

#[test]
fn theorem4_alpha_zero_is_the_cubic_moment() {
    let r = verify_theorem4(1e3, 0.0, 0.05, &deps()).unwrap();
    let z3 = verify_hardy_and_calibrations(MomentKind::Z3Dyadic, 1e3, 0.05, &deps()).unwrap();
    assert_eq!(r.lhs, z3.lhs);
}

#[test]
fn calibrations() {
    let h = verify_hardy_and_calibrations(MomentKind::HardyZ, 1e4, 0.05, &deps()).unwrap();
    assert!(h.ratio <= 10.0, "{}", h.ratio);
    let s = verify_hardy_and_calibrations(MomentKind::SecondMoment, 5000.0, 0.05, &deps()).unwrap();
    assert!(s.ratio <= 5.0, "{}", s.ratio);
    let z = verify_hardy_and_calibrations(MomentKind::Z3Dyadic, 2000.0, 0.05, &deps()).unwrap();
    assert!(z.ratio <= 5.0, "{}", z.ratio);
    assert!(verify_hardy_and_calibrations(MomentKind::Th1, 2000.0, 0.05, &deps()).is_err());
}

#[test]
fn second_moment_at_one_thousand() {
    // mpmath, 12-point Gauss–Legendre on unit panels of |ζ(1/2+it)|², 20 digits
    const REF: f64 = 5212.507763337808;
    let s = verify_hardy_and_calibrations(MomentKind::SecondMoment, 1000.0, 0.05, &deps()).unwrap();
    assert!((s.lhs.re - REF).abs() < 1e-5, "{}", s.lhs.re);
}

#[test]
fn z3_dyadic_needs_its_window_in_the_table() {
    let small = build_table(1000).unwrap();
    let d = MomentDeps::new(line(), &small, PrecisionContext::default());
    let r = verify_hardy_and_calibrations(MomentKind::Z3Dyadic, 2000.0, 0.05, &d);
    assert!(matches!(r, Err(Error::TableTooSmall { .. })));
}

#[test]
fn s1_zero_phase_is_the_d3_range_sum() {
    let r = check_s1_bound(5000, 2.0 / 3.0, 0.0, 0.05, table()).unwrap();
    let want = table().sum_d3(10_000).unwrap().exact - table().sum_d3(4999).unwrap().exact;
    assert_eq!(r.lhs, Complex64::new(want as f64, 0.0));
}

#[test]
fn s1_bound_at_one_hundred_thousand() {
    let r = check_s1_bound(100_000, 2.0 / 3.0, 1.5, 0.05, table()).unwrap();
    assert!(r.ratio <= 10.0, "{}", r.ratio);
    let via_spec = verify(&MomentSpec::s1_bound(100_000, 0.0), &deps()).unwrap();
    assert_eq!(via_spec.lhs, r.lhs);
}

#[test]
fn s1_preconditions() {
    assert!(check_s1_bound(1000, 1.0, 1.0, 0.05, table()).is_err());
    assert!(check_s1_bound(1000, 0.0, 1.0, 0.05, table()).is_err());
    assert!(matches!(check_s1_bound(2_000_000, 0.5, 1.0, 0.05, table()), Err(Error::CapacityExceeded { .. })));
    assert!(matches!(check_s1_bound(200_000, 0.5, 1.0, 0.05, &build_table(1000).unwrap()), Err(Error::TableTooSmall { .. })));
}

#[test]
fn dispatcher_rejects_misplaced_parameters() {
    let mut s = MomentSpec::th4(1e3, 0.1);
    s.n = Some(10);
    assert!(verify(&s, &deps()).is_err());
    let r = verify(&MomentSpec::hardy_z(200.0), &deps()).unwrap();
    assert_eq!(r.spec, MomentSpec::hardy_z(200.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reports_are_consistent(n in 20u64..400, a in 0.5f64..3.0, eps in 0.0f64..0.2) {
        let r = verify_theorem2(n, a, eps, &deps()).unwrap();
        prop_assert!(r.is_consistent());
        prop_assert_eq!(r.bound, theorem2_bound(n, a, eps));
        prop_assert!(r.ratio.is_finite());
    }

    #[test]
    fn main_window_matches_its_definition(n in 2u64..100_000, a in 0.25f64..8.0) {
        prop_assume!(a >= (n as f64).powf(-0.25));
        let (lo, hi) = th2_main_window(n, a);
        let x = a.powf(4.0 / 3.0) * (n as f64).cbrt();
        // away from exact ties the f64 window agrees
        prop_assume!((x - x.round()).abs() > 1e-9 && (2f64.sqrt() * x - (2f64.sqrt() * x).round()).abs() > 1e-9);
        prop_assert_eq!(lo, x.ceil() as u64);
        prop_assert_eq!(hi, (2f64.sqrt() * x).floor() as u64);
    }
}
