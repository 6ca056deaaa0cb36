//! The twelve acceptance criteria. Each prints one `criterion N: PASS|FAIL`
//! line; the tests hold a shared lock so runtimes are measured one at a time.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use hml::{execute, Command, GridPoint, Outcome, RunConfig};
use hml_core::afe::{afe_error_budget, zeta_power_afe, AfeSplit};
use hml_core::divisor::{build_table, divisor_sum_hyperbola, DivisorTable};
use hml_core::hp_numerics::{ComplexArg, CriticalLine, Evaluator};
use hml_core::moments::*;
use hml_core::mp::{to_f64, Mp, RealValue};
use hml_core::oscillatory::{integrate_oscillatory, stationary_phase, PhaseProblem};
use hml_core::smoothing::SmoothingKernel;
use hml_core::{ComplexValue, PrecisionContext};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 0.05;

fn serial() -> MutexGuard<'static, ()> {
    static L: Mutex<()> = Mutex::new(());
    L.lock().unwrap_or_else(|e| e.into_inner())
}

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

/// Prints the verdict line and fails the test when a check or the time limit is missed.
fn report(n: u32, ok: bool, start: Instant, limit: Duration, detail: String) {
    let took = start.elapsed();
    let pass = ok && took < limit;
    // straight to stdout so the verdict shows without --nocapture
    let _ = writeln!(
        std::io::stdout().lock(),
        "criterion {n}: {} ({detail}; {:.1} s of {} s)",
        if pass { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {n}: {detail}");
    assert!(took < limit, "criterion {n}: {:.1} s over the {} s limit", took.as_secs_f64(), limit.as_secs());
}

fn mins(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

#[test]
fn criterion_01_functional_equation() {
    let _g = serial();
    let start = Instant::now();
    let ctx = PrecisionContext::new(128).unwrap();
    let eps = ctx.eps();
    let m = Mp::new(256);
    let mut ev = Evaluator::new(ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_chi, mut worst_zeta) = (0f64, 0f64);
    for _ in 0..200 {
        let s = ComplexArg::new(rng.gen_range(-2.0..3.0), rng.gen_range(-200.0..200.0));
        let r = s.reflect();
        let a = ev.chi(&s).unwrap();
        let b = ev.chi(&r).unwrap();
        let p = m.cmul(&a, &b);
        let one = m.csub(&p, &ComplexValue::new(m.int(1), m.int(0)));
        worst_chi = worst_chi.max(to_f64(&m.cabs(&one)) / eps);
        let zs = ev.zeta(&s).unwrap();
        let zr = ev.zeta(&r).unwrap();
        let d = m.csub(&zs, &m.cmul(&a, &zr));
        worst_zeta = worst_zeta.max(to_f64(&m.cabs(&d)) / (eps * (1.0 + zr.to_c64().norm())));
    }
    let ok = worst_chi <= 100.0 && worst_zeta <= 100.0;
    report(1, ok, start, mins(1), format!("max χχ−1 = {worst_chi:.2e} eps, max ζ residual = {worst_zeta:.2e} eps(1+|ζ(1−s)|)"));
}

#[test]
fn criterion_02_z_realness_and_modulus() {
    let _g = serial();
    let start = Instant::now();
    let ctx = PrecisionContext::new(128).unwrap();
    let eps = ctx.eps();
    let m = Mp::new(256);
    let mut ev = Evaluator::new(ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_im, mut worst_mod) = (0f64, 0f64);
    for _ in 0..1000 {
        let t: f64 = rng.gen_range(1.0..1e4);
        let (z, res) = ev.z_with_residue(&RealValue::from_f64(t)).unwrap();
        worst_im = worst_im.max(res / (eps * (1.0 + t)));
        let zeta = ev.zeta(&ComplexArg::critical(t)).unwrap();
        let n2 = m.add(&m.mul(&zeta.re, &zeta.re), &m.mul(&zeta.im, &zeta.im));
        let d = to_f64(&m.sub(&m.mul(&z.0, &z.0), &n2)).abs();
        worst_mod = worst_mod.max(d / eps);
    }
    let ok = worst_im <= 100.0 && worst_mod <= 1000.0;
    report(2, ok, start, mins(2), format!("max |Im| = {worst_im:.2e} eps(1+t), max |Z²−|ζ|²| = {worst_mod:.2e} eps"));
}

#[test]
fn criterion_03_second_moment() {
    let _g = serial();
    let d = deps();
    let start = Instant::now();
    let mut worst = 0f64;
    for t in [1e3, 2e3, 4e3, 8e3] {
        let r = verify(&MomentSpec::second_moment(t), &d).unwrap();
        worst = worst.max(r.residual / t.powf(1.0 / 3.0 + EPS));
    }
    report(3, worst <= 5.0, start, mins(10), format!("max |E|/T^(1/3+ε) = {worst:.3}"));
}

#[test]
fn criterion_04_th1() {
    let _g = serial();
    let d = deps();
    let start = Instant::now();
    let mut ratios = Vec::new();
    let mut rel = Vec::new();
    for j in 0..6 {
        let t = 500.0 * f64::from(1 << j);
        let r = verify(&MomentSpec::th1(t), &d).unwrap();
        ratios.push(r.residual / (t.sqrt() * t.ln().powi(2)));
        rel.push(r.residual / r.main.norm());
    }
    let bounded = ratios.iter().all(|&x| x <= 5.0);
    let decays = rel[5] < rel[0];
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
    report(
        4,
        bounded && decays,
        start,
        mins(15),
        format!("ratios [{}]; |residual|/|main| [{}]", fmt(&ratios), fmt(&rel)),
    );
}

#[test]
fn criterion_05_dyadic_identity() {
    let _g = serial();
    let d = deps();
    let start = Instant::now();
    let mut worst = 0f64;
    for t in [1e3, 4e3] {
        let r = verify(&MomentSpec::j_dyadic(t), &d).unwrap();
        worst = worst.max(r.residual / (t.sqrt() * t.ln()));
    }
    report(5, worst <= 5.0, start, mins(5), format!("max residual/(T^(1/2) log T) = {worst:.3}"));
}

fn th2_config(jobs: usize, out: std::path::PathBuf) -> RunConfig {
    let mut grid = Vec::new();
    for n in [1_000u64, 10_000] {
        for a in [0.5, 1.0, 2.0, 4.0] {
            grid.push(GridPoint { n: Some(n), a: Some(a), ..GridPoint::default() });
        }
    }
    RunConfig {
        command: Command::Verify,
        kind: Some(MomentKind::Th2),
        grid,
        prec_bits: 128,
        eps_slack: EPS,
        tol: None,
        table_path: None,
        out_path: out,
        jobs,
        nmax: None,
    }
}

fn th2_run(jobs: usize) -> (Outcome, String) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("th2.csv");
    let o = execute(&th2_config(jobs, out.clone())).unwrap();
    (o, std::fs::read_to_string(out).unwrap())
}

#[test]
fn criterion_06_th2() {
    let _g = serial();
    let start = Instant::now();
    let (o, _) = th2_run(1);
    let mut worst_ratio = 0f64;
    let mut worst_size = 0f64;
    for r in &o.rows {
        let (n, a) = (r.n.unwrap(), r.a.unwrap());
        let nf = n as f64;
        let budget = a.powf(-1.0 / 3.0) * nf.powf(0.5 + EPS)
            + a.powf(1.0 / 3.0) * nf.powf(1.0 / 6.0) * nf.ln()
            + a.powf(-1.0 / 9.0) * nf.powf(2.0 / 9.0 + EPS);
        worst_ratio = worst_ratio.max(r.residual / budget);
        let lhs = Complex64::new(r.lhs_re, r.lhs_im).norm();
        worst_size = worst_size.max(lhs / (a.powf(2.0 / 3.0) * nf.sqrt() * nf.ln()));
    }
    let ok = o.failures.is_empty() && o.rows.len() == 8 && worst_ratio <= 10.0 && worst_size <= 10.0;
    report(6, ok, start, mins(2), format!("max ratio = {worst_ratio:.3}, max |lhs|/(A^(2/3)N^(1/2)log N) = {worst_size:.3}"));
}

#[test]
fn criterion_07_th3() {
    let _g = serial();
    let d = deps();
    let start = Instant::now();
    let (mut th3, mut dy) = (0f64, 0f64);
    for t in [1e3, 2e3, 4e3] {
        let r = verify(&MomentSpec::th3(t), &d).unwrap();
        th3 = th3.max(r.residual / t.powf(0.75 + EPS));
        let r = verify(&MomentSpec::i_dyadic(t), &d).unwrap();
        dy = dy.max(r.residual / (t.powf(0.75) * t.ln().powi(2)));
    }
    report(7, th3 <= 5.0 && dy <= 5.0, start, mins(20), format!("TH3 max ratio = {th3:.3}, dyadic max ratio = {dy:.3}"));
}

#[test]
fn criterion_08_th4() {
    let _g = serial();
    let d = deps();
    let start = Instant::now();
    let mut worst = 0f64;
    for alpha in [-0.3, 0.0, 0.3] {
        for t in [1e3, 2e3, 4e3] {
            let r = verify(&MomentSpec::th4(t, alpha), &d).unwrap();
            let shape = t.powf(1.0 - alpha.abs() / 6.0 + EPS);
            worst = worst.max(r.lhs.norm() / shape);
        }
    }
    report(8, worst <= 10.0, start, mins(30), format!("max |lhs|/T^(1∓α/6+ε) = {worst:.3}"));
}

#[test]
fn criterion_09_divisor_sums() {
    let _g = serial();
    let start = Instant::now();
    let t = build_table(1_000_000).unwrap();
    let hyperbola = [1_000u64, 10_000, 100_000].iter().all(|&x| t.sum_d(x).unwrap() == divisor_sum_hyperbola(x));
    let x = 1_000_000u64;
    let xf = x as f64;
    let c1 = t.sum_alt_d(x).unwrap().residual.abs() / xf.powf(1.0 / 3.0 + EPS);
    let c2 = t.sum_alt_d_sqrt(x).unwrap().residual.abs() / xf.powf(5.0 / 6.0 + EPS);
    let c3 = t.sum_d3(x).unwrap().residual.abs() / (xf.sqrt() * xf.ln());
    let ok = hyperbola && c1 <= 10.0 && c2 <= 10.0 && c3 <= 10.0;
    report(9, ok, start, mins(1), format!("hyperbola exact = {hyperbola}, fitted C = {c1:.3}, {c2:.3}, {c3:.3}"));
}

struct Quadratic {
    q: f64,
    c: f64,
    h: f64,
    u: f64,
}

impl Quadratic {
    fn f(&self, x: f64) -> [f64; 5] {
        let d = x - self.c;
        [0.5 * self.q * d * d, self.q * d, self.q, 0.0, 0.0]
    }
    fn phi(&self, x: f64) -> [f64; 3] {
        let w = 1.0 / self.u;
        [self.h * (1.0 + 0.3 * (w * x).cos()), -0.3 * self.h * w * (w * x).sin(), -0.3 * self.h * w * w * (w * x).cos()]
    }
}

#[test]
fn criterion_10_stationary_phase() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    let mut regimes = [0usize; 3];
    for i in 0..50 {
        let u = rng.gen_range(5.0..50.0);
        let a = rng.gen_range(-10.0..10.0);
        let b = a + u * rng.gen_range(0.5..1.0);
        let a_scale = u * rng.gen_range(0.01..0.5);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let c0 = match i % 5 {
            0 => a,
            1 => b,
            2 => a - rng.gen_range(0.5..5.0),
            _ => rng.gen_range(a..b),
        };
        let qp = Quadratic { q: sign / a_scale, c: c0, h: rng.gen_range(0.5..3.0), u };
        let f = |x| qp.f(x);
        let phi = |x| qp.phi(x);
        let p = PhaseProblem { a, b, f: &f, phi: &phi, h: qp.h, a_scale, u };
        let r = stationary_phase(&p).unwrap();
        let g = |x: f64| Complex64::new(0.0, 2.0 * PI * qp.f(x)[0]).exp() * qp.phi(x)[0];
        let rate = |x: f64| 2.0 * PI * (qp.q * (x - qp.c)).abs() + 1.0;
        let (direct, _) = integrate_oscillatory(g, a, b, 1e-10, rate).unwrap();
        worst = worst.max((direct - r.main).norm() / r.error_budget);
        regimes[if r.c.is_none() { 2 } else if r.halved { 1 } else { 0 }] += 1;
    }

    let f = |x: f64| [0.5 * x * x, x, 1.0, 0.0, 0.0];
    let one = |_| [1.0, 0.0, 0.0];
    let p = PhaseProblem { a: -1.0, b: 1.0, f: &f, phi: &one, h: 1.0, a_scale: 1.0, u: 4.0 };
    let r = stationary_phase(&p).unwrap();
    let fresnel_main = (r.main - Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)).norm();
    let (direct, _) = integrate_oscillatory(
        |x| Complex64::new(0.0, PI * x * x).exp(),
        -1.0,
        1.0,
        1e-12,
        |x| 2.0 * PI * x.abs() + 1.0,
    )
    .unwrap();
    let fresnel = (direct - r.main).norm() / r.error_budget;

    let ok = worst <= 10.0 && regimes.iter().all(|&n| n > 0) && fresnel_main < 1e-15 && fresnel <= 1.0;
    report(
        10,
        ok,
        start,
        mins(2),
        format!("fitted C = {worst:.3}, regimes (interior, halved, absent) = {regimes:?}, Fresnel |direct−main|/budget = {fresnel:.3}"),
    );
}

#[test]
fn criterion_11_afe_accuracy() {
    let _g = serial();
    let tb = table();
    let start = Instant::now();
    let ctx = PrecisionContext::default();
    let kernel = SmoothingKernel::default();
    let mut ev = Evaluator::new(ctx);
    let mut worst = [0f64; 3];
    for k in 1..=3u32 {
        for t in [50.0, 100.0, 200.0, 400.0] {
            let s = AfeSplit::moment_split(k, t).unwrap();
            let v = zeta_power_afe(&s, 0.5, tb, &kernel, ctx).unwrap().to_c64();
            let direct = ev.zeta(&ComplexArg::critical(t)).unwrap().to_c64().powu(k);
            worst[k as usize - 1] = worst[k as usize - 1].max((v - direct).norm() / afe_error_budget(&s, 0.5));
        }
    }
    let ok = worst.iter().all(|&w| w <= 10.0);
    report(11, ok, start, mins(2), format!("max residual/budget for k = 1, 2, 3: {worst:.3?}"));
}

#[test]
fn criterion_12_determinism() {
    let _g = serial();
    let start = Instant::now();
    let numeric = |o: &Outcome| o.rows.iter().map(|r| r.numeric_fields()).collect::<Vec<_>>();
    let strip = |csv: &str| {
        csv.lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.pop();
                f.join(",")
            })
            .collect::<Vec<_>>()
    };
    let (a, ca) = th2_run(1);
    let (b, cb) = th2_run(1);
    let (c, cc) = th2_run(8);
    let repeat = numeric(&a) == numeric(&b) && strip(&ca) == strip(&cb);
    let parallel = numeric(&a) == numeric(&c) && strip(&ca) == strip(&cc);
    let ok = repeat && parallel && !a.rows.is_empty();
    report(
        12,
        ok,
        start,
        mins(10),
        format!("{} rows; repeated run identical = {repeat}, jobs=1 vs jobs=8 identical = {parallel}", a.rows.len()),
    );
}
