//! Job execution: config → specs → scheduled verification jobs → CSV and summary.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use hml_core::hp_numerics::CriticalLine;
use hml_core::moments::{fit_constant, log_log_slope, verify, MomentDeps, MomentKind, MomentSpec};
use hml_core::PrecisionContext;

use crate::cache::{load_or_build, write_cache};
use crate::grid::GridPoint;
use crate::report::{emit_csv, ReportRow};
use crate::{exit, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Calibrate,
    Table,
    Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Unused by `table`.
    pub kind: Option<MomentKind>,
    pub grid: Vec<GridPoint>,
    pub prec_bits: u32,
    pub eps_slack: f64,
    /// Absolute quadrature tolerance per integral.
    pub tol: Option<f64>,
    pub table_path: Option<PathBuf>,
    pub out_path: PathBuf,
    pub jobs: usize,
    /// Table size for `table`.
    pub nmax: Option<u64>,
}

const CALIBRATION: [MomentKind; 3] = [MomentKind::HardyZ, MomentKind::SecondMoment, MomentKind::Z3Dyadic];

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.prec_bits < 64 {
            return bad(format!("prec_bits = {} < 64", self.prec_bits));
        }
        if self.jobs < 1 {
            return bad("jobs must be >= 1".into());
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("tol = {t} must be positive"));
            }
        }
        if self.command == Command::Table {
            return match self.nmax {
                Some(n) if n >= 1 => Ok(()),
                _ => bad("table needs --nmax >= 1".into()),
            };
        }
        let Some(kind) = self.kind else {
            return bad("missing --kind".into());
        };
        if self.command == Command::Calibrate && !CALIBRATION.contains(&kind) {
            return bad(format!("calibrate runs HARDY_Z, SECOND_MOMENT or Z3_DYADIC, not {kind}"));
        }
        if self.grid.is_empty() {
            return bad("empty grid".into());
        }
        self.specs().map(|_| ())
    }

    /// One spec per grid point, in grid order.
    pub fn specs(&self) -> Result<Vec<MomentSpec>, CliError> {
        let kind = self.kind.ok_or_else(|| CliError::Config("missing --kind".into()))?;
        self.grid.iter().map(|p| spec_for(kind, p, self.eps_slack)).collect()
    }
}

fn spec_for(kind: MomentKind, p: &GridPoint, eps_default: f64) -> Result<MomentSpec, CliError> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Config(format!("{kind} needs grid axis {name}")));
    let reject = |present: bool, name: &str| {
        if present {
            Err(CliError::Config(format!("grid axis {name} does not apply to {kind}")))
        } else {
            Ok(())
        }
    };
    let spec = match kind {
        MomentKind::Th2 => {
            reject(p.t.is_some(), "T")?;
            reject(p.alpha.is_some(), "alpha")?;
            let n = p.n.ok_or_else(|| CliError::Config("TH2 needs grid axis N".into()))?;
            MomentSpec::th2(n, need(p.a, "A")?)
        }
        MomentKind::Th4 | MomentKind::S1Bound => {
            reject(p.n.is_some(), "N")?;
            reject(p.a.is_some(), "A")?;
            let t = need(p.t, "T")?;
            let alpha = need(p.alpha, "alpha")?;
            if kind == MomentKind::Th4 {
                MomentSpec::th4(t, alpha)
            } else {
                if t.fract() != 0.0 || t < 1.0 {
                    return Err(CliError::Config(format!("S1_BOUND needs an integer T1, got {t}")));
                }
                MomentSpec::s1_bound(t as u64, alpha)
            }
        }
        _ => {
            reject(p.n.is_some(), "N")?;
            reject(p.a.is_some(), "A")?;
            reject(p.alpha.is_some(), "alpha")?;
            let t = need(p.t, "T")?;
            MomentSpec { kind, t: Some(t), n: None, a: None, alpha: None, eps_slack: 0.0 }
        }
    }
    .with_eps_slack(p.eps.unwrap_or(eps_default));
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(spec)
}

/// Runs `f(0..n)` on up to `jobs` threads; results come back in index order.
pub fn schedule<T, F>(n: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let slots: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, n.max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let v = f(i);
                *slots[i].lock().unwrap() = Some(v);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().expect("every index is claimed once")).collect()
}

/// Per-kind fitted constants.
#[derive(Debug, Clone, PartialEq)]
pub struct KindSummary {
    pub kind: MomentKind,
    pub points: usize,
    /// Max ratio over the grid.
    pub fitted_c: f64,
    /// Least-squares slope of log residual against log bound.
    pub residual_bound_slope: Option<f64>,
    /// Growth exponent of the ratio along T (N for TH2).
    pub ratio_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub kinds: Vec<KindSummary>,
}

impl Summary {
    pub fn from_rows(rows: &[ReportRow]) -> Self {
        let mut kinds = Vec::new();
        for k in MomentKind::ALL {
            let r: Vec<&ReportRow> = rows.iter().filter(|r| r.kind == k).collect();
            if r.is_empty() {
                continue;
            }
            let x: Vec<f64> = r.iter().map(|r| r.t.or(r.n.map(|n| n as f64)).unwrap_or(f64::NAN)).collect();
            let ratios: Vec<f64> = r.iter().map(|r| r.ratio).collect();
            let (c, exponent) = fit_constant(&x, &ratios);
            let res: Vec<f64> = r.iter().map(|r| r.residual).collect();
            let bnd: Vec<f64> = r.iter().map(|r| r.bound).collect();
            kinds.push(KindSummary {
                kind: k,
                points: r.len(),
                fitted_c: c,
                residual_bound_slope: log_log_slope(&bnd, &res),
                ratio_exponent: exponent,
            });
        }
        Summary { kinds }
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        writeln!(f, "{:<14} {:>6} {:>12} {:>12} {:>12}", "kind", "points", "fitted_C", "slope_r/b", "ratio_exp")?;
        for k in &self.kinds {
            writeln!(
                f,
                "{:<14} {:>6} {:>12.5} {:>12} {:>12}",
                k.kind.name(),
                k.points,
                k.fitted_c,
                o(k.residual_bound_slope),
                o(k.ratio_exponent)
            )?;
        }
        Ok(())
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub rows: Vec<ReportRow>,
    /// `(grid index, message)` of failed jobs.
    pub failures: Vec<(usize, String)>,
    pub summary: Summary,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            exit::OK
        } else {
            exit::JOB_FAILED
        }
    }
}

/// Runs the configured jobs and writes the CSV (or the cache for `table`).
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    if cfg.command == Command::Table {
        let t = hml_core::divisor::build_table(cfg.nmax.unwrap()).map_err(|e| CliError::Config(e.to_string()))?;
        write_cache(&t, &cfg.out_path)?;
        return Ok(Outcome { rows: Vec::new(), failures: Vec::new(), summary: Summary::default() });
    }
    let specs = cfg.specs()?;
    // fail on an unwritable output before any work is done
    let file = File::create(&cfg.out_path).map_err(|e| CliError::io(&cfg.out_path, e))?;
    let ctx = PrecisionContext::new(cfg.prec_bits).map_err(|e| CliError::Config(e.to_string()))?;
    let needed = specs.iter().map(|s| s.table_needed()).max().unwrap_or(1);
    let table = load_or_build(cfg.table_path.as_deref(), needed)?;
    let t_max = specs.iter().map(|s| s.t_max()).fold(0.0, f64::max);
    let line = CriticalLine::new().with_t_max(t_max);
    let deps = MomentDeps { line: &line, table: &table, ctx, tol: cfg.tol };

    let results = schedule(specs.len(), cfg.jobs, |i| {
        let start = Instant::now();
        verify(&specs[i], &deps).map(|mut r| {
            r.runtime_ms = start.elapsed().as_millis() as u64;
            r
        })
    });

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut running = 0f64;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(rep) => {
                let mut row = ReportRow::from_report(&rep, cfg.tol);
                running = running.max(row.ratio);
                row.fitted_c_so_far = Some(running);
                rows.push(row);
            }
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    emit_csv(&rows, BufWriter::new(file)).map_err(|e| CliError::io(&cfg.out_path, e))?;
    let summary = Summary::from_rows(&rows);
    Ok(Outcome { rows, failures, summary })
}

/// [`execute`] with reporting on stdout/stderr; returns the exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    match execute(cfg) {
        Ok(out) => {
            if cfg.command == Command::Table {
                println!("wrote divisor cache to {}", cfg.out_path.display());
                return exit::OK;
            }
            if cfg.command == Command::Sweep {
                for r in &out.rows {
                    let x = r.t.or(r.n.map(|n| n as f64)).unwrap_or(f64::NAN);
                    println!(
                        "{:<14} x = {:<12} ratio = {:<12.5} fitted C so far = {:.5}",
                        r.kind.name(),
                        x,
                        r.ratio,
                        r.fitted_c_so_far.unwrap_or(f64::NAN)
                    );
                }
            }
            for (i, msg) in &out.failures {
                eprintln!("job {i} failed: {msg}");
            }
            print!("{}", out.summary);
            println!("{} rows written to {}", out.rows.len(), cfg.out_path.display());
            out.exit_code()
        }
        Err(e) => {
            eprintln!("hml: {e}");
            e.exit_code()
        }
    }
}
