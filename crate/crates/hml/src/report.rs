//! CSV report rows.

use std::io::{Read, Write};

use hml_core::moments::{MomentKind, MomentReport};

use crate::CliError;

pub const HEADER: [&str; 15] = [
    "kind",
    "T",
    "N",
    "A",
    "alpha",
    "lhs_re",
    "lhs_im",
    "main_re",
    "main_im",
    "residual",
    "bound",
    "ratio",
    "prec_bits",
    "eps_slack",
    "runtime_ms",
];

/// One finished job. `tol` and `fitted_c_so_far` echo the run and are not
/// part of the CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub kind: MomentKind,
    pub t: Option<f64>,
    pub n: Option<u64>,
    pub a: Option<f64>,
    pub alpha: Option<f64>,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub main_re: f64,
    pub main_im: f64,
    pub residual: f64,
    pub bound: f64,
    pub ratio: f64,
    pub prec_bits: u32,
    pub eps_slack: f64,
    pub runtime_ms: u64,
    pub tol: Option<f64>,
    pub fitted_c_so_far: Option<f64>,
}

impl ReportRow {
    pub fn from_report(r: &MomentReport, tol: Option<f64>) -> Self {
        ReportRow {
            kind: r.spec.kind,
            t: r.spec.t,
            n: r.spec.n,
            a: r.spec.a,
            alpha: r.spec.alpha,
            lhs_re: r.lhs.re,
            lhs_im: r.lhs.im,
            main_re: r.main.re,
            main_im: r.main.im,
            residual: r.residual,
            bound: r.bound,
            ratio: r.ratio,
            prec_bits: r.prec_bits,
            eps_slack: r.spec.eps_slack,
            runtime_ms: r.runtime_ms,
            tol,
            fitted_c_so_far: None,
        }
    }

    /// The CSV fields with `runtime_ms` blanked, for determinism comparisons.
    pub fn numeric_fields(&self) -> Vec<String> {
        let mut f = self.fields();
        f[14] = String::new();
        f
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.kind.name().to_string(),
            opt(self.t),
            self.n.map(|n| n.to_string()).unwrap_or_default(),
            opt(self.a),
            opt(self.alpha),
            fmt17(self.lhs_re),
            fmt17(self.lhs_im),
            fmt17(self.main_re),
            fmt17(self.main_im),
            fmt17(self.residual),
            fmt17(self.bound),
            fmt17(self.ratio),
            self.prec_bits.to_string(),
            fmt17(self.eps_slack),
            self.runtime_ms.to_string(),
        ]
    }
}

/// 17 significant digits, which round-trips every binary64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

/// Writes the header and one line per row, LF line endings.
pub fn emit_csv<W: Write>(rows: &[ReportRow], w: W) -> csv::Result<()> {
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wr.write_record(HEADER)?;
    for r in rows {
        wr.write_record(r.fields())?;
    }
    wr.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T, CliError> {
    rec[i].parse().map_err(|_| CliError::Config(format!("column {}: bad value '{}'", HEADER[i], &rec[i])))
}

fn opt_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<Option<T>, CliError> {
    if rec[i].is_empty() {
        Ok(None)
    } else {
        field(rec, i).map(Some)
    }
}

/// Parses a report written by [`emit_csv`].
pub fn parse_csv<R: Read>(r: R) -> Result<Vec<ReportRow>, CliError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let head = rd.headers().map_err(|e| CliError::Config(e.to_string()))?;
    if head.iter().ne(HEADER.iter().copied()) {
        return Err(CliError::Config(format!("unexpected header {head:?}")));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| CliError::Config(e.to_string()))?;
        let kind: MomentKind = rec[0].parse().map_err(|_| CliError::Config(format!("unknown kind '{}'", &rec[0])))?;
        rows.push(ReportRow {
            kind,
            t: opt_field(&rec, 1)?,
            n: opt_field(&rec, 2)?,
            a: opt_field(&rec, 3)?,
            alpha: opt_field(&rec, 4)?,
            lhs_re: field(&rec, 5)?,
            lhs_im: field(&rec, 6)?,
            main_re: field(&rec, 7)?,
            main_im: field(&rec, 8)?,
            residual: field(&rec, 9)?,
            bound: field(&rec, 10)?,
            ratio: field(&rec, 11)?,
            prec_bits: field(&rec, 12)?,
            eps_slack: field(&rec, 13)?,
            runtime_ms: field(&rec, 14)?,
            tol: None,
            fitted_c_so_far: None,
        });
    }
    Ok(rows)
}
