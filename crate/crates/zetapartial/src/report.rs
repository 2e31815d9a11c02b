//! Experiment orchestration and machine-readable output.
//!
//! An experiment sweeps one field over an X grid and a T grid: per X it
//! records the strip bounds, the nonzero-coefficient density (where the
//! normalization is defined), and the Brun-set count; per (X, T) cell it
//! runs the zero count, the discrepancy checks, and the sign-change check.
//! Failures are captured per stage and the run continues, so one degenerate
//! cell cannot sink a whole sweep. Everything in the report serializes
//! deterministically: two runs with the same config produce byte-identical
//! output (which is also why per-cell wall times stay out of the report;
//! the CLI prints timing to stderr instead).

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coefficients::{
    brun_set_count, build_coefficient_table, count_nonzero_coefficients, density_ratio_from_table,
};
use crate::cyclotomic::CyclotomicField;
use crate::dirichlet::PartialSum;
use crate::error::{Error, Result};
use crate::zeros::{strip_bounds, CountCheck, StripBounds, Tolerances, ZeroEngine, DEFAULT_DELTA0};

/// Output format for emitted reports and tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::domain(format!(
                "unknown output format {other:?} (expected csv or json)"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Full description of one experiment sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub q: u64,
    pub x_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub tolerances: Tolerances,
    pub format: OutputFormat,
    /// Destination path; None writes to stdout.
    pub output: Option<String>,
    /// Reserved for future randomized modes; the pipeline is deterministic
    /// and ignores it.
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::domain(format!("q must be at least 2, got {}", self.q)));
        }
        validate_grid("X", &self.x_grid)?;
        validate_grid("T", &self.t_grid)?;
        self.tolerances.validate()
    }
}

/// Parses a comma-separated grid ("2,5,10") and checks it is nonempty,
/// finite, and strictly ascending. `name` labels error messages.
pub fn parse_grid(name: &str, raw: &str) -> Result<Vec<f64>> {
    let mut grid = Vec::new();
    for piece in raw.split(',') {
        let v = piece.trim().parse::<f64>().map_err(|_| {
            Error::domain(format!("{name} grid entry is not a number: {piece:?}"))
        })?;
        grid.push(v);
    }
    validate_grid(name, &grid)?;
    Ok(grid)
}

fn validate_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain(format!("{name} grid must not be empty")));
    }
    for &v in grid {
        if !v.is_finite() {
            return Err(Error::domain(format!("{name} grid contains {v}")));
        }
    }
    for pair in grid.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::domain(format!(
                "{name} grid must be strictly ascending, got {} before {}",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

/// Strip bounds at one X.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsEntry {
    #[serde(rename = "X")]
    pub x: f64,
    /// Leading index of the sum at this cutoff.
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(flatten)]
    pub strip: StripBounds,
}

/// Nonzero-coefficient density at one X (recorded for X >= 16, where the
/// normalizing scale is comfortably defined).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEntry {
    #[serde(rename = "X")]
    pub x: f64,
    pub count: u64,
    pub ratio: f64,
}

/// Brun-set count at one cutoff, with the square-root-log normalization
/// count * (log y / log log y)^(1/2) / y when log log y > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrunEntry {
    pub y: f64,
    pub count: u64,
    pub normalized: Option<f64>,
}

/// One (X, T) cell: the counting checks plus the sign-change check (absent
/// when the sum is constant at this X, where the slice is identically
/// zero and the check is vacuous).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    #[serde(flatten)]
    pub check: CountCheck,
    pub descartes_pass: Option<bool>,
}

/// A stage that failed for one grid point. `code` is the exit code the
/// failure maps to; 0 marks an informational entry (a degenerate but valid
/// configuration, e.g. a constant sum that has no strip).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub stage: String,
    pub message: String,
    pub code: i32,
}

/// Everything one experiment run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: ExperimentConfig,
    pub bounds: Vec<BoundsEntry>,
    pub density: Vec<DensityEntry>,
    pub brun: Vec<BrunEntry>,
    pub cells: Vec<CellRecord>,
    pub failures: Vec<CellFailure>,
}

impl VerificationReport {
    /// Exit code for the run: the worst failure code, against 2 for any
    /// cell whose discrepancy breaks the X/2 bound.
    pub fn worst_exit_code(&self) -> i32 {
        let mut worst = 0;
        for cell in &self.cells {
            if !cell.check.lrz2_pass {
                worst = worst.max(2);
            }
        }
        for failure in &self.failures {
            worst = worst.max(failure.code);
        }
        worst
    }
}

/// Runs the full sweep. Grid-point failures are recorded and skipped;
/// only a bad config or an invalid q is a hard error.
pub fn run_experiment(config: &ExperimentConfig) -> Result<VerificationReport> {
    config.validate()?;
    let field = CyclotomicField::new(config.q)?;
    let engine = ZeroEngine::new(config.tolerances)?;

    let mut report = VerificationReport {
        config: config.clone(),
        bounds: Vec::new(),
        density: Vec::new(),
        brun: Vec::new(),
        cells: Vec::new(),
        failures: Vec::new(),
    };

    for &x in &config.x_grid {
        // Per-X stages. The strip doubles as the sigma band for the
        // sign-change check below.
        let mut band: Option<(PartialSum, StripBounds)> = None;
        match build_coefficient_table(&field, x) {
            Ok(table) => {
                let sum = PartialSum::from_table(&table);
                match strip_bounds(&sum, field.n0(), DEFAULT_DELTA0, config.tolerances.bisection) {
                    Ok(strip) => {
                        report.bounds.push(BoundsEntry {
                            x,
                            n: sum.leading_index(),
                            strip,
                        });
                        band = Some((sum, strip));
                    }
                    Err(e) => record_failure(&mut report, x, None, "bounds", &e),
                }
                if x >= 16.0 {
                    match density_entry(&table, x) {
                        Ok(entry) => report.density.push(entry),
                        Err(e) => record_failure(&mut report, x, None, "density", &e),
                    }
                }
            }
            Err(e) => record_failure(&mut report, x, None, "coefficients", &e),
        }
        match brun_entry(config.q, x) {
            Ok(entry) => report.brun.push(entry),
            Err(e) => record_failure(&mut report, x, None, "brun", &e),
        }

        for &t in &config.t_grid {
            match engine.count_check(&field, x, t) {
                Ok(check) => {
                    let descartes_pass = match &band {
                        Some((sum, strip)) => {
                            match engine.descartes_check(
                                sum,
                                t,
                                strip.alpha - 1.0,
                                strip.beta + 1.0,
                            ) {
                                Ok(d) => Some(d.passes()),
                                Err(e) => {
                                    record_failure(&mut report, x, Some(t), "descartes", &e);
                                    None
                                }
                            }
                        }
                        None => None,
                    };
                    report.cells.push(CellRecord {
                        check,
                        descartes_pass,
                    });
                }
                Err(e) => record_failure(&mut report, x, Some(t), "cell", &e),
            }
        }
    }
    Ok(report)
}

fn record_failure(report: &mut VerificationReport, x: f64, t: Option<f64>, stage: &str, e: &Error) {
    // A constant sum has no strip by construction; that is a property of
    // the inputs, not a failed computation, so it does not drive the exit
    // code.
    let code = match e {
        Error::ConstantPolynomial => 0,
        other => other.exit_code(),
    };
    report.failures.push(CellFailure {
        x,
        t,
        stage: stage.to_string(),
        message: e.to_string(),
        code,
    });
}

fn density_entry(table: &crate::coefficients::CoefficientTable, x: f64) -> Result<DensityEntry> {
    let count = count_nonzero_coefficients(table, x)?;
    let ratio = density_ratio_from_table(table, x)?;
    Ok(DensityEntry { x, count, ratio })
}

fn brun_entry(q: u64, y: f64) -> Result<BrunEntry> {
    let count = brun_set_count(q, y)?;
    let normalized = if y.ln().ln() > 0.0 {
        Some(count as f64 * (y.ln() / y.ln().ln()).sqrt() / y)
    } else {
        None
    };
    Ok(BrunEntry {
        y,
        count,
        normalized,
    })
}

/// The cell table as CSV: header plus one row per cell, floats at 15
/// significant digits, RFC 4180 quoting.
pub fn render_csv(report: &VerificationReport) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "q",
            "X",
            "T",
            "N",
            "count",
            "predicted",
            "discrepancy",
            "lrz2_bound",
            "lrz2_pass",
            "density_scale",
        ])
        .map_err(csv_error)?;
    for cell in &report.cells {
        let c = &cell.check;
        writer
            .write_record([
                c.q.to_string(),
                fmt_sig(c.x),
                fmt_sig(c.t),
                c.n.to_string(),
                c.count.to_string(),
                fmt_sig(c.predicted),
                fmt_sig(c.discrepancy),
                fmt_sig(c.lrz2_bound),
                c.lrz2_pass.to_string(),
                c.density_scale.map(fmt_sig).unwrap_or_default(),
            ])
            .map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::numerical(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::numerical(e.to_string()))
}

/// The whole report as pretty JSON (field names match the CSV schema).
pub fn render_json(report: &VerificationReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report).map_err(json_error)?;
    text.push('\n');
    Ok(text)
}

/// Writes the report to the destination (stdout when None) in the given
/// format.
pub fn emit(report: &VerificationReport, format: OutputFormat, destination: Option<&Path>) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => render_csv(report)?,
        OutputFormat::Json => render_json(report)?,
    };
    match destination {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// 15 significant digits in scientific notation, enough to round-trip any
/// double that occurs here while keeping rows compact.
fn fmt_sig(v: f64) -> String {
    format!("{v:.14e}")
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::numerical(format!("csv serialization failed: {other:?}")),
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::numerical(format!("json serialization failed: {e}"))
}

/// Tolerance overrides taken from the command line, all optional.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ToleranceOverrides {
    pub bisection: Option<f64>,
    pub residual: Option<f64>,
    pub boundary: Option<f64>,
    pub newton: Option<f64>,
}

/// Resolves tolerances with precedence command line > environment >
/// defaults, each field independently. The environment lookup is injected
/// so tests can exercise precedence without touching the process
/// environment (keys: ZETAPARTIAL_TOL_BISECTION, _RESIDUAL, _BOUNDARY,
/// _NEWTON).
pub fn resolve_tolerances<F>(cli: &ToleranceOverrides, env: F) -> Result<Tolerances>
where
    F: Fn(&str) -> Option<String>,
{
    let defaults = Tolerances::default();
    let tol = Tolerances {
        bisection: resolve_one(cli.bisection, "ZETAPARTIAL_TOL_BISECTION", defaults.bisection, &env)?,
        residual: resolve_one(cli.residual, "ZETAPARTIAL_TOL_RESIDUAL", defaults.residual, &env)?,
        boundary: resolve_one(cli.boundary, "ZETAPARTIAL_TOL_BOUNDARY", defaults.boundary, &env)?,
        newton: resolve_one(cli.newton, "ZETAPARTIAL_TOL_NEWTON", defaults.newton, &env)?,
    };
    tol.validate()?;
    Ok(tol)
}

fn resolve_one<F>(cli: Option<f64>, key: &str, default: f64, env: &F) -> Result<f64>
where
    F: Fn(&str) -> Option<String>,
{
    if let Some(v) = cli {
        return Ok(v);
    }
    match env(key) {
        Some(raw) => raw
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::domain(format!("{key} is not a number: {raw:?}"))),
        None => Ok(default),
    }
}
