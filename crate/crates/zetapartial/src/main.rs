//! Command-line front end: one verb per artifact, machine-readable output,
//! exit codes 0 (success), 1 (usage/domain), 2 (counting bound violated),
//! 3 (numerical failure), 4 (I/O failure).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use zetapartial::coefficients::{
    brun_set_count, brun_set_members, builder_for, count_nonzero_coefficients,
    density_ratio_from_table, CoefficientKind, CoefficientTable, DEFAULT_TABLE_CAP,
};
use zetapartial::cyclotomic::CyclotomicField;
use zetapartial::dirichlet::PartialSum;
use zetapartial::error::{Error, Result};
use zetapartial::report::{
    emit, parse_grid, resolve_tolerances, run_experiment, ExperimentConfig, OutputFormat,
    ToleranceOverrides,
};
use zetapartial::zeros::{strip_bounds, Tolerances, ZeroEngine, DEFAULT_DELTA0};

#[derive(Parser)]
#[command(
    name = "zetapartial",
    version,
    about = "Partial sums of cyclotomic Dedekind zeta functions: coefficient tables, strip bounds, and argument-principle zero counts",
    after_help = "Exit codes: 0 success, 1 usage or domain error, 2 counting bound violated, 3 numerical failure, 4 I/O failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Bisection width for strip bounds [env: ZETAPARTIAL_TOL_BISECTION] [default: 1e-12]
    #[arg(long, global = true, value_name = "TOL")]
    tol_bisection: Option<f64>,

    /// Envelope-relative residual accepted for a located zero [env: ZETAPARTIAL_TOL_RESIDUAL] [default: 1e-9]
    #[arg(long, global = true, value_name = "TOL")]
    tol_residual: Option<f64>,

    /// Boundary-zero trigger as a fraction of the term-magnitude envelope [env: ZETAPARTIAL_TOL_BOUNDARY] [default: 1e-10]
    #[arg(long, global = true, value_name = "TOL")]
    tol_boundary: Option<f64>,

    /// Newton step size that counts as converged [env: ZETAPARTIAL_TOL_NEWTON] [default: 1e-12]
    #[arg(long, global = true, value_name = "TOL")]
    tol_newton: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the field invariants: q, phi(q), and the ramified primes with (e, f, g)
    FieldInfo {
        /// Cyclotomic conductor (q >= 2)
        #[arg(long)]
        q: u64,
    },
    /// Emit the nonzero rows of a coefficient table
    Coeffs {
        #[arg(long)]
        q: u64,
        /// Cutoff X >= 1
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        /// Table kind: a (ideal counts), b (ramified part), c (quotient series)
        #[arg(long, default_value = "a")]
        kind: String,
        /// Output format: csv or json
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Emit x,count,ratio rows of the nonzero-coefficient density over a grid
    Density {
        #[arg(long)]
        q: u64,
        /// Comma-separated ascending cutoffs, each >= 16
        #[arg(long)]
        grid: String,
    },
    /// Count (and optionally list) squarefree n <= y with all prime factors = 1 (mod q)
    Brun {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        /// Include the member list in the output
        #[arg(long)]
        members: bool,
    },
    /// Evaluate the partial sum at sigma + i t
    Eval {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
    /// Emit sigma,im rows of the imaginary part along a horizontal line
    Imslice {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// Range as start:end:step, end inclusive
        #[arg(long, value_name = "A:B:STEP", allow_hyphen_values = true)]
        sigma_range: String,
    },
    /// Print the zero-strip bounds alpha, beta, and the closed-form left bound
    Bounds {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        /// Slack parameter of the closed-form left bound
        #[arg(long, default_value_t = DEFAULT_DELTA0, allow_negative_numbers = true)]
        delta0: f64,
    },
    /// Count zeros up to height T against the (T/2pi) log N main term
    Count {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
    /// Locate all zeros up to height T
    Zeros {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// Output format: csv or json
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Run the counting check against the X/2 discrepancy bound (exit 2 if violated)
    Verify {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
    /// Run the full verification sweep over X and T grids
    Experiment {
        #[arg(long)]
        q: u64,
        /// Comma-separated ascending X grid
        #[arg(long, value_name = "X1,X2,...")]
        x_grid: String,
        /// Comma-separated ascending T grid
        #[arg(long, value_name = "T1,T2,...")]
        t_grid: String,
        /// Report format: csv (cell table) or json (full report)
        #[arg(long, default_value = "json")]
        format: String,
        /// Destination file; stdout when omitted
        #[arg(long)]
        output: Option<PathBuf>,
        /// Reserved; the pipeline is deterministic
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit 2, which this tool reserves for counting-bound
            // violations; usage errors are 1, help/version are 0.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let overrides = ToleranceOverrides {
        bisection: cli.tol_bisection,
        residual: cli.tol_residual,
        boundary: cli.tol_boundary,
        newton: cli.tol_newton,
    };
    let tol = resolve_tolerances(&overrides, |key| std::env::var(key).ok())?;

    match cli.command {
        Command::FieldInfo { q } => field_info(q),
        Command::Coeffs { q, x, kind, format } => coeffs(q, x, &kind, &format),
        Command::Density { q, grid } => density(q, &grid),
        Command::Brun { q, y, members } => brun(q, y, members),
        Command::Eval { q, x, sigma, t } => eval(q, x, sigma, t),
        Command::Imslice {
            q,
            x,
            t,
            sigma_range,
        } => imslice(q, x, t, &sigma_range),
        Command::Bounds { q, x, delta0 } => bounds(q, x, delta0, tol),
        Command::Count { q, x, t } => count(q, x, t, tol),
        Command::Zeros { q, x, t, format } => zeros(q, x, t, &format, tol),
        Command::Verify { q, x, t } => verify(q, x, t, tol),
        Command::Experiment {
            q,
            x_grid,
            t_grid,
            format,
            output,
            seed,
        } => experiment(q, &x_grid, &t_grid, &format, output.as_deref(), seed, tol),
    }
}

fn field_info(q: u64) -> Result<u8> {
    let field = CyclotomicField::new(q)?;
    let doc = json!({
        "q": field.q(),
        "phi": field.n0(),
        "ramified": field.ramified(),
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("static document"));
    Ok(0)
}

fn build_table(q: u64, x: f64, kind: CoefficientKind) -> Result<CoefficientTable> {
    let field = CyclotomicField::new(q)?;
    builder_for(kind).build(&field, x, DEFAULT_TABLE_CAP)
}

fn coeffs(q: u64, x: f64, kind: &str, format: &str) -> Result<u8> {
    let kind: CoefficientKind = kind.parse()?;
    let format: OutputFormat = format.parse()?;
    let table = build_table(q, x, kind)?;
    match format {
        OutputFormat::Csv => {
            println!("n,value");
            for (n, value) in table.nonzero() {
                println!("{n},{value}");
            }
        }
        OutputFormat::Json => {
            let rows: Vec<_> = table
                .nonzero()
                .map(|(n, value)| json!({"n": n, "value": value}))
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&rows).expect("static document")
            );
        }
    }
    Ok(0)
}

fn density(q: u64, grid: &str) -> Result<u8> {
    let grid = parse_grid("X", grid)?;
    let field = CyclotomicField::new(q)?;
    let largest = *grid.last().expect("grid validated nonempty");
    // One table at the largest cutoff serves every smaller one.
    let table = builder_for(CoefficientKind::A).build(&field, largest, DEFAULT_TABLE_CAP)?;
    let mut rows = Vec::new();
    for &x in &grid {
        let count = count_nonzero_coefficients(&table, x)?;
        let ratio = density_ratio_from_table(&table, x)?;
        rows.push((x, count, ratio));
    }
    println!("x,count,ratio");
    for (x, count, ratio) in rows {
        println!("{x},{count},{ratio}");
    }
    Ok(0)
}

fn brun(q: u64, y: f64, members: bool) -> Result<u8> {
    let count = brun_set_count(q, y)?;
    let doc = if members {
        json!({"q": q, "y": y, "count": count, "members": brun_set_members(q, y)?})
    } else {
        json!({"q": q, "y": y, "count": count})
    };
    println!("{}", serde_json::to_string_pretty(&doc).expect("static document"));
    Ok(0)
}

fn partial_sum(q: u64, x: f64) -> Result<PartialSum> {
    Ok(PartialSum::from_table(&build_table(
        q,
        x,
        CoefficientKind::A,
    )?))
}

fn eval(q: u64, x: f64, sigma: f64, t: f64) -> Result<u8> {
    let sum = partial_sum(q, x)?;
    let value = sum.evaluate(Complex64::new(sigma, t))?;
    let doc = json!({"re": value.re, "im": value.im});
    println!("{}", serde_json::to_string_pretty(&doc).expect("static document"));
    Ok(0)
}

fn imslice(q: u64, x: f64, t: f64, sigma_range: &str) -> Result<u8> {
    let (start, end, step) = parse_range(sigma_range)?;
    let sum = partial_sum(q, x)?;
    println!("sigma,im");
    let mut k = 0u64;
    loop {
        let sigma = start + k as f64 * step;
        // Inclusive end with slack for accumulated rounding.
        if sigma > end + step * 1e-9 {
            break;
        }
        let im = sum.imag_on_horizontal(sigma, t)?;
        println!("{sigma},{im:.14e}");
        k += 1;
    }
    Ok(0)
}

fn parse_range(raw: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::domain(format!(
            "range must be start:end:step, got {raw:?}"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("range piece is not a number: {p:?}")))
        })
        .collect::<Result<_>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if !(start.is_finite() && end.is_finite() && step.is_finite() && step > 0.0 && start <= end) {
        return Err(Error::domain(format!(
            "range needs start <= end and step > 0, got {raw:?}"
        )));
    }
    Ok((start, end, step))
}

fn bounds(q: u64, x: f64, delta0: f64, tol: Tolerances) -> Result<u8> {
    let field = CyclotomicField::new(q)?;
    let sum = partial_sum(q, x)?;
    let strip = strip_bounds(&sum, field.n0(), delta0, tol.bisection)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&strip).expect("static document")
    );
    Ok(0)
}

fn count(q: u64, x: f64, t: f64, tol: Tolerances) -> Result<u8> {
    let field = CyclotomicField::new(q)?;
    let engine = ZeroEngine::new(tol)?;
    let result = engine.count_zeros_to_height(&field, x, t)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&result).expect("static document")
    );
    Ok(0)
}

fn zeros(q: u64, x: f64, t: f64, format: &str, tol: Tolerances) -> Result<u8> {
    let format: OutputFormat = format.parse()?;
    let field = CyclotomicField::new(q)?;
    let engine = ZeroEngine::new(tol)?;
    let zeros = engine.locate_zeros_to_height(&field, x, t)?;
    match format {
        OutputFormat::Csv => {
            println!("re,im,residual");
            for z in &zeros {
                println!("{:.14e},{:.14e},{:.2e}", z.re, z.im, z.residual);
            }
        }
        OutputFormat::Json => println!(
            "{}",
            serde_json::to_string_pretty(&zeros).expect("static document")
        ),
    }
    Ok(0)
}

fn verify(q: u64, x: f64, t: f64, tol: Tolerances) -> Result<u8> {
    let field = CyclotomicField::new(q)?;
    let engine = ZeroEngine::new(tol)?;
    let check = engine.verify_counting(&field, x, t)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&check).expect("static document")
    );
    Ok(if check.lrz2_pass { 0 } else { 2 })
}

fn experiment(
    q: u64,
    x_grid: &str,
    t_grid: &str,
    format: &str,
    output: Option<&Path>,
    seed: u64,
    tol: Tolerances,
) -> Result<u8> {
    let config = ExperimentConfig {
        q,
        x_grid: parse_grid("X", x_grid)?,
        t_grid: parse_grid("T", t_grid)?,
        tolerances: tol,
        format: format.parse()?,
        output: output.map(|p| p.display().to_string()),
        seed,
    };
    let started = Instant::now();
    let report = run_experiment(&config)?;
    emit(&report, config.format, output)?;
    // Timing goes to stderr only: the report itself must be byte-identical
    // across reruns.
    eprintln!(
        "experiment: {} cells, {} failures, {:.2?}",
        report.cells.len(),
        report.failures.len(),
        started.elapsed()
    );
    let code = report.worst_exit_code();
    Ok(u8::try_from(code).unwrap_or(1))
}
