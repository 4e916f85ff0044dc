//! Command-line front end: minimum search, clustering, query benchmarking,
//! and QRAM verification, all deterministic functions of (input, flags, seed).
//!
//! Exit codes: 0 success, 1 failed verification, 2 input error, 3 resource
//! error.

mod input;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qumin_core::baselines::{bench_sweep, emit_bench_csv, format_bench_csv};
use qumin_core::qkmeans::{
    run_lloyd, run_lloyd_traced, LloydResult, PointSet, QuantizationSpec,
};
use qumin_core::qms::{run_descent, verify_membership, DescentTrace, IterationMode, QmsConfig};
use qumin_core::qram::{prepare, verify_roundtrip, Dataset};
use qumin_core::Error;

#[derive(Parser)]
#[command(name = "qumin", version, about = "Grover-based minimum search over a simulated QRAM")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find the minimum of an integer dataset.
    Min(MinArgs),
    /// Cluster points with search-driven Lloyd iterations.
    Kmeans(KmeansArgs),
    /// Sweep dataset sizes and emit a query-count comparison CSV.
    Bench(BenchArgs),
    /// Verify the QRAM encoding, or search for one value's membership.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Single,
    Optimal,
    Bbht,
}

impl From<Mode> for IterationMode {
    fn from(mode: Mode) -> Self {
        match mode {
            Mode::Single => IterationMode::SingleIteration,
            Mode::Optimal => IterationMode::OptimalForKnownT,
            Mode::Bbht => IterationMode::RandomizedBbht,
        }
    }
}

#[derive(Args)]
struct MinArgs {
    /// Dataset file: one unsigned integer per line, or a JSON array (.json).
    #[arg(long)]
    input: PathBuf,
    /// Trace destination (with --trace); stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Root seed; drawn from entropy and reported when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Failed measurements tolerated before a prefix bit falls back to 1.
    #[arg(long, default_value_t = 3)]
    retries: usize,
    #[arg(long, value_enum, default_value_t = Mode::Bbht)]
    mode: Mode,
    /// Emit the full descent trace as JSON.
    #[arg(long)]
    trace: bool,
    /// Override the planned data-register width.
    #[arg(long)]
    bits: Option<u32>,
}

#[derive(Args)]
struct KmeansArgs {
    /// Points file: comma-separated real coordinates, one point per line.
    #[arg(long)]
    input: PathBuf,
    /// Clustering JSON destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Number of centroids.
    #[arg(long)]
    k: usize,
    /// Distance-register width in bits.
    #[arg(long, default_value_t = 8)]
    bits: u32,
    #[arg(long, default_value_t = 50)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 3)]
    retries: usize,
    #[arg(long, value_enum, default_value_t = Mode::Bbht)]
    mode: Mode,
    /// Include per-point descent traces of the final assignment round.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Smallest address width to sweep.
    #[arg(long)]
    n_min: usize,
    /// Largest address width to sweep.
    #[arg(long)]
    n_max: usize,
    /// Value width in bits.
    #[arg(long, default_value_t = 6)]
    bits: u32,
    /// Random datasets per width.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Dataset file to encode and check.
    #[arg(long)]
    input: PathBuf,
    /// When given, run an exact-value membership search instead of the
    /// encoding round trip.
    value: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 3)]
    retries: usize,
    #[arg(long, value_enum, default_value_t = Mode::Optimal)]
    mode: Mode,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Min(args) => cmd_min(args),
        Command::Kmeans(args) => cmd_kmeans(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::InvalidInput(_) | Error::Io(_) => ExitCode::from(2),
                Error::ResourceLimit(_) => ExitCode::from(3),
            }
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

/// Write the primary artifact to the output path, or to stdout when no path
/// was given (in which case the human summary moves to stderr).
fn deliver(artifact: &str, output: Option<&PathBuf>, summary: &str) -> qumin_core::Result<()> {
    match output {
        Some(path) => {
            fs::write(path, artifact)?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            print!("{artifact}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_min(args: MinArgs) -> qumin_core::Result<ExitCode> {
    let values = input::read_dataset(&args.input)?;
    let ds = match args.bits {
        Some(bits) => Dataset::with_width(&values, bits)?,
        None => Dataset::plan(&values)?,
    };
    let cfg = QmsConfig {
        retries: args.retries,
        iteration_mode: args.mode.into(),
        seed: resolve_seed(args.seed),
        warm_start: None,
    };
    let trace = run_descent(&ds, &cfg)?;

    let mut summary = format!(
        "minimum: {}\naddresses: {:?}\noracle queries: {}\nseed: {}\nmode: {}\nretries: {}",
        trace.result_value,
        trace.result_addresses,
        trace.total_queries,
        cfg.seed,
        mode_name(args.mode),
        cfg.retries,
    );
    if let Some(warning) = &trace.warning {
        summary.push_str(&format!("\nwarning: {warning}"));
    }

    if args.trace {
        let json = to_json(&trace)?;
        deliver(&json, args.output.as_ref(), &summary)?;
    } else {
        println!("{summary}");
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct KmeansOutput<'a> {
    seed: u64,
    k: usize,
    bits: u32,
    max_iters: usize,
    tol: f64,
    mode: IterationMode,
    retries: usize,
    iterations: usize,
    objective: f64,
    objective_history: &'a [f64],
    centroids: &'a [Vec<f64>],
    labels: &'a [usize],
    #[serde(skip_serializing_if = "Option::is_none")]
    traces: Option<&'a [DescentTrace]>,
}

fn cmd_kmeans(args: KmeansArgs) -> qumin_core::Result<ExitCode> {
    let pts = PointSet::new(input::read_points(&args.input)?)?;
    if args.k == 0 || args.k > pts.len() {
        return Err(Error::InvalidInput(format!(
            "--k {} outside the valid range 1..={}",
            args.k,
            pts.len()
        )));
    }
    let q = QuantizationSpec::for_points(&pts, args.bits);
    let cfg = QmsConfig {
        retries: args.retries,
        iteration_mode: args.mode.into(),
        seed: resolve_seed(args.seed),
        warm_start: None,
    };
    let (result, traces): (LloydResult, Option<Vec<DescentTrace>>) = if args.trace {
        let (result, traces) = run_lloyd_traced(&pts, args.k, &q, &cfg, args.max_iters, args.tol)?;
        (result, Some(traces))
    } else {
        (run_lloyd(&pts, args.k, &q, &cfg, args.max_iters, args.tol)?, None)
    };

    let output = KmeansOutput {
        seed: cfg.seed,
        k: args.k,
        bits: args.bits,
        max_iters: args.max_iters,
        tol: args.tol,
        mode: cfg.iteration_mode,
        retries: cfg.retries,
        iterations: result.iterations,
        objective: result.assignment.objective,
        objective_history: &result.objective_history,
        centroids: &result.centroids.centroids,
        labels: &result.assignment.labels,
        traces: traces.as_deref(),
    };
    let summary = format!(
        "objective: {}\niterations: {}\nseed: {}",
        result.assignment.objective, result.iterations, cfg.seed
    );
    deliver(&to_json(&output)?, args.output.as_ref(), &summary)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> qumin_core::Result<ExitCode> {
    if args.n_min > args.n_max {
        return Err(Error::InvalidInput(format!(
            "--n-min {} exceeds --n-max {}",
            args.n_min, args.n_max
        )));
    }
    let seed = resolve_seed(args.seed);
    let widths: Vec<usize> = (args.n_min..=args.n_max).collect();
    let records = bench_sweep(&widths, args.bits, args.trials, seed)?;
    let comment = format!(
        "seed={seed} trials={} bits={} distribution=uniform",
        args.trials, args.bits
    );
    let summary = format!("swept {} widths, seed: {seed}", records.len());
    match &args.output {
        Some(path) => {
            emit_bench_csv(&records, Some(&comment), path)?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            print!("{}", format_bench_csv(&records, Some(&comment))?);
            eprintln!("{summary}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> qumin_core::Result<ExitCode> {
    let values = input::read_dataset(&args.input)?;
    let ds = Dataset::plan(&values)?;
    let seed = resolve_seed(args.seed);
    match args.value {
        Some(value) => {
            if value >= 1 << ds.m {
                return Err(Error::InvalidInput(format!(
                    "value {value} does not fit in the {}-bit data register",
                    ds.m
                )));
            }
            let cfg = QmsConfig {
                retries: args.retries,
                iteration_mode: args.mode.into(),
                seed,
                warm_start: None,
            };
            let present = verify_membership(&ds, value, &cfg)?;
            println!("value {value} present: {present}");
            println!("seed: {seed}");
            Ok(ExitCode::SUCCESS)
        }
        None => {
            let state = prepare(&ds)?;
            if verify_roundtrip(&state, &ds) {
                println!(
                    "qram roundtrip: ok ({} addresses, {}-bit values)",
                    ds.num_addresses(),
                    ds.m
                );
                Ok(ExitCode::SUCCESS)
            } else {
                println!("qram roundtrip: FAILED");
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Single => "single",
        Mode::Optimal => "optimal",
        Mode::Bbht => "bbht",
    }
}

fn to_json<T: Serialize>(value: &T) -> qumin_core::Result<String> {
    let mut json = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    json.push('\n');
    Ok(json)
}
