use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use noisysort_bench::{
    emit, emit_to_writer, report_constants, run_trials, Aggregate, Algorithm, BenchConfig, BenchError, Format,
};

#[derive(Parser)]
#[command(
    name = "noisysort",
    version,
    about = "Noisy-comparison sorting and search benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration.
    Bench(BenchArgs),
    /// Print channel constants and the binary-search bound.
    Constants {
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 1 << 16)]
        n: usize,
    },
    /// Run the cross product of comma-separated n, p and delta lists.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Shared {
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pivot-sort cap constant; calibrated from p when omitted.
    #[arg(long)]
    c1: Option<f64>,
    /// Whole-sort cap constant; calibrated from p when omitted.
    #[arg(long)]
    c2: Option<f64>,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include every trial report (JSON only).
    #[arg(long)]
    per_trial: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    shared: Shared,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    shared: Shared,
    #[arg(long, value_delimiter = ',', default_value = "1024")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    delta: Vec<f64>,
}

fn config(shared: &Shared, n: usize, p: f64, delta: f64) -> BenchConfig {
    let mut c = BenchConfig::new(shared.algorithm, n, p, delta, shared.trials, shared.seed);
    c.c1 = shared.c1.unwrap_or(c.c1);
    c.c2 = shared.c2.unwrap_or(c.c2);
    c.parallel = shared.parallel;
    c
}

fn write(shared: &Shared, aggregates: &[Aggregate]) -> Result<(), BenchError> {
    match &shared.out {
        Some(path) => emit(aggregates, shared.format, shared.per_trial, path),
        None => emit_to_writer(aggregates, shared.format, shared.per_trial, std::io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Constants { p, delta, n } => {
            let text = report_constants(p, delta, n)?;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|source| BenchError::Io {
                    path: "stdout".into(),
                    source,
                })
        }
        Command::Bench(args) => {
            let c = config(&args.shared, args.n, args.p, args.delta);
            let agg = run_trials(&c)?;
            write(&args.shared, &[agg])
        }
        Command::Sweep(args) => {
            let configs: Vec<BenchConfig> = args
                .n
                .iter()
                .flat_map(|&n| {
                    let shared = &args.shared;
                    let deltas = &args.delta;
                    args.p
                        .iter()
                        .flat_map(move |&p| deltas.iter().map(move |&d| config(shared, n, p, d)))
                })
                .collect();
            // validate everything before spending time on any of it
            for c in &configs {
                c.validate()?;
            }
            let aggregates = configs.iter().map(run_trials).collect::<Result<Vec<_>, _>>()?;
            write(&args.shared, &aggregates)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("noisysort: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
