use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wavext::{execute, Experiment, ExperimentConfig};

/// Space-time finite element experiments for the acoustic wave equation.
#[derive(Debug, Parser)]
#[command(name = "wavext", version)]
struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to the config's `out` key, then `results`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for independent runs.
    #[arg(long)]
    jobs: Option<usize>,
    /// Exit with code 4 when acceptance thresholds are missed.
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match ExperimentConfig::from_file(&args.config, args.experiment) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("wavext: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let out = args
        .out
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    match execute(&config, &out, args.jobs, args.check) {
        Ok(outcome) => {
            println!(
                "wrote {} runs to {}",
                outcome.records.len(),
                outcome.results_csv.display()
            );
            if outcome.check_failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &outcome.check_failures {
                    eprintln!("check failed: {f}");
                }
                ExitCode::from(4)
            }
        }
        Err(e) => {
            eprintln!("wavext: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
