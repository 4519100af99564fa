use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use doublewell_qfi::config::{ExperimentConfig, ExperimentKind, GridSpec, Overrides};

/// Regenerate double-well QFI and self-trapping data as CSV.
#[derive(Debug, Parser)]
#[command(name = "doublewell-qfi", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: ExperimentKind,
    /// TOML configuration file; per-experiment defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
    /// Lambda values: `2`, `1,4` or `min:max:count`.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<GridSpec>,
    /// Particle number N.
    #[arg(long)]
    n: Option<u32>,
    /// Largest kappa*t.
    #[arg(long)]
    tmax: Option<f64>,
    /// Number of time samples.
    #[arg(long)]
    samples: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        output: cli.out,
        workers: cli.workers,
        lambda: cli.lambda,
        n_particles: cli.n,
        time_max: cli.tmax,
        samples: cli.samples,
    };
    let result = match &cli.config {
        Some(path) => ExperimentConfig::from_file(Some(cli.experiment), path, &overrides),
        None => ExperimentConfig::resolve(Some(cli.experiment), None, &overrides),
    }
    .and_then(|cfg| doublewell_qfi::run(&cfg));
    match result {
        Ok(report) => {
            println!(
                "wrote {} files and {}",
                report.files.len(),
                report.manifest.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("doublewell-qfi: error: {msg}");
            ExitCode::FAILURE
        }
    }
}
