use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use elasto_core::experiment::ErrorReport;

use crate::error::AppResult;
use crate::pipeline::{self, Overrides};

#[derive(Debug, Parser)]
#[command(name = "elasto", version, about = "Simulate random elastic sources and reconstruct their mean and variance")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML experiment configuration; the built-in benchmark when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, overriding `output_dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub realizations: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Boundary statistics at every configured frequency.
    Simulate,
    /// Assemble the stacked operators and record their shapes and norms.
    Assemble,
    /// Singular spectra of every kernel family at the diagnostic frequency.
    Spectra,
    /// Reconstruct the mean from `statistics.csv`.
    ReconstructMean,
    /// Reconstruct the variance from `statistics.csv`.
    ReconstructVariance,
    /// All of the above in one pass.
    RunAll,
}

fn print_report(label: &str, report: &ErrorReport) {
    for f in &report.fields {
        println!("{label} {:<5} relative_l2 {:.4} max_abs {:.4}", f.name, f.relative_l2, f.max_abs);
    }
}

pub fn run(cli: &Cli) -> AppResult<()> {
    let overrides = Overrides { seed: cli.seed, realizations: cli.realizations, out: cli.out.clone() };
    let config = pipeline::resolve_config(cli.config.as_deref(), &overrides)?;
    let out = pipeline::prepare_output(&config)?;
    let start = Instant::now();
    match cli.command {
        Command::Simulate => {
            let stats = pipeline::simulate(&config, &out)?;
            println!("wrote {} frequencies x {} receivers", stats.frequencies.len(), stats.receivers.len());
        }
        Command::Assemble => {
            let rows = pipeline::assemble(&config, &out)?;
            println!("assembled {} blocks", rows.len());
        }
        Command::Spectra => {
            let rows = pipeline::spectra(&config, &out)?;
            println!("wrote {} singular values", rows.len());
        }
        Command::ReconstructMean => print_report("mean", &pipeline::reconstruct_mean(&config, &out, None)?.report),
        Command::ReconstructVariance => {
            let outcome = pipeline::reconstruct_variance(&config, &out, None)?;
            print_report("variance raw", &outcome.raw_report);
            print_report("variance clamped", &outcome.report);
        }
        Command::RunAll => {
            let summary = pipeline::run_all(&config, &out)?;
            print_report("mean", &summary.mean.report);
            print_report("variance raw", &summary.variance.raw_report);
            print_report("variance clamped", &summary.variance.report);
        }
    }
    eprintln!("done in {:.1} s, output in {}", start.elapsed().as_secs_f64(), out.display());
    Ok(())
}
