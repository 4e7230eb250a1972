//! Subcommand bodies: each runs one stage of the experiment and persists
//! its artifacts under the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use elasto_core::experiment::{
    self, reconstruct_mean as solve_mean, reconstruct_variance as solve_variance, ErrorReport, ExperimentConfig,
    MeanOutcome, VarianceOutcome,
};
use elasto_core::fredholm::{Family, KernelBlock};
use elasto_core::sources::paper_sources;
use elasto_core::stochastic::FieldStatistics;

use crate::config;
use crate::error::{AppError, AppResult};
use crate::formats::{self, BlockRow};

pub const STATISTICS: &str = "statistics.csv";
pub const SPECTRA: &str = "spectra.csv";
pub const BLOCKS: &str = "blocks.csv";
pub const CONFIG_ECHO: &str = "config.toml";

/// Command-line values that take precedence over the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
    pub out: Option<PathBuf>,
}

pub fn resolve_config(path: Option<&Path>, overrides: &Overrides) -> AppResult<ExperimentConfig> {
    let mut config = match path {
        Some(p) => config::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(n) = overrides.realizations {
        config.realizations = n;
    }
    if let Some(out) = &overrides.out {
        config.output_dir = out.to_string_lossy().into_owned();
    }
    config.validate()?;
    Ok(config)
}

/// Creates the output directory and writes the effective configuration.
pub fn prepare_output(config: &ExperimentConfig) -> AppResult<PathBuf> {
    let out = PathBuf::from(&config.output_dir);
    fs::create_dir_all(&out).map_err(|e| AppError::io(&out, e))?;
    config::save(config, &out.join(CONFIG_ECHO))?;
    Ok(out)
}

pub fn simulate(config: &ExperimentConfig, out: &Path) -> AppResult<FieldStatistics> {
    let stats = experiment::simulate(config, &paper_sources(), &config.all_frequencies())?;
    formats::write_statistics(&out.join(STATISTICS), &stats)?;
    Ok(stats)
}

fn block_rows(
    problem: &str,
    config: &ExperimentConfig,
    families: &[Family],
    frequencies: &[f64],
) -> AppResult<Vec<BlockRow>> {
    let cells = config.inversion_cells()?;
    let receivers = config.receiver_points();
    frequencies
        .iter()
        .enumerate()
        .map(|(k, &omega)| {
            let w = config.medium.wavenumbers(omega)?;
            let block = KernelBlock::assemble(families, &receivers, &cells, &w, &config.medium)?;
            Ok(BlockRow {
                problem: problem.to_string(),
                freq_index: k + 1,
                freq: omega,
                rows: block.rows(),
                cols: block.cols(),
                frobenius_norm: block.matrix.norm(),
            })
        })
        .collect()
}

/// Assembles the stacked operators of both problems and records their shapes
/// and norms.
pub fn assemble(config: &ExperimentConfig, out: &Path) -> AppResult<Vec<BlockRow>> {
    let mut rows = block_rows("mean", config, &Family::MEAN, &config.mean_frequencies.values())?;
    rows.extend(block_rows("variance", config, &Family::DIFFERENCE, &config.variance_frequencies.values())?);
    formats::write_rows(&out.join(BLOCKS), &rows)?;
    Ok(rows)
}

pub fn spectra(config: &ExperimentConfig, out: &Path) -> AppResult<Vec<formats::SpectrumRow>> {
    let rows = formats::spectrum_rows(&experiment::spectra(config)?);
    formats::write_rows(&out.join(SPECTRA), &rows)?;
    Ok(rows)
}

fn load_statistics(out: &Path) -> AppResult<FieldStatistics> {
    let path = out.join(STATISTICS);
    if !path.exists() {
        return Err(AppError::io(
            &path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "run `simulate` first to produce boundary statistics"),
        ));
    }
    formats::read_statistics(&path)
}

fn write_report(out: &Path, problem: &str, reports: &[(&ErrorReport, &str)]) -> AppResult<()> {
    let rows: Vec<_> = reports.iter().flat_map(|(r, variant)| formats::error_rows(r, variant)).collect();
    formats::write_rows(&out.join(format!("errors_{problem}.csv")), &rows)
}

pub fn reconstruct_mean(
    config: &ExperimentConfig,
    out: &Path,
    stats: Option<&FieldStatistics>,
) -> AppResult<MeanOutcome> {
    let loaded;
    let stats = match stats {
        Some(s) => s,
        None => {
            loaded = load_statistics(out)?;
            &loaded
        }
    };
    let outcome = solve_mean(config, &paper_sources(), stats)?;
    for field in &outcome.fields {
        formats::write_rows(
            &out.join(format!("field_{}.csv", field.name)),
            &formats::field_rows(&outcome.grid, field),
        )?;
    }
    formats::write_rows(&out.join("residuals_mean.csv"), &formats::residual_rows(&outcome.result))?;
    write_report(out, "mean", &[(&outcome.report, "raw")])?;
    Ok(outcome)
}

/// Writes the raw reconstruction to `field_h*sq.csv` and the clamped one to
/// `field_h*sq_clamped.csv`.
pub fn reconstruct_variance(
    config: &ExperimentConfig,
    out: &Path,
    stats: Option<&FieldStatistics>,
) -> AppResult<VarianceOutcome> {
    let loaded;
    let stats = match stats {
        Some(s) => s,
        None => {
            loaded = load_statistics(out)?;
            &loaded
        }
    };
    let outcome = solve_variance(config, &paper_sources(), stats)?;
    for (raw, clamped) in outcome.raw.iter().zip(&outcome.fields) {
        formats::write_rows(&out.join(format!("field_{}.csv", raw.name)), &formats::field_rows(&outcome.grid, raw))?;
        formats::write_rows(
            &out.join(format!("field_{}_clamped.csv", clamped.name)),
            &formats::field_rows(&outcome.grid, clamped),
        )?;
    }
    formats::write_rows(&out.join("residuals_variance.csv"), &formats::residual_rows(&outcome.result))?;
    write_report(out, "variance", &[(&outcome.raw_report, "raw"), (&outcome.report, "clamped")])?;
    Ok(outcome)
}

pub struct RunSummary {
    pub mean: MeanOutcome,
    pub variance: VarianceOutcome,
}

pub fn run_all(config: &ExperimentConfig, out: &Path) -> AppResult<RunSummary> {
    let stats = simulate(config, out)?;
    spectra(config, out)?;
    assemble(config, out)?;
    let mean = reconstruct_mean(config, out, Some(&stats))?;
    let variance = reconstruct_variance(config, out, Some(&stats))?;
    Ok(RunSummary { mean, variance })
}
