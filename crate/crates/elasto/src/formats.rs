//! CSV artifacts. Every file has a header row, UTF-8, `\n` line endings and
//! shortest round-trip decimal floats, so values read back bit for bit.
//!
//! | file | columns |
//! |------|---------|
//! | `statistics.csv` | freq, receiver_index, rx, ry, meanRe1, meanIm1, meanRe2, meanIm2, varRe1, varIm1, varRe2, varIm2, n |
//! | `spectra.csv` | family, freq, index, sigma |
//! | `field_<name>.csv` | ix, iy, x, y, exact, reconstructed |
//! | `residuals_<problem>.csv` | outer_loop, freq_index, residual_norm |
//! | `blocks.csv` | problem, freq_index, freq, rows, cols, frobenius_norm |
//! | `errors_<problem>.csv` | field, variant, relative_l2, max_abs |
//!
//! Unknowns are ordered all first-component cells, then all second-component
//! cells; cells are row-major with `ix` fastest. `receiver_index`, `index`,
//! `outer_loop` and `freq_index` start at 1, `ix` and `iy` at 0.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use elasto_core::experiment::{ErrorReport, FieldComparison, FieldError};
use elasto_core::fredholm::SingularSpectrum;
use elasto_core::kaczmarz::ReconstructionResult;
use elasto_core::stochastic::{DataSource, FieldStatistics, FrequencyStatistics, ReceiverMoments};
use elasto_core::CellGrid;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticsRow {
    pub freq: f64,
    pub receiver_index: usize,
    pub rx: f64,
    pub ry: f64,
    #[serde(rename = "meanRe1")]
    pub mean_re1: f64,
    #[serde(rename = "meanIm1")]
    pub mean_im1: f64,
    #[serde(rename = "meanRe2")]
    pub mean_re2: f64,
    #[serde(rename = "meanIm2")]
    pub mean_im2: f64,
    #[serde(rename = "varRe1")]
    pub var_re1: f64,
    #[serde(rename = "varIm1")]
    pub var_im1: f64,
    #[serde(rename = "varRe2")]
    pub var_re2: f64,
    #[serde(rename = "varIm2")]
    pub var_im2: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub family: String,
    pub freq: f64,
    pub index: usize,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRow {
    pub ix: usize,
    pub iy: usize,
    pub x: f64,
    pub y: f64,
    pub exact: f64,
    pub reconstructed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub outer_loop: usize,
    pub freq_index: usize,
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub problem: String,
    pub freq_index: usize,
    pub freq: f64,
    pub rows: usize,
    pub cols: usize,
    pub frobenius_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub field: String,
    pub variant: String,
    pub relative_l2: f64,
    pub max_abs: f64,
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> AppResult<()> {
    let file = File::create(path).map_err(|e| AppError::io(path, e))?;
    let mut writer =
        csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(BufWriter::new(file));
    for row in rows {
        writer.serialize(row).map_err(|e| AppError::csv(path, e))?;
    }
    let inner = writer.into_inner().map_err(|e| AppError::io(path, e.into_error()))?;
    inner.into_inner().map_err(|e| AppError::io(path, e.into_error()))?.flush().map_err(|e| AppError::io(path, e))
}

pub fn read_rows<T: DeserializeOwned>(path: &Path) -> AppResult<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| AppError::csv(path, e))?;
    reader.deserialize().map(|r| r.map_err(|e| AppError::csv(path, e))).collect()
}

pub fn statistics_rows(stats: &FieldStatistics) -> Vec<StatisticsRow> {
    let mut rows = Vec::new();
    for f in &stats.frequencies {
        for (i, (m, r)) in f.moments.iter().zip(&stats.receivers).enumerate() {
            rows.push(StatisticsRow {
                freq: f.omega,
                receiver_index: i + 1,
                rx: r[0],
                ry: r[1],
                mean_re1: m.mean_re1,
                mean_im1: m.mean_im1,
                mean_re2: m.mean_re2,
                mean_im2: m.mean_im2,
                var_re1: m.var_re1,
                var_im1: m.var_im1,
                var_re2: m.var_re2,
                var_im2: m.var_im2,
                n: stats.realizations,
            });
        }
    }
    rows
}

/// Inverse of [`statistics_rows`]. The seed is not part of the file and
/// reads back as zero; `n = 0` marks quadrature data.
pub fn statistics_from_rows(rows: &[StatisticsRow], path: &Path) -> AppResult<FieldStatistics> {
    let bad = |message: String| AppError::Format { path: path.to_path_buf(), message };
    let first = rows.first().ok_or_else(|| bad("no statistics rows".into()))?;
    let realizations = first.n;
    let mut frequencies: Vec<FrequencyStatistics> = Vec::new();
    let mut receivers = Vec::new();
    for row in rows {
        if row.n != realizations {
            return Err(bad(format!("inconsistent n: {} vs {realizations}", row.n)));
        }
        if frequencies.last().is_none_or(|f| f.omega != row.freq) {
            if frequencies.iter().any(|f| f.omega == row.freq) {
                return Err(bad(format!("rows for freq {} are not contiguous", row.freq)));
            }
            frequencies.push(FrequencyStatistics { omega: row.freq, moments: Vec::new() });
        }
        let first_frequency = frequencies.len() == 1;
        let current = frequencies.last_mut().expect("just pushed");
        if row.receiver_index != current.moments.len() + 1 {
            return Err(bad(format!("unexpected receiver_index {} at freq {}", row.receiver_index, row.freq)));
        }
        if first_frequency {
            receivers.push([row.rx, row.ry]);
        } else if receivers.get(row.receiver_index - 1) != Some(&[row.rx, row.ry]) {
            return Err(bad(format!("receiver {} moves between frequencies", row.receiver_index)));
        }
        current.moments.push(ReceiverMoments {
            mean_re1: row.mean_re1,
            mean_im1: row.mean_im1,
            mean_re2: row.mean_re2,
            mean_im2: row.mean_im2,
            var_re1: row.var_re1,
            var_im1: row.var_im1,
            var_re2: row.var_re2,
            var_im2: row.var_im2,
        });
    }
    if frequencies.iter().any(|f| f.moments.len() != receivers.len()) {
        return Err(bad("every frequency needs a row per receiver".into()));
    }
    let source = if realizations == 0 { DataSource::Quadrature } else { DataSource::MonteCarlo };
    Ok(FieldStatistics { receivers, frequencies, realizations, seed: 0, source })
}

pub fn write_statistics(path: &Path, stats: &FieldStatistics) -> AppResult<()> {
    write_rows(path, &statistics_rows(stats))
}

pub fn read_statistics(path: &Path) -> AppResult<FieldStatistics> {
    statistics_from_rows(&read_rows(path)?, path)
}

pub fn spectrum_rows(spectra: &[SingularSpectrum]) -> Vec<SpectrumRow> {
    spectra
        .iter()
        .flat_map(|s| {
            let family = s.families.iter().map(|f| f.name()).collect::<Vec<_>>().join("+");
            s.values.iter().enumerate().map(move |(i, &sigma)| SpectrumRow {
                family: family.clone(),
                freq: s.omega,
                index: i + 1,
                sigma,
            })
        })
        .collect()
}

pub fn field_rows(grid: &CellGrid, field: &FieldComparison) -> Vec<FieldRow> {
    (0..grid.len())
        .map(|k| {
            let (ix, iy) = grid.split_index(k);
            let [x, y] = grid.center(k);
            FieldRow { ix, iy, x, y, exact: field.exact[k], reconstructed: field.reconstructed[k] }
        })
        .collect()
}

pub fn residual_rows(result: &ReconstructionResult) -> Vec<ResidualRow> {
    result
        .residuals
        .iter()
        .map(|r| ResidualRow { outer_loop: r.outer_loop, freq_index: r.freq_index, residual_norm: r.residual_norm })
        .collect()
}

pub fn error_rows(report: &ErrorReport, variant: &str) -> Vec<ErrorRow> {
    report
        .fields
        .iter()
        .map(|f| ErrorRow {
            field: f.name.clone(),
            variant: variant.to_string(),
            relative_l2: f.relative_l2,
            max_abs: f.max_abs,
        })
        .collect()
}

/// Recomputes the error of one field from its persisted samples.
pub fn field_error_from_file(name: &str, path: &Path) -> AppResult<FieldError> {
    let rows: Vec<FieldRow> = read_rows(path)?;
    let exact: Vec<f64> = rows.iter().map(|r| r.exact).collect();
    let reconstructed: Vec<f64> = rows.iter().map(|r| r.reconstructed).collect();
    Ok(FieldError::compute(name, &exact, &reconstructed)?)
}
