//! Experiment description and the in-memory pipeline: simulate boundary
//! statistics on a fine grid, invert on a coarser offset grid and score the
//! result against the exact source samples.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DVector;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fredholm::{singular_spectrum, Family, KernelBlock, SingularSpectrum};
use crate::geometry::{check_receivers, receiver_circle, CellGrid, Point, Rect};
use crate::green::ElasticMedium;
use crate::kaczmarz::{kaczmarz_solve, Equation, KaczmarzProblem, KaczmarzSettings, ReconstructionResult};
use crate::sources::paper_sources;
use crate::stochastic::{
    monte_carlo_statistics, quadrature_statistics, DataSource, FieldStatistics, SourceFields, SourceGrid,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct GridSize {
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ReceiverLayout {
    pub radius: f64,
    pub count: usize,
    /// Angle of the first receiver, radians.
    pub angular_offset: f64,
}

impl ReceiverLayout {
    pub fn points(&self) -> Vec<Point> {
        receiver_circle(self.radius, self.count, self.angular_offset)
    }
}

/// Either explicit values or `count` equally spaced values from `start` to
/// `stop` inclusive.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum FrequencySet {
    List(Vec<f64>),
    Range(FrequencyRange),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct FrequencyRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl FrequencySet {
    pub fn range(start: f64, stop: f64, count: usize) -> Self {
        FrequencySet::Range(FrequencyRange { start, stop, count })
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            FrequencySet::List(v) => v.clone(),
            FrequencySet::Range(r) if r.count == 1 => alloc::vec![r.start],
            FrequencySet::Range(r) => {
                let step = (r.stop - r.start) / (r.count - 1) as f64;
                (0..r.count).map(|k| if k + 1 == r.count { r.stop } else { r.start + step * k as f64 }).collect()
            }
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let values = self.values();
        if values.is_empty() {
            return Err(Error::Config(format!("{name}: frequency list is empty")));
        }
        if values.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::Config(format!("{name}: frequencies must be positive and finite")));
        }
        if values.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::Config(format!("{name}: frequencies must be strictly increasing")));
        }
        Ok(())
    }
}

/// Frequency and grid of the singular-value diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SpectrumSettings {
    pub frequency: f64,
    pub grid: GridSize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ExperimentConfig {
    pub medium: ElasticMedium,
    pub domain: Rect,
    pub inversion_grid: GridSize,
    pub simulation_grid: GridSize,
    pub receivers: ReceiverLayout,
    pub mean_frequencies: FrequencySet,
    pub variance_frequencies: FrequencySet,
    pub realizations: usize,
    pub seed: u64,
    pub gamma: f64,
    pub outer_loops: usize,
    pub output_dir: String,
    pub data: DataSource,
    pub spectrum: SpectrumSettings,
}

impl Default for ExperimentConfig {
    /// The benchmark setup at desk scale.
    fn default() -> Self {
        ExperimentConfig {
            medium: ElasticMedium { mu: 1.0, lambda: 2.0 },
            domain: Rect::square(1.0),
            inversion_grid: GridSize { nx: 30, ny: 30 },
            simulation_grid: GridSize { nx: 64, ny: 64 },
            receivers: ReceiverLayout { radius: 2.0, count: 40, angular_offset: 0.0 },
            mean_frequencies: FrequencySet::range(0.5 * PI, 7.5 * PI, 16),
            variance_frequencies: FrequencySet::range(0.5 * PI, 2.5 * PI, 20),
            realizations: 10_000,
            seed: 2024,
            gamma: 1e-7,
            outer_loops: 5,
            output_dir: "out".to_string(),
            data: DataSource::MonteCarlo,
            spectrum: SpectrumSettings { frequency: 1.9 * PI, grid: GridSize { nx: 20, ny: 20 } },
        }
    }
}

impl ExperimentConfig {
    pub fn inversion_cells(&self) -> Result<CellGrid> {
        CellGrid::new(self.domain, self.inversion_grid.nx, self.inversion_grid.ny)
    }

    pub fn simulation_cells(&self) -> Result<CellGrid> {
        CellGrid::new(self.domain, self.simulation_grid.nx, self.simulation_grid.ny)
    }

    pub fn spectrum_cells(&self) -> Result<CellGrid> {
        CellGrid::new(self.domain, self.spectrum.grid.nx, self.spectrum.grid.ny)
    }

    pub fn receiver_points(&self) -> Vec<Point> {
        self.receivers.points()
    }

    pub fn kaczmarz_settings(&self) -> KaczmarzSettings {
        KaczmarzSettings::new(self.gamma, self.outer_loops)
    }

    /// Sorted union of the mean and variance frequencies.
    pub fn all_frequencies(&self) -> Vec<f64> {
        let mut all = self.mean_frequencies.values();
        all.extend(self.variance_frequencies.values());
        all.sort_by(f64::total_cmp);
        all.dedup();
        all
    }

    pub fn validate(&self) -> Result<()> {
        let config = |e: Error| Error::Config(e.to_string());
        self.medium.validate().map_err(config)?;
        self.domain.validate().map_err(config)?;
        for (name, g) in [
            ("inversion_grid", self.inversion_grid),
            ("simulation_grid", self.simulation_grid),
            ("spectrum.grid", self.spectrum.grid),
        ] {
            if g.nx == 0 || g.ny == 0 {
                return Err(Error::Config(format!("{name} needs at least one cell per direction")));
            }
        }
        let (inv, sim) = (self.inversion_grid, self.simulation_grid);
        if sim.nx <= inv.nx || sim.ny <= inv.ny {
            return Err(Error::Config(format!(
                "simulation grid {}x{} must be strictly finer than inversion grid {}x{}",
                sim.nx, sim.ny, inv.nx, inv.ny
            )));
        }
        if self.simulation_cells()?.shares_nodes_with(&self.inversion_cells()?) {
            return Err(Error::Config(
                "simulation and inversion grids share quadrature nodes; choose offset sizes".into(),
            ));
        }
        let r = self.receivers;
        if r.count == 0 || !r.angular_offset.is_finite() || !(r.radius > self.domain.corner_radius()) {
            return Err(Error::Config(format!(
                "receiver circle of radius {} must strictly enclose the domain (corner radius {}) with at least one receiver",
                r.radius,
                self.domain.corner_radius()
            )));
        }
        check_receivers(&self.domain, &self.receiver_points()).map_err(config)?;
        self.mean_frequencies.validate("mean_frequencies")?;
        self.variance_frequencies.validate("variance_frequencies")?;
        if self.data == DataSource::MonteCarlo && self.realizations < 2 {
            return Err(Error::Config(format!("realizations must be at least 2, got {}", self.realizations)));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::Config(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.outer_loops == 0 {
            return Err(Error::Config("outer_loops must be at least 1".into()));
        }
        if !(self.spectrum.frequency > 0.0) || !self.spectrum.frequency.is_finite() {
            return Err(Error::Config("spectrum.frequency must be positive".into()));
        }
        Ok(())
    }
}

/// Error of one reconstructed field on the inversion grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub name: String,
    pub relative_l2: f64,
    pub max_abs: f64,
}

impl FieldError {
    pub fn compute(name: &str, exact: &[f64], reconstructed: &[f64]) -> Result<FieldError> {
        if exact.len() != reconstructed.len() {
            return Err(Error::Dimension(format!(
                "{name}: {} exact samples vs {} reconstructed",
                exact.len(),
                reconstructed.len()
            )));
        }
        let mut diff2 = 0.0;
        let mut ref2 = 0.0;
        let mut max_abs: f64 = 0.0;
        for (e, r) in exact.iter().zip(reconstructed) {
            let d = r - e;
            diff2 += d * d;
            ref2 += e * e;
            max_abs = max_abs.max(d.abs());
        }
        let relative_l2 = if ref2 > 0.0 { (diff2 / ref2).sqrt() } else { diff2.sqrt() };
        Ok(FieldError { name: name.to_string(), relative_l2, max_abs })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorReport {
    pub fields: Vec<FieldError>,
}

impl ErrorReport {
    pub fn get(&self, name: &str) -> Option<&FieldError> {
        self.fields.iter().find(|f| f.name == name)
    }
}

/// Exact and reconstructed samples of one field on the inversion grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldComparison {
    pub name: &'static str,
    pub exact: Vec<f64>,
    pub reconstructed: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct MeanOutcome {
    pub result: ReconstructionResult,
    pub grid: CellGrid,
    pub fields: [FieldComparison; 2],
    pub report: ErrorReport,
}

#[derive(Debug, Clone)]
pub struct VarianceOutcome {
    pub result: ReconstructionResult,
    pub grid: CellGrid,
    /// Reconstruction clamped at zero.
    pub fields: [FieldComparison; 2],
    pub raw: [FieldComparison; 2],
    pub report: ErrorReport,
    pub raw_report: ErrorReport,
}

fn report(fields: &[FieldComparison]) -> Result<ErrorReport> {
    let fields =
        fields.iter().map(|f| FieldError::compute(f.name, &f.exact, &f.reconstructed)).collect::<Result<_>>()?;
    Ok(ErrorReport { fields })
}

fn split(q: &DVector<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = q.len() / 2;
    (q.as_slice()[..n].to_vec(), q.as_slice()[n..].to_vec())
}

/// Boundary statistics at `frequencies` for the given source, sampled on the
/// simulation grid.
pub fn simulate<S: SourceFields + ?Sized>(
    config: &ExperimentConfig,
    source: &S,
    frequencies: &[f64],
) -> Result<FieldStatistics> {
    config.validate()?;
    let grid = SourceGrid::sample(config.simulation_cells()?, source)?;
    let receivers = config.receiver_points();
    match config.data {
        DataSource::MonteCarlo => {
            monte_carlo_statistics(&grid, &receivers, frequencies, &config.medium, config.realizations, config.seed)
        }
        DataSource::Quadrature => quadrature_statistics(&grid, &receivers, frequencies, &config.medium),
    }
}

fn assemble_problem(
    config: &ExperimentConfig,
    families: &[Family],
    frequencies: &[f64],
    data: impl Fn(f64) -> Result<DVector<f64>>,
) -> Result<KaczmarzProblem> {
    let cells = config.inversion_cells()?;
    let receivers = config.receiver_points();
    let equations = frequencies
        .iter()
        .map(|&omega| {
            let w = config.medium.wavenumbers(omega)?;
            let block = KernelBlock::assemble(families, &receivers, &cells, &w, &config.medium)?;
            Ok(Equation::from_block(block, data(omega)?))
        })
        .collect::<Result<_>>()?;
    Ok(KaczmarzProblem::new(equations, config.kaczmarz_settings()))
}

fn lookup(stats: &FieldStatistics, omega: f64) -> Result<&crate::stochastic::FrequencyStatistics> {
    stats.frequency(omega).ok_or_else(|| Error::Parameter(format!("no statistics recorded at omega = {omega}")))
}

/// Stacked mean operators over the mean frequencies, with the sample means
/// as data.
pub fn mean_problem(config: &ExperimentConfig, stats: &FieldStatistics) -> Result<KaczmarzProblem> {
    assemble_problem(config, &Family::MEAN, &config.mean_frequencies.values(), |w| Ok(lookup(stats, w)?.mean_data()))
}

/// Stacked variance-difference operators over the variance frequencies.
pub fn variance_problem(config: &ExperimentConfig, stats: &FieldStatistics) -> Result<KaczmarzProblem> {
    assemble_problem(config, &Family::DIFFERENCE, &config.variance_frequencies.values(), |w| {
        Ok(lookup(stats, w)?.variance_difference_data())
    })
}

pub fn reconstruct_mean<S: SourceFields + ?Sized>(
    config: &ExperimentConfig,
    source: &S,
    stats: &FieldStatistics,
) -> Result<MeanOutcome> {
    config.validate()?;
    let result = kaczmarz_solve(&mean_problem(config, stats)?)?;
    let grid = config.inversion_cells()?;
    let (g1, g2) = split(&result.q);
    let fields = [
        FieldComparison { name: "g1", exact: grid.sample(|p| source.g1(p)), reconstructed: g1 },
        FieldComparison { name: "g2", exact: grid.sample(|p| source.g2(p)), reconstructed: g2 },
    ];
    let report = report(&fields)?;
    Ok(MeanOutcome { result, grid, fields, report })
}

pub fn reconstruct_variance<S: SourceFields + ?Sized>(
    config: &ExperimentConfig,
    source: &S,
    stats: &FieldStatistics,
) -> Result<VarianceOutcome> {
    config.validate()?;
    let result = kaczmarz_solve(&variance_problem(config, stats)?)?;
    let grid = config.inversion_cells()?;
    let (h1sq, h2sq) = split(&result.q);
    let exact1 = grid.sample(|p| source.h1(p).powi(2));
    let exact2 = grid.sample(|p| source.h2(p).powi(2));
    let clamp = |v: &[f64]| v.iter().map(|x| x.max(0.0)).collect::<Vec<_>>();
    let fields = [
        FieldComparison { name: "h1sq", exact: exact1.clone(), reconstructed: clamp(&h1sq) },
        FieldComparison { name: "h2sq", exact: exact2.clone(), reconstructed: clamp(&h2sq) },
    ];
    let raw = [
        FieldComparison { name: "h1sq", exact: exact1, reconstructed: h1sq },
        FieldComparison { name: "h2sq", exact: exact2, reconstructed: h2sq },
    ];
    let report_clamped = report(&fields)?;
    let raw_report = report(&raw)?;
    Ok(VarianceOutcome { result, grid, fields, raw, report: report_clamped, raw_report })
}

/// Simulation over the mean frequencies followed by the mean inversion.
pub fn run_mean_experiment_with<S: SourceFields + ?Sized>(
    config: &ExperimentConfig,
    source: &S,
) -> Result<(FieldStatistics, MeanOutcome)> {
    let stats = simulate(config, source, &config.mean_frequencies.values())?;
    let outcome = reconstruct_mean(config, source, &stats)?;
    Ok((stats, outcome))
}

pub fn run_variance_experiment_with<S: SourceFields + ?Sized>(
    config: &ExperimentConfig,
    source: &S,
) -> Result<(FieldStatistics, VarianceOutcome)> {
    let stats = simulate(config, source, &config.variance_frequencies.values())?;
    let outcome = reconstruct_variance(config, source, &stats)?;
    Ok((stats, outcome))
}

pub fn run_mean_experiment(config: &ExperimentConfig) -> Result<(FieldStatistics, MeanOutcome)> {
    run_mean_experiment_with(config, &paper_sources())
}

pub fn run_variance_experiment(config: &ExperimentConfig) -> Result<(FieldStatistics, VarianceOutcome)> {
    run_variance_experiment_with(config, &paper_sources())
}

/// Singular spectra of every single-family operator at the diagnostic
/// frequency, in [`Family::ALL`] order.
pub fn spectra(config: &ExperimentConfig) -> Result<Vec<SingularSpectrum>> {
    config.validate()?;
    let cells = config.spectrum_cells()?;
    let w = config.medium.wavenumbers(config.spectrum.frequency)?;
    let block = KernelBlock::assemble(&Family::ALL, &config.receiver_points(), &cells, &w, &config.medium)?;
    Family::ALL
        .iter()
        .map(|&f| {
            let rows = block.family_rows(f).ok_or_else(|| Error::Numeric(format!("missing {f} rows")))?;
            singular_spectrum(&KernelBlock {
                matrix: rows,
                omega: block.omega,
                families: alloc::vec![f],
                receivers: block.receivers,
                grid: cells,
            })
        })
        .collect()
}
