//! White-noise sampling and Monte Carlo simulation of the mild solution
//! `u(x) = ∫ G(x,y) g(y) dy + ∫ G(x,y) h(y) dW_y`.
//!
//! The Brownian sheet is replaced by its piecewise-constant approximation on
//! the cells `K_j` of a grid: `Ẇ ≈ Σ |K_j|^(-1/2) ξ_j χ_j` with `ξ_j` i.i.d.
//! standard normal, one per cell and per sheet component. With midpoint
//! quadrature the stochastic integral becomes
//! `Σ_j |K_j|^(1/2) G(x, y_j) diag(h1_j, h2_j) (ξ1_j, ξ2_j)ᵀ`.
//!
//! # Random streams
//!
//! Realization `r` at angular frequency `ω` draws from a ChaCha8 generator
//! keyed by four SplitMix64 outputs started at `seed ^ mix64(ω.to_bits())`,
//! on stream number `r`. Each realization draws `ξ1` for every cell, then
//! `ξ2` for every cell. Frequencies are therefore independent, realizations
//! can be computed in any order, and a frequency shared by two frequency
//! lists sees the same noise in both.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fredholm::{Family, KernelBlock};
use crate::geometry::{check_receivers, CellGrid, Point};
use crate::green::{green_tensor, ElasticMedium, GreenTensor, Wavenumbers};
use crate::specfun::ComplexValue;
use crate::stats::MomentAccumulator;

/// Mean and standard deviation of the source sampled at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceGrid {
    pub cells: CellGrid,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
}

/// Closed-form source description.
pub trait SourceFields {
    fn g1(&self, p: Point) -> f64;
    fn g2(&self, p: Point) -> f64;
    fn h1(&self, p: Point) -> f64;
    fn h2(&self, p: Point) -> f64;
}

impl SourceGrid {
    pub fn new(cells: CellGrid, g1: Vec<f64>, g2: Vec<f64>, h1: Vec<f64>, h2: Vec<f64>) -> Result<Self> {
        let n = cells.len();
        if [g1.len(), g2.len(), h1.len(), h2.len()].iter().any(|&l| l != n) {
            return Err(Error::Dimension(format!("source fields must have {n} samples")));
        }
        if g1.iter().chain(&g2).chain(&h1).chain(&h2).any(|v| !v.is_finite()) {
            return Err(Error::Parameter("source samples must be finite".into()));
        }
        if h1.iter().chain(&h2).any(|&v| v < 0.0) {
            return Err(Error::Parameter("standard deviations h1, h2 must be nonnegative".into()));
        }
        Ok(SourceGrid { cells, g1, g2, h1, h2 })
    }

    pub fn sample<S: SourceFields + ?Sized>(cells: CellGrid, source: &S) -> Result<Self> {
        SourceGrid::new(
            cells,
            cells.sample(|p| source.g1(p)),
            cells.sample(|p| source.g2(p)),
            cells.sample(|p| source.h1(p)),
            cells.sample(|p| source.h2(p)),
        )
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `(g1, g2)` stacked as one unknown vector.
    pub fn mean_vector(&self) -> DVector<f64> {
        DVector::from_iterator(2 * self.len(), self.g1.iter().chain(&self.g2).copied())
    }

    /// `(h1², h2²)` stacked as one unknown vector.
    pub fn variance_vector(&self) -> DVector<f64> {
        DVector::from_iterator(2 * self.len(), self.h1.iter().chain(&self.h2).map(|h| h * h))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization {
    pub xi1: Vec<f64>,
    pub xi2: Vec<f64>,
}

fn fill_standard_normal<R: RngCore + ?Sized>(rng: &mut R, out: &mut [f64]) {
    for v in out {
        *v = StandardNormal.sample(rng);
    }
}

pub fn sample_noise<R: RngCore + ?Sized>(grid: &SourceGrid, rng: &mut R) -> NoiseRealization {
    let n = grid.len();
    let mut xi1 = vec![0.0; n];
    let mut xi2 = vec![0.0; n];
    fill_standard_normal(rng, &mut xi1);
    fill_standard_normal(rng, &mut xi2);
    NoiseRealization { xi1, xi2 }
}

/// `Σ_j |K_j|^(1/2) kernel_j · diag(h1_j, h2_j) · ξ_j` for one receiver.
pub fn stochastic_integral(
    grid: &SourceGrid,
    kernel: &[GreenTensor],
    noise: &NoiseRealization,
) -> Result<[ComplexValue; 2]> {
    let n = grid.len();
    if kernel.len() != n || noise.xi1.len() != n || noise.xi2.len() != n {
        return Err(Error::Dimension(format!(
            "grid has {n} cells, kernel {} and noise {}/{}",
            kernel.len(),
            noise.xi1.len(),
            noise.xi2.len()
        )));
    }
    let weight = grid.cells.cell_area().sqrt();
    let zero = Complex64::new(0.0, 0.0);
    let mut acc = [zero, zero];
    for (j, g) in kernel.iter().enumerate() {
        let a = weight * grid.h1[j] * noise.xi1[j];
        let b = weight * grid.h2[j] * noise.xi2[j];
        let v = g.apply([Complex64::new(a, 0.0), Complex64::new(b, 0.0)]);
        acc[0] += v[0];
        acc[1] += v[1];
    }
    Ok(acc)
}

/// One realization of the field `(u1, u2)` at every receiver, evaluated
/// directly from the Green tensor. A single noise draw drives all receivers.
pub fn simulate_realization<R: RngCore + ?Sized>(
    grid: &SourceGrid,
    receivers: &[Point],
    w: &Wavenumbers,
    medium: &ElasticMedium,
    rng: &mut R,
) -> Result<Vec<[ComplexValue; 2]>> {
    check_receivers(&grid.cells.domain, receivers)?;
    let noise = sample_noise(grid, rng);
    let area = grid.cells.cell_area();
    let centers = grid.cells.centers();
    receivers
        .iter()
        .map(|&x| {
            let kernel: Vec<GreenTensor> =
                centers.iter().map(|&y| green_tensor(x, y, w, medium)).collect::<Result<_>>()?;
            let zero = Complex64::new(0.0, 0.0);
            let mut det = [zero, zero];
            for (j, g) in kernel.iter().enumerate() {
                let v = g.apply([Complex64::new(grid.g1[j], 0.0), Complex64::new(grid.g2[j], 0.0)]);
                det[0] += v[0] * area;
                det[1] += v[1] * area;
            }
            let random = stochastic_integral(grid, &kernel, &noise)?;
            Ok([det[0] + random[0], det[1] + random[1]])
        })
        .collect()
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for realization `realization` at angular frequency `omega`.
pub fn realization_rng(seed: u64, omega: f64, realization: u64) -> ChaCha8Rng {
    let mut state = seed ^ mix64(omega.to_bits());
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        chunk.copy_from_slice(&mix64(state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(realization);
    rng
}

/// Sample moments at one receiver and frequency.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReceiverMoments {
    pub mean_re1: f64,
    pub mean_im1: f64,
    pub mean_re2: f64,
    pub mean_im2: f64,
    pub var_re1: f64,
    pub var_im1: f64,
    pub var_re2: f64,
    pub var_im2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyStatistics {
    pub omega: f64,
    pub moments: Vec<ReceiverMoments>,
}

impl FrequencyStatistics {
    /// Stacked rows `[E Re u1 | E Re u2 | E Im u1 | E Im u2]`, matching [`Family::MEAN`].
    fn from_rows(omega: f64, mean: &[f64], var: &[f64], m: usize) -> Self {
        let moments = (0..m)
            .map(|i| ReceiverMoments {
                mean_re1: mean[i],
                mean_re2: mean[m + i],
                mean_im1: mean[2 * m + i],
                mean_im2: mean[3 * m + i],
                var_re1: var[i],
                var_re2: var[m + i],
                var_im1: var[2 * m + i],
                var_im2: var[3 * m + i],
            })
            .collect();
        FrequencyStatistics { omega, moments }
    }

    /// Data vector for the stacked mean operator.
    pub fn mean_data(&self) -> DVector<f64> {
        let col = |f: fn(&ReceiverMoments) -> f64| self.moments.iter().map(f).collect::<Vec<_>>();
        let rows = [col(|m| m.mean_re1), col(|m| m.mean_re2), col(|m| m.mean_im1), col(|m| m.mean_im2)];
        DVector::from_iterator(4 * self.moments.len(), rows.into_iter().flatten())
    }

    /// Data vector `[V Re u1 − V Im u1 | V Re u2 − V Im u2]` for [`Family::DIFFERENCE`].
    pub fn variance_difference_data(&self) -> DVector<f64> {
        let first = self.moments.iter().map(|m| m.var_re1 - m.var_im1);
        let second = self.moments.iter().map(|m| m.var_re2 - m.var_im2);
        DVector::from_iterator(2 * self.moments.len(), first.chain(second))
    }
}

/// How a set of statistics was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum DataSource {
    /// Sample moments over Monte Carlo realizations.
    MonteCarlo,
    /// Exact moments of the discretized model by quadrature.
    Quadrature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldStatistics {
    pub receivers: Vec<Point>,
    pub frequencies: Vec<FrequencyStatistics>,
    /// Realizations per frequency; zero for quadrature data.
    pub realizations: usize,
    pub seed: u64,
    pub source: DataSource,
}

impl FieldStatistics {
    pub fn frequency(&self, omega: f64) -> Option<&FrequencyStatistics> {
        self.frequencies.iter().find(|f| f.omega == omega)
    }

    /// Restriction to the listed frequencies, in the listed order.
    pub fn select(&self, omegas: &[f64]) -> Result<FieldStatistics> {
        let frequencies = omegas
            .iter()
            .map(|&w| {
                self.frequency(w)
                    .cloned()
                    .ok_or_else(|| Error::Parameter(format!("no statistics recorded at omega = {w}")))
            })
            .collect::<Result<_>>()?;
        Ok(FieldStatistics { frequencies, receivers: self.receivers.clone(), ..*self })
    }
}

/// Precomputed linear map from one noise draw to the stacked field rows.
#[derive(Debug, Clone)]
pub struct FrequencySimulator {
    pub omega: f64,
    receivers: usize,
    deterministic: DVector<f64>,
    noise_map: DMatrix<f64>,
}

const CHUNK: usize = 256;

impl FrequencySimulator {
    pub fn new(grid: &SourceGrid, receivers: &[Point], w: &Wavenumbers, medium: &ElasticMedium) -> Result<Self> {
        let block = KernelBlock::assemble(&Family::MEAN, receivers, &grid.cells, w, medium)?;
        let deterministic = &block.matrix * grid.mean_vector();
        // Block columns carry |K|; the noise enters with |K|^(1/2) h.
        let area = grid.cells.cell_area();
        let scale: Vec<f64> = grid.h1.iter().chain(&grid.h2).map(|h| h / area.sqrt()).collect();
        let mut noise_map = block.matrix;
        for (mut column, s) in noise_map.column_iter_mut().zip(scale) {
            column *= s;
        }
        Ok(FrequencySimulator { omega: w.omega, receivers: receivers.len(), deterministic, noise_map })
    }

    /// Stacked field rows for realizations `first..first + count`, one column each.
    pub fn realizations(&self, seed: u64, first: u64, count: usize) -> DMatrix<f64> {
        let mut noise = DMatrix::zeros(self.noise_map.ncols(), count);
        for (c, mut column) in noise.column_iter_mut().enumerate() {
            let mut rng = realization_rng(seed, self.omega, first + c as u64);
            fill_standard_normal(&mut rng, column.as_mut_slice());
        }
        let mut fields = &self.noise_map * noise;
        for mut column in fields.column_iter_mut() {
            column += &self.deterministic;
        }
        fields
    }

    pub fn statistics(&self, realizations: usize, seed: u64) -> Result<FrequencyStatistics> {
        if realizations < 2 {
            return Err(Error::Parameter(format!("need at least 2 realizations, got {realizations}")));
        }
        let rows = self.deterministic.len();
        let mut total = MomentAccumulator::new(rows);
        let mut start = 0;
        while start < realizations {
            let count = CHUNK.min(realizations - start);
            let fields = self.realizations(seed, start as u64, count);
            let mut batch = MomentAccumulator::new(rows);
            for column in fields.column_iter() {
                batch.push(column.as_slice());
            }
            total.merge(&batch);
            start += count;
        }
        Ok(FrequencyStatistics::from_rows(self.omega, total.mean(), &total.variance(), self.receivers))
    }
}

fn check_frequencies(frequencies: &[f64]) -> Result<()> {
    if frequencies.is_empty() || frequencies.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(Error::Parameter("frequencies must be a nonempty list of positive values".into()));
    }
    Ok(())
}

/// Sample mean and unbiased sample variance of `Re u`, `Im u` at every
/// receiver and frequency.
pub fn monte_carlo_statistics(
    grid: &SourceGrid,
    receivers: &[Point],
    frequencies: &[f64],
    medium: &ElasticMedium,
    realizations: usize,
    seed: u64,
) -> Result<FieldStatistics> {
    check_frequencies(frequencies)?;
    if realizations < 2 {
        return Err(Error::Parameter(format!("need at least 2 realizations, got {realizations}")));
    }
    let frequencies = frequencies
        .iter()
        .map(|&omega| {
            let w = medium.wavenumbers(omega)?;
            FrequencySimulator::new(grid, receivers, &w, medium)?.statistics(realizations, seed)
        })
        .collect::<Result<_>>()?;
    Ok(FieldStatistics {
        receivers: receivers.to_vec(),
        frequencies,
        realizations,
        seed,
        source: DataSource::MonteCarlo,
    })
}

/// Exact moments of the discretized model at one frequency: means from the
/// mean kernels applied to `g`, variances from the squared kernels applied
/// to `h²`.
pub fn quadrature_frequency(
    grid: &SourceGrid,
    receivers: &[Point],
    w: &Wavenumbers,
    medium: &ElasticMedium,
) -> Result<FrequencyStatistics> {
    let families: Vec<Family> = Family::MEAN.iter().chain(&Family::VARIANCE).copied().collect();
    let block = KernelBlock::assemble(&families, receivers, &grid.cells, w, medium)?;
    let rows = 4 * receivers.len();
    let mean = block.matrix.rows(0, rows) * grid.mean_vector();
    let var = block.matrix.rows(rows, rows) * grid.variance_vector();
    Ok(FrequencyStatistics::from_rows(w.omega, mean.as_slice(), var.as_slice(), receivers.len()))
}

pub fn quadrature_statistics(
    grid: &SourceGrid,
    receivers: &[Point],
    frequencies: &[f64],
    medium: &ElasticMedium,
) -> Result<FieldStatistics> {
    check_frequencies(frequencies)?;
    let frequencies = frequencies
        .iter()
        .map(|&omega| quadrature_frequency(grid, receivers, &medium.wavenumbers(omega)?, medium))
        .collect::<Result<_>>()?;
    Ok(FieldStatistics {
        receivers: receivers.to_vec(),
        frequencies,
        realizations: 0,
        seed: 0,
        source: DataSource::Quadrature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{receiver_circle, Rect};
    use core::f64::consts::PI;

    fn grid(n: usize, h: f64) -> SourceGrid {
        let cells = CellGrid::new(Rect::square(1.0), n, n).unwrap();
        let g1 = cells.sample(|p| (p[0] - 0.2).cos() * p[1]);
        let g2 = cells.sample(|p| p[0] * p[0]);
        SourceGrid::new(cells, g1, g2, vec![h; n * n], vec![0.5 * h; n * n]).unwrap()
    }

    #[test]
    fn noise_is_reproducible() {
        let g = grid(4, 1.0);
        let a = sample_noise(&g, &mut realization_rng(7, 1.0, 3));
        let b = sample_noise(&g, &mut realization_rng(7, 1.0, 3));
        let c = sample_noise(&g, &mut realization_rng(7, 1.0, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, sample_noise(&g, &mut realization_rng(7, 2.0, 3)));
    }

    #[test]
    fn zero_std_integral_vanishes() {
        let g = grid(3, 0.0);
        let kernel = vec![GreenTensor::zero(); 9];
        let noise = sample_noise(&g, &mut realization_rng(1, 1.0, 0));
        let v = stochastic_integral(&g, &kernel, &noise).unwrap();
        assert_eq!(v, [Complex64::new(0.0, 0.0); 2]);
        assert!(stochastic_integral(&g, &kernel[..4], &noise).is_err());
    }

    #[test]
    fn deterministic_field_without_noise() {
        let g = grid(5, 0.0);
        let medium = ElasticMedium::new(1.0, 2.0).unwrap();
        let w = medium.wavenumbers(PI).unwrap();
        let rx = receiver_circle(2.0, 6, 0.1);
        let a = simulate_realization(&g, &rx, &w, &medium, &mut realization_rng(1, PI, 0)).unwrap();
        let b = simulate_realization(&g, &rx, &w, &medium, &mut realization_rng(99, PI, 5)).unwrap();
        assert_eq!(a, b);

        let zero = SourceGrid::new(g.cells, vec![0.0; 25], vec![0.0; 25], vec![0.0; 25], vec![0.0; 25]).unwrap();
        let z = simulate_realization(&zero, &rx, &w, &medium, &mut realization_rng(1, PI, 0)).unwrap();
        assert!(z.iter().all(|u| u[0].norm() == 0.0 && u[1].norm() == 0.0));
    }

    #[test]
    fn point_source_single_term() {
        let cells = CellGrid::new(Rect::square(1.0), 4, 4).unwrap();
        let mut g1 = vec![0.0; 16];
        g1[6] = 2.0;
        let src = SourceGrid::new(cells, g1, vec![0.0; 16], vec![0.0; 16], vec![0.0; 16]).unwrap();
        let medium = ElasticMedium::new(1.0, 2.0).unwrap();
        let w = medium.wavenumbers(2.0).unwrap();
        let rx = [[2.0, 0.5]];
        let u = simulate_realization(&src, &rx, &w, &medium, &mut realization_rng(0, 2.0, 0)).unwrap();
        let g = green_tensor(rx[0], cells.center(6), &w, &medium).unwrap();
        let area = cells.cell_area();
        assert!((u[0][0] - g.get(0, 0) * 2.0 * area).norm() < 1e-15);
        assert!((u[0][1] - g.get(1, 0) * 2.0 * area).norm() < 1e-15);
    }

    #[test]
    fn batched_path_matches_direct_realization() {
        let g = grid(6, 0.8);
        let medium = ElasticMedium::new(1.0, 2.0).unwrap();
        let w = medium.wavenumbers(1.5 * PI).unwrap();
        let rx = receiver_circle(2.0, 5, 0.0);
        let sim = FrequencySimulator::new(&g, &rx, &w, &medium).unwrap();
        let fields = sim.realizations(11, 3, 2);
        let direct = simulate_realization(&g, &rx, &w, &medium, &mut realization_rng(11, w.omega, 4)).unwrap();
        let m = rx.len();
        for (i, u) in direct.iter().enumerate() {
            let col = fields.column(1);
            assert!((col[i] - u[0].re).abs() < 1e-13);
            assert!((col[m + i] - u[1].re).abs() < 1e-13);
            assert!((col[2 * m + i] - u[0].im).abs() < 1e-13);
            assert!((col[3 * m + i] - u[1].im).abs() < 1e-13);
        }
    }

    #[test]
    fn noiseless_statistics_are_exact() {
        let g = grid(5, 0.0);
        let medium = ElasticMedium::new(1.0, 2.0).unwrap();
        let rx = receiver_circle(2.0, 8, 0.0);
        let freqs = [PI, 2.0 * PI];
        let mc = monte_carlo_statistics(&g, &rx, &freqs, &medium, 20, 3).unwrap();
        let exact = quadrature_statistics(&g, &rx, &freqs, &medium).unwrap();
        for (a, b) in mc.frequencies.iter().zip(&exact.frequencies) {
            for (x, y) in a.moments.iter().zip(&b.moments) {
                assert!(x.var_re1 <= 1e-20 && x.var_im2 <= 1e-20);
                assert!((x.mean_re1 - y.mean_re1).abs() < 1e-15);
                assert!((x.mean_im2 - y.mean_im2).abs() < 1e-15);
            }
        }
        assert!(monte_carlo_statistics(&g, &rx, &freqs, &medium, 1, 3).is_err());
        assert!(monte_carlo_statistics(&g, &[[0.0, 0.0]], &freqs, &medium, 5, 3).is_err());
    }

    #[test]
    fn data_vectors_follow_family_order() {
        let stats = FrequencyStatistics::from_rows(1.0, &[1.0, 2.0, 3.0, 4.0], &[5.0, 6.0, 7.0, 9.0], 1);
        assert_eq!(stats.mean_data().as_slice(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(stats.variance_difference_data().as_slice(), &[5.0 - 7.0, 6.0 - 9.0]);
        assert_eq!(stats.moments[0].mean_im1, 3.0);
    }
}
