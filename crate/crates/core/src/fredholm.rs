//! Discretized first-kind integral operators linking boundary statistics to
//! the source mean `(g1, g2)` or variance `(h1², h2²)`.
//!
//! Midpoint quadrature on the cells of a [`CellGrid`]. Rows are grouped by
//! family, receiver-minor: row `f * M + i` is family `f` at receiver `i`.
//! Columns hold every cell's first unknown, then every cell's second one:
//! column `j` multiplies `g1` (or `h1²`) at cell `j`, column `N + j`
//! multiplies `g2` (or `h2²`).

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{check_receivers, CellGrid, Point};
use crate::green::{kernel_components, ElasticMedium, KernelComponents, Wavenumbers};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    MeanRe1,
    MeanRe2,
    MeanIm1,
    MeanIm2,
    VarRe1,
    VarRe2,
    VarIm1,
    VarIm2,
    VarDiff1,
    VarDiff2,
}

impl Family {
    /// Stacked mean operator, matching the order of the mean data vector.
    pub const MEAN: [Family; 4] = [Family::MeanRe1, Family::MeanRe2, Family::MeanIm1, Family::MeanIm2];
    pub const VARIANCE: [Family; 4] = [Family::VarRe1, Family::VarRe2, Family::VarIm1, Family::VarIm2];
    pub const DIFFERENCE: [Family; 2] = [Family::VarDiff1, Family::VarDiff2];
    pub const ALL: [Family; 10] = [
        Family::MeanRe1,
        Family::MeanRe2,
        Family::MeanIm1,
        Family::MeanIm2,
        Family::VarRe1,
        Family::VarRe2,
        Family::VarIm1,
        Family::VarIm2,
        Family::VarDiff1,
        Family::VarDiff2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::MeanRe1 => "MeanRe1",
            Family::MeanRe2 => "MeanRe2",
            Family::MeanIm1 => "MeanIm1",
            Family::MeanIm2 => "MeanIm2",
            Family::VarRe1 => "VarRe1",
            Family::VarRe2 => "VarRe2",
            Family::VarIm1 => "VarIm1",
            Family::VarIm2 => "VarIm2",
            Family::VarDiff1 => "VarDiff1",
            Family::VarDiff2 => "VarDiff2",
        }
    }

    pub fn from_name(name: &str) -> Option<Family> {
        Family::ALL.iter().copied().find(|f| f.name() == name)
    }

    pub fn is_mean(self) -> bool {
        Family::MEAN.contains(&self)
    }

    /// Quadrature-weighted entries for the two unknowns at one cell.
    fn entries(self, k: &KernelComponents, area: f64) -> (f64, f64) {
        let sq = |v: f64| (v * v) * area;
        match self {
            Family::MeanRe1 => (k.re11 * area, k.re12 * area),
            Family::MeanRe2 => (k.re21() * area, k.re22 * area),
            Family::MeanIm1 => (k.im11 * area, k.im12 * area),
            Family::MeanIm2 => (k.im21() * area, k.im22 * area),
            Family::VarRe1 => (sq(k.re11), sq(k.re12)),
            Family::VarRe2 => (sq(k.re21()), sq(k.re22)),
            Family::VarIm1 => (sq(k.im11), sq(k.im12)),
            Family::VarIm2 => (sq(k.im21()), sq(k.im22)),
            Family::VarDiff1 => (sq(k.re11) - sq(k.im11), sq(k.re12) - sq(k.im12)),
            Family::VarDiff2 => (sq(k.re21()) - sq(k.im21()), sq(k.re22) - sq(k.im22)),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Dense operator for one frequency and one or more stacked families.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBlock {
    pub matrix: DMatrix<f64>,
    pub omega: f64,
    pub families: Vec<Family>,
    pub receivers: usize,
    pub grid: CellGrid,
}

impl KernelBlock {
    pub fn assemble(
        families: &[Family],
        receivers: &[Point],
        grid: &CellGrid,
        w: &Wavenumbers,
        medium: &ElasticMedium,
    ) -> Result<KernelBlock> {
        check_receivers(&grid.domain, receivers)?;
        if families.is_empty() {
            return Err(Error::Parameter("no families to assemble".into()));
        }
        let m = receivers.len();
        let n = grid.len();
        let area = grid.cell_area();
        let centers = grid.centers();
        let mut matrix = DMatrix::zeros(families.len() * m, 2 * n);
        for (i, &x) in receivers.iter().enumerate() {
            for (j, &y) in centers.iter().enumerate() {
                let k = kernel_components(x, y, w, medium)?;
                for (f, family) in families.iter().enumerate() {
                    let (a, b) = family.entries(&k, area);
                    matrix[(f * m + i, j)] = a;
                    matrix[(f * m + i, n + j)] = b;
                }
            }
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite kernel entry at omega = {}", w.omega)));
        }
        Ok(KernelBlock { matrix, omega: w.omega, families: families.to_vec(), receivers: m, grid: *grid })
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Rows belonging to one of the stacked families.
    pub fn family_rows(&self, family: Family) -> Option<DMatrix<f64>> {
        let f = self.families.iter().position(|&g| g == family)?;
        Some(self.matrix.rows(f * self.receivers, self.receivers).into_owned())
    }

    pub fn apply(&self, q: &DVector<f64>) -> Result<DVector<f64>> {
        if q.len() != self.cols() {
            return Err(Error::Dimension(format!("operator has {} columns, vector has {}", self.cols(), q.len())));
        }
        Ok(&self.matrix * q)
    }
}

/// Single-family mean operator.
pub fn assemble_mean_block(
    family: Family,
    receivers: &[Point],
    grid: &CellGrid,
    w: &Wavenumbers,
    medium: &ElasticMedium,
) -> Result<KernelBlock> {
    if !family.is_mean() {
        return Err(Error::Parameter(format!("{family} is not a mean family")));
    }
    KernelBlock::assemble(&[family], receivers, grid, w, medium)
}

/// Single-family variance or variance-difference operator.
pub fn assemble_variance_block(
    family: Family,
    receivers: &[Point],
    grid: &CellGrid,
    w: &Wavenumbers,
    medium: &ElasticMedium,
) -> Result<KernelBlock> {
    if family.is_mean() {
        return Err(Error::Parameter(format!("{family} is not a variance family")));
    }
    KernelBlock::assemble(&[family], receivers, grid, w, medium)
}

/// Singular values of one block, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
    pub families: Vec<Family>,
    pub omega: f64,
}

impl SingularSpectrum {
    pub fn leading(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values strictly above `relative · σ1`.
    pub fn effective_rank(&self, relative: f64) -> usize {
        let lead = self.leading();
        if lead <= 0.0 {
            return 0;
        }
        self.values.iter().filter(|&&s| s > relative * lead).count()
    }

    /// First 1-based index `k` with `σk/σ1 < relative`.
    pub fn decay_index(&self, relative: f64) -> Option<usize> {
        let lead = self.leading();
        if lead <= 0.0 {
            return Some(1);
        }
        self.values.iter().position(|&s| s < relative * lead).map(|k| k + 1)
    }
}

pub fn singular_spectrum(block: &KernelBlock) -> Result<SingularSpectrum> {
    let values = singular_values(&block.matrix)?;
    Ok(SingularSpectrum { values, families: block.families.clone(), omega: block.omega })
}

/// Descending singular values of a dense matrix.
pub fn singular_values(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    // The SVD of the wide operators is cheaper on the transpose.
    let work = if matrix.nrows() < matrix.ncols() { matrix.transpose() } else { matrix.clone() };
    let svd = nalgebra::SVD::try_new(work, false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric("SVD did not converge".into()))?;
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

pub const CONDITIONING_THRESHOLDS: [f64; 3] = [1e-2, 1e-4, 1e-6];

/// Side-by-side conditioning of two spectra at [`CONDITIONING_THRESHOLDS`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningReport {
    pub thresholds: [f64; 3],
    pub rank_a: [usize; 3],
    pub rank_b: [usize; 3],
    pub decay_a: [Option<usize>; 3],
    pub decay_b: [Option<usize>; 3],
}

impl ConditioningReport {
    /// Whether `b` keeps strictly more singular values than `a` at threshold slot `i`.
    pub fn b_dominates_at(&self, i: usize) -> bool {
        self.rank_b[i] > self.rank_a[i]
    }
}

pub fn conditioning_report(a: &SingularSpectrum, b: &SingularSpectrum) -> ConditioningReport {
    let t = CONDITIONING_THRESHOLDS;
    ConditioningReport {
        thresholds: t,
        rank_a: t.map(|r| a.effective_rank(r)),
        rank_b: t.map(|r| b.effective_rank(r)),
        decay_a: t.map(|r| a.decay_index(r)),
        decay_b: t.map(|r| b.decay_index(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{receiver_circle, Rect};
    use crate::green::wavenumbers;
    use core::f64::consts::PI;

    fn setup(n: usize, omega: f64) -> (Vec<Point>, CellGrid, Wavenumbers, ElasticMedium) {
        let medium = ElasticMedium::new(1.0, 2.0).unwrap();
        let grid = CellGrid::new(Rect::square(1.0), n, n).unwrap();
        (receiver_circle(2.0, 12, 0.0), grid, wavenumbers(&medium, omega).unwrap(), medium)
    }

    #[test]
    fn point_source_picks_one_column() {
        let (rx, grid, w, medium) = setup(6, PI);
        let block = assemble_mean_block(Family::MeanIm2, &rx, &grid, &w, &medium).unwrap();
        let cell = 13;
        let mut g = DVector::zeros(2 * grid.len());
        g[cell] = 1.0;
        let out = block.apply(&g).unwrap();
        for (i, &x) in rx.iter().enumerate() {
            let k = kernel_components(x, grid.center(cell), &w, &medium).unwrap();
            assert_eq!(out[i], k.im21() * grid.cell_area());
        }
    }

    #[test]
    fn difference_blocks_are_exact_differences() {
        let (rx, grid, w, medium) = setup(5, 1.9 * PI);
        let all = KernelBlock::assemble(&Family::ALL, &rx, &grid, &w, &medium).unwrap();
        for (re, im, diff) in
            [(Family::VarRe1, Family::VarIm1, Family::VarDiff1), (Family::VarRe2, Family::VarIm2, Family::VarDiff2)]
        {
            let d = all.family_rows(re).unwrap() - all.family_rows(im).unwrap();
            assert_eq!(d, all.family_rows(diff).unwrap());
        }
        for f in Family::VARIANCE {
            assert!(all.family_rows(f).unwrap().iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn stacked_rows_match_single_blocks() {
        let (rx, grid, w, medium) = setup(4, 2.0);
        let stacked = KernelBlock::assemble(&Family::MEAN, &rx, &grid, &w, &medium).unwrap();
        assert_eq!(stacked.rows(), 4 * rx.len());
        for f in Family::MEAN {
            let single = assemble_mean_block(f, &rx, &grid, &w, &medium).unwrap();
            assert_eq!(stacked.family_rows(f).unwrap(), single.matrix);
        }
        assert!(assemble_mean_block(Family::VarRe1, &rx, &grid, &w, &medium).is_err());
        assert!(assemble_variance_block(Family::MeanRe1, &rx, &grid, &w, &medium).is_err());
    }

    #[test]
    fn receivers_inside_domain_are_rejected() {
        let (_, grid, w, medium) = setup(4, 2.0);
        let err = KernelBlock::assemble(&Family::MEAN, &[[0.2, 0.1]], &grid, &w, &medium);
        assert!(matches!(err, Err(Error::Geometry(_))));
    }

    #[test]
    fn spectra_of_simple_matrices() {
        let id = DMatrix::<f64>::identity(5, 5);
        assert!(singular_values(&id).unwrap().iter().all(|&s| (s - 1.0).abs() < 1e-15));

        let u = DVector::from_vec(alloc::vec![1.0, -2.0, 0.5]);
        let v = DVector::from_vec(alloc::vec![3.0, 0.0, 1.0, 4.0]);
        let s = singular_values(&(&u * v.transpose())).unwrap();
        assert!((s[0] - u.norm() * v.norm()).abs() < 1e-13);
        assert!(s[1..].iter().all(|&x| x < 1e-13));
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn conditioning_of_zero_and_identity() {
        let spec = |m: DMatrix<f64>| SingularSpectrum {
            values: singular_values(&m).unwrap(),
            families: alloc::vec![],
            omega: 1.0,
        };
        let zero = spec(DMatrix::zeros(6, 6));
        let id = spec(DMatrix::identity(6, 6));
        let r = conditioning_report(&zero, &id);
        assert_eq!(r.rank_a, [0, 0, 0]);
        assert_eq!(r.rank_b, [6, 6, 6]);
        assert_eq!(r.decay_b, [None, None, None]);
        let same = conditioning_report(&id, &id);
        assert_eq!(same.rank_a, same.rank_b);
    }
}
