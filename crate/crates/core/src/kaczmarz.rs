//! Regularized block Kaczmarz iteration
//! `q ← q + Aₖᵀ (γI + AₖAₖᵀ)⁻¹ (pₖ − Aₖ q)`, sweeping k = 1..K per outer loop.

use alloc::format;
use alloc::vec::Vec;
use core::time::Duration;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::fredholm::KernelBlock;

/// One operator/data pair of the sweep.
#[derive(Debug, Clone)]
pub struct Equation {
    pub matrix: DMatrix<f64>,
    pub data: DVector<f64>,
    /// Angular frequency, carried for reporting only.
    pub omega: f64,
}

impl Equation {
    pub fn new(matrix: DMatrix<f64>, data: DVector<f64>, omega: f64) -> Self {
        Equation { matrix, data, omega }
    }

    pub fn from_block(block: KernelBlock, data: DVector<f64>) -> Self {
        Equation { omega: block.omega, matrix: block.matrix, data }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KaczmarzSettings {
    pub gamma: f64,
    pub outer_loops: usize,
    /// Stop after a full sweep in which every residual is at or below this.
    pub residual_floor: Option<f64>,
}

impl KaczmarzSettings {
    pub fn new(gamma: f64, outer_loops: usize) -> Self {
        KaczmarzSettings { gamma, outer_loops, residual_floor: None }
    }
}

#[derive(Debug, Clone)]
pub struct KaczmarzProblem {
    pub equations: Vec<Equation>,
    pub settings: KaczmarzSettings,
    /// Starting iterate; zero when absent.
    pub initial: Option<DVector<f64>>,
}

impl KaczmarzProblem {
    pub fn new(equations: Vec<Equation>, settings: KaczmarzSettings) -> Self {
        KaczmarzProblem { equations, settings, initial: None }
    }

    pub fn with_initial(mut self, q0: DVector<f64>) -> Self {
        self.initial = Some(q0);
        self
    }

    pub fn unknowns(&self) -> usize {
        self.equations.first().map_or(0, |e| e.matrix.ncols())
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.settings;
        if !(s.gamma > 0.0) || !s.gamma.is_finite() {
            return Err(Error::Parameter(format!("gamma must be positive, got {}", s.gamma)));
        }
        if s.outer_loops == 0 {
            return Err(Error::Parameter("at least one outer loop is required".into()));
        }
        if let Some(floor) = s.residual_floor {
            if !(floor >= 0.0) {
                return Err(Error::Parameter(format!("residual floor must be nonnegative, got {floor}")));
            }
        }
        if self.equations.is_empty() {
            return Err(Error::Dimension("no equations to sweep".into()));
        }
        let n = self.unknowns();
        for (k, e) in self.equations.iter().enumerate() {
            if e.matrix.ncols() != n {
                return Err(Error::Dimension(format!("equation {k} has {} columns, expected {n}", e.matrix.ncols())));
            }
            if e.data.len() != e.matrix.nrows() {
                return Err(Error::Dimension(format!(
                    "equation {k} has {} rows but {} data values",
                    e.matrix.nrows(),
                    e.data.len()
                )));
            }
        }
        if let Some(q0) = &self.initial {
            if q0.len() != n {
                return Err(Error::Dimension(format!("initial guess has {} entries, expected {n}", q0.len())));
            }
        }
        Ok(())
    }
}

/// Residual `‖pₖ − Aₖ q‖` taken just before the update of step k in loop l.
/// Both indices start at 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualEntry {
    pub outer_loop: usize,
    pub freq_index: usize,
    pub omega: f64,
    pub residual_norm: f64,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub q: DVector<f64>,
    /// `L·K` entries unless a residual floor stopped the iteration early.
    pub residuals: Vec<ResidualEntry>,
    pub settings: KaczmarzSettings,
    pub elapsed: Option<Duration>,
}

impl ReconstructionResult {
    pub fn final_sweep(&self) -> &[ResidualEntry] {
        let last = self.residuals.last().map_or(0, |r| r.outer_loop);
        let start = self.residuals.iter().position(|r| r.outer_loop == last).unwrap_or(0);
        &self.residuals[start..]
    }
}

struct Step<'a> {
    equation: &'a Equation,
    factor: Cholesky<f64, Dyn>,
}

fn factorize(e: &Equation, gamma: f64) -> Result<Cholesky<f64, Dyn>> {
    let mut gram = &e.matrix * e.matrix.transpose();
    for i in 0..gram.nrows() {
        gram[(i, i)] += gamma;
    }
    Cholesky::new(gram)
        .ok_or_else(|| Error::Numeric(format!("γI + AAᵀ is not positive definite at omega = {}", e.omega)))
}

pub fn kaczmarz_solve(problem: &KaczmarzProblem) -> Result<ReconstructionResult> {
    problem.validate()?;
    #[cfg(feature = "std")]
    let start = std::time::Instant::now();

    let settings = problem.settings;
    let steps: Vec<Step> = problem
        .equations
        .iter()
        .map(|e| Ok(Step { equation: e, factor: factorize(e, settings.gamma)? }))
        .collect::<Result<_>>()?;

    let mut q = problem.initial.clone().unwrap_or_else(|| DVector::zeros(problem.unknowns()));
    let mut residuals = Vec::with_capacity(settings.outer_loops * steps.len());
    for l in 1..=settings.outer_loops {
        let mut worst: f64 = 0.0;
        for (k, step) in steps.iter().enumerate() {
            let e = step.equation;
            let r = &e.data - &e.matrix * &q;
            let norm = r.norm();
            worst = worst.max(norm);
            residuals.push(ResidualEntry { outer_loop: l, freq_index: k + 1, omega: e.omega, residual_norm: norm });
            let y = step.factor.solve(&r);
            q.gemv_tr(1.0, &e.matrix, &y, 1.0);
        }
        if !q.iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric(format!("iterate became non-finite in outer loop {l}")));
        }
        if settings.residual_floor.is_some_and(|floor| worst <= floor) {
            break;
        }
    }

    #[cfg(feature = "std")]
    let elapsed = Some(start.elapsed());
    #[cfg(not(feature = "std"))]
    let elapsed = None;
    Ok(ReconstructionResult { q, residuals, settings, elapsed })
}

/// `(outer_loop, freq_index, residual_norm)` rows in sweep order.
pub fn residual_report(result: &ReconstructionResult) -> Vec<(usize, usize, f64)> {
    result.residuals.iter().map(|r| (r.outer_loop, r.freq_index, r.residual_norm)).collect()
}
