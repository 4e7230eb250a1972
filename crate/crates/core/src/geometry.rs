//! Points, the rectangular source domain, cell grids and receiver layouts.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Closed rectangle `[x_min, x_max] × [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let rect = Rect { x_min, x_max, y_min, y_max };
        rect.validate()?;
        Ok(rect)
    }

    pub fn square(half_width: f64) -> Self {
        Rect { x_min: -half_width, x_max: half_width, y_min: -half_width, y_max: half_width }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite || self.x_max <= self.x_min || self.y_max <= self.y_min {
            return Err(Error::Geometry(format!("degenerate rectangle {:?}", self)));
        }
        Ok(())
    }

    pub fn contains_closed(&self, p: Point) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }

    /// Largest distance from the origin to a corner.
    pub fn corner_radius(&self) -> f64 {
        let xs = [self.x_min, self.x_max];
        let ys = [self.y_min, self.y_max];
        let mut r: f64 = 0.0;
        for x in xs {
            for y in ys {
                r = r.max((x * x + y * y).sqrt());
            }
        }
        r
    }
}

/// Uniform `nx × ny` partition of a rectangle. Cells are numbered row-major,
/// `index = iy * nx + ix`, and carry their midpoint as quadrature node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGrid {
    pub domain: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl CellGrid {
    pub fn new(domain: Rect, nx: usize, ny: usize) -> Result<Self> {
        domain.validate()?;
        if nx == 0 || ny == 0 {
            return Err(Error::Geometry(format!("grid must have cells, got {nx}×{ny}")));
        }
        Ok(CellGrid { domain, nx, ny })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        (self.domain.x_max - self.domain.x_min) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.domain.y_max - self.domain.y_min) / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        (self.domain.x_max - self.domain.x_min) * (self.domain.y_max - self.domain.y_min) / (self.nx * self.ny) as f64
    }

    pub fn center_x(&self, ix: usize) -> f64 {
        self.domain.x_min + (ix as f64 + 0.5) * self.dx()
    }

    pub fn center_y(&self, iy: usize) -> f64 {
        self.domain.y_min + (iy as f64 + 0.5) * self.dy()
    }

    pub fn center(&self, index: usize) -> Point {
        [self.center_x(index % self.nx), self.center_y(index / self.nx)]
    }

    /// `(ix, iy)` of a row-major index.
    pub fn split_index(&self, index: usize) -> (usize, usize) {
        (index % self.nx, index / self.nx)
    }

    pub fn centers(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.center(i)).collect()
    }

    /// Samples `f` at every cell center.
    pub fn sample<F: Fn(Point) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.len()).map(|i| f(self.center(i))).collect()
    }

    /// Whether some cell center of `self` coincides with one of `other`.
    pub fn shares_nodes_with(&self, other: &CellGrid) -> bool {
        let tol = 1e-12 * self.domain.corner_radius().max(1.0);
        let hits = |a: &[f64], b: &[f64]| a.iter().any(|u| b.iter().any(|v| (u - v).abs() <= tol));
        let ax: Vec<f64> = (0..self.nx).map(|i| self.center_x(i)).collect();
        let ay: Vec<f64> = (0..self.ny).map(|i| self.center_y(i)).collect();
        let bx: Vec<f64> = (0..other.nx).map(|i| other.center_x(i)).collect();
        let by: Vec<f64> = (0..other.ny).map(|i| other.center_y(i)).collect();
        hits(&ax, &bx) && hits(&ay, &by)
    }
}

/// `count` receivers on a circle, `θ_i = offset + 2πi/count`.
pub fn receiver_circle(radius: f64, count: usize, angular_offset: f64) -> Vec<Point> {
    (0..count)
        .map(|i| {
            let theta = angular_offset + core::f64::consts::TAU * i as f64 / count as f64;
            let (s, c) = theta.sin_cos();
            [radius * c, radius * s]
        })
        .collect()
}

/// Rejects receivers in the closed source domain.
pub fn check_receivers(domain: &Rect, receivers: &[Point]) -> Result<()> {
    if let Some(p) = receivers.iter().find(|p| domain.contains_closed(**p) || !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::Geometry(format!("receiver ({}, {}) lies inside the source domain", p[0], p[1])));
    }
    Ok(())
}
