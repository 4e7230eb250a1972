//! Reference source used by the benchmark experiment: a peaks-type mean
//! evaluated at `3x`, a ring-shaped first deviation and a narrow Gaussian
//! second deviation evaluated at `3x`.

#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::Point;
use crate::stochastic::SourceFields;

fn peaks(x1: f64, x2: f64) -> f64 {
    0.3 * (1.0 - x1).powi(2) * (-x1 * x1 - (x2 + 1.0).powi(2)).exp()
        - (0.2 * x1 - x1.powi(3) - x2.powi(5)) * (-x1 * x1 - x2 * x2).exp()
        - 0.03 * (-(x1 + 1.0).powi(2) - x2 * x2).exp()
}

fn saddle(x1: f64, x2: f64) -> f64 {
    5.0 * x1 * x1 * x2 * (-x1 * x1 - x2 * x2).exp()
}

fn ring(r: f64) -> f64 {
    0.6 * (-8.0 * (r.powi(3) - 0.75 * r * r)).exp()
}

fn bump(r: f64) -> f64 {
    (-r * r).exp()
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BenchmarkSource;

impl SourceFields for BenchmarkSource {
    fn g1(&self, p: Point) -> f64 {
        peaks(3.0 * p[0], 3.0 * p[1])
    }

    fn g2(&self, p: Point) -> f64 {
        saddle(3.0 * p[0], 3.0 * p[1])
    }

    fn h1(&self, p: Point) -> f64 {
        ring(p[0].hypot(p[1]))
    }

    fn h2(&self, p: Point) -> f64 {
        bump(3.0 * p[0].hypot(p[1]))
    }
}

pub fn paper_sources() -> BenchmarkSource {
    BenchmarkSource
}

/// A source with its mean and deviations multiplied by constants. A zero
/// factor switches the mean or the noise off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled<S> {
    pub inner: S,
    pub mean_scale: f64,
    pub std_scale: f64,
}

impl<S: SourceFields> SourceFields for Scaled<S> {
    fn g1(&self, p: Point) -> f64 {
        self.mean_scale * self.inner.g1(p)
    }

    fn g2(&self, p: Point) -> f64 {
        self.mean_scale * self.inner.g2(p)
    }

    fn h1(&self, p: Point) -> f64 {
        self.std_scale * self.inner.h1(p)
    }

    fn h2(&self, p: Point) -> f64 {
        self.std_scale * self.inner.h2(p)
    }
}
