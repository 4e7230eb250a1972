//! The two-dimensional elastic Green tensor of the Navier equation
//! `μΔu + (λ+μ)∇∇·u + ω²u = f` with outgoing radiation conditions.
//!
//! Two independent code paths produce the same object:
//!
//! * [`green_tensor`] uses the complex radial profiles `G1`, `G2` in
//!   `G = G1(r) I + G2(r) J(x−y)`, `J(w) = w wᵀ/|w|²`.
//! * [`kernel_components`] evaluates the real and imaginary parts of each
//!   entry directly from `J0, J1, Y0, Y1`; these are the kernels assembled
//!   into the integral operators.

use alloc::format;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::specfun::{bessel_quad, BesselQuad, ComplexValue};

/// Lamé constants of a homogeneous isotropic medium.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ElasticMedium {
    pub mu: f64,
    pub lambda: f64,
}

impl ElasticMedium {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        let medium = ElasticMedium { mu, lambda };
        medium.validate()?;
        Ok(medium)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) || !self.mu.is_finite() || !self.lambda.is_finite() || !(self.lambda + self.mu > 0.0) {
            return Err(Error::Parameter(format!(
                "Lamé constants need mu > 0 and lambda + mu > 0, got mu = {}, lambda = {}",
                self.mu, self.lambda
            )));
        }
        Ok(())
    }

    pub fn wavenumbers(&self, omega: f64) -> Result<Wavenumbers> {
        wavenumbers(self, omega)
    }
}

/// Compressional and shear wavenumbers at one angular frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumbers {
    pub kp: f64,
    pub ks: f64,
    pub omega: f64,
}

pub fn wavenumbers(medium: &ElasticMedium, omega: f64) -> Result<Wavenumbers> {
    medium.validate()?;
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Parameter(format!("angular frequency must be positive, got {omega}")));
    }
    Ok(Wavenumbers { kp: omega / (medium.lambda + 2.0 * medium.mu).sqrt(), ks: omega / medium.mu.sqrt(), omega })
}

/// Radial profiles `(G1(v), G2(v))`.
pub fn g1_g2(v: f64, w: &Wavenumbers, medium: &ElasticMedium) -> Result<(ComplexValue, ComplexValue)> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(v));
    }
    let s = bessel_quad(w.ks * v)?;
    let p = bessel_quad(w.kp * v)?;
    let (h0s, h1s) = (s.h0(), s.h1());
    let (h0p, h1p) = (p.h0(), p.h1());
    let i = Complex64::i();
    let omega2 = w.omega * w.omega;

    let g1 = i / (4.0 * medium.mu) * h0s - i / (4.0 * omega2 * v) * (h1s * w.ks - h1p * w.kp);
    let g2 = i / (4.0 * omega2)
        * (h1s * (2.0 * w.ks / v) - h0s * (w.ks * w.ks) - h1p * (2.0 * w.kp / v) + h0p * (w.kp * w.kp));
    Ok((g1, g2))
}

/// Complex symmetric 2×2 tensor, `entries[row][col]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenTensor {
    pub entries: [[ComplexValue; 2]; 2],
}

impl GreenTensor {
    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        GreenTensor { entries: [[z, z], [z, z]] }
    }

    pub fn get(&self, row: usize, col: usize) -> ComplexValue {
        self.entries[row][col]
    }

    /// `G · v` for a complex 2-vector.
    pub fn apply(&self, v: [ComplexValue; 2]) -> [ComplexValue; 2] {
        let e = &self.entries;
        [e[0][0] * v[0] + e[0][1] * v[1], e[1][0] * v[0] + e[1][1] * v[1]]
    }
}

fn separation(x: Point, y: Point) -> Result<(f64, f64, f64)> {
    let d1 = x[0] - y[0];
    let d2 = x[1] - y[1];
    let r = d1.hypot(d2);
    if !(r > 0.0) {
        return Err(Error::Singular(x[0], x[1]));
    }
    Ok((d1, d2, r))
}

pub fn green_tensor(x: Point, y: Point, w: &Wavenumbers, medium: &ElasticMedium) -> Result<GreenTensor> {
    let (d1, d2, r) = separation(x, y)?;
    let (g1, g2) = g1_g2(r, w, medium)?;
    let r2 = r * r;
    let j11 = d1 * d1 / r2;
    let j12 = d1 * d2 / r2;
    let j22 = d2 * d2 / r2;
    let off = g2 * j12;
    Ok(GreenTensor { entries: [[g1 + g2 * j11, off], [off, g1 + g2 * j22]] })
}

/// Real and imaginary parts of the independent tensor entries; the `[21]`
/// entries equal the `[12]` ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelComponents {
    pub re11: f64,
    pub re12: f64,
    pub re22: f64,
    pub im11: f64,
    pub im12: f64,
    pub im22: f64,
}

impl KernelComponents {
    pub fn re21(&self) -> f64 {
        self.re12
    }

    pub fn im21(&self) -> f64 {
        self.im12
    }

    pub fn to_tensor(&self) -> GreenTensor {
        let c = |re, im| Complex64::new(re, im);
        let off = c(self.re12, self.im12);
        GreenTensor { entries: [[c(self.re11, self.im11), off], [off, c(self.re22, self.im22)]] }
    }
}

pub fn kernel_components(x: Point, y: Point, w: &Wavenumbers, medium: &ElasticMedium) -> Result<KernelComponents> {
    let (d1, d2, r) = separation(x, y)?;
    let s = bessel_quad(w.ks * r)?;
    let p = bessel_quad(w.kp * r)?;
    let four_omega2 = 4.0 * w.omega * w.omega;
    let four_mu = 4.0 * medium.mu;

    // Isotropic part and the bracket multiplying (x_j − y_j)(x_k − y_k)/|x−y|².
    let iso = |z0s: f64, z1s: f64, z1p: f64| z0s / four_mu - (w.ks * z1s - w.kp * z1p) / (four_omega2 * r);
    let bracket = |q: &BesselQuad, z: fn(&BesselQuad) -> (f64, f64), k: f64| {
        let (z0, z1) = z(q);
        2.0 * k / r * z1 - k * k * z0
    };
    let y_pair: fn(&BesselQuad) -> (f64, f64) = |q| (q.y0, q.y1);
    let j_pair: fn(&BesselQuad) -> (f64, f64) = |q| (q.j0, q.j1);

    let a_re = -iso(s.y0, s.y1, p.y1);
    let b_re = -(bracket(&s, y_pair, w.ks) - bracket(&p, y_pair, w.kp)) / (four_omega2 * r * r);
    let a_im = iso(s.j0, s.j1, p.j1);
    let b_im = (bracket(&s, j_pair, w.ks) - bracket(&p, j_pair, w.kp)) / (four_omega2 * r * r);

    Ok(KernelComponents {
        re11: a_re + d1 * d1 * b_re,
        re12: d1 * d2 * b_re,
        re22: a_re + d2 * d2 * b_re,
        im11: a_im + d1 * d1 * b_im,
        im12: d1 * d2 * b_im,
        im22: a_im + d2 * d2 * b_im,
    })
}
