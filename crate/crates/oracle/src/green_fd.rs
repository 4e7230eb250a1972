//! The Green tensor from its defining form
//! `G = i/(4μ) H0(κs r) I + i/(4ω²) ∇x∇xᵀ [H0(κs r) − H0(κp r)]`,
//! with the Hessian taken by sixth-order central differences.

use elasto_core::specfun::{hankel1, HankelOrder};
use elasto_core::{ElasticMedium, Wavenumbers};
use num_complex::Complex64;

pub const DEFAULT_STEP: f64 = 2e-3;

const SECOND: [f64; 7] = [1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];
const FIRST: [f64; 7] = [-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];

fn potential(x: [f64; 2], y: [f64; 2], w: &Wavenumbers) -> Complex64 {
    let r = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
    hankel1(HankelOrder::Zero, w.ks * r).unwrap() - hankel1(HankelOrder::Zero, w.kp * r).unwrap()
}

/// 2×2 complex tensor `[[g11, g12], [g21, g22]]` by finite differences.
pub fn green_tensor_fd(
    x: [f64; 2],
    y: [f64; 2],
    w: &Wavenumbers,
    medium: &ElasticMedium,
    step: f64,
) -> [[Complex64; 2]; 2] {
    let shifted = |a: i32, b: i32| potential([x[0] + a as f64 * step, x[1] + b as f64 * step], y, w);
    let mut d11 = Complex64::new(0.0, 0.0);
    let mut d22 = Complex64::new(0.0, 0.0);
    let mut d12 = Complex64::new(0.0, 0.0);
    for (i, &ci) in SECOND.iter().enumerate() {
        let o = i as i32 - 3;
        d11 += shifted(o, 0) * ci;
        d22 += shifted(0, o) * ci;
    }
    for (i, &ci) in FIRST.iter().enumerate() {
        for (j, &cj) in FIRST.iter().enumerate() {
            if ci != 0.0 && cj != 0.0 {
                d12 += shifted(i as i32 - 3, j as i32 - 3) * (ci * cj);
            }
        }
    }
    let h2 = step * step;
    let (d11, d22, d12) = (d11 / h2, d22 / h2, d12 / h2);

    let r = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
    let i = Complex64::new(0.0, 1.0);
    let diag = i / (4.0 * medium.mu) * hankel1(HankelOrder::Zero, w.ks * r).unwrap();
    let scale = i / (4.0 * w.omega * w.omega);
    [[diag + scale * d11, scale * d12], [scale * d12, diag + scale * d22]]
}
