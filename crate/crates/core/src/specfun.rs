//! Cylindrical Bessel functions of orders zero and one for real positive
//! arguments, and the Hankel functions of the first kind built from them.
//!
//! Three regimes are used:
//!
//! * `v <= 4`: ascending power series.
//! * `4 < v <= 25`: Miller backward recurrence for `J_n`, normalized with
//!   `1 = J_0 + 2 Σ J_2k`, and the Neumann expansions of `Y_0`, `Y_1` in terms
//!   of the same `J_n`.
//! * `v > 25`: Hankel asymptotic expansions, with the phase `v − π/4` folded
//!   into `sin v ± cos v` so no precision is lost to the subtraction.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type ComplexValue = Complex64;

const FRAC_2_PI: f64 = core::f64::consts::FRAC_2_PI;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_MAX: f64 = 4.0;
const ASYMPTOTIC_MIN: f64 = 25.0;

/// `J0, J1, Y0, Y1` evaluated at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselQuad {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl BesselQuad {
    pub fn h0(&self) -> ComplexValue {
        Complex64::new(self.j0, self.y0)
    }

    pub fn h1(&self) -> ComplexValue {
        Complex64::new(self.j1, self.y1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HankelOrder {
    Zero,
    One,
}

pub fn bessel_quad(v: f64) -> Result<BesselQuad> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(v));
    }
    let quad = if v <= SERIES_MAX {
        ascending_series(v)
    } else if v <= ASYMPTOTIC_MIN {
        miller_neumann(v)
    } else {
        hankel_asymptotic(v)
    };
    if quad.j0.is_finite() && quad.j1.is_finite() && quad.y0.is_finite() && quad.y1.is_finite() {
        Ok(quad)
    } else {
        // Y1 overflows for subnormal arguments.
        Err(Error::Domain(v))
    }
}

pub fn hankel1(order: HankelOrder, v: f64) -> Result<ComplexValue> {
    let quad = bessel_quad(v)?;
    Ok(match order {
        HankelOrder::Zero => quad.h0(),
        HankelOrder::One => quad.h1(),
    })
}

fn ascending_series(v: f64) -> BesselQuad {
    let q = 0.25 * v * v;
    let log_term = (0.5 * v).ln() + EULER_GAMMA;

    // k = 0 terms
    let mut t0 = 1.0; // (-q)^k / (k!)^2
    let mut t1 = 1.0; // (-q)^k / (k! (k+1)!)
    let mut harmonic = 0.0; // H_k
    let mut j0 = 1.0;
    let mut j1 = 1.0;
    let mut y0_sum = 0.0;
    let mut y1_sum = 1.0; // (H_0 + H_1) t1 at k = 0

    for k in 1..60 {
        let kf = k as f64;
        t0 *= -q / (kf * kf);
        t1 *= -q / (kf * (kf + 1.0));
        let next_harmonic = harmonic + 1.0 / kf;
        j0 += t0;
        j1 += t1;
        y0_sum -= next_harmonic * t0;
        y1_sum += (next_harmonic + next_harmonic + 1.0 / (kf + 1.0)) * t1;
        harmonic = next_harmonic;
        if t0.abs() < 1e-18 * j0.abs() && t1.abs() < 1e-18 * j1.abs() {
            break;
        }
    }
    let j1 = 0.5 * v * j1;
    BesselQuad {
        j0,
        j1,
        y0: FRAC_2_PI * (log_term * j0 + y0_sum),
        y1: -FRAC_2_PI / v + FRAC_2_PI * log_term * j1 - 0.25 * FRAC_2_PI * v * y1_sum,
    }
}

const MILLER_CAP: usize = 128;

fn miller_neumann(v: f64) -> BesselQuad {
    const RESCALE_AT: f64 = 1e200;

    // Even starting order comfortably above v.
    let start = (v + (60.0 * v).sqrt() + 24.0) as usize;
    let start = (start + (start & 1)).min(MILLER_CAP - 2);

    let mut j = [0.0_f64; MILLER_CAP];
    j[start] = 1e-30;
    let two_over_v = 2.0 / v;
    for n in (1..=start).rev() {
        let next = n as f64 * two_over_v * j[n] - j[n + 1];
        j[n - 1] = next;
        if next.abs() > RESCALE_AT {
            for value in &mut j[n - 1..=start] {
                *value /= RESCALE_AT;
            }
        }
    }
    let norm = j[0] + 2.0 * j[2..=start].iter().step_by(2).sum::<f64>();
    for value in &mut j[..=start] {
        *value /= norm;
    }

    let log_term = (0.5 * v).ln() + EULER_GAMMA;
    let mut y0_sum = 0.0;
    let mut y1_sum = 0.0;
    let mut sign = -1.0;
    let mut k = 1;
    while 2 * k < start {
        let kf = k as f64;
        y0_sum += sign * j[2 * k] / kf;
        y1_sum += sign * (j[2 * k - 1] - j[2 * k + 1]) / kf;
        sign = -sign;
        k += 1;
    }
    BesselQuad {
        j0: j[0],
        j1: j[1],
        y0: FRAC_2_PI * (log_term * j[0] - 2.0 * y0_sum),
        y1: FRAC_2_PI * (log_term * j[1] - j[0] / v + y1_sum),
    }
}

/// `(P, Q)` of the Hankel expansion for order `nu` (0 or 1).
fn asymptotic_pq(nu: f64, v: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let eight_v = 8.0 * v;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut previous = f64::INFINITY;
    for k in 1..80 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_v);
        let size = term.abs();
        if size > previous {
            break;
        }
        // a_k enters P (even k) or Q (odd k) with alternating signs.
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if size < 1e-17 {
            break;
        }
        previous = size;
    }
    (p, q)
}

fn hankel_asymptotic(v: f64) -> BesselQuad {
    let amplitude = (FRAC_2_PI / v).sqrt();
    let (s, c) = v.sin_cos();
    let half_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;

    // v - π/4
    let cos0 = half_sqrt2 * (c + s);
    let sin0 = half_sqrt2 * (s - c);
    // v - 3π/4
    let cos1 = half_sqrt2 * (s - c);
    let sin1 = -half_sqrt2 * (s + c);

    let (p0, q0) = asymptotic_pq(0.0, v);
    let (p1, q1) = asymptotic_pq(1.0, v);
    BesselQuad {
        j0: amplitude * (p0 * cos0 - q0 * sin0),
        y0: amplitude * (p0 * sin0 + q0 * cos0),
        j1: amplitude * (p1 * cos1 - q1 * sin1),
        y1: amplitude * (p1 * sin1 + q1 * cos1),
    }
}
