//! Arbitrary-precision evaluation of `J0, J1, Y0, Y1` by their ascending
//! series, in binary fixed point. Every `f64` argument is an exact dyadic
//! rational, so the only rounding is the per-operation truncation at
//! `2^-PRECISION`, far below the cancellation the series suffers at large
//! arguments.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Fractional bits. The largest intermediate term at v = 200 is ~2^280.
const PRECISION: u32 = 640;

#[derive(Debug, Clone, Copy)]
pub struct ReferenceQuad {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

#[derive(Clone)]
struct Fixed(BigInt);

impl Fixed {
    fn one() -> Self {
        Fixed(BigInt::one() << PRECISION)
    }

    fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        let bits = x.abs().to_bits();
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let fraction = bits & ((1u64 << 52) - 1);
        let (mantissa, exp2) =
            if exponent == 0 { (fraction, -1074) } else { (fraction | (1u64 << 52), exponent - 1075) };
        let mut value = BigInt::from(mantissa);
        let shift = exp2 + PRECISION as i64;
        value = if shift >= 0 { value << shift as usize } else { value >> (-shift) as usize };
        if x < 0.0 {
            value = -value;
        }
        Fixed(value)
    }

    fn to_f64(&self) -> f64 {
        // Keep 64 significant bits before the final rounding to f64.
        let magnitude = self.0.abs();
        let bits = magnitude.bits() as i64;
        let drop = (bits - 64).max(0);
        let top = (&magnitude >> drop as usize).to_f64().unwrap();
        let value = top * 2f64.powi((drop - PRECISION as i64) as i32);
        if self.0.is_negative() {
            -value
        } else {
            value
        }
    }

    fn add(&self, other: &Fixed) -> Fixed {
        Fixed(&self.0 + &other.0)
    }

    fn sub(&self, other: &Fixed) -> Fixed {
        Fixed(&self.0 - &other.0)
    }

    fn mul(&self, other: &Fixed) -> Fixed {
        Fixed((&self.0 * &other.0) >> PRECISION as usize)
    }

    fn div(&self, other: &Fixed) -> Fixed {
        Fixed((&self.0 << PRECISION as usize) / &other.0)
    }

    fn div_int(&self, n: u64) -> Fixed {
        Fixed(&self.0 / BigInt::from(n))
    }

    fn is_negligible(&self) -> bool {
        self.0.abs() < BigInt::from(4)
    }
}

/// atanh(x) for |x| <= 1/3.
fn atanh(x: &Fixed) -> Fixed {
    let x2 = x.mul(x);
    let mut power = x.clone();
    let mut sum = x.clone();
    let mut n = 1u64;
    loop {
        power = power.mul(&x2);
        n += 2;
        let term = power.div_int(n);
        if term.is_negligible() {
            return sum;
        }
        sum = sum.add(&term);
    }
}

fn ln2() -> Fixed {
    let third = Fixed::one().div_int(3);
    let a = atanh(&third);
    a.add(&a)
}

/// Natural log of a positive f64, by binary range reduction to [1, 2).
fn ln(x: f64) -> Fixed {
    assert!(x > 0.0);
    let mut exponent = 0i64;
    let mut r = x;
    while r >= 2.0 {
        r /= 2.0;
        exponent += 1;
    }
    while r < 1.0 {
        r *= 2.0;
        exponent -= 1;
    }
    let r = Fixed::from_f64(r);
    let ratio = r.sub(&Fixed::one()).div(&r.add(&Fixed::one()));
    let a = atanh(&ratio);
    let mut total = a.add(&a);
    let l2 = ln2();
    let scaled = Fixed(&l2.0 * BigInt::from(exponent));
    total = total.add(&scaled);
    total
}

/// arctan(1/n) for integer n >= 2.
fn arctan_inverse(n: u64) -> Fixed {
    let n2 = n * n;
    let mut power = Fixed::one().div_int(n);
    let mut sum = power.clone();
    let mut k = 1u64;
    let mut negative = true;
    loop {
        power = power.div_int(n2);
        k += 2;
        let term = power.div_int(k);
        if term.is_negligible() {
            return sum;
        }
        sum = if negative { sum.sub(&term) } else { sum.add(&term) };
        negative = !negative;
    }
}

fn pi() -> Fixed {
    // Machin: π = 16 atan(1/5) − 4 atan(1/239)
    let a = Fixed(arctan_inverse(5).0 * BigInt::from(16));
    let b = Fixed(arctan_inverse(239).0 * BigInt::from(4));
    a.sub(&b)
}

fn euler_gamma() -> Fixed {
    // 60 decimal digits; only enters multiplied by J0/J1 so no cancellation.
    const DIGITS: &str = "577215664901532860606512090082402431042159335939923598805767";
    let numerator: BigInt = DIGITS.parse().unwrap();
    let denominator = BigInt::from(10u32).pow(DIGITS.len() as u32);
    Fixed((numerator << PRECISION as usize) / denominator)
}

/// Reference values of `J0, J1, Y0, Y1` at `v > 0`.
pub fn reference_quad(v: f64) -> ReferenceQuad {
    assert!(v > 0.0 && v.is_finite());
    let x = Fixed::from_f64(v);
    let q = x.mul(&x).div_int(4);
    let neg_q = Fixed(-q.0.clone());

    // t0 = (-q)^k/(k!)^2, t1 = (-q)^k/(k!(k+1)!), harmonic H_k
    let mut t0 = Fixed::one();
    let mut t1 = Fixed::one();
    let mut j0 = Fixed::one();
    let mut j1_series = Fixed::one();
    let mut y0_series = Fixed(BigInt::zero());
    let mut y1_series = Fixed::one();
    let mut harmonic = Fixed(BigInt::zero());
    let mut k = 0u64;
    loop {
        k += 1;
        t0 = t0.mul(&neg_q).div_int(k * k);
        t1 = t1.mul(&neg_q).div_int(k * (k + 1));
        harmonic = harmonic.add(&Fixed::one().div_int(k));
        let harmonic_next = harmonic.add(&Fixed::one().div_int(k + 1));
        j0 = j0.add(&t0);
        j1_series = j1_series.add(&t1);
        y0_series = y0_series.sub(&harmonic.mul(&t0));
        y1_series = y1_series.add(&harmonic.add(&harmonic_next).mul(&t1));
        if k > 8 && t0.is_negligible() && t1.is_negligible() {
            break;
        }
    }
    let half_x = x.div_int(2);
    let j1 = half_x.mul(&j1_series);

    let pi = pi();
    let two_over_pi = Fixed::one().add(&Fixed::one()).div(&pi);
    let log_term = ln(v / 2.0).add(&euler_gamma());

    let y0 = two_over_pi.mul(&log_term.mul(&j0).add(&y0_series));
    // Y1 = −2/(πv) + (2/π)(ln(v/2)+γ)J1 − (v/(2π)) Σ (H_k + H_{k+1}) t1
    let pole = two_over_pi.div(&x);
    let log_part = two_over_pi.mul(&log_term.mul(&j1));
    let series_part = half_x.mul(&two_over_pi).div_int(2).mul(&y1_series);
    let y1 = log_part.sub(&pole).sub(&series_part);

    ReferenceQuad { j0: j0.to_f64(), j1: j1.to_f64(), y0: y0.to_f64(), y1: y1.to_f64() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert_eq!(pi().to_f64(), core::f64::consts::PI);
        assert_eq!(ln2().to_f64(), core::f64::consts::LN_2);
        assert!((ln(10.0).to_f64() - core::f64::consts::LN_10).abs() < 1e-15);
    }

    #[test]
    fn known_values_at_one() {
        let r = reference_quad(1.0);
        assert_eq!(r.j0, 0.765_197_686_557_966_6);
        assert_eq!(r.y0, 0.088_256_964_215_676_96);
        assert_eq!(r.j1, 0.440_050_585_744_933_5);
        assert_eq!(r.y1, -0.781_212_821_300_288_7);
    }
}
