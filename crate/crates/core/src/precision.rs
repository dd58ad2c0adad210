//! High-precision real arithmetic used for the characteristic root and for
//! quantities where double precision loses the signal (invariant measure,
//! spectrum probes).
//!
//! Values are `BigDecimal`s rounded to [`WORKING_DIGITS`] significant digits
//! after every multiplication or division.

use bigdecimal::{BigDecimal, Signed, ToPrimitive, Zero};
use num_traits::One;

use crate::error::{Error, Result};

/// Significant digits kept in intermediate products.
pub const WORKING_DIGITS: u64 = 64;

/// Bisection steps after bracketing; halves a 2e-9 bracket below 1e-50.
const BISECTION_STEPS: usize = 150;

pub fn from_u128(v: u128) -> BigDecimal {
    BigDecimal::from(v)
}

pub fn from_i128(v: i128) -> BigDecimal {
    BigDecimal::from(v)
}

pub fn to_f64(x: &BigDecimal) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn mul(x: &BigDecimal, y: &BigDecimal) -> BigDecimal {
    (x * y).with_prec(WORKING_DIGITS)
}

pub fn div(x: &BigDecimal, y: &BigDecimal) -> BigDecimal {
    (x / y).with_prec(WORKING_DIGITS)
}

pub fn powi(x: &BigDecimal, k: usize) -> BigDecimal {
    let mut acc = BigDecimal::one();
    let mut base = x.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(&acc, &base);
        }
        base = mul(&base, &base);
        e >>= 1;
    }
    acc
}

/// Evaluates `x^d - a_0 x^{d-1} - ... - a_{d-1}` exactly.
pub fn char_poly(coeffs: &[u32], x: &BigDecimal) -> BigDecimal {
    let mut acc = BigDecimal::one();
    for &a in coeffs {
        acc = &acc * x - BigDecimal::from(a);
    }
    acc
}

/// Refines the unique positive root of the characteristic polynomial by
/// bisection with exact sign evaluation.
///
/// `approx` seeds a narrow bracket; if its signs do not straddle the root the
/// bracket falls back to `[1, 1 + sum(a)]`.
pub fn refine_root(coeffs: &[u32], approx: f64) -> Result<BigDecimal> {
    let sum: u64 = coeffs.iter().map(|&a| u64::from(a)).sum();
    let below = |x: &BigDecimal| char_poly(coeffs, x).is_negative();

    let seeded = BigDecimal::try_from(approx)
        .ok()
        .map(|c| {
            let w = BigDecimal::try_from(approx * 1e-9).unwrap_or_else(|_| BigDecimal::zero());
            (&c - &w, &c + &w)
        })
        .filter(|(lo, hi)| below(lo) && !below(hi));
    let (mut lo, mut hi) = seeded.unwrap_or_else(|| (BigDecimal::one(), BigDecimal::from(1 + sum)));
    if !below(&lo) || below(&hi) {
        return Err(Error::RootNotConverged { iterations: 0 });
    }

    for _ in 0..BISECTION_STEPS {
        let mid = (&lo + &hi).half().with_prec(WORKING_DIGITS + 8);
        if below(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((&lo + &hi).half().with_prec(WORKING_DIGITS))
}

/// Distance from `x` to the nearest integer.
pub fn distance_to_integer(x: &BigDecimal) -> BigDecimal {
    let floor = x.with_scale_round(0, bigdecimal::RoundingMode::Floor);
    let frac = x - floor;
    let up = BigDecimal::one() - &frac;
    if frac < up {
        frac
    } else {
        up
    }
}
