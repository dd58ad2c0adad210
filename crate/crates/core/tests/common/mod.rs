#![allow(dead_code)]

use betaqmc::numeration::NumerationSystem;

/// Systems exercised by the property suites.
pub const SHIPPED: &[&[u32]] = &[&[1, 1], &[2, 2], &[1, 1, 1], &[3, 3, 3], &[1, 0, 1], &[2, 1, 2]];

/// Constant-coefficient systems, where the measure transport is exact.
pub const CONSTANT: &[&[u32]] = &[&[1, 1], &[2, 2], &[1, 1, 1], &[3, 3, 3]];

pub fn sys(coeffs: &[u32]) -> NumerationSystem {
    NumerationSystem::from_slice(coeffs).unwrap()
}

pub fn shipped() -> Vec<NumerationSystem> {
    SHIPPED.iter().map(|c| sys(c)).collect()
}

/// Every digit string of length `len` over `0..=max_digit`, little-endian.
pub fn for_each_string<F: FnMut(&[u32])>(len: usize, max_digit: u32, mut f: F) {
    let mut digits = vec![0u32; len];
    loop {
        f(&digits);
        let mut k = 0;
        loop {
            if k == len {
                return;
            }
            if digits[k] < max_digit {
                digits[k] += 1;
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}
