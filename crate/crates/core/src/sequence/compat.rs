//! Pairwise hypotheses for the multi-dimensional Halton construction over
//! constant-coefficient systems `(b, ..., b)`: the `b_i` must be pairwise
//! coprime and no `beta_i^k / beta_j^l` may be rational.
//!
//! Coprimality is decided exactly. Rationality can only be tested on a
//! bounded range of exponents and denominators, so a hit is a warning and a
//! miss is evidence, not proof.

use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeration::NumerationSystem;

pub const DEFAULT_K_MAX: u32 = 6;
pub const DEFAULT_RATIO_TOL: f64 = 1e-12;
/// Largest denominator tried when looking for a nearby rational.
pub const MAX_DENOMINATOR: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CompatStatus {
    Pass,
    Warn,
    Fail,
}

impl fmt::Display for CompatStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompatStatus::Pass => "PASS",
            CompatStatus::Warn => "WARN",
            CompatStatus::Fail => "FAIL",
        })
    }
}

/// `beta_i^k / beta_j^l` lies within the tolerance of `p / q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalHit {
    pub k: u32,
    pub l: u32,
    pub p: i64,
    pub q: u64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub first: usize,
    pub second: usize,
    pub b_first: u32,
    pub b_second: u32,
    pub gcd: u32,
    pub coprime: bool,
    pub rational_hit: Option<RationalHit>,
    pub status: CompatStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompatReport {
    pub k_max: u32,
    pub tol: f64,
    pub pairs: Vec<PairReport>,
    pub status: CompatStatus,
}

/// Nearest `p / q` with `q <= MAX_DENOMINATOR`, if within `tol`.
fn nearby_rational(r: f64, tol: f64) -> Option<(i64, u64, f64)> {
    (1..=MAX_DENOMINATOR).find_map(|q| {
        let p = (r * q as f64).round();
        let gap = (r - p / q as f64).abs();
        (gap <= tol).then_some((p as i64, q, gap))
    })
}

pub fn compatibility_check(systems: &[NumerationSystem], k_max: u32, tol: f64) -> Result<CompatReport> {
    if k_max == 0 || tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument("k_max must be positive and tol > 0".into()));
    }
    let bases = systems
        .iter()
        .map(|s| {
            s.coeffs()
                .constant_value()
                .ok_or_else(|| Error::OutsideProductHypotheses { coeffs: s.coeffs().to_string() })
        })
        .collect::<Result<Vec<u32>>>()?;

    let mut pairs = Vec::new();
    for i in 0..systems.len() {
        for j in i + 1..systems.len() {
            let gcd = bases[i].gcd(&bases[j]);
            let (bi, bj) = (systems[i].beta(), systems[j].beta());
            // classical bases: coprimality alone is the hypothesis
            let both_classical = systems[i].degree() == 1 && systems[j].degree() == 1;
            let rational_hit = (1..=k_max)
                .filter(|_| !both_classical)
                .flat_map(|k| (1..=k_max).map(move |l| (k, l)))
                .find_map(|(k, l)| {
                    let r = bi.powi(k as i32) / bj.powi(l as i32);
                    nearby_rational(r, tol).map(|(p, q, gap)| RationalHit { k, l, p, q, gap })
                });
            let status = if gcd != 1 {
                CompatStatus::Fail
            } else if rational_hit.is_some() {
                CompatStatus::Warn
            } else {
                CompatStatus::Pass
            };
            pairs.push(PairReport {
                first: i,
                second: j,
                b_first: bases[i],
                b_second: bases[j],
                gcd,
                coprime: gcd == 1,
                rational_hit,
                status,
            });
        }
    }
    let status = pairs.iter().map(|p| p.status).max().unwrap_or(CompatStatus::Pass);
    Ok(CompatReport { k_max, tol, pairs, status })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(v: &[u32]) -> NumerationSystem {
        NumerationSystem::from_slice(v).unwrap()
    }

    fn check(systems: &[NumerationSystem]) -> CompatReport {
        compatibility_check(systems, DEFAULT_K_MAX, DEFAULT_RATIO_TOL).unwrap()
    }

    #[test]
    fn fibonacci_and_base_two_pass() {
        let r = check(&[sys(&[1, 1]), sys(&[2])]);
        assert_eq!(r.status, CompatStatus::Pass);
        assert!(r.pairs[0].coprime);
    }

    #[test]
    fn shared_factor_fails() {
        let r = check(&[sys(&[2]), sys(&[4])]);
        assert_eq!(r.status, CompatStatus::Fail);
        assert_eq!(r.pairs[0].gcd, 2);
    }

    #[test]
    fn identical_roots_warn() {
        let r = check(&[sys(&[1, 1]), sys(&[1, 1])]);
        assert_eq!(r.status, CompatStatus::Warn);
        let hit = r.pairs[0].rational_hit.as_ref().unwrap();
        assert_eq!((hit.k, hit.l, hit.p, hit.q), (1, 1, 1, 1));
    }

    #[test]
    fn classical_bases_need_only_coprimality() {
        assert_eq!(check(&[sys(&[3]), sys(&[2])]).status, CompatStatus::Pass);
        assert_eq!(check(&[sys(&[6]), sys(&[4])]).status, CompatStatus::Fail);
    }

    #[test]
    fn non_constant_systems_are_rejected() {
        let err = compatibility_check(&[sys(&[1, 0, 1]), sys(&[2])], 3, 1e-12).unwrap_err();
        assert!(matches!(err, Error::OutsideProductHypotheses { .. }));
    }
}
