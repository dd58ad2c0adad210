//! The beta-adic Monna map, its greedy pseudo-inverse and the interval map
//! `T = monna . successor . pseudo_inverse`.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeration::{DigitString, NumerationSystem};
use crate::odometer::{successor, OdometerState};

/// Truncation depth used by [`kakutani_fibonacci`] and the CLI.
pub const DEFAULT_DEPTH: usize = 64;

/// Residuals below this are treated as zero by [`pseudo_inverse`], and digit
/// boundaries are snapped upward by the same amount.
pub const SNAP_TOLERANCE: f64 = 1.0 / (1u64 << 46) as f64;

/// Values at most this far above 1 are attributed to rounding and clamped.
const UNIT_CLAMP: f64 = 1e-12;

/// A real number in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct UnitPoint(f64);

impl UnitPoint {
    pub const ZERO: UnitPoint = UnitPoint(0.0);

    pub fn new(x: f64) -> Result<Self> {
        if (0.0..1.0).contains(&x) {
            Ok(Self(x))
        } else {
            Err(Error::OutOfRange { what: "unit point", value: x.to_string(), limit: "[0, 1)".into() })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for UnitPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<UnitPoint> for f64 {
    fn from(p: UnitPoint) -> f64 {
        p.0
    }
}

/// `sum eps_j beta^{-j-1}`, by Horner's scheme from the highest index.
pub fn monna_map(digits: &DigitString, sys: &NumerationSystem) -> Result<UnitPoint> {
    sys.require_monna()?;
    let s = digits.significant();
    if sys.automaton().run(s.iter().copied()).is_none() {
        return Err(Error::Inadmissible(digits.to_string()));
    }
    Ok(UnitPoint(clamp_unit(horner(s, sys.beta()))?))
}

/// Horner evaluation without the admissibility check.
pub(crate) fn horner(digits: &[u32], beta: f64) -> f64 {
    digits.iter().rev().fold(0.0, |x, &e| (x + f64::from(e)) / beta)
}

pub(crate) fn clamp_unit(x: f64) -> Result<f64> {
    if x < 1.0 {
        Ok(x)
    } else if x < 1.0 + UNIT_CLAMP {
        Ok(1.0 - f64::EPSILON / 2.0)
    } else {
        Err(Error::OutOfRange { what: "Monna image", value: x.to_string(), limit: "1".into() })
    }
}

/// First `depth` digits of the greedy beta-expansion of `x`.
///
/// Digits are extracted by comparing the remainder against the weights
/// `beta^{-j-1}` (computed from the high-precision root) rather than by
/// repeated multiplication by `beta`, which would amplify the rounding error
/// of `x` by `beta^j`. A digit boundary within [`SNAP_TOLERANCE`] of the
/// remainder counts as reached, and extraction stops once the remainder is
/// below the tolerance. Digits never exceed what the admissibility rule
/// allows, so the output is always admissible and satisfies
/// `|x - monna(output)| <= max(beta^{-depth} / (1 - 1/beta), SNAP_TOLERANCE)`.
pub fn pseudo_inverse(x: UnitPoint, sys: &NumerationSystem, depth: usize) -> Result<DigitString> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let automaton = sys.automaton();
    let mut digits = vec![0u32; depth];
    let mut rest = x.0;
    let mut state = 0;
    for (j, slot) in digits.iter_mut().enumerate() {
        if rest <= SNAP_TOLERANCE {
            break;
        }
        let w = sys.weight(j);
        let e = (((rest + SNAP_TOLERANCE) / w).floor() as u32).min(automaton.max_digit(state));
        *slot = e;
        rest = (rest - f64::from(e) * w).max(0.0);
        state = automaton.step(state, e).expect("digit capped by the automaton");
    }
    Ok(DigitString::new(digits))
}

/// `monna(successor(pseudo_inverse(x, depth)))`.
pub fn interval_transform(x: UnitPoint, sys: &NumerationSystem, depth: usize) -> Result<UnitPoint> {
    sys.require_monna()?;
    if depth < sys.degree() + 2 {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} must be at least d + 2 = {}",
            sys.degree() + 2
        )));
    }
    let digits = pseudo_inverse(x, sys, depth)?;
    let state = OdometerState::new(digits, sys)?;
    monna_map(successor(&state)?.digits(), sys)
}

fn fibonacci_system() -> &'static NumerationSystem {
    static FIB: OnceLock<NumerationSystem> = OnceLock::new();
    FIB.get_or_init(NumerationSystem::fibonacci)
}

/// The Kakutani-Fibonacci transformation: [`interval_transform`] for the
/// Fibonacci system at depth [`DEFAULT_DEPTH`].
pub fn kakutani_fibonacci(x: UnitPoint) -> UnitPoint {
    interval_transform(x, fibonacci_system(), DEFAULT_DEPTH).expect("fibonacci table covers depth 64")
}
