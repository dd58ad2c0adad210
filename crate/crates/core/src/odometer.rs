//! The odometer: addition by one on admissible digit strings.

use crate::error::{Error, Result};
use crate::numeration::{expansion_value, greedy_expansion, is_admissible, DigitString, NumerationSystem};

/// An admissible digit string tied to its numeration system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdometerState<'a> {
    digits: DigitString,
    sys: &'a NumerationSystem,
}

impl<'a> OdometerState<'a> {
    pub fn new(digits: DigitString, sys: &'a NumerationSystem) -> Result<Self> {
        if !is_admissible(&digits, sys)? {
            return Err(Error::Inadmissible(digits.to_string()));
        }
        Ok(Self { digits, sys })
    }

    pub fn zero(sys: &'a NumerationSystem) -> Self {
        Self { digits: DigitString::empty(), sys }
    }

    pub fn from_integer(n: u128, sys: &'a NumerationSystem) -> Result<Self> {
        Ok(Self { digits: greedy_expansion(n, sys)?, sys })
    }

    pub fn digits(&self) -> &DigitString {
        &self.digits
    }

    pub fn into_digits(self) -> DigitString {
        self.digits
    }

    pub fn system(&self) -> &'a NumerationSystem {
        self.sys
    }

    pub fn value(&self) -> Result<u128> {
        expansion_value(&self.digits, self.sys)
    }
}

/// Adds one.
///
/// With `x(j) = eps_0 G_0 + ... + eps_j G_j`, the carry horizon `M` is the
/// smallest `j` such that `x(j') + 1 < G_{j'+1}` for every `j' >= j` up to the
/// top digit. The block `x(M) + 1` is re-expanded greedily into indices
/// `0..=M` and the digits above `M` are kept.
pub fn successor<'a>(state: &OdometerState<'a>) -> Result<OdometerState<'a>> {
    let sys = state.sys;
    let g = sys.base_sequence();
    let low = state.digits.significant();
    let len = low.len();

    let mut partial = Vec::with_capacity(len);
    let mut acc: u128 = 0;
    for (k, &e) in low.iter().enumerate() {
        acc += u128::from(e) * g[k];
        partial.push(acc);
    }

    let needs_carry = |j: usize| partial[j] + 1 == g[j + 1];
    let horizon = if len == 0 {
        0
    } else if needs_carry(len - 1) {
        len
    } else {
        let mut j = len - 1;
        while j > 0 && !needs_carry(j - 1) {
            j -= 1;
        }
        j
    };
    if horizon + 1 > sys.max_index() {
        return Err(Error::OutOfRange {
            what: "odometer carry index",
            value: horizon.to_string(),
            limit: (sys.max_index() - 1).to_string(),
        });
    }

    let mut block = if len == 0 { 1 } else { partial[horizon.min(len - 1)] + 1 };
    let mut digits = low.to_vec();
    digits.resize(len.max(horizon + 1), 0);
    for j in (0..=horizon).rev() {
        let q = block / g[j];
        digits[j] = q as u32;
        block -= q * g[j];
    }
    Ok(OdometerState { digits: DigitString::new(digits), sys })
}

/// Lazily yields `start`, `successor(start)`, ... (`count` states in total).
pub fn orbit<'a>(start: OdometerState<'a>, count: usize) -> Orbit<'a> {
    Orbit { next: Some(Ok(start)), remaining: count }
}

pub struct Orbit<'a> {
    next: Option<Result<OdometerState<'a>>>,
    remaining: usize,
}

impl<'a> Iterator for Orbit<'a> {
    type Item = Result<OdometerState<'a>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let current = self.next.take()?;
        if let Ok(state) = &current {
            if self.remaining > 0 {
                self.next = Some(successor(state));
            }
        }
        Some(current)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (0, Some(self.remaining))
    }
}
