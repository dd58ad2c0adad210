//! The odometer-invariant measure on cylinder sets, its transport to Lebesgue
//! measure under the Monna map, and probes of the eigenvalue set.

use std::collections::HashMap;

use bigdecimal::BigDecimal;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mapping::horner;
use crate::numeration::{is_admissible, DigitString, NumerationSystem};
use crate::precision;

/// Extension length used to cross-check the closed-form cylinder supremum.
pub const CROSS_CHECK_DIGITS: usize = 40;

/// Integers whose expansion starts with a fixed block `eps_0 .. eps_{K-1}`.
///
/// `K` is the raw prefix length: trailing zeros are fixed digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderSet<'a> {
    sys: &'a NumerationSystem,
    prefix: DigitString,
}

impl<'a> CylinderSet<'a> {
    pub fn new(prefix: DigitString, sys: &'a NumerationSystem) -> Result<Self> {
        if prefix.len() > sys.max_index() {
            return Err(Error::OutOfRange {
                what: "cylinder length",
                value: prefix.len().to_string(),
                limit: sys.max_index().to_string(),
            });
        }
        if !is_admissible(&prefix, sys)? {
            return Err(Error::Inadmissible(prefix.to_string()));
        }
        Ok(Self { sys, prefix })
    }

    pub fn full(sys: &'a NumerationSystem) -> Self {
        Self { sys, prefix: DigitString::empty() }
    }

    pub fn prefix(&self) -> &DigitString {
        &self.prefix
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }

    pub fn system(&self) -> &'a NumerationSystem {
        self.sys
    }

    fn prefix_value(&self) -> u128 {
        let g = self.sys.base_sequence();
        self.prefix.as_slice().iter().zip(g).map(|(&e, &gk)| u128::from(e) * gk).sum()
    }
}

/// `#{ n < G_M : n in Z }`.
///
/// Counts admissible strings of length `M` that start with the prefix. Going
/// down from the top digit, a bound `B` on the remaining partial sum is either
/// free (`B = G_j`, memoised) or tight; choosing `eps_{j-1} = e` leaves the
/// bound `min(G_{j-1}, B - e G_{j-1})`.
pub fn count_prefix(z: &CylinderSet<'_>, m: usize) -> Result<u128> {
    let k = z.depth();
    let sys = z.sys;
    if m < k {
        return Err(Error::InvalidArgument(format!("M = {m} is below the cylinder depth {k}")));
    }
    if m > sys.max_index() {
        return Err(Error::OutOfRange {
            what: "count index M",
            value: m.to_string(),
            limit: sys.max_index().to_string(),
        });
    }
    let g = sys.base_sequence();
    let p = z.prefix_value();
    let mut free: HashMap<usize, u128> = HashMap::new();

    fn count(j: usize, bound: u128, k: usize, p: u128, g: &[u128], free: &mut HashMap<usize, u128>) -> u128 {
        if j == k {
            return u128::from(p < bound);
        }
        let is_free = bound == g[j];
        if is_free {
            if let Some(&c) = free.get(&j) {
                return c;
            }
        }
        let w = g[j - 1];
        let mut total = 0;
        let mut e = 0u128;
        while e * w < bound {
            total += count(j - 1, (bound - e * w).min(w), k, p, g, free);
            e += 1;
        }
        if is_free {
            free.insert(j, total);
        }
        total
    }

    Ok(count(m, g[m], k, p, g, &mut free))
}

fn cylinder_mu_hp(z: &CylinderSet<'_>) -> Result<BigDecimal> {
    let sys = z.sys;
    let a = sys.coeffs().as_slice();
    let d = a.len();
    let k = z.depth();
    let counts = (0..d)
        .map(|r| {
            let f = count_prefix(z, k + r)?;
            i128::try_from(f).map_err(|_| Error::OutOfRange {
                what: "cylinder count",
                value: f.to_string(),
                limit: i128::MAX.to_string(),
            })
        })
        .collect::<Result<Vec<i128>>>()?;

    let beta = sys.beta_high_precision();
    let mut numerator = BigDecimal::from(0);
    let mut denominator = BigDecimal::from(0);
    let mut power = BigDecimal::one();
    for r in (0..d).rev() {
        // c_r = F_{K+r} - a_0 F_{K+r-1} - ... - a_{r-1} F_K, exact in integers
        let c = (0..r).fold(counts[r], |acc, i| acc - i128::from(a[i]) * counts[r - 1 - i]);
        numerator += precision::mul(&precision::from_i128(c), &power);
        denominator += &power;
        power = precision::mul(&power, beta);
    }
    let denominator = precision::mul(&denominator, &precision::powi(beta, k));
    Ok(precision::div(&numerator, &denominator))
}

/// The invariant measure of a cylinder.
pub fn mu(z: &CylinderSet<'_>) -> Result<f64> {
    Ok(precision::to_f64(&cylinder_mu_hp(z)?))
}

/// Half-open interval `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// `sup sum_{i>=0} t_{s+i} beta^{-i-1}` for each automaton state `s`, where
/// `t` is the periodic comparison word. Since the full word sums to 1 this is
/// `beta^s (1 - sum_{i<s} t_i beta^{-i-1})`.
fn tail_suprema(sys: &NumerationSystem) -> Vec<BigDecimal> {
    let beta = sys.beta_high_precision();
    let inverse = precision::div(&BigDecimal::one(), beta);
    let word = sys.automaton().word();
    let mut out = Vec::with_capacity(word.len());
    let mut head = BigDecimal::from(0);
    let mut w = inverse.clone();
    for (s, &digit) in word.iter().enumerate() {
        out.push(precision::mul(&precision::powi(beta, s), &(BigDecimal::one() - &head)));
        head += precision::mul(&BigDecimal::from(digit), &w);
        w = precision::mul(&w, &inverse);
    }
    out
}

fn image_length_hp(z: &CylinderSet<'_>, suprema: &[BigDecimal]) -> BigDecimal {
    let state = z
        .sys
        .automaton()
        .run(z.prefix.as_slice().iter().copied())
        .expect("prefix admissible");
    let scale = precision::powi(z.sys.beta_high_precision(), z.depth());
    precision::div(&suprema[state], &scale)
}

/// Largest tail value reachable by admissible extensions of `CROSS_CHECK_DIGITS`
/// digits, chosen greedily from the partial-sum condition.
fn numeric_supremum(z: &CylinderSet<'_>) -> Result<f64> {
    let sys = z.sys;
    let k = z.depth();
    let top = k + CROSS_CHECK_DIGITS;
    if top > sys.max_index() {
        return Err(Error::OutOfRange {
            what: "cross-check length",
            value: top.to_string(),
            limit: sys.max_index().to_string(),
        });
    }
    let g = sys.base_sequence();
    let mut partial = z.prefix_value();
    let mut tail = Vec::with_capacity(CROSS_CHECK_DIGITS);
    for j in k..top {
        let e = (g[j + 1] - 1 - partial) / g[j];
        partial += e * g[j];
        tail.push(e as u32);
    }
    Ok(horner(&tail, sys.beta()) * sys.weight(k) * sys.beta())
}

/// Image of a cylinder under the Monna map, `[monna(prefix), monna(prefix) + beta^{-K} V_s)`
/// with `V_s` the tail supremum from the digit-automaton state `s` after the prefix.
pub fn cylinder_image(z: &CylinderSet<'_>) -> Result<Interval> {
    z.sys.require_monna()?;
    let lo = horner(z.prefix.as_slice(), z.sys.beta());
    let length = image_length_hp(z, &tail_suprema(z.sys));
    Ok(Interval { lo, hi: (lo + precision::to_f64(&length)).min(1.0) })
}

/// Gap between the closed-form supremum and the numerically maximised one.
///
/// The numeric value stops after [`CROSS_CHECK_DIGITS`] digits, so the gap is
/// expected to be at most [`truncation_bound`].
pub fn cylinder_cross_check(z: &CylinderSet<'_>) -> Result<f64> {
    let length = precision::to_f64(&image_length_hp(z, &tail_suprema(z.sys)));
    Ok((length - numeric_supremum(z)?).abs())
}

/// `beta^{-(K + 40)} / (1 - 1/beta)`, the most the truncated extension can miss.
pub fn truncation_bound(sys: &NumerationSystem, depth: usize) -> f64 {
    sys.weight(depth + CROSS_CHECK_DIGITS - 1) / (1.0 - 1.0 / sys.beta())
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportReport {
    pub coeffs: Vec<u32>,
    pub depth: usize,
    pub cylinders: usize,
    /// `max |mu(Z) - length(image(Z))|` over all cylinders.
    pub max_deviation: f64,
    pub worst_prefix: Vec<u32>,
    /// `|sum_Z mu(Z) - 1|` for each depth `1..=depth`.
    pub mass_errors: Vec<f64>,
    /// Largest gap between closed-form and numerically maximised suprema.
    pub max_closed_form_gap: f64,
    /// Cylinders whose gap exceeds the truncation bound (plus 1e-15).
    pub closed_form_violations: usize,
}

impl TransportReport {
    pub fn max_mass_error(&self) -> f64 {
        self.mass_errors.iter().copied().fold(0.0, f64::max)
    }
}

/// `(mu(Z), |mu(Z) - length|, closed-form gap)`.
fn transport_terms(z: &CylinderSet<'_>, suprema: &[BigDecimal]) -> Result<(BigDecimal, f64, f64)> {
    let m = cylinder_mu_hp(z)?;
    let length = image_length_hp(z, suprema);
    let deviation = precision::to_f64(&(&m - &length)).abs();
    let gap = (precision::to_f64(&length) - numeric_supremum(z)?).abs();
    Ok((m, deviation, gap))
}

/// Compares `mu(Z)` with the Lebesgue measure of `monna(Z)` for every
/// admissible cylinder of depth `1..=depth`.
pub fn verify_transport(sys: &NumerationSystem, depth: usize) -> Result<TransportReport> {
    sys.require_monna()?;
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let need = (depth + sys.degree() - 1).max(depth + CROSS_CHECK_DIGITS);
    if need > sys.max_index() {
        return Err(Error::OutOfRange {
            what: "transport depth",
            value: depth.to_string(),
            limit: format!(
                "{} (G table ends at index {})",
                sys.max_index().saturating_sub(need - depth),
                sys.max_index()
            ),
        });
    }
    let suprema = tail_suprema(sys);
    let mut report = TransportReport {
        coeffs: sys.coeffs().as_slice().to_vec(),
        depth,
        cylinders: 0,
        max_deviation: 0.0,
        worst_prefix: Vec::new(),
        mass_errors: Vec::with_capacity(depth),
        max_closed_form_gap: 0.0,
        closed_form_violations: 0,
    };
    let mut failure = None;
    for k in 1..=depth {
        let mut mass = BigDecimal::from(0);
        crate::numeration::for_each_admissible(sys, k, |digits| {
            if failure.is_some() {
                return;
            }
            let z = CylinderSet { sys, prefix: DigitString::new(digits.to_vec()) };
            match transport_terms(&z, &suprema) {
                Ok((m, deviation, gap)) => {
                    if deviation > report.max_deviation || report.cylinders == 0 {
                        report.max_deviation = deviation;
                        report.worst_prefix = digits.to_vec();
                    }
                    report.max_closed_form_gap = report.max_closed_form_gap.max(gap);
                    if gap > truncation_bound(sys, k) + 1e-15 {
                        report.closed_form_violations += 1;
                    }
                    report.cylinders += 1;
                    mass += m;
                }
                Err(e) => failure = Some(e),
            }
        })?;
        if let Some(e) = failure.take() {
            return Err(e);
        }
        report.mass_errors.push(precision::to_f64(&(mass - BigDecimal::one())).abs());
    }
    Ok(report)
}

/// Distances `|| G_n c / (b^m beta^l) ||` to the nearest integer and the chord
/// lengths `|z^{G_n} - 1| = 2 sin(pi ||.||)` for `z = exp(2 pi i c / (b^m beta^l))`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumProbe<'a> {
    #[serde(skip)]
    pub sys: &'a NumerationSystem,
    pub c: u64,
    pub m: u32,
    pub l: u32,
    pub distances: Vec<f64>,
    pub values: Vec<f64>,
}

impl<'a> SpectrumProbe<'a> {
    pub fn new(sys: &'a NumerationSystem, c: u64, m: u32, l: u32) -> Self {
        Self { sys, c, m, l, distances: Vec::new(), values: Vec::new() }
    }
}

/// Fills `distances[n]` and `values[n]` for `n = 0..=n_max`.
///
/// `m > 0` needs a constant-coefficient system `(b, ..., b)`. Accuracy is
/// limited by the 64-digit root: values below about `G_n 1e-60` are noise.
pub fn eigenvalue_limit_check<'a>(probe: SpectrumProbe<'a>, n_max: usize) -> Result<SpectrumProbe<'a>> {
    let sys = probe.sys;
    if n_max > sys.max_index() {
        return Err(Error::OutOfRange {
            what: "spectrum index",
            value: n_max.to_string(),
            limit: sys.max_index().to_string(),
        });
    }
    let b = match (probe.m, sys.coeffs().constant_value()) {
        (0, _) => 1,
        (_, Some(b)) => b,
        (_, None) => {
            return Err(Error::InvalidArgument(format!(
                "m > 0 needs a constant-coefficient system, got {}",
                sys.coeffs()
            )))
        }
    };
    let scale = precision::mul(
        &precision::powi(&BigDecimal::from(b), probe.m as usize),
        &precision::powi(sys.beta_high_precision(), probe.l as usize),
    );
    let c = BigDecimal::from(probe.c);
    let mut distances = Vec::with_capacity(n_max + 1);
    let mut values = Vec::with_capacity(n_max + 1);
    for &g in &sys.base_sequence()[..=n_max] {
        let x = precision::div(&(&c * precision::from_u128(g)), &scale);
        let dist = precision::to_f64(&precision::distance_to_integer(&x));
        distances.push(dist);
        values.push(2.0 * (std::f64::consts::PI * dist).sin());
    }
    Ok(SpectrumProbe { distances, values, ..probe })
}
