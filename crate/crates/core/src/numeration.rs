//! Linear-recurrence numeration systems.
//!
//! A coefficient vector `a = (a_0, ..., a_{d-1})` defines the base sequence
//!
//! ```text
//! G_0 = 1,
//! G_k = a_0 G_{k-1} + ... + a_{k-1} G_0 + 1            for 0 < k < d,
//! G_{n+d} = a_0 G_{n+d-1} + ... + a_{d-1} G_n          for n >= 0,
//! ```
//!
//! and every non-negative integer has a unique greedy expansion
//! `n = sum eps_k G_k` whose partial sums satisfy
//! `eps_0 G_0 + ... + eps_{K-1} G_{K-1} < G_K` for every `K`. That partial-sum
//! condition is the definition of admissibility used throughout the crate.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use bigdecimal::BigDecimal;
use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::precision;

/// Largest base-sequence index kept by [`NumerationSystem::new`].
pub const MAX_TABLE_INDEX: usize = 400;

/// Number of precomputed inverse powers of the characteristic root.
const WEIGHT_TABLE_LEN: usize = 256;

const NEWTON_MAX_ITER: usize = 100;

/// Tolerance used when a system is built without an explicit one.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoefficientVector(Vec<u32>);

impl CoefficientVector {
    pub fn new(coeffs: Vec<u32>) -> Result<Self> {
        let Some((&first, _)) = coeffs.split_first() else {
            return Err(Error::InvalidCoefficients("empty coefficient vector".into()));
        };
        if first == 0 {
            return Err(Error::InvalidCoefficients(format!(
                "leading coefficient must be at least 1 in {}",
                fmt_tuple(&coeffs)
            )));
        }
        if coeffs.last() == Some(&0) {
            return Err(Error::InvalidCoefficients(format!(
                "trailing coefficient must be at least 1 in {} (a trailing zero lowers the order)",
                fmt_tuple(&coeffs)
            )));
        }
        if coeffs.len() == 1 && first < 2 {
            return Err(Error::InvalidCoefficients(
                "a degree-1 system needs a_0 >= 2 for the base sequence to grow".into(),
            ));
        }
        Ok(Self(coeffs))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn leading(&self) -> u32 {
        self.0[0]
    }

    /// The common value `b` when every coefficient equals `b`.
    pub fn constant_value(&self) -> Option<u32> {
        let b = self.0[0];
        self.0.iter().all(|&a| a == b).then_some(b)
    }
}

impl FromStr for CoefficientVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coeffs = inner
            .split(',')
            .map(|t| {
                t.trim().parse::<u32>().map_err(|_| {
                    Error::InvalidCoefficients(format!("'{}' is not a non-negative integer", t.trim()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }
}

impl fmt::Display for CoefficientVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_tuple(&self.0))
    }
}

impl Serialize for CoefficientVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

pub(crate) fn fmt_tuple(v: &[u32]) -> String {
    let parts: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ClassTag {
    /// `(a_0, ..., a_0)`
    UniformCase,
    /// `(a_0, a_0 - 1, ..., a_0 - 1, a_0)`
    SandwichCase,
    /// `(a_0, ..., a_0, a_0 + 1)`, the classical base `a_0 + 1` in disguise.
    BAdicEquivalentCase,
    /// `(a', ..., a', a'')` with `a''` uniform or sandwich.
    CompositeCase,
    NotUnitIntervalOrNotDense,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Block decomposition `a = (block, ..., block, tail)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompositeForm {
    pub block: Vec<u32>,
    pub tail: Vec<u32>,
    pub repetitions: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub tag: ClassTag,
    pub composite: Option<CompositeForm>,
    pub equivalent_base: Option<u32>,
}

impl Classification {
    fn plain(tag: ClassTag) -> Self {
        Self { tag, composite: None, equivalent_base: None }
    }

    /// Whether the Monna map sends integers into `[0, 1)` densely.
    pub fn admits_monna_map(&self) -> bool {
        self.tag != ClassTag::NotUnitIntervalOrNotDense
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag)?;
        if let Some(c) = &self.composite {
            write!(
                f,
                " a'={} a''={} equivalent to {}",
                fmt_tuple(&c.block),
                fmt_tuple(&c.tail),
                fmt_tuple(&c.tail)
            )?;
        }
        if let Some(b) = self.equivalent_base {
            write!(f, " base={b}")?;
        }
        Ok(())
    }
}

/// Sorts a coefficient vector into the accepted forms, first match wins.
pub fn classify_coefficients(a: &CoefficientVector) -> Classification {
    let c = a.as_slice();
    let d = c.len();
    let a0 = c[0];

    if c.iter().all(|&x| x == a0) {
        return Classification::plain(ClassTag::UniformCase);
    }
    if d >= 3 && c[d - 1] == a0 && c[1..d - 1].iter().all(|&x| x + 1 == a0) {
        return Classification::plain(ClassTag::SandwichCase);
    }
    if d >= 2 && c[..d - 1].iter().all(|&x| x == a0) && c[d - 1] == a0 + 1 {
        return Classification {
            tag: ClassTag::BAdicEquivalentCase,
            composite: None,
            equivalent_base: Some(a0 + 1),
        };
    }
    if let Some(form) = composite_form(c) {
        return Classification {
            tag: ClassTag::CompositeCase,
            composite: Some(form),
            equivalent_base: None,
        };
    }
    Classification::plain(ClassTag::NotUnitIntervalOrNotDense)
}

fn composite_form(c: &[u32]) -> Option<CompositeForm> {
    let d = c.len();
    let a0 = c[0];
    let low = a0 - 1;
    for len in 2..=d / 2 {
        if !d.is_multiple_of(len) {
            continue;
        }
        let repetitions = d / len - 1;
        let block = &c[..len];
        let tail = &c[d - len..];
        if !(0..repetitions).all(|i| &c[i * len..(i + 1) * len] == block) {
            continue;
        }

        let mut block1 = vec![a0; len];
        block1[len - 1] = low;
        let tail1 = vec![a0; len];

        let mut block2 = vec![low; len];
        block2[0] = a0;
        let mut tail2 = block2.clone();
        tail2[len - 1] = a0;

        if (block == block1.as_slice() && tail == tail1.as_slice())
            || (block == block2.as_slice() && tail == tail2.as_slice())
        {
            return Some(CompositeForm {
                block: block.to_vec(),
                tail: tail.to_vec(),
                repetitions,
            });
        }
    }
    None
}

/// Little-endian digit string: index `j` weighs `G_j` (or `beta^{-j-1}`).
///
/// Trailing zeros are allowed and ignored by equality and hashing.
#[derive(Clone, Debug, Default, Serialize)]
pub struct DigitString(Vec<u32>);

impl DigitString {
    pub fn new(digits: Vec<u32>) -> Self {
        Self(digits)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    /// Raw length including trailing zeros.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Digits up to and including the highest non-zero one.
    pub fn significant(&self) -> &[u32] {
        let end = self.0.iter().rposition(|&e| e != 0).map_or(0, |i| i + 1);
        &self.0[..end]
    }

    pub fn is_zero(&self) -> bool {
        self.significant().is_empty()
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0.get(j).copied().unwrap_or(0)
    }
}

impl From<Vec<u32>> for DigitString {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl PartialEq for DigitString {
    fn eq(&self, other: &Self) -> bool {
        self.significant() == other.significant()
    }
}

impl Eq for DigitString {}

impl Hash for DigitString {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.significant().hash(state);
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_tuple(&self.0))
    }
}

/// Lexicographic digit rule built from the comparison word
/// `t = (a_0, ..., a_{d-2}, a_{d-1} - 1)`, repeated.
///
/// State `s` means the current suffix matches `t_0 .. t_{s-1}`; the next digit
/// may be at most `t_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitAutomaton {
    word: Vec<u32>,
}

impl DigitAutomaton {
    pub fn new(coeffs: &CoefficientVector) -> Self {
        let mut word = coeffs.as_slice().to_vec();
        *word.last_mut().expect("non-empty") -= 1;
        Self { word }
    }

    pub fn word(&self) -> &[u32] {
        &self.word
    }

    pub fn states(&self) -> usize {
        self.word.len()
    }

    pub fn max_digit(&self, state: usize) -> u32 {
        self.word[state]
    }

    pub fn step(&self, state: usize, digit: u32) -> Option<usize> {
        let bound = self.word[state];
        match digit.cmp(&bound) {
            std::cmp::Ordering::Less => Some(0),
            std::cmp::Ordering::Equal => Some((state + 1) % self.word.len()),
            std::cmp::Ordering::Greater => None,
        }
    }

    /// Final state after reading `digits` in order, or `None` if rejected.
    pub fn run<I: IntoIterator<Item = u32>>(&self, digits: I) -> Option<usize> {
        digits.into_iter().try_fold(0, |s, e| self.step(s, e))
    }
}

/// An immutable numeration system with its base sequence and characteristic root.
#[derive(Clone, Debug)]
pub struct NumerationSystem {
    coeffs: CoefficientVector,
    base: Vec<u128>,
    beta: f64,
    beta_hp: BigDecimal,
    growth_constant: f64,
    classification: Classification,
    pisot_verified: bool,
    conjugates: Vec<Complex<f64>>,
    weights: Vec<f64>,
    automaton: DigitAutomaton,
}

impl NumerationSystem {
    /// Builds the system with as many base values as fit in 128 bits
    /// (capped at [`MAX_TABLE_INDEX`]).
    pub fn new(coeffs: CoefficientVector) -> Result<Self> {
        let base = base_sequence(coeffs.as_slice(), MAX_TABLE_INDEX, false)?;
        Self::assemble(coeffs, base)
    }

    pub fn from_slice(coeffs: &[u32]) -> Result<Self> {
        Self::new(CoefficientVector::new(coeffs.to_vec())?)
    }

    /// The Fibonacci system `a = (1, 1)`, `G = 1, 2, 3, 5, 8, ...`.
    pub fn fibonacci() -> Self {
        Self::from_slice(&[1, 1]).expect("fibonacci system is valid")
    }

    fn assemble(coeffs: CoefficientVector, base: Vec<u128>) -> Result<Self> {
        let (approx, conjugates) = root_and_conjugates(coeffs.as_slice(), DEFAULT_ROOT_TOL)?;
        let beta_hp = precision::refine_root(coeffs.as_slice(), approx)?;
        let beta = precision::to_f64(&beta_hp);
        let pisot_verified = conjugates.iter().all(|z| z.norm() < 1.0 - 1e-9);

        let top = base.len() - 1;
        let growth_constant = precision::to_f64(&precision::div(
            &precision::from_u128(base[top]),
            &precision::powi(&beta_hp, top),
        ));

        let inverse = precision::div(&BigDecimal::from(1), &beta_hp);
        let mut weights = Vec::with_capacity(WEIGHT_TABLE_LEN);
        let mut w = inverse.clone();
        for _ in 0..WEIGHT_TABLE_LEN {
            weights.push(precision::to_f64(&w));
            w = precision::mul(&w, &inverse);
        }

        Ok(Self {
            classification: classify_coefficients(&coeffs),
            automaton: DigitAutomaton::new(&coeffs),
            coeffs,
            base,
            beta,
            beta_hp,
            growth_constant,
            pisot_verified,
            conjugates,
            weights,
        })
    }

    pub fn coeffs(&self) -> &CoefficientVector {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.degree()
    }

    /// `G_0 ..= G_max_index`.
    pub fn base_sequence(&self) -> &[u128] {
        &self.base
    }

    pub fn base_value(&self, k: usize) -> Option<u128> {
        self.base.get(k).copied()
    }

    pub fn max_index(&self) -> usize {
        self.base.len() - 1
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The characteristic root to at least 50 significant digits.
    pub fn beta_high_precision(&self) -> &BigDecimal {
        &self.beta_hp
    }

    pub fn growth_constant(&self) -> f64 {
        self.growth_constant
    }

    pub fn classification(&self) -> &Classification {
        &self.classification
    }

    pub fn pisot_verified(&self) -> bool {
        self.pisot_verified
    }

    /// The remaining roots of the characteristic polynomial.
    pub fn conjugates(&self) -> &[Complex<f64>] {
        &self.conjugates
    }

    pub fn automaton(&self) -> &DigitAutomaton {
        &self.automaton
    }

    /// `beta^{-(j+1)}`, correctly rounded from the high-precision root.
    pub fn weight(&self, j: usize) -> f64 {
        match self.weights.get(j) {
            Some(&w) => w,
            None => {
                let last = WEIGHT_TABLE_LEN - 1;
                self.weights[last] / self.beta.powi((j - last) as i32)
            }
        }
    }

    pub(crate) fn require_monna(&self) -> Result<()> {
        if self.classification.admits_monna_map() {
            Ok(())
        } else {
            Err(Error::NotUnitIntervalOrNotDense { coeffs: self.coeffs.to_string() })
        }
    }

    fn range_error(&self, what: &'static str, value: impl fmt::Display) -> Error {
        Error::OutOfRange {
            what,
            value: value.to_string(),
            limit: format!("G_{} = {}", self.max_index(), self.base[self.max_index()]),
        }
    }
}

impl PartialEq for NumerationSystem {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.base.len() == other.base.len()
    }
}

impl Eq for NumerationSystem {}

/// Builds the system with `G_0 ..= G_max_index`; overflow is an error.
pub fn build_system(a: &CoefficientVector, max_index: usize) -> Result<NumerationSystem> {
    if max_index < a.degree() {
        return Err(Error::InvalidArgument(format!(
            "max_index {max_index} must be at least the degree {}",
            a.degree()
        )));
    }
    let base = base_sequence(a.as_slice(), max_index, true)?;
    NumerationSystem::assemble(a.clone(), base)
}

/// `G_0 ..= G_max`. With `strict`, overflow fails; otherwise the table stops
/// at the last representable value.
fn base_sequence(c: &[u32], max_index: usize, strict: bool) -> Result<Vec<u128>> {
    let d = c.len();
    let mut g: Vec<u128> = Vec::with_capacity(max_index + 1);
    g.push(1);
    for k in 1..=max_index {
        let order = k.min(d);
        let mut acc: Option<u128> = Some(if k < d { 1 } else { 0 });
        for (i, &a) in c.iter().enumerate().take(order) {
            acc = acc.and_then(|s| u128::from(a).checked_mul(g[k - 1 - i]).and_then(|t| s.checked_add(t)));
        }
        match acc {
            Some(v) => g.push(v),
            None if strict => return Err(Error::Overflow { index: k }),
            None => break,
        }
    }
    Ok(g)
}

fn poly_f64(c: &[u32], x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut dp = 0.0;
    for &a in c {
        dp = dp * x + p;
        p = p * x - f64::from(a);
    }
    (p, dp)
}

fn poly_complex(c: &[u32], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = Complex::new(1.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &a in c {
        dp = dp * z + p;
        p = p * z - Complex::new(f64::from(a), 0.0);
    }
    (p, dp)
}

fn root_and_conjugates(c: &[u32], tol: f64) -> Result<(f64, Vec<Complex<f64>>)> {
    let d = c.len();
    if d == 1 {
        return Ok((f64::from(c[0]), Vec::new()));
    }

    let sum: f64 = c.iter().map(|&a| f64::from(a)).sum();
    let (mut lo, mut hi) = (1.0, 1.0 + sum);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if poly_f64(c, mid).0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-6 {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        let (p, dp) = poly_f64(c, x);
        let step = p / dp;
        x -= step;
        if step.abs() <= tol * 1e-3 * x {
            converged = true;
            break;
        }
    }
    if !converged || !(lo..=hi).contains(&x) {
        return Err(Error::RootNotConverged { iterations: NEWTON_MAX_ITER });
    }

    // companion matrix of x^d - a_0 x^{d-1} - ... - a_{d-1}
    let m = DMatrix::<f64>::from_fn(d, d, |i, j| {
        if i == 0 {
            f64::from(c[j])
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut roots: Vec<Complex<f64>> = m
        .complex_eigenvalues()
        .iter()
        .map(|&z| {
            let mut z = z;
            for _ in 0..4 {
                let (p, dp) = poly_complex(c, z);
                if dp.norm() == 0.0 {
                    break;
                }
                z -= p / dp;
            }
            z
        })
        .collect();
    let dominant = roots
        .iter()
        .enumerate()
        .min_by(|(_, u), (_, v)| {
            (*u - x).norm().partial_cmp(&(*v - x).norm()).unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|(i, _)| i)
        .expect("degree >= 2");
    roots.remove(dominant);
    Ok((x, roots))
}

/// The unique root `beta > 1` of `x^d = a_0 x^{d-1} + ... + a_{d-1}`, and
/// whether every other root lies strictly inside the unit circle (by `tol`).
pub fn characteristic_root(a: &CoefficientVector, tol: f64) -> Result<(f64, bool)> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must lie in (0, 1e-6]")));
    }
    let (beta, conjugates) = root_and_conjugates(a.as_slice(), tol)?;
    let pisot = conjugates.iter().all(|z| z.norm() < 1.0 - tol);
    Ok((beta, pisot))
}

/// Greedy expansion of `n`.
pub fn greedy_expansion(n: u128, sys: &NumerationSystem) -> Result<DigitString> {
    let g = sys.base_sequence();
    if n >= g[sys.max_index()] {
        return Err(sys.range_error("integer", n));
    }
    if n == 0 {
        return Ok(DigitString::empty());
    }
    let top = g.partition_point(|&v| v <= n) - 1;
    let mut digits = vec![0u32; top + 1];
    let mut rest = n;
    for j in (0..=top).rev() {
        let q = rest / g[j];
        digits[j] = q as u32;
        rest -= q * g[j];
    }
    Ok(DigitString(digits))
}

/// `sum eps_k G_k`.
pub fn expansion_value(digits: &DigitString, sys: &NumerationSystem) -> Result<u128> {
    let s = digits.significant();
    if s.len() > sys.max_index() + 1 {
        return Err(sys.range_error("digit string length", s.len()));
    }
    s.iter()
        .zip(sys.base_sequence())
        .try_fold(0u128, |acc, (&e, &g)| u128::from(e).checked_mul(g).and_then(|t| acc.checked_add(t)))
        .ok_or_else(|| sys.range_error("expansion value of", digits))
}

/// Admissibility by the partial-sum condition `sum_{k<K} eps_k G_k < G_K`.
pub fn is_admissible(digits: &DigitString, sys: &NumerationSystem) -> Result<bool> {
    let s = digits.significant();
    if s.len() > sys.max_index() {
        return Err(sys.range_error("digit string length", s.len()));
    }
    let g = sys.base_sequence();
    let mut partial: u128 = 0;
    for (k, &e) in s.iter().enumerate() {
        partial = match u128::from(e).checked_mul(g[k]).and_then(|t| partial.checked_add(t)) {
            Some(p) => p,
            None => return Ok(false),
        };
        if partial >= g[k + 1] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lexicographic admissibility: for every `k`,
/// `(eps_k, ..., eps_0, 0, 0, ...)` is smaller than
/// `(a_0, ..., a_{d-2}, a_{d-1} - 1)` repeated.
///
/// Agrees with [`is_admissible`] on every accepted system; the partial-sum
/// test is the reference.
pub fn is_admissible_lexicographic(digits: &DigitString, sys: &NumerationSystem) -> bool {
    let s = digits.significant();
    let word = sys.automaton().word();
    let period = word.len();
    for k in 0..s.len() {
        // a_0 >= 1, so the comparison is decided within one period past the digits
        for i in 0..=k + period {
            let lhs = if i <= k { s[k - i] } else { 0 };
            let rhs = word[i % period];
            if lhs < rhs {
                break;
            }
            if lhs > rhs {
                return false;
            }
        }
    }
    true
}

/// Visits every admissible string of exactly `len` digits (trailing zeros
/// included), pruning by the partial-sum condition.
pub fn for_each_admissible<F: FnMut(&[u32])>(sys: &NumerationSystem, len: usize, mut visit: F) -> Result<()> {
    if len > sys.max_index() {
        return Err(sys.range_error("digit string length", len));
    }
    let g = sys.base_sequence();
    let mut digits = vec![0u32; len];
    fn walk<F: FnMut(&[u32])>(g: &[u128], digits: &mut Vec<u32>, j: usize, partial: u128, visit: &mut F) {
        if j == digits.len() {
            visit(digits);
            return;
        }
        let max = (g[j + 1] - 1 - partial) / g[j];
        for e in 0..=max {
            digits[j] = e as u32;
            walk(g, digits, j + 1, partial + e * g[j], visit);
        }
        digits[j] = 0;
    }
    walk(g, &mut digits, 0, 0, &mut visit);
    Ok(())
}
