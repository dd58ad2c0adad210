//! Quasi-Monte Carlo integration with test functions of known integral and
//! Hardy-Krause variation, so the Koksma-Hlawka bound `V(f) D*_N` can be
//! checked against the actual error.
//!
//! Variation values (sum over non-empty coordinate subsets `u` of the Vitali
//! variation of `f` restricted to the face where the other coordinates are 1):
//!
//! - `constant`: 0.
//! - `product`, `prod x_i`: every face contributes 1, so `2^s - 1`.
//! - `sum`, `sum x_i / s`: only single coordinates contribute, `s * (1/s) = 1`.
//! - `shifted-product:alpha`, `prod (1 + alpha (x_i - 1/2))` with `|alpha| <= 1`:
//!   face `u` contributes `|alpha|^{|u|} (1 + alpha/2)^{s - |u|}`, summing to
//!   `(1 + alpha/2 + |alpha|)^s - (1 + alpha/2)^s`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::discrepancy::{star_discrepancy_with_budget, Method, DEFAULT_WORK_BUDGET};
use super::PointSet;
use crate::error::{Error, Result};

/// Slack for rounding in the Koksma-Hlawka comparison.
pub const KH_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TestFunction {
    Constant,
    Product,
    Sum,
    ShiftedProduct { alpha: f64 },
}

impl TestFunction {
    pub const DEFAULT_ALPHA: f64 = 0.5;

    /// One of each kind.
    pub fn suite() -> Vec<TestFunction> {
        vec![
            TestFunction::Constant,
            TestFunction::Product,
            TestFunction::Sum,
            TestFunction::ShiftedProduct { alpha: Self::DEFAULT_ALPHA },
            TestFunction::ShiftedProduct { alpha: -1.0 },
        ]
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            TestFunction::Constant => 1.0,
            TestFunction::Product => x.iter().product(),
            TestFunction::Sum => x.iter().sum::<f64>() / x.len() as f64,
            TestFunction::ShiftedProduct { alpha } => x.iter().map(|&t| 1.0 + alpha * (t - 0.5)).product(),
        }
    }

    pub fn integral(&self, dim: usize) -> f64 {
        match self {
            TestFunction::Constant | TestFunction::ShiftedProduct { .. } => 1.0,
            TestFunction::Product => 0.5f64.powi(dim as i32),
            TestFunction::Sum => 0.5,
        }
    }

    pub fn variation(&self, dim: usize) -> f64 {
        let s = dim as i32;
        match *self {
            TestFunction::Constant => 0.0,
            TestFunction::Product => 2f64.powi(s) - 1.0,
            TestFunction::Sum => 1.0,
            TestFunction::ShiftedProduct { alpha } => {
                (1.0 + alpha / 2.0 + alpha.abs()).powi(s) - (1.0 + alpha / 2.0).powi(s)
            }
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Constant => f.write_str("constant"),
            TestFunction::Product => f.write_str("product"),
            TestFunction::Sum => f.write_str("sum"),
            TestFunction::ShiftedProduct { alpha } => write!(f, "shifted-product:{alpha}"),
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        match (name, arg) {
            ("constant", None) => Ok(TestFunction::Constant),
            ("product", None) => Ok(TestFunction::Product),
            ("sum", None) => Ok(TestFunction::Sum),
            ("shifted-product", None) => Ok(TestFunction::ShiftedProduct { alpha: Self::DEFAULT_ALPHA }),
            ("shifted-product", Some(a)) => {
                let alpha: f64 = a.parse().map_err(|_| Error::UnknownFunction(s.to_string()))?;
                if !(-1.0..=1.0).contains(&alpha) {
                    return Err(Error::InvalidArgument(format!("alpha {alpha} must lie in [-1, 1]")));
                }
                Ok(TestFunction::ShiftedProduct { alpha })
            }
            _ => Err(Error::UnknownFunction(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrationReport {
    pub function: String,
    pub n: usize,
    pub dim: usize,
    pub estimate: f64,
    pub true_value: f64,
    pub error: f64,
    pub variation: f64,
    pub d_star: Option<f64>,
    pub kh_bound: Option<f64>,
}

impl IntegrationReport {
    /// `None` when no discrepancy was computed.
    pub fn kh_holds(&self) -> Option<bool> {
        self.kh_bound.map(|b| self.error <= b + KH_SLACK)
    }
}

pub fn qmc_integrate(f: TestFunction, ps: &PointSet) -> Result<IntegrationReport> {
    qmc_integrate_with_budget(f, ps, DEFAULT_WORK_BUDGET)
}

/// The bound is omitted when the exact discrepancy would exceed `budget`.
pub fn qmc_integrate_with_budget(f: TestFunction, ps: &PointSet, budget: u128) -> Result<IntegrationReport> {
    if ps.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let dim = ps.dim();
    let estimate = ps.iter().map(|p| f.eval(p)).sum::<f64>() / ps.len() as f64;
    let true_value = f.integral(dim);
    let variation = f.variation(dim);
    let d_star = match star_discrepancy_with_budget(ps, Method::auto(dim), budget) {
        Ok(r) => Some(r.d_star),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(IntegrationReport {
        function: f.to_string(),
        n: ps.len(),
        dim,
        estimate,
        true_value,
        error: (estimate - true_value).abs(),
        variation,
        d_star,
        kh_bound: d_star.map(|d| variation * d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_function_ids() {
        assert_eq!("product".parse::<TestFunction>().unwrap(), TestFunction::Product);
        assert_eq!(
            "shifted-product:-0.25".parse::<TestFunction>().unwrap(),
            TestFunction::ShiftedProduct { alpha: -0.25 }
        );
        assert!(matches!("cosine".parse::<TestFunction>(), Err(Error::UnknownFunction(_))));
        assert!("shifted-product:2".parse::<TestFunction>().is_err());
    }

    #[test]
    fn constant_integrates_exactly() {
        let ps = PointSet::new(1, vec![0.1, 0.7, 0.3]).unwrap();
        let r = qmc_integrate(TestFunction::Constant, &ps).unwrap();
        assert_eq!((r.estimate, r.error), (1.0, 0.0));
        assert_eq!(r.kh_holds(), Some(true));
    }

    #[test]
    fn variation_constants() {
        assert_eq!(TestFunction::Product.variation(3), 7.0);
        assert_eq!(TestFunction::Sum.variation(4), 1.0);
        let f = TestFunction::ShiftedProduct { alpha: 1.0 };
        assert_eq!(f.variation(1), 1.0);
        assert_eq!(f.variation(2), 2.5f64.powi(2) - 1.5f64.powi(2));
    }

    #[test]
    fn integrals_match_midpoint_rule() {
        let m = 200;
        let coords: Vec<f64> = (0..m)
            .flat_map(|i| (0..m).flat_map(move |j| [(i as f64 + 0.5) / m as f64, (j as f64 + 0.5) / m as f64]))
            .collect();
        let ps = PointSet::new(2, coords).unwrap();
        for f in TestFunction::suite() {
            let r = qmc_integrate_with_budget(f, &ps, 0).unwrap();
            assert!(r.error < 1e-4, "{f}: {}", r.error);
            assert!(r.kh_bound.is_none());
        }
    }
}
