//! Star discrepancy
//! `D*_N = sup_{a in [0,1]^s} | #{x_n in [0, a)} / N - vol([0, a)) |`.
//!
//! The supremum is attained, or approached, at boxes whose corner
//! coordinates are point coordinates or 1. Approaching from below uses the
//! open count `#{x < a}`, approaching from above the closed count `#{x <= a}`,
//! so every method evaluates `max(vol - open / N, closed / N - vol)` over
//! that grid.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::PointSet;
use crate::error::{Error, Result};

/// Default limit on the estimated number of box evaluations.
pub const DEFAULT_WORK_BUDGET: u128 = 2_000_000_000;

/// Largest point count accepted by the brute-force method.
pub const BRUTE_FORCE_MAX_POINTS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact1d,
    ExactGrid,
    BruteForce,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact1d => "exact_1d",
            Method::ExactGrid => "exact_grid",
            Method::BruteForce => "brute_force",
        }
    }

    /// `exact_1d` in one dimension, `exact_grid` otherwise.
    pub fn auto(dim: usize) -> Self {
        if dim == 1 {
            Method::Exact1d
        } else {
            Method::ExactGrid
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact_1d" | "exact-1d" => Ok(Method::Exact1d),
            "exact_grid" | "exact-grid" => Ok(Method::ExactGrid),
            "brute_force" | "brute-force" => Ok(Method::BruteForce),
            other => Err(Error::InvalidArgument(format!(
                "unknown discrepancy method '{other}' (expected exact_1d, exact_grid or brute_force)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub n: usize,
    pub dim: usize,
    pub d_star: f64,
    pub method: Method,
    pub exact: bool,
}

pub fn star_discrepancy(ps: &PointSet, method: Method) -> Result<DiscrepancyReport> {
    star_discrepancy_with_budget(ps, method, DEFAULT_WORK_BUDGET)
}

pub fn star_discrepancy_with_budget(ps: &PointSet, method: Method, budget: u128) -> Result<DiscrepancyReport> {
    if ps.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let n = ps.len();
    let dim = ps.dim();
    let check = |work: u128| {
        if work > budget {
            Err(Error::BudgetExceeded { method: method.name(), work, budget })
        } else {
            Ok(())
        }
    };
    let d_star = match method {
        Method::Exact1d => {
            if dim != 1 {
                return Err(Error::InvalidArgument(format!("exact_1d needs dimension 1, got {dim}")));
            }
            exact_1d(ps.coords())
        }
        Method::ExactGrid => {
            check(grid_work(n, dim))?;
            exact_grid(ps)
        }
        Method::BruteForce => {
            if n > BRUTE_FORCE_MAX_POINTS {
                return Err(Error::BudgetExceeded {
                    method: method.name(),
                    work: n as u128,
                    budget: BRUTE_FORCE_MAX_POINTS as u128,
                });
            }
            check(brute_force_work(n, dim))?;
            brute_force(ps)
        }
    };
    Ok(DiscrepancyReport { n, dim, d_star: d_star.clamp(0.0, 1.0), method, exact: true })
}

fn grid_work(n: usize, dim: usize) -> u128 {
    (n as u128).saturating_pow(dim as u32)
}

fn brute_force_work(n: usize, dim: usize) -> u128 {
    (n as u128 + 1).saturating_pow(dim as u32).saturating_mul(n as u128 * dim as u128)
}

/// `max_i max(x_(i) - (i-1)/N, i/N - x_(i))` over the sorted values.
fn exact_1d(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max)
}

/// Sweeps the grid one coordinate at a time. At each level only the
/// coordinates of points still inside the box can change the counts, so the
/// candidate corners shrink with the active sets. The last coordinate is
/// handled by a two-pointer scan over points presorted by it.
fn exact_grid(ps: &PointSet) -> f64 {
    let dim = ps.dim();
    let n = ps.len() as f64;
    let mut order: Vec<usize> = (0..ps.len()).collect();
    order.sort_by(|&i, &j| ps.point(i)[dim - 1].total_cmp(&ps.point(j)[dim - 1]));

    if dim == 1 {
        return leaf(ps, &order, &order, 1.0, n);
    }
    let candidates = candidates(ps, &order, 0);
    candidates
        .par_iter()
        .map(|&c| {
            let open: Vec<usize> = order.iter().copied().filter(|&i| ps.point(i)[0] < c).collect();
            let closed: Vec<usize> = order.iter().copied().filter(|&i| ps.point(i)[0] <= c).collect();
            sweep(ps, 1, &open, &closed, c, n)
        })
        .reduce(|| 0.0, f64::max)
}

fn candidates(ps: &PointSet, active: &[usize], k: usize) -> Vec<f64> {
    let mut c: Vec<f64> = active.iter().map(|&i| ps.point(i)[k]).collect();
    c.push(1.0);
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

fn sweep(ps: &PointSet, k: usize, open: &[usize], closed: &[usize], vol: f64, n: f64) -> f64 {
    let dim = ps.dim();
    if k == dim - 1 {
        return leaf(ps, open, closed, vol, n);
    }
    let mut best = 0.0f64;
    for c in candidates(ps, closed, k) {
        let next_open: Vec<usize> = open.iter().copied().filter(|&i| ps.point(i)[k] < c).collect();
        let next_closed: Vec<usize> = closed.iter().copied().filter(|&i| ps.point(i)[k] <= c).collect();
        best = best.max(sweep(ps, k + 1, &next_open, &next_closed, vol * c, n));
    }
    best
}

/// Both lists are sorted by the last coordinate.
fn leaf(ps: &PointSet, open: &[usize], closed: &[usize], vol: f64, n: f64) -> f64 {
    let last = ps.dim() - 1;
    let mut best = 0.0f64;
    let mut below = 0;
    let mut at_most = 0;
    let candidates = closed.iter().map(|&i| ps.point(i)[last]).chain(std::iter::once(1.0));
    for c in candidates {
        while below < open.len() && ps.point(open[below])[last] < c {
            below += 1;
        }
        while at_most < closed.len() && ps.point(closed[at_most])[last] <= c {
            at_most += 1;
        }
        let v = vol * c;
        best = best.max(v - below as f64 / n).max(at_most as f64 / n - v);
    }
    best
}

/// Every grid corner, every point: the reference implementation.
fn brute_force(ps: &PointSet) -> f64 {
    let dim = ps.dim();
    let n = ps.len() as f64;
    let axes: Vec<Vec<f64>> = (0..dim)
        .map(|k| {
            let mut c: Vec<f64> = ps.iter().map(|p| p[k]).collect();
            c.push(1.0);
            c
        })
        .collect();
    let mut index = vec![0usize; dim];
    let mut corner = vec![0.0; dim];
    let mut best = 0.0f64;
    loop {
        for k in 0..dim {
            corner[k] = axes[k][index[k]];
        }
        let vol: f64 = corner.iter().product();
        let mut open = 0usize;
        let mut closed = 0usize;
        for p in ps.iter() {
            if p.iter().zip(&corner).all(|(x, a)| x < a) {
                open += 1;
            }
            if p.iter().zip(&corner).all(|(x, a)| x <= a) {
                closed += 1;
            }
        }
        best = best.max(vol - open as f64 / n).max(closed as f64 / n - vol);

        let mut k = 0;
        loop {
            if k == dim {
                return best;
            }
            index[k] += 1;
            if index[k] < axes[k].len() {
                break;
            }
            index[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(xs: &[f64]) -> PointSet {
        PointSet::new(1, xs.to_vec()).unwrap()
    }

    fn d(ps: &PointSet, m: Method) -> f64 {
        star_discrepancy(ps, m).unwrap().d_star
    }

    #[test]
    fn one_dimensional_examples() {
        for m in [Method::Exact1d, Method::ExactGrid, Method::BruteForce] {
            assert_eq!(d(&one_d(&[0.5]), m), 0.5);
            assert!((d(&one_d(&[0.25, 0.5, 0.75]), m) - 0.25).abs() < 1e-15);
            assert_eq!(d(&one_d(&[0.0]), m), 1.0);
        }
    }

    #[test]
    fn two_dimensional_hand_example() {
        // the box [0, 1) x [0, 0.5] holds the single point (0.5, 0.5), closed
        // count 1 against volume 0.5
        let ps = PointSet::new(2, vec![0.5, 0.5]).unwrap();
        assert_eq!(d(&ps, Method::BruteForce), 0.75);
        assert_eq!(d(&ps, Method::ExactGrid), 0.75);
    }

    #[test]
    fn errors() {
        let empty = PointSet::new(1, vec![]).unwrap();
        assert_eq!(star_discrepancy(&empty, Method::Exact1d).unwrap_err(), Error::EmptyPointSet);
        let two = PointSet::new(2, vec![0.1, 0.2]).unwrap();
        assert!(star_discrepancy(&two, Method::Exact1d).is_err());
        let big = one_d(&vec![0.5; 1001]);
        assert!(matches!(star_discrepancy(&big, Method::BruteForce), Err(Error::BudgetExceeded { .. })));
        assert!(star_discrepancy_with_budget(&two, Method::ExactGrid, 0).is_err());
        assert_eq!("exact-grid".parse::<Method>().unwrap(), Method::ExactGrid);
        assert!("fast".parse::<Method>().is_err());
    }

    #[test]
    fn grid_matches_brute_force_with_ties() {
        let coords = vec![0.5, 0.25, 0.5, 0.75, 0.25, 0.25, 0.0, 0.5, 0.9, 0.1];
        let ps = PointSet::new(2, coords).unwrap();
        assert!((d(&ps, Method::ExactGrid) - d(&ps, Method::BruteForce)).abs() < 1e-15);
    }
}
