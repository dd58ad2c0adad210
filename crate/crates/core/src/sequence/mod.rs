//! Beta-adic van der Corput and Halton sequences, plus the tools to judge
//! them: star discrepancy and QMC integration.

pub mod compat;
pub mod discrepancy;
pub mod integrate;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mapping::{monna_map, UnitPoint};
use crate::numeration::{greedy_expansion, NumerationSystem};
use crate::odometer::{successor, OdometerState};

pub use compat::{compatibility_check, CompatReport, CompatStatus};
pub use discrepancy::{star_discrepancy, star_discrepancy_with_budget, DiscrepancyReport, Method};
pub use integrate::{qmc_integrate, qmc_integrate_with_budget, IntegrationReport, TestFunction};

/// Points in `[0,1)^s`, stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    pub provenance: String,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|x| !(0.0..1.0).contains(*x)) {
            return Err(Error::OutOfRange { what: "coordinate", value: bad.to_string(), limit: "[0, 1)".into() });
        }
        Ok(Self { dim, coords, provenance: String::new() })
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::InvalidArgument(format!("point of dimension {} in a {dim}-dimensional set", p.len())));
        }
        Self::new(dim, points.concat())
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// The first `n` points.
    pub fn prefix(&self, n: usize) -> PointSet {
        let n = n.min(self.len());
        PointSet { dim: self.dim, coords: self.coords[..n * self.dim].to_vec(), provenance: self.provenance.clone() }
    }
}

/// `monna(greedy(n))`.
pub fn vdc_point(n: u64, sys: &NumerationSystem) -> Result<UnitPoint> {
    monna_map(&greedy_expansion(u128::from(n), sys)?, sys)
}

/// An ordered list of systems for the Halton construction.
#[derive(Clone, Debug)]
pub struct HaltonConfig {
    systems: Vec<NumerationSystem>,
    compat: Option<CompatReport>,
}

impl HaltonConfig {
    /// Validates every system and, for two or more, runs the compatibility
    /// check with default parameters; a FAIL is an error.
    pub fn new(systems: Vec<NumerationSystem>) -> Result<Self> {
        let mut cfg = Self::new_unchecked(systems)?;
        if cfg.systems.len() >= 2 {
            let report =
                compatibility_check(&cfg.systems, compat::DEFAULT_K_MAX, compat::DEFAULT_RATIO_TOL)?;
            if let Some(bad) = report.pairs.iter().find(|p| p.status == CompatStatus::Fail) {
                return Err(Error::Incompatible {
                    first: cfg.systems[bad.first].coeffs().to_string(),
                    second: cfg.systems[bad.second].coeffs().to_string(),
                    reason: format!("gcd({}, {}) = {}", bad.b_first, bad.b_second, bad.gcd),
                });
            }
            cfg.compat = Some(report);
        }
        Ok(cfg)
    }

    /// Skips the compatibility check, for exploring products outside the
    /// constant-coefficient setting (e.g. `(1,0,1)` with base 2). Each system
    /// must still admit the Monna map.
    pub fn new_unchecked(systems: Vec<NumerationSystem>) -> Result<Self> {
        if systems.is_empty() {
            return Err(Error::InvalidArgument("a Halton configuration needs at least one system".into()));
        }
        for s in &systems {
            s.require_monna()?;
        }
        Ok(Self { systems, compat: None })
    }

    pub fn dim(&self) -> usize {
        self.systems.len()
    }

    pub fn systems(&self) -> &[NumerationSystem] {
        &self.systems
    }

    pub fn compat(&self) -> Option<&CompatReport> {
        self.compat.as_ref()
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self.systems.iter().map(|s| s.coeffs().to_string()).collect();
        format!("halton[{}]", parts.join("x"))
    }
}

/// Coordinatewise [`vdc_point`].
pub fn halton_point(n: u64, cfg: &HaltonConfig) -> Result<Vec<UnitPoint>> {
    cfg.systems.iter().map(|s| vdc_point(n, s)).collect()
}

/// Points `start, start + 1, ..., start + count - 1`, generated in parallel
/// and returned in index order.
pub fn generate_halton(cfg: &HaltonConfig, start: u64, count: usize) -> Result<PointSet> {
    let end = start
        .checked_add(count as u64)
        .ok_or_else(|| Error::InvalidArgument("index range overflows u64".into()))?;
    let rows: Vec<Vec<UnitPoint>> = (start..end).into_par_iter().map(|n| halton_point(n, cfg)).collect::<Result<_>>()?;
    let coords = rows.into_iter().flatten().map(f64::from).collect();
    Ok(PointSet { dim: cfg.dim(), coords, provenance: format!("{} n={start}..{end}", cfg.describe()) })
}

pub fn generate_vdc(sys: &NumerationSystem, start: u64, count: usize) -> Result<PointSet> {
    generate_halton(&HaltonConfig::new_unchecked(vec![sys.clone()])?, start, count)
}

/// Streams `monna(n)` for `n = start, start + 1, ...` by stepping the odometer
/// instead of re-expanding every index.
pub struct VanDerCorput<'a> {
    state: Option<Result<OdometerState<'a>>>,
}

impl<'a> VanDerCorput<'a> {
    pub fn new(sys: &'a NumerationSystem, start: u64) -> Result<Self> {
        sys.require_monna()?;
        Ok(Self { state: Some(OdometerState::from_integer(u128::from(start), sys)) })
    }
}

impl Iterator for VanDerCorput<'_> {
    type Item = Result<UnitPoint>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.state.take()? {
            Ok(state) => {
                let point = monna_map(state.digits(), state.system());
                self.state = Some(successor(&state));
                Some(point)
            }
            Err(e) => Some(Err(e)),
        }
    }
}

/// `x, f(x), f(f(x)), ...` as a one-dimensional point set of `count` points.
pub fn orbit_points<F>(start: UnitPoint, count: usize, mut f: F) -> Result<PointSet>
where
    F: FnMut(UnitPoint) -> Result<UnitPoint>,
{
    let mut coords = Vec::with_capacity(count);
    let mut x = start;
    for i in 0..count {
        coords.push(x.value());
        if i + 1 < count {
            x = f(x)?;
        }
    }
    PointSet::new(1, coords)
}
