//! Command-line front end. [`run`] parses arguments, dispatches to the library
//! and returns the process exit status: 0 on success, 1 on invalid input, 2 on
//! a numeric failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::mapping::{interval_transform, UnitPoint, DEFAULT_DEPTH};
use crate::measure::{eigenvalue_limit_check, verify_transport, SpectrumProbe};
use crate::numeration::{characteristic_root, CoefficientVector, NumerationSystem, DEFAULT_ROOT_TOL};
use crate::odometer::{orbit, OdometerState};
use crate::sequence::{
    compat, compatibility_check, generate_halton, orbit_points, qmc_integrate_with_budget,
    star_discrepancy_with_budget, HaltonConfig, Method, PointSet, TestFunction,
};

pub const DEFAULT_COUNT: usize = 1024;
pub const DEFAULT_PRECISION: usize = 15;
/// Largest random offset added to the start index by `--seed`.
const SEED_OFFSET_RANGE: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemEntry {
    coeffs: Vec<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    systems: Vec<SystemEntry>,
    count: Option<usize>,
    skip: Option<u64>,
    include_zero: Option<bool>,
    format: Option<Format>,
    precision: Option<usize>,
    work_budget: Option<u128>,
    header: Option<bool>,
    allow_unchecked: Option<bool>,
}

/// A validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub systems: Vec<CoefficientVector>,
    pub count: usize,
    pub skip: u64,
    pub include_zero: bool,
    pub format: Format,
    pub precision: usize,
    pub work_budget: u128,
    pub header: bool,
    /// Skip the pairwise compatibility check (exploratory products).
    pub allow_unchecked: bool,
}

impl RunConfig {
    fn with_systems(systems: Vec<CoefficientVector>) -> Self {
        Self {
            systems,
            count: DEFAULT_COUNT,
            skip: 0,
            include_zero: false,
            format: Format::Csv,
            precision: DEFAULT_PRECISION,
            work_budget: crate::sequence::discrepancy::DEFAULT_WORK_BUDGET,
            header: false,
            allow_unchecked: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.systems.is_empty() {
            return Err(Error::Config("at least one system is required".into()));
        }
        if self.count == 0 {
            return Err(Error::Config("count must be at least 1".into()));
        }
        if !(6..=17).contains(&self.precision) {
            return Err(Error::Config(format!("precision {} must lie in [6, 17]", self.precision)));
        }
        self.halton().map(|_| ())
    }

    pub fn build_systems(&self) -> Result<Vec<NumerationSystem>> {
        self.systems.iter().cloned().map(NumerationSystem::new).collect()
    }

    pub fn halton(&self) -> Result<HaltonConfig> {
        let systems = self.build_systems()?;
        if self.allow_unchecked {
            HaltonConfig::new_unchecked(systems)
        } else {
            HaltonConfig::new(systems)
        }
    }

    /// First sequence index: `skip`, or `skip + 1` unless zero is included.
    pub fn first_index(&self) -> u64 {
        self.skip + u64::from(!self.include_zero)
    }
}

/// Parses and validates a JSON configuration:
/// `{"systems": [{"coeffs": [1, 1]}, ...], "count": 100, ...}`.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let systems = file
        .systems
        .into_iter()
        .map(|e| CoefficientVector::new(e.coeffs))
        .collect::<Result<Vec<_>>>()?;
    let mut cfg = RunConfig::with_systems(systems);
    cfg.count = file.count.unwrap_or(cfg.count);
    cfg.skip = file.skip.unwrap_or(cfg.skip);
    cfg.include_zero = file.include_zero.unwrap_or(cfg.include_zero);
    cfg.format = file.format.unwrap_or(cfg.format);
    cfg.precision = file.precision.unwrap_or(cfg.precision);
    cfg.work_budget = file.work_budget.unwrap_or(cfg.work_budget);
    cfg.header = file.header.unwrap_or(cfg.header);
    cfg.allow_unchecked = file.allow_unchecked.unwrap_or(cfg.allow_unchecked);
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Parser, Debug)]
#[command(name = "betaqmc", version, about = "Beta-adic van der Corput and Halton sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate sequence points.
    Gen(GenArgs),
    /// Classify coefficient vectors and report the characteristic root.
    Classify(ClassifyArgs),
    /// Star discrepancy of generated points or a point file.
    Discrepancy(DiscrepancyArgs),
    /// Compare the invariant measure with Lebesgue measure on cylinder images.
    VerifyMeasure(VerifyArgs),
    /// Orbit of a point under the interval map, or odometer digit strings.
    Orbit(OrbitArgs),
    /// QMC integration of the built-in test functions.
    Integrate(IntegrateArgs),
    /// Pairwise compatibility of systems for the Halton construction.
    CheckCompat(CompatArgs),
    /// Distance of G_n c / (b^m beta^l) to the nearest integer.
    Spectrum(SpectrumArgs),
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Coefficient vector such as `1,1`; repeat for more dimensions.
    #[arg(long = "coeffs", value_name = "A0,A1,...")]
    coeffs: Vec<String>,
    /// JSON configuration file; flags given explicitly override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    skip: Option<u64>,
    /// Start the sequence at n = 0 instead of n = 1.
    #[arg(long)]
    include_zero: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Decimal digits in printed values, 6 to 17.
    #[arg(long)]
    precision: Option<usize>,
    /// Skip the compatibility check for multi-dimensional runs.
    #[arg(long)]
    allow_unchecked: bool,
    #[arg(long)]
    work_budget: Option<u128>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let mut cfg = parse_config(&text)?;
                if !self.coeffs.is_empty() {
                    cfg.systems = parse_coeffs(&self.coeffs)?;
                }
                cfg
            }
            None => RunConfig::with_systems(parse_coeffs(&self.coeffs)?),
        };
        if let Some(c) = self.count {
            cfg.count = c;
        }
        if let Some(s) = self.skip {
            cfg.skip = s;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if let Some(p) = self.precision {
            cfg.precision = p;
        }
        if let Some(b) = self.work_budget {
            cfg.work_budget = b;
        }
        cfg.include_zero |= self.include_zero;
        cfg.allow_unchecked |= self.allow_unchecked;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_coeffs(raw: &[String]) -> Result<Vec<CoefficientVector>> {
    if raw.is_empty() {
        return Err(Error::Config("no systems given (use --coeffs or --config)".into()));
    }
    raw.iter().map(|s| s.parse()).collect()
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Add a "dim=s generator=..." first line.
    #[arg(long)]
    header: bool,
    /// Shift the start index by a seeded random offset below 2^20.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long = "coeffs", value_name = "A0,A1,...", required = true)]
    coeffs: Vec<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct DiscrepancyArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Read points from a file instead of generating them.
    #[arg(long)]
    input: Option<PathBuf>,
    /// exact_1d, exact_grid or brute_force; chosen by dimension if omitted.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long = "coeffs", value_name = "A0,A1,...")]
    coeffs: String,
    #[arg(long, default_value_t = 8)]
    depth: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[arg(long = "coeffs", value_name = "A0,A1,...", default_value = "1,1")]
    coeffs: String,
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Starting point in [0, 1).
    #[arg(long, conflicts_with = "seed")]
    start: Option<f64>,
    /// Draw the starting point from a seeded generator.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
    /// Print odometer digit strings of 0, 1, 2, ... instead.
    #[arg(long)]
    digits: bool,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: usize,
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long)]
    input: Option<PathBuf>,
    /// constant, product, sum or shifted-product[:alpha]; repeatable, all by default.
    #[arg(long = "function")]
    functions: Vec<String>,
}

#[derive(Args, Debug)]
struct CompatArgs {
    #[arg(long = "coeffs", value_name = "A0,A1,...", required = true)]
    coeffs: Vec<String>,
    #[arg(long, default_value_t = compat::DEFAULT_K_MAX)]
    k_max: u32,
    #[arg(long, default_value_t = compat::DEFAULT_RATIO_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long = "coeffs", value_name = "A0,A1,...", default_value = "1,1")]
    coeffs: String,
    #[arg(long, default_value_t = 1)]
    c: u64,
    #[arg(long, default_value_t = 0)]
    m: u32,
    #[arg(long, default_value_t = 1)]
    l: u32,
    #[arg(long, default_value_t = 30)]
    n_max: usize,
    /// First n to print.
    #[arg(long, default_value_t = 0)]
    n_min: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

/// Runs the command line `args` (including the program name), writing normal
/// output to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numeric_failure() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Gen(a) => gen(a, out),
        Command::Classify(a) => classify(a, out),
        Command::Discrepancy(a) => discrepancy(a, out),
        Command::VerifyMeasure(a) => verify_measure(a, out),
        Command::Orbit(a) => orbit_cmd(a, out),
        Command::Integrate(a) => integrate(a, out),
        Command::CheckCompat(a) => check_compat(a, out),
        Command::Spectrum(a) => spectrum(a, out),
    }
}

fn fmt_point(p: &[f64], precision: usize) -> String {
    let parts: Vec<String> = p.iter().map(|x| format!("{x:.precision$}")).collect();
    parts.join(",")
}

fn write_points(ps: &PointSet, first: u64, cfg: &RunConfig, header: bool, out: &mut dyn Write) -> Result<()> {
    let mut buf = String::new();
    if header {
        writeln!(buf, "dim={} generator={}", ps.dim(), ps.provenance).expect("write to string");
    }
    for (i, p) in ps.iter().enumerate() {
        let coords = fmt_point(p, cfg.precision);
        match cfg.format {
            Format::Csv => writeln!(buf, "{coords}"),
            Format::Jsonl => writeln!(buf, "{{\"n\":{},\"x\":[{coords}]}}", first + i as u64),
        }
        .expect("write to string");
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

fn generate(cfg: &RunConfig, first: u64) -> Result<PointSet> {
    generate_halton(&cfg.halton()?, first, cfg.count)
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg = a.run.resolve()?;
    cfg.header |= a.header;
    let mut first = cfg.first_index();
    if let Some(seed) = a.seed {
        first += ChaCha8Rng::seed_from_u64(seed).random_range(0..SEED_OFFSET_RANGE);
    }
    let ps = generate(&cfg, first)?;
    write_points(&ps, first, &cfg, cfg.header, out)
}

fn classify(a: ClassifyArgs, out: &mut dyn Write) -> Result<()> {
    for raw in &a.coeffs {
        let coeffs: CoefficientVector = raw.parse()?;
        let class = crate::numeration::classify_coefficients(&coeffs);
        let (beta, pisot) = characteristic_root(&coeffs, DEFAULT_ROOT_TOL)?;
        match a.format {
            Format::Csv => {
                writeln!(out, "{class}")?;
                writeln!(out, "coeffs={coeffs} beta={beta:.15} pisot={pisot}")?;
            }
            Format::Jsonl => writeln!(
                out,
                "{}",
                json!({"coeffs": coeffs, "classification": class, "beta": beta, "pisot": pisot})
            )?,
        }
    }
    Ok(())
}

/// One point per line, comma-separated; blank lines, `#` comments and a
/// `dim=` header line are skipped.
pub fn read_points(path: &Path) -> Result<PointSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_points(&text)
}

pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut dim = None;
    let mut coords = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("dim=") {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidArgument(format!("line {}: '{}' is not a number", lineno + 1, t.trim()))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::InvalidArgument(format!(
                    "line {}: {} coordinates, expected {d}",
                    lineno + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        coords.extend(row);
    }
    let dim = dim.ok_or(Error::EmptyPointSet)?;
    PointSet::new(dim, coords)
}

fn points_for(run: &RunArgs, input: &Option<PathBuf>) -> Result<(PointSet, RunConfig)> {
    match input {
        Some(path) => {
            let ps = read_points(path)?;
            let mut cfg = RunConfig::with_systems(Vec::new());
            if let Some(f) = run.format {
                cfg.format = f;
            }
            if let Some(p) = run.precision {
                cfg.precision = p;
            }
            if let Some(b) = run.work_budget {
                cfg.work_budget = b;
            }
            let ps = ps.with_provenance(path.display().to_string());
            Ok((ps, cfg))
        }
        None => {
            let cfg = run.resolve()?;
            Ok((generate(&cfg, cfg.first_index())?, cfg))
        }
    }
}

fn discrepancy(a: DiscrepancyArgs, out: &mut dyn Write) -> Result<()> {
    let (ps, cfg) = points_for(&a.run, &a.input)?;
    let method = match &a.method {
        Some(m) if m != "auto" => m.parse()?,
        _ => Method::auto(ps.dim()),
    };
    let r = star_discrepancy_with_budget(&ps, method, cfg.work_budget)?;
    let p = cfg.precision;
    match cfg.format {
        Format::Csv => writeln!(
            out,
            "N={} dim={} d_star={:.p$} method={} exact={}",
            r.n, r.dim, r.d_star, r.method, r.exact
        )?,
        Format::Jsonl => writeln!(out, "{}", serde_json::to_string(&r).map_err(|e| Error::Io(e.to_string()))?)?,
    }
    Ok(())
}

fn verify_measure(a: VerifyArgs, out: &mut dyn Write) -> Result<()> {
    let sys = NumerationSystem::new(a.coeffs.parse()?)?;
    let r = verify_transport(&sys, a.depth)?;
    let ok = if r.max_deviation < 1e-10 { "yes" } else { "no" };
    match a.format {
        Format::Csv => {
            writeln!(out, "system={} depth={} cylinders={}", sys.coeffs(), r.depth, r.cylinders)?;
            writeln!(out, "max_deviation={:.3e}", r.max_deviation)?;
            writeln!(out, "worst_prefix={}", crate::numeration::fmt_tuple(&r.worst_prefix))?;
            writeln!(out, "max_mass_error={:.3e}", r.max_mass_error())?;
            writeln!(
                out,
                "max_closed_form_gap={:.3e} closed_form_violations={}",
                r.max_closed_form_gap, r.closed_form_violations
            )?;
            writeln!(out, "max_deviation < 1e-10: {ok}")?;
        }
        Format::Jsonl => {
            writeln!(out, "{}", serde_json::to_string(&r).map_err(|e| Error::Io(e.to_string()))?)?;
        }
    }
    Ok(())
}

fn orbit_cmd(a: OrbitArgs, out: &mut dyn Write) -> Result<()> {
    let sys = NumerationSystem::new(a.coeffs.parse()?)?;
    if a.count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    if a.digits {
        for state in orbit(OdometerState::zero(&sys), a.count) {
            writeln!(out, "{}", state?.digits())?;
        }
        return Ok(());
    }
    if !(6..=17).contains(&a.precision) {
        return Err(Error::Config(format!("precision {} must lie in [6, 17]", a.precision)));
    }
    let start = match (a.start, a.seed) {
        (Some(x), _) => UnitPoint::new(x)?,
        (None, Some(seed)) => UnitPoint::new(ChaCha8Rng::seed_from_u64(seed).random_range(0.0..1.0))?,
        (None, None) => UnitPoint::ZERO,
    };
    let ps = orbit_points(start, a.count, |x| interval_transform(x, &sys, a.depth))?;
    let p = a.precision;
    let mut buf = String::new();
    for x in ps.coords() {
        writeln!(buf, "{x:.p$}").expect("write to string");
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

fn integrate(a: IntegrateArgs, out: &mut dyn Write) -> Result<()> {
    let (ps, cfg) = points_for(&a.run, &a.input)?;
    let functions = if a.functions.is_empty() {
        TestFunction::suite()
    } else {
        a.functions.iter().map(|f| f.parse()).collect::<Result<Vec<_>>>()?
    };
    let p = cfg.precision;
    for f in functions {
        let r = qmc_integrate_with_budget(f, &ps, cfg.work_budget)?;
        match cfg.format {
            Format::Csv => {
                let opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.p$}"));
                let holds = match r.kh_holds() {
                    Some(true) => "yes",
                    Some(false) => "no",
                    None => "unchecked",
                };
                writeln!(
                    out,
                    "function={} N={} dim={} estimate={:.p$} true={:.p$} error={:.p$} variation={:.p$} d_star={} kh_bound={} kh_holds={holds}",
                    r.function, r.n, r.dim, r.estimate, r.true_value, r.error, r.variation,
                    opt(r.d_star), opt(r.kh_bound)
                )?;
            }
            Format::Jsonl => {
                writeln!(out, "{}", serde_json::to_string(&r).map_err(|e| Error::Io(e.to_string()))?)?;
            }
        }
    }
    Ok(())
}

fn check_compat(a: CompatArgs, out: &mut dyn Write) -> Result<()> {
    let systems = parse_coeffs(&a.coeffs)?
        .into_iter()
        .map(NumerationSystem::new)
        .collect::<Result<Vec<_>>>()?;
    let r = compatibility_check(&systems, a.k_max, a.tol)?;
    match a.format {
        Format::Csv => {
            for p in &r.pairs {
                let hit = match &p.rational_hit {
                    Some(h) => format!("beta_{}^{}/beta_{}^{}~{}/{}", p.first, h.k, p.second, h.l, h.p, h.q),
                    None => "none".into(),
                };
                writeln!(
                    out,
                    "pair {} {}: gcd={} coprime={} rational_hit={hit} status={}",
                    systems[p.first].coeffs(),
                    systems[p.second].coeffs(),
                    p.gcd,
                    if p.coprime { "yes" } else { "no" },
                    p.status
                )?;
            }
            writeln!(out, "status={}", r.status)?;
        }
        Format::Jsonl => writeln!(out, "{}", serde_json::to_string(&r).map_err(|e| Error::Io(e.to_string()))?)?,
    }
    Ok(())
}

fn spectrum(a: SpectrumArgs, out: &mut dyn Write) -> Result<()> {
    let sys = NumerationSystem::new(a.coeffs.parse()?)?;
    let probe = eigenvalue_limit_check(SpectrumProbe::new(&sys, a.c, a.m, a.l), a.n_max)?;
    for n in a.n_min..=a.n_max {
        let g = sys.base_sequence()[n];
        match a.format {
            Format::Csv => writeln!(
                out,
                "n={n} G_n={g} distance={:.6e} value={:.6e}",
                probe.distances[n], probe.values[n]
            )?,
            Format::Jsonl => writeln!(
                out,
                "{}",
                json!({"n": n, "G_n": g.to_string(), "c": a.c, "m": a.m, "l": a.l,
                       "distance": probe.distances[n], "value": probe.values[n]})
            )?,
        }
    }
    Ok(())
}
