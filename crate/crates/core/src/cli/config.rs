//! Run configuration: a TOML file with unknown keys rejected.
//!
//! Complex numbers are written as a number or a two-element `[re, im]` array.
//! Fields that take a list (grids, seeds, rrgen parameter lists) are always arrays
//! of such values, so `[0.5, 0.6]` there means two real entries.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::bethe::SolverConfig;
use crate::params::ModelParams;
use crate::scalar::C;

type Z = C<f64>;

pub const DEFAULT_TRUNCATION: usize = 64;
pub const DEFAULT_BILATERAL_K: usize = 320;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Pairwise agreement demanded of the quantization values on the zeros of `Theta`.
pub const DEFAULT_BAE2_TOLERANCE: f64 = 1e-7;
pub const DEFAULT_MAX_POINTS: usize = 10_000;
pub const DEFAULT_PROBES: usize = 10;
pub const DEFAULT_PROBE_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    fn get(self) -> Z {
        match self {
            ComplexValue::Real(x) => Z::new(x, 0.0),
            ComplexValue::Pair([re, im]) => Z::new(re, im),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    q: Option<ComplexValue>,
    xi: Option<ComplexValue>,
    omega: Option<ComplexValue>,
    n: Option<usize>,
    s: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    q: Option<Vec<ComplexValue>>,
    xi: Option<Vec<ComplexValue>>,
    omega: Option<Vec<ComplexValue>>,
    n: Option<Vec<usize>>,
    s: Option<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    seeds: Option<Vec<Vec<ComplexValue>>>,
    max_iter: Option<usize>,
    multistart: Option<usize>,
    rng_seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProbes {
    count: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    report: Option<PathBuf>,
    summary: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOnePsi1 {
    a: Vec<ComplexValue>,
    b: Vec<ComplexValue>,
    z: Vec<ComplexValue>,
    q: Vec<ComplexValue>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRrgen {
    a: Vec<ComplexValue>,
    b: Vec<ComplexValue>,
    z: ComplexValue,
    q: ComplexValue,
    f: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIdentity {
    onepsi1: Option<RawOnePsi1>,
    rrgen: Option<Vec<RawRrgen>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    bae: Option<f64>,
    hq: Option<f64>,
    q2: Option<f64>,
    bae2: Option<f64>,
    rr: Option<f64>,
    onepsi1: Option<f64>,
    rrgen: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    params: Option<RawParams>,
    grid: Option<RawGrid>,
    solver: Option<RawSolver>,
    probes: Option<RawProbes>,
    output: Option<RawOutput>,
    identity: Option<RawIdentity>,
    truncation: Option<usize>,
    bilateral_k: Option<usize>,
    tolerance: Option<f64>,
    tolerances: Option<RawTolerances>,
    checks: Option<Vec<String>>,
    workers: Option<usize>,
    max_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Bae,
    Hq,
    Q2,
    Bae2,
    Rr,
    Onepsi1,
    Rrgen,
}

impl Check {
    pub const ALL: [Check; 7] = [Check::Bae, Check::Hq, Check::Q2, Check::Bae2, Check::Rr, Check::Onepsi1, Check::Rrgen];

    pub fn name(self) -> &'static str {
        match self {
            Check::Bae => "bae",
            Check::Hq => "hq",
            Check::Q2 => "q2",
            Check::Bae2 => "bae2",
            Check::Rr => "rr",
            Check::Onepsi1 => "onepsi1",
            Check::Rrgen => "rrgen",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        Check::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| ConfigError(format!("checks: unknown check '{}'", s.trim())))
    }
}

/// Parses a comma-separated check list as given on the command line.
pub fn parse_check_list(s: &str) -> Result<Vec<Check>, ConfigError> {
    let mut out: Vec<Check> = s.split(',').filter(|p| !p.trim().is_empty()).map(Check::parse).collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return err("--check: empty check list");
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnePsi1Case {
    pub a: Z,
    pub b: Z,
    pub z: Z,
    pub q: Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RrgenCase {
    pub a: Vec<Z>,
    pub b: Vec<Z>,
    pub z: Z,
    pub q: Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Grid points in Cartesian order: q, xi, omega, N, S with S varying fastest.
    pub points: Vec<ModelParams<f64>>,
    pub seeds: Vec<Vec<Z>>,
    pub solver: SolverConfig,
    pub truncation: usize,
    pub bilateral_k: usize,
    pub tolerance: f64,
    /// Per-check pass thresholds, indexed like [`Check::ALL`].
    pub tolerances: [f64; 7],
    pub probe_count: usize,
    pub probe_seed: u64,
    pub checks: Vec<Check>,
    pub workers: Option<usize>,
    pub report: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub onepsi1: Vec<OnePsi1Case>,
    pub rrgen: Vec<RrgenCase>,
}

impl RunConfig {
    pub fn tolerance_for(&self, check: Check) -> f64 {
        self.tolerances[check as usize]
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string().trim().to_string()))?;
        let max_points = raw.max_points.unwrap_or(DEFAULT_MAX_POINTS);
        let points = expand_grid(raw.params, raw.grid.unwrap_or_default(), max_points)?;

        let solver_raw = raw.solver.unwrap_or_default();
        let defaults = SolverConfig::default();
        let solver = SolverConfig {
            max_iter: solver_raw.max_iter.unwrap_or(defaults.max_iter),
            multistart: solver_raw.multistart.unwrap_or(defaults.multistart),
            rng_seed: solver_raw.rng_seed.unwrap_or(defaults.rng_seed),
            tolerance: defaults.tolerance,
        };
        if solver.max_iter == 0 {
            return err("solver.max_iter: must be positive");
        }
        let seeds = solver_raw
            .seeds
            .unwrap_or_default()
            .into_iter()
            .map(|v| v.into_iter().map(ComplexValue::get).collect())
            .collect();

        let truncation = raw.truncation.unwrap_or(DEFAULT_TRUNCATION);
        if !(4..=1024).contains(&truncation) {
            return err("truncation: must lie in 4..=1024");
        }
        let bilateral_k = raw.bilateral_k.unwrap_or(DEFAULT_BILATERAL_K);
        if !(5..=100_000).contains(&bilateral_k) {
            return err("bilateral_k: must lie in 5..=100000");
        }
        let tolerance = raw.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return err("tolerance: must lie in (0, 1)");
        }
        let t = raw.tolerances.unwrap_or_default();
        let mut tolerances = [tolerance; 7];
        tolerances[Check::Bae2 as usize] = DEFAULT_BAE2_TOLERANCE.max(tolerance);
        for (check, value) in Check::ALL.iter().zip([t.bae, t.hq, t.q2, t.bae2, t.rr, t.onepsi1, t.rrgen]) {
            if let Some(v) = value {
                if !(v > 0.0 && v < 1.0) {
                    return err(format!("tolerances.{}: must lie in (0, 1)", check.name()));
                }
                tolerances[*check as usize] = v;
            }
        }
        let probes = raw.probes.unwrap_or_default();
        let probe_count = probes.count.unwrap_or(DEFAULT_PROBES);
        if probe_count == 0 || probe_count > 10_000 {
            return err("probes.count: must lie in 1..=10000");
        }
        let checks = match raw.checks {
            Some(list) => {
                let mut c: Vec<Check> = list.iter().map(|s| Check::parse(s)).collect::<Result<_, _>>()?;
                c.sort();
                c.dedup();
                c
            }
            None => Check::ALL.to_vec(),
        };
        if raw.workers == Some(0) {
            return err("workers: must be positive");
        }
        let output = raw.output.unwrap_or_default();
        let identity = raw.identity.unwrap_or_default();
        let onepsi1 = match identity.onepsi1 {
            Some(g) => expand_onepsi1(g, max_points)?,
            None => Vec::new(),
        };
        let rrgen = identity
            .rrgen
            .unwrap_or_default()
            .into_iter()
            .enumerate()
            .map(|(i, r)| rrgen_case(i, r))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            points,
            seeds,
            solver,
            truncation,
            bilateral_k,
            tolerance,
            tolerances,
            probe_count,
            probe_seed: probes.seed.unwrap_or(DEFAULT_PROBE_SEED),
            checks,
            workers: raw.workers,
            report: output.report,
            summary: output.summary,
            onepsi1,
            rrgen,
        })
    }
}

fn expand_grid(params: Option<RawParams>, grid: RawGrid, max_points: usize) -> Result<Vec<ModelParams<f64>>, ConfigError> {
    let base = match params {
        Some(p) => p,
        None => {
            if grid.q.is_some() || grid.xi.is_some() || grid.omega.is_some() || grid.n.is_some() || grid.s.is_some() {
                return err("params: a [grid] needs a [params] table");
            }
            return Ok(Vec::new());
        }
    };
    let pick = |single: Option<ComplexValue>, list: Option<Vec<ComplexValue>>, name: &str| -> Result<Vec<Z>, ConfigError> {
        match (list, single) {
            (Some(l), _) if l.is_empty() => err(format!("grid.{name}: empty list")),
            (Some(l), _) => Ok(l.into_iter().map(ComplexValue::get).collect()),
            (None, Some(v)) => Ok(vec![v.get()]),
            (None, None) => err(format!("params.{name}: missing")),
        }
    };
    let pick_int = |single: Option<usize>, list: Option<Vec<usize>>, name: &str| -> Result<Vec<usize>, ConfigError> {
        match (list, single) {
            (Some(l), _) if l.is_empty() => err(format!("grid.{name}: empty list")),
            (Some(l), _) => Ok(l),
            (None, Some(v)) => Ok(vec![v]),
            (None, None) => err(format!("params.{name}: missing")),
        }
    };
    let qs = pick(base.q, grid.q, "q")?;
    let xis = pick(base.xi, grid.xi, "xi")?;
    let omegas = pick(base.omega, grid.omega, "omega")?;
    let ns = pick_int(base.n, grid.n, "n")?;
    let ss = pick_int(base.s, grid.s, "s")?;
    let total = qs.len() * xis.len() * omegas.len() * ns.len() * ss.len();
    if total > max_points {
        return err(format!("grid: {total} points exceed the cap of {max_points}"));
    }
    let mut out = Vec::with_capacity(total);
    for q in &qs {
        for xi in &xis {
            for omega in &omegas {
                for n in &ns {
                    for s in &ss {
                        let p = ModelParams::new(*q, *xi, *omega, *n, *s).map_err(|e| match e {
                            crate::error::Error::InvalidParams { field, reason } => {
                                ConfigError(format!("params.{field}: {reason}"))
                            }
                            other => ConfigError(other.to_string()),
                        })?;
                        out.push(p);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn expand_onepsi1(g: RawOnePsi1, max_points: usize) -> Result<Vec<OnePsi1Case>, ConfigError> {
    for (name, l) in [("a", &g.a), ("b", &g.b), ("z", &g.z), ("q", &g.q)] {
        if l.is_empty() {
            return err(format!("identity.onepsi1.{name}: empty list"));
        }
    }
    let total = g.a.len() * g.b.len() * g.z.len() * g.q.len();
    if total > max_points {
        return err(format!("identity.onepsi1: {total} points exceed the cap of {max_points}"));
    }
    let mut out = Vec::with_capacity(total);
    for a in &g.a {
        for b in &g.b {
            for z in &g.z {
                for q in &g.q {
                    let q = q.get();
                    if !(q.norm() > 0.0 && q.norm() < 1.0) {
                        return err("identity.onepsi1.q: need 0 < |q| < 1");
                    }
                    let a = a.get();
                    if a.norm() == 0.0 {
                        return err("identity.onepsi1.a: must be nonzero");
                    }
                    out.push(OnePsi1Case { a, b: b.get(), z: z.get(), q });
                }
            }
        }
    }
    Ok(out)
}

fn rrgen_case(i: usize, r: RawRrgen) -> Result<RrgenCase, ConfigError> {
    let field = |f: &str| format!("identity.rrgen[{i}].{f}");
    if r.a.is_empty() || r.a.len() != r.b.len() {
        return err(format!("{}: a and b must be non-empty lists of equal length", field("a")));
    }
    match r.f.as_deref() {
        None | Some("unit") => {}
        Some(other) => {
            return err(format!(
                "{}: '{other}' is not available standalone; only \"unit\" (the Bethe weight runs under verify)",
                field("f")
            ))
        }
    }
    let q = r.q.get();
    if !(q.norm() > 0.0 && q.norm() < 1.0) {
        return err(format!("{}: need 0 < |q| < 1", field("q")));
    }
    let a: Vec<Z> = r.a.into_iter().map(ComplexValue::get).collect();
    let b: Vec<Z> = r.b.into_iter().map(ComplexValue::get).collect();
    if a.iter().chain(&b).any(|v| v.norm() == 0.0) {
        return err(format!("{}: entries must be nonzero", field("a")));
    }
    Ok(RrgenCase { a, b, z: r.z.get(), q })
}
