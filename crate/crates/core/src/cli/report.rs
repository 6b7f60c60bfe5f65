//! JSON report records, the plain-text summary and coefficient tables.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::identities::{ContextValue, IdentityReport, Probe};
use crate::params::ModelParams;
use crate::scalar::C;

type Z = C<f64>;

pub fn pair(z: Z) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorOut {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ErrorOut {
    fn from(e: &Error) -> Self {
        let debug = format!("{e:?}");
        let kind = debug.split(|c: char| c == ' ' || c == '(' || c == '{').next().unwrap_or("").to_string();
        Self { kind, message: e.to_string() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsOut {
    pub q: [f64; 2],
    pub xi: [f64; 2],
    pub omega: [f64; 2],
    pub n: usize,
    pub s: usize,
}

impl From<&ModelParams<f64>> for ParamsOut {
    fn from(p: &ModelParams<f64>) -> Self {
        Self { q: pair(p.q), xi: pair(p.xi), omega: pair(p.omega), n: p.n, s: p.s }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StateOut {
    pub roots: Vec<[f64; 2]>,
    pub kappa: [f64; 2],
    pub t_coeffs: Vec<[f64; 2]>,
    pub bae_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaOut {
    pub zeros: Vec<[f64; 2]>,
    pub orbit_shifts: Vec<i64>,
    pub theta0: [f64; 2],
    pub zero_product_times_omega: [f64; 2],
    pub quasi_periodicity_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualOut {
    pub probe: Value,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOut {
    pub name: String,
    pub status: Status,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub residuals: Vec<ResidualOut>,
    #[serde(skip_serializing_if = "Map::is_empty")]
    pub context: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl CheckOut {
    pub fn from_report(r: &IdentityReport<f64>) -> Self {
        let mut context = Map::new();
        for (k, v) in &r.context {
            context.insert(k.clone(), context_json(v));
        }
        Self {
            name: r.name.clone(),
            status: if r.passed { Status::Pass } else { Status::Fail },
            tolerance: r.tolerance,
            max_residual: Some(r.max_residual()),
            residuals: r.residuals.iter().map(|(p, v)| ResidualOut { probe: probe_json(p), residual: *v }).collect(),
            context,
            error: None,
            reason: None,
        }
    }

    pub fn from_error(name: &str, tolerance: f64, e: &Error) -> Self {
        Self {
            name: name.into(),
            status: Status::Error,
            tolerance,
            max_residual: None,
            residuals: Vec::new(),
            context: Map::new(),
            error: Some(e.into()),
            reason: None,
        }
    }

    pub fn skipped(name: &str, tolerance: f64, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::Skipped,
            tolerance,
            max_residual: None,
            residuals: Vec::new(),
            context: Map::new(),
            error: None,
            reason: Some(reason.into()),
        }
    }
}

fn probe_json(p: &Probe<f64>) -> Value {
    match p {
        Probe::Point(x) => json!({ "point": pair(*x) }),
        Probe::Coefficient { line, power } => json!({ "line": line, "power": power }),
        Probe::Zero(k) => json!({ "zero": k }),
        Probe::Pair(i, j) => json!({ "zeros": [i, j] }),
        Probe::Check { check, x } => json!({ "check": check, "point": pair(*x) }),
    }
}

fn context_json(v: &ContextValue<f64>) -> Value {
    match v {
        ContextValue::Complex(z) => json!(pair(*z)),
        ContextValue::Real(r) => json!(r),
        ContextValue::Integer(i) => json!(i),
        ContextValue::Text(s) => json!(s),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub params: ParamsOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaOut>,
    pub checks: Vec<CheckOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityRecord {
    pub index: usize,
    pub identity: String,
    pub inputs: Value,
    pub check: CheckOut,
}

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub truncation: usize,
    pub bilateral_k: usize,
    pub tolerance: f64,
    pub tolerances: Map<String, Value>,
    pub probes: usize,
    pub probe_seed: u64,
    pub checks: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub records: usize,
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub skipped: usize,
    pub exit_code: i32,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub settings: Settings,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub identities: Vec<IdentityRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, settings: Settings, points: Vec<PointRecord>, identities: Vec<IdentityRecord>) -> Self {
        let mut r = Self { command: command.into(), settings, points, identities, summary: Summary::default() };
        r.summary = r.tally();
        r
    }

    fn all_checks(&self) -> impl Iterator<Item = &CheckOut> {
        self.points.iter().flat_map(|p| p.checks.iter()).chain(self.identities.iter().map(|r| &r.check))
    }

    fn tally(&self) -> Summary {
        let mut s = Summary { records: self.points.len() + self.identities.len(), ..Default::default() };
        for c in self.all_checks() {
            s.checks += 1;
            match c.status {
                Status::Pass => s.passed += 1,
                Status::Fail => s.failed += 1,
                Status::Error => s.errors += 1,
                Status::Skipped => s.skipped += 1,
            }
        }
        // a failed identity outranks a numerical breakdown elsewhere in the grid
        s.exit_code = if s.failed > 0 {
            1
        } else if s.errors > 0 {
            3
        } else {
            0
        };
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary_text(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}: {} records, {} checks: {} passed, {} failed, {} errors, {} skipped",
            self.command, s.records, s.checks, s.passed, s.failed, s.errors, s.skipped
        );
        if !self.points.is_empty() {
            let _ = writeln!(
                out,
                "{:>5}  {:<22} {:<22} {:<22} {:>2} {:>2}  {:<8} {:<8} {:>12}",
                "index", "q", "xi", "omega", "N", "S", "check", "status", "max_resid"
            );
        }
        for p in &self.points {
            for c in &p.checks {
                let _ = writeln!(
                    out,
                    "{:>5}  {:<22} {:<22} {:<22} {:>2} {:>2}  {:<8} {:<8} {:>12}",
                    p.index,
                    fmt_pair(p.params.q),
                    fmt_pair(p.params.xi),
                    fmt_pair(p.params.omega),
                    p.params.n,
                    p.params.s,
                    c.name,
                    status_word(c),
                    fmt_resid(c.max_residual),
                );
            }
        }
        if !self.identities.is_empty() {
            let _ = writeln!(out, "{:>5}  {:<8} {:<8} {:>12}", "index", "identity", "status", "max_resid");
        }
        for r in &self.identities {
            let _ = writeln!(
                out,
                "{:>5}  {:<8} {:<8} {:>12}",
                r.index,
                r.identity,
                status_word(&r.check),
                fmt_resid(r.check.max_residual)
            );
        }
        out
    }
}

fn status_word(c: &CheckOut) -> &'static str {
    match c.status {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Error => "ERROR",
        Status::Skipped => "skipped",
    }
}

fn fmt_pair(z: [f64; 2]) -> String {
    if z[1] == 0.0 {
        format!("{}", z[0])
    } else {
        format!("{}{:+}i", z[0], z[1])
    }
}

fn fmt_resid(r: Option<f64>) -> String {
    r.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into())
}

/// Rows `power,re,im,trusted` with a header line.
pub fn coefficient_table(rows: &[(i64, Z, bool)]) -> String {
    let mut out = String::from("power,re,im,trusted\n");
    for (p, c, t) in rows {
        let _ = writeln!(out, "{p},{},{},{t}", c.re, c.im);
    }
    out
}
