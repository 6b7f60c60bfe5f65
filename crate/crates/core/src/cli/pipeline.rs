//! Per-point pipelines: roots, `t`, `H`/`H'`, `Theta`, zeros, then the requested checks.
//! A failure at one stage marks the checks that need it as errors and leaves the
//! rest of the grid untouched.

use rayon::prelude::*;
use serde_json::json;

use super::config::{Check, OnePsi1Case, RrgenCase, RunConfig};
use super::report::{
    pair, CheckOut, IdentityRecord, ParamsOut, PointRecord, Report, Settings, StateOut, ThetaOut,
};
use crate::bethe::{bae_relative_residual, solve_bae_with, BetheState};
use crate::error::{Error, Result};
use crate::hfun::{compute_hpair, HPair};
use crate::identities::{
    bae2_check, hq_wronskian_check, onepsi1_check, reconstruct_q, rr_check, rr_lhs, rrgen_check,
    sample_probes, IdentityReport, Probe, RrgenParams, Weight,
};
use crate::params::ModelParams;
use crate::scalar::{one, rel_diff, C};
use crate::wronskian::{compute_theta, extract_zeros, quasi_periodicity_residual, ThetaData};

type Z = C<f64>;

pub fn settings(cfg: &RunConfig, checks: &[Check]) -> Settings {
    Settings {
        truncation: cfg.truncation,
        bilateral_k: cfg.bilateral_k,
        tolerance: cfg.tolerance,
        tolerances: checks.iter().map(|c| (c.name().to_string(), json!(cfg.tolerance_for(*c)))).collect(),
        probes: cfg.probe_count,
        probe_seed: cfg.probe_seed,
        checks: checks.iter().map(|c| c.name().to_string()).collect(),
    }
}

fn in_pool<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match workers {
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

/// `solve` with `checks = [bae]`, `verify` with the configured list.
pub fn run_points(command: &str, cfg: &RunConfig, checks: &[Check]) -> Report {
    let records: Vec<PointRecord> = in_pool(cfg.workers, || {
        cfg.points.par_iter().enumerate().map(|(i, p)| run_point(i, p, cfg, checks)).collect()
    });
    Report::new(command, settings(cfg, checks), records, Vec::new())
}

pub fn run_identities(cfg: &RunConfig) -> Report {
    let (onepsi, rrgen): (Vec<IdentityRecord>, Vec<IdentityRecord>) = in_pool(cfg.workers, || {
        let a = cfg.onepsi1.par_iter().enumerate().map(|(i, c)| onepsi1_record(i, c, cfg)).collect();
        let b = cfg
            .rrgen
            .par_iter()
            .enumerate()
            .map(|(i, c)| rrgen_record(cfg.onepsi1.len() + i, c, cfg))
            .collect();
        (a, b)
    });
    let mut records = onepsi;
    records.extend(rrgen);
    let checks = [Check::Onepsi1, Check::Rrgen];
    Report::new("identity", settings(cfg, &checks), Vec::new(), records)
}

/// The Bethe state for a grid point: the closed form for `S = 0`, otherwise the
/// configured seeds of matching length followed by the multistart search.
pub fn solve_point(p: &ModelParams<f64>, cfg: &RunConfig) -> Result<BetheState<f64>> {
    let seeds: Vec<Vec<Z>> = cfg.seeds.iter().filter(|s| s.len() == p.s).cloned().collect();
    solve_bae_with(p, &seeds, &cfg.solver)
}

struct Stages {
    state: Result<BetheState<f64>>,
    pair: Option<Result<HPair<f64>>>,
    theta: Option<Result<ThetaData<f64>>>,
}

fn needs_h(c: Check) -> bool {
    matches!(c, Check::Hq | Check::Q2 | Check::Bae2 | Check::Rr)
}

fn needs_theta(c: Check) -> bool {
    matches!(c, Check::Q2 | Check::Bae2 | Check::Rr)
}

fn run_point(index: usize, p: &ModelParams<f64>, cfg: &RunConfig, checks: &[Check]) -> PointRecord {
    let state = solve_point(p, cfg);
    let hpair = match (&state, checks.iter().any(|c| needs_h(*c))) {
        (Ok(s), true) => Some(compute_hpair(p, &s.t_coeffs, cfg.truncation)),
        _ => None,
    };
    let theta = match (&hpair, checks.iter().any(|c| needs_theta(*c))) {
        (Some(Ok(h)), true) => Some(compute_theta(p, h).and_then(|th| extract_zeros(&th, p))),
        _ => None,
    };
    let stages = Stages { state, pair: hpair, theta };

    let mut record = PointRecord {
        index,
        params: ParamsOut::from(p),
        state: stages.state.as_ref().ok().map(|s| StateOut {
            roots: s.roots.iter().map(|r| pair(*r)).collect(),
            kappa: pair(s.kappa),
            t_coeffs: s.t_coeffs.iter().map(|c| pair(*c)).collect(),
            bae_residual: if s.roots.is_empty() { 0.0 } else { bae_relative_residual(p, &s.roots) },
        }),
        theta: None,
        checks: Vec::new(),
    };
    if let Some(Ok(th)) = &stages.theta {
        record.theta = Some(ThetaOut {
            zeros: th.zeros.iter().map(|z| pair(*z)).collect(),
            orbit_shifts: th.orbit_shifts.clone(),
            theta0: pair(th.theta0),
            zero_product_times_omega: pair(th.zeros.iter().fold(p.omega, |acc, z| acc * *z)),
            quasi_periodicity_residual: quasi_periodicity_residual(&th.theta, p),
        });
    }

    let probes = stages.state.as_ref().ok().map(|s| {
        let mut avoid: Vec<Z> = s.roots.clone();
        avoid.push(p.xi);
        if p.xi.norm() > 0.0 {
            avoid.push(one::<f64>() / p.xi);
        }
        if let Some(Ok(th)) = &stages.theta {
            avoid.extend(th.zeros.iter().copied());
        }
        sample_probes(cfg.probe_count, cfg.probe_seed, p.q, &avoid)
    });

    for &check in checks {
        let tol = cfg.tolerance_for(check);
        let out = match run_check(check, p, &stages, probes.as_deref().unwrap_or(&[]), cfg) {
            Ok(Outcome::Report(r)) => CheckOut::from_report(&r),
            Ok(Outcome::Skipped(reason)) => CheckOut::skipped(check.name(), tol, reason),
            Err(e) => CheckOut::from_error(check.name(), tol, &e),
        };
        record.checks.push(out);
    }
    record
}

enum Outcome {
    Report(IdentityReport<f64>),
    Skipped(String),
}

fn stage<'a, T>(s: &'a Option<Result<T>>) -> Result<&'a T> {
    match s {
        Some(Ok(v)) => Ok(v),
        Some(Err(e)) => Err(e.clone()),
        None => Err(Error::Shape("pipeline stage was not run".into())),
    }
}

fn run_check(check: Check, p: &ModelParams<f64>, st: &Stages, probes: &[Z], cfg: &RunConfig) -> Result<Outcome> {
    let state = st.state.as_ref().map_err(|e| e.clone())?;
    let tol = cfg.tolerance_for(check);
    let k = cfg.bilateral_k;
    let report = match check {
        Check::Bae => bae_report(state, tol)?,
        Check::Hq => {
            let pair = stage(&st.pair)?;
            let mut r = hq_wronskian_check(state, pair, tol)?;
            let (h1, h2) = pair.substitution_residuals()?;
            r.note("h_substitution", crate::identities::ContextValue::Real(h1));
            r.note("hprime_substitution", crate::identities::ContextValue::Real(h2));
            r
        }
        Check::Q2 => reconstruct_q(state, stage(&st.pair)?, stage(&st.theta)?, probes, tol)?,
        Check::Bae2 => bae2_check(state, stage(&st.pair)?, stage(&st.theta)?, tol)?,
        Check::Rr => rr_check(state, stage(&st.theta)?, probes, k, tol)?,
        Check::Rrgen => {
            if !(p.twist().norm() < 1.0) {
                return Ok(Outcome::Skipped("|omega q^S xi^N| >= 1: the bilateral sum diverges".into()));
            }
            rrgen_check(&RrgenParams::from_model(p), Weight::Bethe(state), probes, k, tol)?
        }
        Check::Onepsi1 => {
            if p.n != 1 || p.s != 0 {
                return Ok(Outcome::Skipped("the sum reduces to 1psi1 only for N = 1, S = 0".into()));
            }
            let c = p.twist();
            if !(p.xi.norm() * p.xi.norm() < c.norm() && c.norm() < 1.0) {
                return Ok(Outcome::Skipped("|xi^2| < |omega xi| < 1 fails: outside the 1psi1 region".into()));
            }
            onepsi1_reduction(state, probes, k, tol)?
        }
    };
    Ok(Outcome::Report(report))
}

fn bae_report(state: &BetheState<f64>, tol: f64) -> Result<IdentityReport<f64>> {
    let mut r = IdentityReport::new("bae", tol);
    let p = &state.params;
    if !state.roots.is_empty() {
        r.push(Probe::Zero(0), bae_relative_residual(p, &state.roots));
    }
    for (power, res) in state.tq_residual()?.relative_residuals() {
        r.push(Probe::Coefficient { line: 0, power }, res);
    }
    Ok(r.finish())
}

/// At `N = 1`, `S = 0` the Bethe-weighted sum is a 1psi1 sum with `a = x/xi`,
/// `b = x xi`, `z = omega xi`: check the product formula and the agreement of
/// both summation pathways.
fn onepsi1_reduction(state: &BetheState<f64>, probes: &[Z], k: usize, tol: f64) -> Result<IdentityReport<f64>> {
    let p = &state.params;
    let g = RrgenParams::from_model(p);
    let mut r = IdentityReport::new("onepsi1", tol);
    for &x in probes {
        // the same arguments the RR pathway forms, so the two sums agree bitwise
        let single = onepsi1_check(x / g.a[0], x / g.b[0], g.z, p.q, k, tol)?;
        r.push(Probe::Check { check: 1, x }, single.max_residual());
        let rr = rr_lhs(state, x, k)?;
        let psi = single.values[0].1;
        r.push(Probe::Check { check: 2, x }, rel_diff(psi, rr.value));
    }
    Ok(r.finish())
}

fn onepsi1_record(index: usize, c: &OnePsi1Case, cfg: &RunConfig) -> IdentityRecord {
    let tol = cfg.tolerance_for(Check::Onepsi1);
    let check = match onepsi1_check(c.a, c.b, c.z, c.q, cfg.bilateral_k, tol) {
        Ok(r) => CheckOut::from_report(&r),
        Err(e) => CheckOut::from_error("onepsi1", tol, &e),
    };
    IdentityRecord {
        index,
        identity: "onepsi1".into(),
        inputs: json!({ "a": pair(c.a), "b": pair(c.b), "z": pair(c.z), "q": pair(c.q) }),
        check,
    }
}

fn rrgen_record(index: usize, c: &RrgenCase, cfg: &RunConfig) -> IdentityRecord {
    let g = RrgenParams { a: c.a.clone(), b: c.b.clone(), z: c.z, q: c.q };
    let avoid: Vec<Z> = c.a.iter().chain(&c.b).copied().collect();
    let probes = sample_probes(cfg.probe_count, cfg.probe_seed, c.q, &avoid);
    let tol = cfg.tolerance_for(Check::Rrgen);
    let check = match rrgen_check(&g, Weight::Unit, &probes, cfg.bilateral_k, tol) {
        Ok(r) => CheckOut::from_report(&r),
        Err(e) => CheckOut::from_error("rrgen", tol, &e),
    };
    IdentityRecord {
        index,
        identity: "rrgen".into(),
        inputs: json!({
            "a": c.a.iter().map(|v| pair(*v)).collect::<Vec<_>>(),
            "b": c.b.iter().map(|v| pair(*v)).collect::<Vec<_>>(),
            "z": pair(c.z),
            "q": pair(c.q),
            "f": "unit",
        }),
        check,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Series {
    #[value(name = "H")]
    H,
    #[value(name = "Hprime")]
    Hprime,
    #[value(name = "Theta")]
    Theta,
    #[value(name = "Q")]
    Q,
    #[value(name = "t")]
    T,
}

/// Coefficient rows `(power, value, trusted)` of the chosen object at one point.
pub fn series_rows(which: Series, p: &ModelParams<f64>, cfg: &RunConfig) -> Result<Vec<(i64, Z, bool)>> {
    let state = solve_point(p, cfg)?;
    let exact = |c: &[Z], sign: i64| c.iter().enumerate().map(|(k, v)| (sign * k as i64, *v, true)).collect();
    Ok(match which {
        Series::Q => exact(&state.q_coeffs, 1),
        Series::T => exact(&state.t_coeffs, 1),
        Series::H | Series::Hprime => {
            let pair = compute_hpair(p, &state.t_coeffs, cfg.truncation)?;
            let (coeffs, series, sign) = match which {
                Series::H => (&pair.h, pair.h_series(), 1),
                _ => (&pair.hp, pair.hp_series(), -1),
            };
            coeffs
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let power = sign * k as i64;
                    (power, *v, series.is_trusted(power))
                })
                .collect()
        }
        Series::Theta => {
            let pair = compute_hpair(p, &state.t_coeffs, cfg.truncation)?;
            let th = compute_theta(p, &pair)?;
            let m = cfg.truncation as i64;
            (-m..=m).map(|k| (k, th.coeff(k), th.is_trusted(k))).collect()
        }
    })
}
