//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use baxter_tq::bethe::{enumerate_states, solve_bae, vacuum_state, BetheState};
use baxter_tq::hfun::{compute_hpair, matrix_product_oracle, Direction, HPair};
use baxter_tq::identities::*;
use baxter_tq::params::ModelParams;
use baxter_tq::scalar::{rel_diff, C};
use baxter_tq::wronskian::{compute_theta, extract_zeros, quasi_periodicity_residual, ThetaData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Z = C<f64>;
type Outcome = Result<String, String>;

const M: usize = 64;
const K_MAX: usize = 320;

fn z(re: f64, im: f64) -> Z {
    Z::new(re, im)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(q: Z, xi: Z, omega: Z, n: usize, s: usize) -> ModelParams<f64> {
    ModelParams::new(q, xi, omega, n, s).unwrap()
}

struct Pipeline {
    state: BetheState<f64>,
    pair: HPair<f64>,
    theta: ThetaData<f64>,
    probes: Vec<Z>,
}

fn pipeline(state: BetheState<f64>) -> Result<Pipeline, String> {
    let p = state.params;
    let pair = compute_hpair(&p, &state.t_coeffs, M).map_err(|e| format!("H series: {e}"))?;
    let series = compute_theta(&p, &pair).map_err(|e| format!("theta: {e}"))?;
    let theta = extract_zeros(&series, &p).map_err(|e| format!("zeros: {e}"))?;
    let mut avoid = state.roots.clone();
    avoid.extend([p.xi, Z::new(1.0, 0.0) / p.xi]);
    avoid.extend(theta.zeros.iter().copied());
    let probes = sample_probes(10, 1, p.q, &avoid);
    Ok(Pipeline { state, pair, theta, probes })
}

fn describe(p: &ModelParams<f64>) -> String {
    format!("q={} xi={} omega={} N={} S={}", p.q, p.xi, p.omega, p.n, p.s)
}

/// 1psi1 on a fixed grid inside |q| <= 0.6, |b/a| < |z| < 1.
fn criterion_1() -> Outcome {
    let qs = [z(0.3, 0.0), z(0.5, 0.0), z(0.6, 0.0), z(0.3, 0.4), z(-0.45, 0.2)];
    let abz = [
        (z(0.9, 0.0), z(0.2, 0.0), z(0.5, 0.0)),
        (z(1.5, 0.5), z(0.3, -0.1), z(0.4, 0.3)),
        (z(-0.7, 0.2), z(0.15, 0.05), z(0.6, -0.2)),
        (z(2.5, 0.0), z(0.8, 0.4), z(-0.5, 0.1)),
    ];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for q in qs {
        for (a, b, zz) in abz {
            let r = onepsi1_check(a, b, zz, q, 160, 1e-8).map_err(|e| format!("a={a} b={b} z={zz} q={q}: {e}"))?;
            ensure(r.passed, || format!("a={a} b={b} z={zz} q={q}: residual {:.2e}", r.max_residual()))?;
            worst = worst.max(r.max_residual());
            count += 1;
        }
    }
    Ok(format!("{count} points, max residual {worst:.2e}"))
}

/// The S = 0 transfer polynomial and the vacuum pipeline.
fn criterion_2() -> Outcome {
    let base = [(z(0.5, 0.0), z(0.3, 0.0), z(0.7, 0.0))];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut random = Vec::new();
    for _ in 0..10 {
        let (rq, rx, lw): (f64, f64, f64) = (rng.gen_range(0.1..0.7), rng.gen_range(0.05..0.7), rng.gen_range(-1.0..1.0));
        let (aq, ax, aw): (f64, f64, f64) = (rng.gen_range(-3.1..3.1), rng.gen_range(-3.1..3.1), rng.gen_range(-3.1..3.1));
        random.push((Z::from_polar(rq, aq), Z::from_polar(rx, ax), Z::from_polar(10f64.powf(lw), aw)));
    }
    let mut worst_t: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for (q, xi, omega) in base.iter().chain(&random) {
        for n in 1..=3 {
            let p = params(*q, *xi, *omega, n, 0);
            let st = vacuum_state(&p).map_err(|e| format!("{}: {e}", describe(&p)))?;
            // (1 - xi x)^N + omega (xi - x)^N, coefficient by coefficient
            for k in 0..=n {
                let binom = (0..k).fold(1.0, |b, i| b * (n - i) as f64 / (i + 1) as f64);
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let want = (xi.powu(k as u32) + *omega * xi.powu((n - k) as u32)) * (sign * binom);
                worst_t = worst_t.max(rel_diff(st.t_coeffs[k], want));
            }
            let pl = pipeline(st).map_err(|e| format!("{}: {e}", describe(&p)))?;
            let (r1, r2) = pl.pair.substitution_residuals().map_err(|e| e.to_string())?;
            let series = compute_theta(&p, &pl.pair).map_err(|e| e.to_string())?;
            let quasi = quasi_periodicity_residual(&series, &p);
            let prod = pl.theta.zeros.iter().fold(p.omega, |acc, z| acc * *z);
            let dev = (prod - 1.0).norm();
            ensure(pl.theta.zeros.len() == n, || format!("{}: {} zeros", describe(&p), pl.theta.zeros.len()))?;
            for v in [r1, r2, quasi, dev] {
                ensure(v < 1e-8, || format!("{}: residual {v:.2e}", describe(&p)))?;
                worst = worst.max(v);
            }
        }
    }
    ensure(worst_t < 1e-15, || format!("t coefficients off by {worst_t:.2e}"))?;
    Ok(format!("33 points, t deviation {worst_t:.1e}, pipeline max {worst:.2e}"))
}

/// Closed-form roots at N = S = 1 and N = 2, S = 1.
fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    let (q, xi) = (z(0.5, 0.0), z(0.3, 0.0));
    for omega in [z(0.7, 0.0), z(2.0, 0.5), z(0.3, -0.2)] {
        let p = params(q, xi, omega, 1, 1);
        let want = (omega * xi - 1.0) / (omega - xi);
        let st = solve_bae(&p, &[vec![want * 1.05]]).map_err(|e| format!("{}: {e}", describe(&p)))?;
        let d = rel_diff(st.roots[0], want);
        ensure(d < 1e-10, || format!("{}: root off by {d:.2e}", describe(&p)))?;
        worst = worst.max(d);
    }
    for omega in [z(0.49, 0.0), z(1.7, 0.3)] {
        let p = params(q, xi, omega, 2, 1);
        let r = omega.sqrt();
        for sign in [1.0, -1.0] {
            let want = (1.0 - r * xi * sign) / (xi - r * sign);
            let st = solve_bae(&p, &[vec![want * 1.05]]).map_err(|e| format!("{}: {e}", describe(&p)))?;
            let d = rel_diff(st.roots[0], want);
            ensure(d < 1e-10, || format!("{} branch {sign}: root off by {d:.2e}", describe(&p)))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("7 roots, max deviation {worst:.2e}"))
}

fn chain_points() -> Vec<(Z, Z, Z)> {
    vec![
        (z(0.5, 0.0), z(0.3, 0.0), z(0.7, 0.0)),
        (z(0.5, 0.0), z(0.3, 0.0), z(0.49, 0.0)),
        (z(0.4, 0.0), z(0.5, 0.0), z(1.5, 0.0)),
        (z(0.3, 0.2), z(0.4, -0.1), z(0.8, 0.3)),
        (z(0.6, 0.0), z(0.2, 0.0), z(2.5, 0.0)),
        (z(-0.4, 0.1), z(0.35, 0.2), z(0.6, -0.4)),
        (z(0.25, 0.0), z(0.6, 0.0), z(0.9, 0.0)),
        (z(0.5, -0.3), z(0.1, 0.1), z(1.2, 0.9)),
        (z(0.2, 0.0), z(-0.45, 0.0), z(0.9, 0.0)),
        (z(0.65, 0.0), z(0.3, 0.3), z(0.6, 0.1)),
    ]
}

/// Every enumerated state with N <= 3, S <= 2 passes hq, q2, bae2 and rr.
fn criterion_4() -> Outcome {
    let mut states = 0;
    let mut worst = [0.0f64; 4];
    for (q, xi, omega) in chain_points() {
        for n in 1..=3 {
            for s in 0..=2 {
                let p = params(q, xi, omega, n, s);
                for st in enumerate_states(&p, 40, 9) {
                    let label = format!("{} roots {:?}", describe(&p), st.roots);
                    let pl = pipeline(st).map_err(|e| format!("{label}: {e}"))?;
                    let reports = [
                        hq_wronskian_check(&pl.state, &pl.pair, 1e-8),
                        reconstruct_q(&pl.state, &pl.pair, &pl.theta, &pl.probes, 1e-8),
                        bae2_check(&pl.state, &pl.pair, &pl.theta, 1e-7),
                        rr_check(&pl.state, &pl.theta, &pl.probes, K_MAX, 1e-7),
                    ];
                    for (i, r) in reports.into_iter().enumerate() {
                        let r = r.map_err(|e| format!("{label}: check {i}: {e}"))?;
                        ensure(r.passed, || format!("{label}: {} residual {:.2e}", r.name, r.max_residual()))?;
                        worst[i] = worst[i].max(r.max_residual());
                    }
                    states += 1;
                }
            }
        }
    }
    ensure(states > 0, || "no converged states".into())?;
    Ok(format!(
        "{states} states, max hq {:.1e} q2 {:.1e} bae2 {:.1e} rr {:.1e}",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

fn anchor_states() -> Result<Vec<BetheState<f64>>, String> {
    let (q, xi) = (z(0.5, 0.0), z(0.3, 0.0));
    let mut out = Vec::new();
    for n in 1..=3 {
        out.push(vacuum_state(&params(q, xi, z(0.7, 0.0), n, 0)).map_err(|e| e.to_string())?);
    }
    let omega = z(0.7, 0.0);
    let want = (omega * xi - 1.0) / (omega - xi);
    out.push(solve_bae(&params(q, xi, omega, 1, 1), &[vec![want]]).map_err(|e| e.to_string())?);
    for sign in [1.0, -1.0] {
        let seed = (1.0 - 0.7 * 0.3 * sign) / (0.3 - 0.7 * sign);
        out.push(solve_bae(&params(q, xi, z(0.49, 0.0), 2, 1), &[vec![z(seed, 0.0)]]).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

/// Matrix-product oracle against the H and H' series.
fn criterion_5() -> Outcome {
    let mut worst_h: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    let mut sets = 0;
    for st in anchor_states()? {
        let p = st.params;
        let pair = compute_hpair(&p, &st.t_coeffs, M).map_err(|e| e.to_string())?;
        for x0 in sample_probes(10, 5, p.q, &[]) {
            for dir in [Direction::Forward, Direction::Backward] {
                let o = matrix_product_oracle(&p, &st.t_coeffs, x0, 256, dir)
                    .map_err(|e| format!("{} x0={x0}: {e}", describe(&p)))?;
                let (want_h, want_c) = match dir {
                    Direction::Forward => (pair.h_at(x0 / p.q).unwrap() / pair.h_at(x0).unwrap(), -p.twist()),
                    Direction::Backward => (pair.hp_at(x0 * p.q).unwrap() / pair.hp_at(x0).unwrap(), -p.dual_twist()),
                };
                let dh = rel_diff(o.h_ratio, want_h);
                let dc = (o.twist_ratio - want_c).norm();
                ensure(dh < 1e-8, || format!("{} x0={x0} {dir:?}: H ratio off by {dh:.2e}", describe(&p)))?;
                ensure(dc < 1e-9, || format!("{} x0={x0} {dir:?}: twist ratio off by {dc:.2e}", describe(&p)))?;
                worst_h = worst_h.max(dh);
                worst_c = worst_c.max(dc);
            }
        }
        sets += 1;
    }
    Ok(format!("{sets} sets x 10 points x 2 directions, H {worst_h:.2e}, twist {worst_c:.2e}"))
}

/// Theta quasi-periodicity, product form and zero count on the anchors.
fn criterion_6() -> Outcome {
    let mut worst_q: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    for st in anchor_states()? {
        let p = st.params;
        let pl = pipeline(st)?;
        let series = compute_theta(&p, &pl.pair).map_err(|e| e.to_string())?;
        let quasi = quasi_periodicity_residual(&series, &p);
        ensure(quasi < 1e-8, || format!("{}: quasi-periodicity {quasi:.2e}", describe(&p)))?;
        ensure(pl.theta.zeros.len() == p.n, || format!("{}: {} zeros", describe(&p), pl.theta.zeros.len()))?;
        for x in &pl.probes {
            let direct = series.eval(*x).map_err(|e| e.to_string())?;
            let d = (pl.theta.product_form(*x, p.q) - direct.value).norm() / direct.scale;
            ensure(d < 1e-7, || format!("{} x={x}: product form off by {d:.2e}", describe(&p)))?;
            worst_p = worst_p.max(d);
        }
        worst_q = worst_q.max(quasi);
    }
    Ok(format!("quasi-periodicity {worst_q:.2e}, product form {worst_p:.2e}"))
}

/// RRgen with unit weight for N <= 3, and the bitwise Bethe / RR / 1psi1 match.
fn criterion_7() -> Outcome {
    let q = z(0.5, 0.0);
    let cases = [
        RrgenParams { a: vec![z(0.4, 0.0)], b: vec![z(2.0, 0.0)], z: z(0.3, 0.0), q },
        RrgenParams { a: vec![z(0.4, 0.1), z(0.5, 0.0)], b: vec![z(2.0, 0.0), z(1.5, -0.3)], z: z(0.2, 0.0), q },
        RrgenParams {
            a: vec![z(0.4, 0.0), z(0.5, 0.2), z(0.3, 0.0)],
            b: vec![z(2.0, 0.0), z(1.5, 0.0), z(1.8, 0.4)],
            z: z(0.3, -0.1),
            q: z(0.45, 0.1),
        },
    ];
    let mut worst: f64 = 0.0;
    for g in &cases {
        let mut avoid = g.a.clone();
        avoid.extend(g.b.iter().copied());
        let probes = sample_probes(10, 7, g.q, &avoid);
        let r = rrgen_check(g, Weight::Unit, &probes, K_MAX, 1e-8).map_err(|e| format!("N={}: {e}", g.a.len()))?;
        ensure(r.passed, || format!("N={}: residual {:.2e}", g.a.len(), r.max_residual()))?;
        worst = worst.max(r.max_residual());
    }
    let mut compared = 0;
    for omega in [z(0.7, 0.0), z(1.5, 0.4)] {
        let p = params(z(0.5, 0.0), z(0.3, 0.0), omega, 1, 0);
        let pl = pipeline(vacuum_state(&p).map_err(|e| e.to_string())?)?;
        let g = RrgenParams::from_model(&p);
        let r = rrgen_check(&g, Weight::Bethe(&pl.state), &pl.probes, K_MAX, 1e-8).map_err(|e| e.to_string())?;
        for (probe, psi) in &r.values {
            let Probe::Point(x) = probe else { continue };
            let rr = rr_lhs(&pl.state, *x, K_MAX).map_err(|e| e.to_string())?.value;
            let single = onepsi1_check(*x / g.a[0], *x / g.b[0], g.z, p.q, K_MAX, 1e-8).map_err(|e| e.to_string())?;
            ensure(*psi == rr && *psi == single.values[0].1, || format!("{} x={x}: pathways differ", describe(&p)))?;
            compared += 1;
        }
    }
    Ok(format!("unit weight max {worst:.2e}, {compared} bitwise matches"))
}

/// Two verify runs over the same config give identical reports.
fn criterion_8() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("grid.toml");
    let text = "[params]\nq = 0.5\nxi = 0.3\nomega = 0.7\nn = 1\ns = 0\n\n[grid]\nomega = [0.49, [0.7, 0.2], 1.5]\nn = [1, 2]\ns = [0, 1]\n";
    std::fs::write(&cfg, text).map_err(|e| e.to_string())?;
    let mut bytes = Vec::new();
    for (name, workers) in [("a.json", "1"), ("b.json", "4")] {
        let out = dir.path().join(name);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_baxter-tq"))
            .args(["verify", "--workers", workers, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure(status.code() == Some(0), || format!("verify exited {status}"))?;
        bytes.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure(bytes[0] == bytes[1], || "reports differ".into())?;
    Ok(format!("{} bytes, identical", bytes[0].len()))
}

fn main() {
    let criteria: [(usize, fn() -> Outcome, Option<Duration>); 8] = [
        (1, criterion_1, Some(Duration::from_secs(5))),
        (2, criterion_2, Some(Duration::from_secs(30))),
        (3, criterion_3, None),
        (4, criterion_4, Some(Duration::from_secs(120))),
        (5, criterion_5, None),
        (6, criterion_6, None),
        (7, criterion_7, None),
        (8, criterion_8, None),
    ];
    let mut failed = 0;
    for (i, f, limit) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(d), Some(l)) if elapsed > l => Err(format!("{d}; over the {} s budget", l.as_secs())),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {i}: PASS ({detail}, {:.2} s)", elapsed.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("criterion {i}: FAIL ({detail}, {:.2} s)", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
