//! Bethe ansatz equations for the TQ relation
//!
//! ```text
//! t(x) Q(x) = (1 - xi x)^N Q(q x) + omega q^S (xi - x)^N Q(x / q)
//! ```
//!
//! with `Q(x) = prod_j (1 - x / x_j)`. Solutions are found by damped Newton
//! iteration with an analytic Jacobian; `t(x)` is then recovered by exact
//! polynomial division and checked against its fixed endpoint coefficients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{horner, solve};
use crate::params::ModelParams;
use crate::qseries::LaurentSeries;
use crate::scalar::{cpow, one, zero, Real, C};

/// Roots closer than `DEGENERACY_TOL * max(1, |x|)` are coincident.
pub const DEGENERACY_TOL: f64 = 1e-6;
/// Relative sup-norm at which Newton iteration is declared converged.
pub const CONVERGENCE_TOL: f64 = 1e-10;
/// Relative size of the division remainder accepted by [`build_t`].
pub const REMAINDER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BetheState<T: Real> {
    pub params: ModelParams<T>,
    /// Zeros of `Q`, sorted by `(|x|, arg x)`.
    pub roots: Vec<C<T>>,
    /// Ascending coefficients of `Q`, `q_coeffs[0] = 1`.
    pub q_coeffs: Vec<C<T>>,
    /// Leading coefficient of `Q`, i.e. `(-1)^S / prod_j x_j`.
    pub kappa: C<T>,
    /// Ascending coefficients `t_0 .. t_N` of the transfer-matrix eigenvalue.
    pub t_coeffs: Vec<C<T>>,
}

impl<T: Real> BetheState<T> {
    pub fn q_at(&self, x: C<T>) -> C<T> {
        horner(&self.q_coeffs, x).0
    }

    pub fn t_at(&self, x: C<T>) -> C<T> {
        horner(&self.t_coeffs, x).0
    }

    /// `Q` as an exact Laurent polynomial.
    pub fn q_series(&self) -> LaurentSeries<T> {
        LaurentSeries::exact(0, self.q_coeffs.clone())
    }

    pub fn t_series(&self) -> LaurentSeries<T> {
        LaurentSeries::exact(0, self.t_coeffs.clone())
    }

    /// `t(x)Q(x) - (1 - xi x)^N Q(qx) - omega q^S (xi - x)^N Q(x/q)` as a series;
    /// every coefficient vanishes for a genuine Bethe state.
    pub fn tq_residual(&self) -> Result<LaurentSeries<T>> {
        let p = &self.params;
        let q = self.q_series();
        let lhs = self.t_series().mul(&q)?;
        let a = crate::qseries::binomial_power(one(), -p.xi, p.n);
        let b = crate::qseries::binomial_power(p.xi, -one::<T>(), p.n)
            .scale(p.omega * cpow(p.q, p.s as i64));
        let right = a
            .mul(&q.dilate(p.q)?)?
            .add(&b.mul(&q.dilate(one::<T>() / p.q)?)?)?;
        lhs.sub(&right)
    }
}

/// Ascending coefficients of `prod_k (1 - x / x_k)`.
pub fn q_polynomial<T: Real>(roots: &[C<T>]) -> Vec<C<T>> {
    let mut c = vec![one::<T>()];
    for r in roots {
        let inv = one::<T>() / *r;
        let mut next = vec![zero::<T>(); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i] += *ci;
            next[i + 1] -= *ci * inv;
        }
        c = next;
    }
    c
}

fn q_product<T: Real>(roots: &[C<T>], y: C<T>) -> C<T> {
    roots.iter().fold(one::<T>(), |acc, r| acc * (one::<T>() - y / *r))
}

fn poly_mul<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    let mut out = vec![zero::<T>(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += *ai * *bj;
        }
    }
    out
}

fn binomial<T: Real>(c0: C<T>, c1: C<T>, n: usize) -> Vec<C<T>> {
    (0..n).fold(vec![one::<T>()], |acc, _| poly_mul(&acc, &[c0, c1]))
}

/// Rejects coincident or vanishing roots and roots related by a power of `q`.
pub fn check_roots<T: Real>(params: &ModelParams<T>, roots: &[C<T>]) -> Result<()> {
    let tol = T::lit(DEGENERACY_TOL);
    for (i, xi) in roots.iter().enumerate() {
        if !(xi.norm() > tol) || !xi.norm().is_finite() {
            return Err(Error::DegenerateRoots { first: i, second: i });
        }
        for (j, xj) in roots.iter().enumerate().skip(i + 1) {
            let scale = T::one().max(xi.norm());
            if (*xi - *xj).norm() < tol * scale {
                return Err(Error::DegenerateRoots { first: i, second: j });
            }
            // q-shifts in either direction
            for (a, b) in [(xi, xj), (xj, xi)] {
                let mut shifted = *b * params.q;
                while shifted.norm() > tol * T::lit(1e-3) {
                    if (*a - shifted).norm() < tol * T::one().max(a.norm()) {
                        return Err(Error::DegenerateRoots { first: i, second: j });
                    }
                    shifted *= params.q;
                }
            }
        }
    }
    Ok(())
}

fn ensure_distinct<T: Real>(roots: &[C<T>]) -> Result<()> {
    let tol = T::lit(DEGENERACY_TOL);
    for (i, a) in roots.iter().enumerate() {
        for (j, b) in roots.iter().enumerate().skip(i + 1) {
            if (*a - *b).norm() < tol * T::one().max(a.norm()) {
                return Err(Error::DegenerateRoots { first: i, second: j });
            }
        }
    }
    Ok(())
}

/// Both sides of each equation: `(1 - xi x_j)^N Q(q x_j)` and
/// `omega q^S (xi - x_j)^N Q(x_j / q)`.
fn bae_terms<T: Real>(p: &ModelParams<T>, roots: &[C<T>]) -> Vec<(C<T>, C<T>)> {
    let wqs = p.omega * cpow(p.q, p.s as i64);
    roots
        .iter()
        .map(|&x| {
            let a = (one::<T>() - p.xi * x).powu(p.n as u32) * q_product(roots, p.q * x);
            let b = wqs * (p.xi - x).powu(p.n as u32) * q_product(roots, x / p.q);
            (a, b)
        })
        .collect()
}

/// `F_j = (1 - xi x_j)^N Q(q x_j) + omega q^S (xi - x_j)^N Q(x_j / q)`.
pub fn bae_residual<T: Real>(params: &ModelParams<T>, roots: &[C<T>]) -> Result<Vec<C<T>>> {
    ensure_distinct(roots)?;
    Ok(bae_terms(params, roots).into_iter().map(|(a, b)| a + b).collect())
}

/// Largest `|F_j| / (|first term| + |second term|)`.
pub fn bae_relative_residual<T: Real>(params: &ModelParams<T>, roots: &[C<T>]) -> T {
    bae_terms(params, roots)
        .into_iter()
        .map(|(a, b)| crate::scalar::ratio_or_zero((a + b).norm(), a.norm() + b.norm()))
        .fold(T::zero(), |m, v| if v.is_nan() { T::infinity() } else { m.max(v) })
}

/// `d/dy prod_k (1 - y / x_k)` at fixed roots.
fn q_derivative<T: Real>(roots: &[C<T>], y: C<T>) -> C<T> {
    let mut total = zero::<T>();
    for (l, rl) in roots.iter().enumerate() {
        let mut prod = -one::<T>() / *rl;
        for (m, rm) in roots.iter().enumerate() {
            if m != l {
                prod *= one::<T>() - y / *rm;
            }
        }
        total += prod;
    }
    total
}

/// `d/dx_k prod_l (1 - y / x_l)` at fixed `y`.
fn q_root_derivative<T: Real>(roots: &[C<T>], y: C<T>, k: usize) -> C<T> {
    let mut prod = y / (roots[k] * roots[k]);
    for (l, rl) in roots.iter().enumerate() {
        if l != k {
            prod *= one::<T>() - y / *rl;
        }
    }
    prod
}

fn jacobian<T: Real>(p: &ModelParams<T>, roots: &[C<T>]) -> Vec<Vec<C<T>>> {
    let s = roots.len();
    let n = p.n as u32;
    let nf = T::lit(p.n as f64);
    let wqs = p.omega * cpow(p.q, p.s as i64);
    let mut jac = vec![vec![zero::<T>(); s]; s];
    for j in 0..s {
        let x = roots[j];
        let yq = p.q * x;
        let yd = x / p.q;
        let a = (one::<T>() - p.xi * x).powu(n);
        let b = wqs * (p.xi - x).powu(n);
        for k in 0..s {
            jac[j][k] = a * q_root_derivative(roots, yq, k) + b * q_root_derivative(roots, yd, k);
        }
        let da = -(p.xi * nf) * (one::<T>() - p.xi * x).powu(n - 1);
        let db = -(wqs * nf) * (p.xi - x).powu(n - 1);
        jac[j][j] += da * q_product(roots, yq)
            + a * p.q * q_derivative(roots, yq)
            + db * q_product(roots, yd)
            + b * q_derivative(roots, yd) / p.q;
    }
    jac
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iter: usize,
    pub tolerance: f64,
    /// Random starts tried after the user seeds fail.
    pub multistart: usize,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { max_iter: 200, tolerance: CONVERGENCE_TOL, multistart: 200, rng_seed: 0x5eed_ba7e }
    }
}

fn sup_norm<T: Real>(v: &[C<T>]) -> T {
    v.iter().fold(T::zero(), |m, z| {
        let a = z.norm();
        if a.is_nan() {
            T::infinity()
        } else {
            m.max(a)
        }
    })
}

/// Damped Newton iteration from one seed; returns the converged roots.
pub fn newton<T: Real>(
    params: &ModelParams<T>,
    seed: &[C<T>],
    cfg: &SolverConfig,
) -> Option<Vec<C<T>>> {
    let tol = T::lit(cfg.tolerance);
    let mut x = seed.to_vec();
    if ensure_distinct(&x).is_err() {
        return None;
    }
    let mut f = bae_residual(params, &x).ok()?;
    let mut fnorm = sup_norm(&f);
    for _ in 0..cfg.max_iter {
        if bae_relative_residual(params, &x) < tol {
            return Some(x);
        }
        let step = solve(jacobian(params, &x), f.iter().map(|v| -*v).collect())?;
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<C<T>> = x.iter().zip(&step).map(|(a, d)| *a + *d * lambda).collect();
            if cand.iter().all(|z| z.norm() > T::lit(1e-12) && z.norm() < T::lit(1e12)) {
                if let Ok(fc) = bae_residual(params, &cand) {
                    let n = sup_norm(&fc);
                    if n < fnorm {
                        x = cand;
                        f = fc;
                        fnorm = n;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    (bae_relative_residual(params, &x) < tol).then_some(x)
}

fn canonical_order<T: Real>(roots: &mut [C<T>]) {
    roots.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.arg().partial_cmp(&b.arg()).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Reconstructs `t(x)` from a Bethe root set by exact division of the TQ numerator
/// by `Q(x)`.
pub fn build_t<T: Real>(params: &ModelParams<T>, roots: &[C<T>]) -> Result<BetheState<T>> {
    let p = params;
    let mut roots = roots.to_vec();
    canonical_order(&mut roots);
    ensure_distinct(&roots)?;
    let s = roots.len();
    if s != p.s {
        return Err(Error::Shape(format!("expected {} roots, got {}", p.s, s)));
    }
    let qc = q_polynomial(&roots);
    let qq: Vec<C<T>> = qc.iter().enumerate().map(|(k, c)| *c * cpow(p.q, k as i64)).collect();
    let qd: Vec<C<T>> = qc.iter().enumerate().map(|(k, c)| *c * cpow(p.q, -(k as i64))).collect();
    let a = binomial(one(), -p.xi, p.n);
    let b: Vec<C<T>> = binomial(p.xi, -one::<T>(), p.n)
        .into_iter()
        .map(|c| c * p.omega * cpow(p.q, p.s as i64))
        .collect();
    let left = poly_mul(&a, &qq);
    let right = poly_mul(&b, &qd);
    let mut rem: Vec<C<T>> = left.iter().zip(&right).map(|(l, r)| *l + *r).collect();
    let scale = left
        .iter()
        .zip(&right)
        .fold(T::zero(), |m, (l, r)| m.max(l.norm() + r.norm()));
    let lead = qc[s];
    let mut t = vec![zero::<T>(); p.n + 1];
    for k in (0..=p.n).rev() {
        let coef = rem[k + s] / lead;
        t[k] = coef;
        for (i, qi) in qc.iter().enumerate() {
            rem[k + i] -= coef * *qi;
        }
    }
    let max_rem = rem[..s].iter().fold(T::zero(), |m, r| m.max(r.norm()));
    let rel = crate::scalar::ratio_or_zero(max_rem, scale);
    if !(rel <= T::lit(REMAINDER_TOL)) {
        return Err(Error::NonVanishingRemainder { max_relative: rel.as_f64() });
    }
    let tol = T::lit(REMAINDER_TOL);
    let d0 = crate::scalar::rel_diff(t[0], p.t_constant());
    if !(d0 <= tol) {
        return Err(Error::StructureViolation { which: "t_0", deviation: d0.as_f64() });
    }
    let dn = crate::scalar::rel_diff(t[p.n], p.t_leading());
    if !(dn <= tol) {
        return Err(Error::StructureViolation { which: "t_N", deviation: dn.as_f64() });
    }
    Ok(BetheState { params: *p, kappa: qc[s], roots, q_coeffs: qc, t_coeffs: t })
}

/// The `S = 0` state: `Q = 1`, `t(x) = (1 - xi x)^N + omega (xi - x)^N`.
pub fn vacuum_state<T: Real>(params: &ModelParams<T>) -> Result<BetheState<T>> {
    if params.s != 0 {
        return Err(Error::Shape(format!("vacuum state needs S = 0, got S = {}", params.s)));
    }
    build_t(params, &[])
}

fn random_seed<T: Real>(rng: &mut ChaCha8Rng, s: usize) -> Vec<C<T>> {
    (0..s)
        .map(|_| {
            let r = 10f64.powf(rng.gen_range(-1.0..1.0));
            let phi = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            C::new(T::lit(r * phi.cos()), T::lit(r * phi.sin()))
        })
        .collect()
}

/// Solves the Bethe equations from the given seeds, then from seeded random
/// starts in `0.1 < |x| < 10`. The first converged non-degenerate root set wins.
pub fn solve_bae<T: Real>(params: &ModelParams<T>, seeds: &[Vec<C<T>>]) -> Result<BetheState<T>> {
    solve_bae_with(params, seeds, &SolverConfig::default())
}

pub fn solve_bae_with<T: Real>(
    params: &ModelParams<T>,
    seeds: &[Vec<C<T>>],
    cfg: &SolverConfig,
) -> Result<BetheState<T>> {
    if params.s == 0 {
        return vacuum_state(params);
    }
    let mut attempts = 0;
    let mut last_err = None;
    let mut try_seed = |seed: &[C<T>]| -> Option<BetheState<T>> {
        if seed.len() != params.s {
            return None;
        }
        let roots = newton(params, seed, cfg)?;
        if let Err(e) = check_roots(params, &roots) {
            last_err = Some(e);
            return None;
        }
        match build_t(params, &roots) {
            Ok(s) => Some(s),
            Err(e) => {
                last_err = Some(e);
                None
            }
        }
    };
    for seed in seeds {
        attempts += 1;
        if let Some(s) = try_seed(seed) {
            return Ok(s);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    for _ in 0..cfg.multistart {
        attempts += 1;
        let seed = random_seed::<T>(&mut rng, params.s);
        if let Some(s) = try_seed(&seed) {
            return Ok(s);
        }
    }
    match last_err {
        Some(e @ Error::DegenerateRoots { .. }) => Err(e),
        _ => Err(Error::RootFindFailure { attempts }),
    }
}

/// Every distinct Bethe state reached from `starts` seeded random starts.
pub fn enumerate_states<T: Real>(
    params: &ModelParams<T>,
    starts: usize,
    rng_seed: u64,
) -> Vec<BetheState<T>> {
    if params.s == 0 {
        return vacuum_state(params).into_iter().collect();
    }
    let cfg = SolverConfig { rng_seed, ..SolverConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut found: Vec<BetheState<T>> = Vec::new();
    let tol = T::lit(1e-7);
    for _ in 0..starts {
        let seed = random_seed::<T>(&mut rng, params.s);
        let Some(roots) = newton(params, &seed, &cfg) else { continue };
        if check_roots(params, &roots).is_err() {
            continue;
        }
        let Ok(state) = build_t(params, &roots) else { continue };
        let duplicate = found.iter().any(|f| {
            f.roots
                .iter()
                .zip(&state.roots)
                .all(|(a, b)| (*a - *b).norm() < tol * T::one().max(a.norm()))
        });
        if !duplicate {
            found.push(state);
        }
    }
    found.sort_by(|a, b| {
        let key = |s: &BetheState<T>| s.roots.iter().map(|r| r.norm().as_f64()).sum::<f64>();
        key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal)
    });
    found
}
