//! The entire solutions `H(x) = 1 + h_1 x + ...` and `H'(x) = 1 + h'_1 / x + ...` of
//!
//! ```text
//! t(x)  H(x)  = H(x/q)  + gamma(x)  H(qx)
//! t'(u) H'(u) = H'(u/q) + gamma'(u) H'(qu),   u = 1/x
//! ```
//!
//! with `gamma(x) = omega q^S (1 - xi x)^N (xi - q x)^N`,
//! `gamma'(u) = omega^-1 q^S (1 - xi u)^N (xi - q u)^N` and
//! `t'(x) = t(x) / (omega (-x)^N)`. Both are computed by coefficient recursion and
//! accepted only after direct substitution; a transfer-matrix product gives an
//! independent evaluation of `H(x/q)/H(x)` and `H'(qx)/H'(x)`.

use crate::error::{Error, Result};
use crate::linalg::horner;
use crate::params::ModelParams;
use crate::qseries::{binomial_power, LaurentSeries, Tail};
use crate::scalar::{cpow, one, rel_diff, zero, Real, C};

/// Relative size of the resonant denominator at which the recursion refuses.
pub const RESONANCE_TOL: f64 = 1e-8;
/// Relative substitution residual accepted for both TQ-type equations.
pub const SUBSTITUTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct HPair<T: Real> {
    /// Coefficients of `x^0 .. x^M` in `H`.
    pub h: Vec<C<T>>,
    /// Coefficients of `x^0 .. x^-M` in `H'`.
    pub hp: Vec<C<T>>,
    pub m: usize,
    pub params: ModelParams<T>,
    pub t_coeffs: Vec<C<T>>,
}

impl<T: Real> HPair<T> {
    pub fn h_series(&self) -> LaurentSeries<T> {
        let c = significant(&self.h);
        LaurentSeries::power_series(c.to_vec(), decay_tail(c))
    }

    pub fn hp_series(&self) -> LaurentSeries<T> {
        let c = significant(&self.hp);
        LaurentSeries::inverse_power_series(c.to_vec(), decay_tail(c))
    }

    /// `H(x)`; fails when `x` lies outside the certified disc.
    pub fn h_at(&self, x: C<T>) -> Result<C<T>> {
        self.h_series().eval_checked(x, T::trust_rel())
    }

    pub fn hp_at(&self, x: C<T>) -> Result<C<T>> {
        self.hp_series().eval_checked(x, T::trust_rel())
    }

    /// Largest relative coefficient residual of each TQ-type equation.
    pub fn substitution_residuals(&self) -> Result<(T, T)> {
        let p = &self.params;
        let t = LaurentSeries::exact(0, self.t_coeffs.clone());
        let h = self.h_series();
        let gamma = LaurentSeries::exact(0, gamma_coeffs(p, p.omega));
        let line1 = t
            .mul(&h)?
            .sub(&h.dilate(one::<T>() / p.q)?)?
            .sub(&gamma.mul(&h.dilate(p.q)?)?)?;
        // second line in x = 1/u: every u^k becomes x^-k
        let tp = LaurentSeries::exact(-(p.n as i64), reversed(&t_prime(p, &self.t_coeffs)));
        let hp = self.hp_series();
        let gp = gamma_coeffs(p, one::<T>() / p.omega);
        let gp = LaurentSeries::exact(-(gp.len() as i64 - 1), reversed(&gp));
        let line2 = tp
            .mul(&hp)?
            .sub(&hp.dilate(p.q)?)?
            .sub(&gp.mul(&hp.dilate(one::<T>() / p.q)?)?)?;
        Ok((worst(&line1), worst(&line2)))
    }
}

fn worst<T: Real>(s: &LaurentSeries<T>) -> T {
    s.relative_residuals().into_iter().fold(T::zero(), |m, (_, r)| m.max(r))
}

fn reversed<T: Real>(v: &[C<T>]) -> Vec<C<T>> {
    v.iter().rev().copied().collect()
}

/// Leading run of coefficients above the subnormal range; the rest only carries
/// rounding noise and is left to the tail estimate.
fn significant<T: Real>(c: &[C<T>]) -> &[C<T>] {
    let floor = T::min_positive_value() / T::epsilon();
    let end = c.iter().rposition(|v| v.norm() >= floor).map_or(1, |i| i + 1);
    &c[..end.max(1)]
}

/// Tail of a rapidly decaying coefficient sequence, from the last few ratios.
fn decay_tail<T: Real>(c: &[C<T>]) -> Tail<T> {
    let n = c.len();
    let mut ratio = T::zero();
    for i in n.saturating_sub(4).max(1)..n {
        let prev = c[i - 1].norm();
        let cur = c[i].norm();
        if prev > T::zero() {
            ratio = ratio.max(cur / prev);
        } else if cur > T::zero() {
            ratio = T::infinity();
        }
    }
    let last = c[n - 1].norm();
    Tail::Open { bound: last * ratio, ratio }
}

/// Ascending coefficients of `w q^S (1 - xi x)^N (xi - q x)^N`; `w = omega` gives
/// `gamma`, `w = 1/omega` gives `gamma'`.
pub fn gamma_coeffs<T: Real>(p: &ModelParams<T>, w: C<T>) -> Vec<C<T>> {
    let a = binomial_power(one(), -p.xi, p.n);
    let b = binomial_power(p.xi, -p.q, p.n);
    let g = a.mul(&b).expect("exact polynomials always multiply");
    let s = w * cpow(p.q, p.s as i64);
    g.coeffs().iter().map(|c| *c * s).collect()
}

/// Coefficients of `t'` in `u = 1/x`: `t'_k = (-1)^N t_{N-k} / omega`.
pub fn t_prime<T: Real>(p: &ModelParams<T>, t: &[C<T>]) -> Vec<C<T>> {
    let sign = if p.n % 2 == 0 { T::one() } else { -T::one() };
    t.iter().rev().map(|c| *c * sign / p.omega).collect()
}

fn check_t<T: Real>(p: &ModelParams<T>, t: &[C<T>]) -> Result<()> {
    if t.len() != p.n + 1 {
        return Err(Error::Shape(format!("t(x) needs {} coefficients, got {}", p.n + 1, t.len())));
    }
    Ok(())
}

/// `D_m h_m = sum_{j=1}^{min(m, 2N)} (t_j - gamma_j q^(m-j)) h_{m-j}` with
/// `D_m = (1 - q^m)(q^-m - c)`, evaluated as
/// `h_m = q^m * sum / ((1 - q^m)(1 - c q^m))` so that nothing overflows.
fn recursion<T: Real>(t: &[C<T>], gamma: &[C<T>], q: C<T>, m: usize) -> Result<Vec<C<T>>> {
    let c = gamma[0];
    let guard = T::lit(RESONANCE_TOL) * (T::one() + c.norm());
    let mut h = vec![one::<T>()];
    let mut qm = one::<T>();
    for k in 1..=m {
        qm *= q;
        let d_scaled = (one::<T>() - qm) * (one::<T>() - c * qm);
        let d_full = (one::<T>() - qm) * (one::<T>() / qm - c);
        if d_full.norm() < guard {
            return Err(Error::Resonance { order: k, magnitude: d_full.norm().as_f64() });
        }
        let mut sum = zero::<T>();
        for j in 1..=k.min(gamma.len() - 1) {
            let tj = t.get(j).copied().unwrap_or_else(zero);
            sum += (tj - gamma[j] * cpow(q, (k - j) as i64)) * h[k - j];
        }
        h.push(qm * sum / d_scaled);
    }
    Ok(h)
}

/// Coefficients `h_0 .. h_M` of `H`.
pub fn compute_h<T: Real>(p: &ModelParams<T>, t: &[C<T>], m: usize) -> Result<Vec<C<T>>> {
    check_t(p, t)?;
    recursion(t, &gamma_coeffs(p, p.omega), p.q, m)
}

/// Coefficients `h'_0 .. h'_M` of `H'` in powers of `1/x`.
pub fn compute_hprime<T: Real>(p: &ModelParams<T>, t: &[C<T>], m: usize) -> Result<Vec<C<T>>> {
    check_t(p, t)?;
    recursion(&t_prime(p, t), &gamma_coeffs(p, one::<T>() / p.omega), p.q, m)
}

/// Both series, accepted only when each TQ-type equation holds coefficient-wise.
pub fn compute_hpair<T: Real>(p: &ModelParams<T>, t: &[C<T>], m: usize) -> Result<HPair<T>> {
    let pair = HPair {
        h: compute_h(p, t, m)?,
        hp: compute_hprime(p, t, m)?,
        m,
        params: *p,
        t_coeffs: t.to_vec(),
    };
    let (r1, r2) = pair.substitution_residuals()?;
    let tol = T::lit(SUBSTITUTION_TOL);
    if !(r1 < tol) {
        return Err(Error::StructureViolation { which: "H substitution", deviation: r1.as_f64() });
    }
    if !(r2 < tol) {
        return Err(Error::StructureViolation { which: "H' substitution", deviation: r2.as_f64() });
    }
    Ok(pair)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `L(x0) L(q x0) ... L(q^K x0)` with `L = [[t, -gamma], [1, 0]]`; converges
    /// to a multiple of `(H(x0/q), H(x0))^T (1, -c)`.
    Forward,
    /// `L'(q^-K x0) ... L'(x0)` with `L' = [[t', 1], [-gamma', 0]]`; converges to a
    /// multiple of `(1, -c')^T (H'(q x0), H'(x0))`.
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult<T: Real> {
    /// `H(x0/q)/H(x0)` forward, `H'(q x0)/H'(x0)` backward.
    pub h_ratio: C<T>,
    /// Converges to `-omega q^S xi^N` forward, `-omega^-1 q^S xi^N` backward.
    pub twist_ratio: C<T>,
    pub steps: usize,
    /// Determinant of the unnormalized product, `prod_k gamma` over the factors.
    pub det: C<T>,
}

type Mat<T> = [[C<T>; 2]; 2];

fn matmul<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let mut out = [[zero::<T>(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Evaluates the semi-infinite matrix product until both ratios settle to 1e-12
/// for five consecutive factors, or fails after `k_max` factors.
pub fn matrix_product_oracle<T: Real>(
    p: &ModelParams<T>,
    t: &[C<T>],
    x0: C<T>,
    k_max: usize,
    dir: Direction,
) -> Result<OracleResult<T>> {
    check_t(p, t)?;
    let (c, t_poly, g_poly) = match dir {
        Direction::Forward => (p.twist(), t.to_vec(), gamma_coeffs(p, p.omega)),
        Direction::Backward => (p.dual_twist(), t_prime(p, t), gamma_coeffs(p, one::<T>() / p.omega)),
    };
    if !(c.norm() < T::one()) {
        return Err(Error::ConvergenceGate {
            which: match dir {
                Direction::Forward => "|omega q^S xi^N| < 1",
                Direction::Backward => "|omega^-1 q^S xi^N| < 1",
            },
            value: c.norm().as_f64(),
        });
    }
    // forward factors are evaluated at x, backward ones at u = 1/x
    let mut arg = match dir {
        Direction::Forward => x0,
        Direction::Backward => one::<T>() / x0,
    };
    let mut prod: Mat<T> = [[one(), zero()], [zero(), one()]];
    let mut scale = one::<T>();
    let mut det_norm = one::<T>();
    let mut last: Option<(C<T>, C<T>)> = None;
    let mut stable = 0usize;
    let tol = T::lit(1e-12);
    for k in 0..=k_max {
        let tv = horner(&t_poly, arg).0;
        let gv = horner(&g_poly, arg).0;
        let ratios;
        match dir {
            Direction::Forward => {
                prod = matmul(&prod, &[[tv, -gv], [one(), zero()]]);
                ratios = (prod[0][0] / prod[1][0], prod[0][1] / prod[0][0]);
            }
            Direction::Backward => {
                prod = matmul(&[[tv, one()], [-gv, zero()]], &prod);
                ratios = (prod[0][0] / prod[0][1], prod[1][0] / prod[0][0]);
            }
        }
        det_norm *= gv;
        let big = prod.iter().flatten().fold(T::zero(), |m, z| m.max(z.norm()));
        if big > T::zero() && big.is_finite() {
            let s = crate::scalar::real(big);
            for z in prod.iter_mut().flatten() {
                *z /= s;
            }
            scale *= s;
            det_norm /= s * s;
        }
        if let Some((a, b)) = last {
            if rel_diff(ratios.0, a) < tol && rel_diff(ratios.1, b) < tol {
                stable += 1;
            } else {
                stable = 0;
            }
        }
        last = Some(ratios);
        if stable >= 5 {
            return Ok(OracleResult {
                h_ratio: ratios.0,
                twist_ratio: ratios.1,
                steps: k + 1,
                det: det_norm * scale * scale,
            });
        }
        arg *= p.q;
    }
    Err(Error::NonConvergentProduct { steps: k_max + 1 })
}
