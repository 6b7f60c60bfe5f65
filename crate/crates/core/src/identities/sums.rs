//! Bilateral identities: Ramanujan's 1psi1 sum, the Bethe-weighted sum equal to
//! `Theta`, and the general family with its two functional equations.

use super::bilateral::{bilateral_sum, BilateralSum, Weight, K_START};
use super::{combined_residual, ContextValue, IdentityReport, Probe};
use crate::bethe::BetheState;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::qseries::{poch_inf, pole_tolerance};
use crate::scalar::{cpow, one, rel_diff, Real, C};
use crate::wronskian::ThetaData;

/// `sum_n z^n (a;q)_n / (b;q)_n` against
/// `(q, b/a, az, q/(az); q)_inf / (b, q/a, z, b/(az); q)_inf`.
///
/// The region `|b/a| < |z| < 1` is enforced unless `b = q^m` (m >= 1), where the
/// negative side of the sum terminates.
pub fn onepsi1_check<T: Real>(a: C<T>, b: C<T>, z: C<T>, q: C<T>, k_max: usize, tol: T) -> Result<IdentityReport<T>> {
    let terminating = terminates_below(b, q);
    if !(z.norm() < T::one()) {
        return Err(Error::RegionViolation { reason: format!("|z| = {} is not below 1", z.norm()) });
    }
    if !terminating && !((b / a).norm() < z.norm()) {
        return Err(Error::RegionViolation {
            reason: format!("|b/a| = {} is not below |z| = {}", (b / a).norm(), z.norm()),
        });
    }
    let lhs = bilateral_sum(&[a], &[b], z, q, Weight::Unit, one(), K_START.min(k_max), k_max)?;
    let num = poch_inf(q, q) * poch_inf(b / a, q) * poch_inf(a * z, q) * poch_inf(q / (a * z), q);
    let den = poch_inf(b, q) * poch_inf(q / a, q) * poch_inf(z, q) * poch_inf(b / (a * z), q);
    if den.norm() < pole_tolerance::<T>() {
        return Err(Error::PoleHit { context: "1psi1 product side", magnitude: den.norm().as_f64() });
    }
    let rhs = num / den;
    let mut report = IdentityReport::new("onepsi1", tol);
    report.push(Probe::Point(z), combined_residual(lhs.value, rhs, &[lhs.magnitude]));
    report.values.push((Probe::Point(z), lhs.value));
    report.note("a", ContextValue::Complex(a));
    report.note("b", ContextValue::Complex(b));
    report.note("z", ContextValue::Complex(z));
    report.note("q", ContextValue::Complex(q));
    report.note("k", ContextValue::Integer(lhs.k as i64));
    Ok(report.finish())
}

/// `b = q^m` for an integer `m >= 1`.
fn terminates_below<T: Real>(b: C<T>, q: C<T>) -> bool {
    if b.norm() == T::zero() {
        return false;
    }
    let m = (b.norm().ln() / q.norm().ln()).round();
    m >= T::one() && rel_diff(b, cpow(q, m.as_f64() as i64)) < pole_tolerance::<T>()
}

/// The Bethe-weighted bilateral sum at `x`:
///
/// ```text
/// sum_n c^n (x/xi; q)_n^N / ((xi x; q)_n^N Q(q^(n-1) x) Q(q^n x))
/// ```
///
/// assembled exactly as the general family with `a_k = xi`, `b_k = 1/xi`, `z = c`.
pub fn rr_lhs<T: Real>(state: &BetheState<T>, x: C<T>, k_max: usize) -> Result<BilateralSum<T>> {
    let g = RrgenParams::from_model(&state.params);
    g.sum(Weight::Bethe(state), x, k_max)
}

fn gate<T: Real>(p: &ModelParams<T>) -> Result<()> {
    if !(p.twist().norm() < T::one() && p.dual_twist().norm() < T::one()) {
        return Err(Error::NonConvergentTail { k: 0 });
    }
    Ok(())
}

/// The Bethe-weighted sum against
/// `(q/x)^S Theta(x) / (kappa (1 - c)(1 - c') (xi x; q)_inf^N (q xi/x; q)_inf^N)`.
pub fn rr_check<T: Real>(
    state: &BetheState<T>,
    theta: &ThetaData<T>,
    probes: &[C<T>],
    k_max: usize,
    tol: T,
) -> Result<IdentityReport<T>> {
    let p = &state.params;
    gate(p)?;
    let n = p.n as u32;
    let mut report = IdentityReport::new("rr", tol);
    let mut k_used = 0;
    for &x in probes {
        let lhs = rr_lhs(state, x, k_max)?;
        k_used = k_used.max(lhs.k);
        let th = theta.theta.eval_checked(x, T::trust_rel())?;
        let den = state.kappa
            * (one::<T>() - p.twist())
            * (one::<T>() - p.dual_twist())
            * poch_inf(p.xi * x, p.q).powu(n)
            * poch_inf(p.q * p.xi / x, p.q).powu(n);
        let rhs = cpow(p.q / x, p.s as i64) * th / den;
        report.push(Probe::Point(x), combined_residual(lhs.value, rhs, &[lhs.magnitude]));
        report.values.push((Probe::Point(x), lhs.value));
    }
    report.note("k", ContextValue::Integer(k_used as i64));
    Ok(report.finish())
}

/// Parameters of `psi(x) = sum_n z^n prod_k (x/a_k; q)_n / (x/b_k; q)_n f(q^n x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RrgenParams<T: Real> {
    pub a: Vec<C<T>>,
    pub b: Vec<C<T>>,
    pub z: C<T>,
    pub q: C<T>,
}

impl<T: Real> RrgenParams<T> {
    /// `a_k = xi`, `b_k = 1/xi` (N copies), `z = omega q^S xi^N`: the choice that turns
    /// `psi` with the Bethe weight into the sum of [`rr_check`].
    pub fn from_model(p: &ModelParams<T>) -> Self {
        Self {
            a: vec![p.xi; p.n],
            b: vec![one::<T>() / p.xi; p.n],
            z: p.twist(),
            q: p.q,
        }
    }

    pub fn sum(&self, weight: Weight<'_, T>, x: C<T>, k_max: usize) -> Result<BilateralSum<T>> {
        let a_args: Vec<C<T>> = self.a.iter().map(|a| x / *a).collect();
        let b_args: Vec<C<T>> = self.b.iter().map(|b| x / *b).collect();
        bilateral_sum(&a_args, &b_args, self.z, self.q, weight, x, K_START.min(k_max), k_max)
    }
}

/// Checks of the general family at each probe:
///
/// 1. `psi(x) = z prod_k (1 - x/a_k)/(1 - x/b_k) psi(qx)`;
/// 2. `W(x) = z (-x)^N / prod_k a_k W(qx)` for
///    `W(x) = psi(x) prod_k (x/b_k; q)_inf (q a_k/x; q)_inf`;
/// 3. with the Bethe weight and the parameters of [`RrgenParams::from_model`],
///    agreement with the sum evaluated by [`rr_check`].
pub fn rrgen_check<T: Real>(
    g: &RrgenParams<T>,
    weight: Weight<'_, T>,
    probes: &[C<T>],
    k_max: usize,
    tol: T,
) -> Result<IdentityReport<T>> {
    if g.a.len() != g.b.len() || g.a.is_empty() {
        return Err(Error::Shape("a and b lists must be non-empty and of equal length".into()));
    }
    let n = g.a.len();
    let q = g.q;
    let mut report = IdentityReport::new("rrgen", tol);
    report.note("f", ContextValue::Text(weight.name().into()));
    let rr_state = match weight {
        Weight::Bethe(state) if RrgenParams::from_model(&state.params) == *g => Some(state),
        _ => None,
    };
    if rr_state.is_some() {
        report.note("mapping", ContextValue::Text("a_k = xi, b_k = 1/xi, z = omega q^S xi^N".into()));
    }
    let prod_a = g.a.iter().fold(one::<T>(), |acc, a| acc * *a);
    for &x in probes {
        let psi = g.sum(weight, x, k_max)?;
        let psi_q = g.sum(weight, q * x, k_max)?;
        let ratio = g
            .a
            .iter()
            .zip(&g.b)
            .fold(g.z, |acc, (a, b)| acc * (one::<T>() - x / *a) / (one::<T>() - x / *b));
        let rhs1 = ratio * psi_q.value;
        report.push(
            Probe::Check { check: 1, x },
            combined_residual(psi.value, rhs1, &[psi.magnitude, ratio.norm() * psi_q.magnitude]),
        );

        let dressing = |y: C<T>| {
            g.a.iter()
                .zip(&g.b)
                .fold(one::<T>(), |acc, (a, b)| acc * poch_inf(y / *b, q) * poch_inf(q * *a / y, q))
        };
        let w = psi.value * dressing(x);
        let wq = psi_q.value * dressing(q * x);
        let factor = g.z * cpow(-x, n as i64) / prod_a;
        report.push(Probe::Check { check: 2, x }, combined_residual(w, factor * wq, &[]));

        if let Some(state) = rr_state {
            let rr = rr_lhs(state, x, k_max)?;
            report.push(Probe::Check { check: 3, x }, rel_diff(psi.value, rr.value));
        }
        report.values.push((Probe::Point(x), psi.value));
    }
    Ok(report.finish())
}
