//! Wronskians of `H`, `H'` with `Q`, the reconstruction of `Q` from them, and the
//! quantization condition on the zeros of `Theta`.

use super::{combined_residual, ContextValue, IdentityReport, Probe};
use crate::bethe::BetheState;
use crate::error::{Error, Result};
use crate::hfun::HPair;
use crate::qseries::{binomial_power, poch_inf, poch_inf_series, pole_tolerance, Expansion, LaurentSeries};
use crate::scalar::{cpow, one, rel_diff, Real, C};
use crate::wronskian::ThetaData;

/// Both Wronskian lines, coefficient by coefficient:
///
/// ```text
/// H(x/q) Q(x) - omega q^S (xi - x)^N H(x) Q(x/q)            = (1 - c)  (xi x; q)_inf^N
/// H'(x) Q'(x/q) - omega^-1 q^S (xi - q/x)^N H'(x/q) Q'(x)   = kappa (1 - c') (q xi/x; q)_inf^N
/// ```
///
/// with `Q'(x) = Q(x) / x^S`, `c = omega q^S xi^N`, `c' = omega^-1 q^S xi^N`.
pub fn hq_wronskian_check<T: Real>(state: &BetheState<T>, pair: &HPair<T>, tol: T) -> Result<IdentityReport<T>> {
    let p = &state.params;
    let m = pair.m as i64;
    let n = p.n;
    let qs = cpow(p.q, p.s as i64);
    let inv_q = one::<T>() / p.q;
    let q_ser = state.q_series();
    let h = pair.h_series();
    let hp = pair.hp_series();

    let a = binomial_power(p.xi, -one::<T>(), n).scale(p.omega * qs);
    let lhs1 = h.dilate(inv_q)?.mul(&q_ser)?.sub(&a.mul(&h)?.mul(&q_ser.dilate(inv_q)?)?)?;
    let rhs1 = poch_inf_series(p.xi, p.q, Expansion::Ascending, pair.m)
        .pow(n)?
        .scale(one::<T>() - p.twist());
    let line1 = lhs1.sub(&rhs1)?.truncate(0, m)?;

    let s = p.s as i64;
    let qp = q_ser.shift(-s);
    let qp_div = q_ser.dilate(inv_q)?.shift(-s).scale(qs);
    let b = binomial_power(p.xi, -p.q, n);
    let b = LaurentSeries::exact(-(n as i64), b.coeffs().iter().rev().copied().collect())
        .scale(qs / p.omega);
    let lhs2 = hp.mul(&qp_div)?.sub(&b.mul(&hp.dilate(inv_q)?)?.mul(&qp)?)?;
    let rhs2 = poch_inf_series(p.q * p.xi, p.q, Expansion::Descending, pair.m)
        .pow(n)?
        .scale(state.kappa * (one::<T>() - p.dual_twist()));
    let line2 = lhs2.sub(&rhs2)?.truncate(-m, 0)?;

    let mut report = IdentityReport::new("hq", tol);
    for (line, series) in [(1u8, &line1), (2u8, &line2)] {
        for (power, r) in series.relative_residuals() {
            report.push(Probe::Coefficient { line, power }, r);
        }
        let (lo, hi) = series.trust_window();
        report.note(&format!("line{line}_trust_lo"), ContextValue::Integer(lo));
        report.note(&format!("line{line}_trust_hi"), ContextValue::Integer(hi));
    }
    Ok(report.finish())
}

/// Pointwise
///
/// ```text
/// Q(x) = (1 - c) H'(x) (xi x; q)_inf^N / Theta(x)
///      + kappa x^S (1 - c') H(x) (xi/x; q)_inf^N / Theta(qx)
/// ```
pub fn reconstruct_q<T: Real>(
    state: &BetheState<T>,
    pair: &HPair<T>,
    theta: &ThetaData<T>,
    probes: &[C<T>],
    tol: T,
) -> Result<IdentityReport<T>> {
    let p = &state.params;
    let pole = T::lit(1e-8);
    let mut report = IdentityReport::new("q2", tol);
    for &x in probes {
        let th = theta.theta.eval(x)?;
        let thq = theta.theta.eval(p.q * x)?;
        if th.value.norm() < pole * th.scale || thq.value.norm() < pole * thq.scale {
            return Err(Error::ProbeAtPole { re: x.re.as_f64(), im: x.im.as_f64() });
        }
        let t1 = (one::<T>() - p.twist()) * pair.hp_at(x)? * poch_inf(p.xi * x, p.q).powu(p.n as u32)
            / th.value;
        let t2 = state.kappa
            * cpow(x, p.s as i64)
            * (one::<T>() - p.dual_twist())
            * pair.h_at(x)?
            * poch_inf(p.xi / x, p.q).powu(p.n as u32)
            / thq.value;
        let q = state.q_at(x);
        report.push(Probe::Point(x), combined_residual(t1 + t2, q, &[t1.norm(), t2.norm()]));
    }
    Ok(report.finish())
}

/// `rho_k = -H'(z_k) (xi z_k; q)_inf^N / (z_k^S (-z_k)^N H(z_k) (xi/z_k; q)_inf^N)`
/// must take one common value `kappa'` over all zeros of `Theta`.
pub fn bae2_check<T: Real>(
    state: &BetheState<T>,
    pair: &HPair<T>,
    theta: &ThetaData<T>,
    tol: T,
) -> Result<IdentityReport<T>> {
    let p = &state.params;
    let n = p.n as u32;
    let mut rho = Vec::with_capacity(theta.zeros.len());
    let mut parts = Vec::with_capacity(theta.zeros.len());
    for (k, &z) in theta.zeros.iter().enumerate() {
        let hz = pair.h_at(z)?;
        let den_poch = poch_inf(p.xi / z, p.q).powu(n);
        if hz.norm() < pole_tolerance::<T>() || den_poch.norm() < pole_tolerance::<T>() {
            return Err(Error::ZeroDenominator { index: k });
        }
        let num = pair.hp_at(z)? * poch_inf(p.xi * z, p.q).powu(n);
        let den = cpow(z, p.s as i64) * cpow(-z, p.n as i64) * hz * den_poch;
        rho.push(-num / den);
        parts.push((num, den));
    }
    let mut report = IdentityReport::new("bae2", tol);
    for i in 0..rho.len() {
        for j in (i + 1)..rho.len() {
            report.push(Probe::Pair(i, j), rel_diff(rho[i], rho[j]));
        }
    }
    if let Some(&kp) = rho.first() {
        report.note("kappa_prime", ContextValue::Complex(kp));
        let closed = state.kappa * p.omega * (one::<T>() - p.dual_twist()) / (one::<T>() - p.twist());
        report.note("kappa_prime_closed_form", ContextValue::Complex(closed));
        report.note("kappa_prime_deviation", ContextValue::Real(rel_diff(kp, closed)));
        // plugging kappa' back into the quantization condition at every zero
        let worst = parts
            .iter()
            .map(|(num, den)| combined_residual(*num, -kp * *den, &[]))
            .fold(T::zero(), |m, r| m.max(r));
        report.note("bae2_residual", ContextValue::Real(worst));
    }
    for (k, r) in rho.iter().enumerate() {
        report.values.push((Probe::Zero(k), *r));
    }
    Ok(report.finish())
}
