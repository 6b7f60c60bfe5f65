//! The Wronskian
//!
//! ```text
//! Theta(x) = H'(x) H(x/q) - q^S (xi - x)^N (xi - q/x)^N H'(x/q) H(x)
//! ```
//!
//! which satisfies `Theta(x) = omega (-x)^N Theta(qx)` for every `t(x)` and hence
//! factorizes as `Theta_0 prod_k (x/z_k; q)_inf (q z_k/x; q)_inf` with
//! `prod_k z_k = 1/omega`.

use crate::error::{Error, Result};
use crate::hfun::HPair;
use crate::linalg::poly_roots;
use crate::params::ModelParams;
use crate::qseries::{binomial_power, theta_product, LaurentSeries};
use crate::scalar::{cpow, one, rel_diff, Real, C};

/// Relative tolerance for the quasi-periodicity and normalization checks.
pub const STRUCTURE_TOL: f64 = 1e-8;
/// Roots whose orbit images agree to this relative distance are one orbit.
pub const ORBIT_TOL: f64 = 1e-6;
/// Agreement demanded between `Theta_0` values at different reference points.
pub const THETA0_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaData<T: Real> {
    pub theta: LaurentSeries<T>,
    /// One zero per q-orbit, normalized so that their product is `1/omega`.
    pub zeros: Vec<C<T>>,
    pub theta0: C<T>,
    /// `zeros[k] = r_k q^orbit_shifts[k]` with `r_k` in the fundamental annulus.
    pub orbit_shifts: Vec<i64>,
}

impl<T: Real> ThetaData<T> {
    /// `Theta_0 prod_k (x/z_k; q)_inf (q z_k/x; q)_inf`.
    pub fn product_form(&self, x: C<T>, q: C<T>) -> C<T> {
        self.zeros.iter().fold(self.theta0, |acc, z| acc * theta_product(x, *z, q))
    }
}

/// `Theta` on the window `[-M, M]`.
pub fn compute_theta<T: Real>(p: &ModelParams<T>, pair: &HPair<T>) -> Result<LaurentSeries<T>> {
    let m = pair.m as i64;
    let h = pair.h_series();
    let hp = pair.hp_series();
    let inv_q = one::<T>() / p.q;
    let first = hp.mul(&h.dilate(inv_q)?)?;
    let a = binomial_power(p.xi, -one::<T>(), p.n);
    // (xi - q/x)^N has powers -N .. 0
    let b = binomial_power(p.xi, -p.q, p.n);
    let b = LaurentSeries::exact(-(p.n as i64), b.coeffs().iter().rev().copied().collect());
    let pref = a.mul(&b)?.scale(cpow(p.q, p.s as i64));
    let second = pref.mul(&hp.dilate(inv_q)?)?.mul(&h)?;
    first.sub(&second)?.truncate(-m, m)
}

/// Largest `|Theta_m - omega (-1)^N q^(m-N) Theta_(m-N)|` over trusted pairs, each
/// relative to the magnitude of the terms forming the two coefficients.
pub fn quasi_periodicity_residual<T: Real>(theta: &LaurentSeries<T>, p: &ModelParams<T>) -> T {
    let n = p.n as i64;
    let sign = if p.n % 2 == 0 { T::one() } else { -T::one() };
    let (lo, hi) = theta.trust_window();
    let mut worst = T::zero();
    for m in (lo + n)..=hi {
        let f = p.omega * cpow(p.q, m - n) * sign;
        let r = theta.coeff(m) - f * theta.coeff(m - n);
        let scale = theta.mag_at(m).max(f.norm() * theta.mag_at(m - n));
        worst = worst.max(crate::scalar::ratio_or_zero(r.norm(), scale));
    }
    worst
}

/// `|Theta(x) - omega (-x)^N Theta(qx)|` relative to the larger side.
pub fn pointwise_quasi_residual<T: Real>(
    theta: &LaurentSeries<T>,
    p: &ModelParams<T>,
    x: C<T>,
) -> Result<T> {
    let tol = T::trust_rel();
    let a = theta.eval_checked(x, tol)?;
    let b = p.omega * cpow(-x, p.n as i64) * theta.eval_checked(p.q * x, tol)?;
    Ok(rel_diff(a, b))
}

/// `k` with `sqrt|q| <= |x q^k| < 1/sqrt|q|`.
pub fn annulus_shift<T: Real>(x: C<T>, q: C<T>) -> i64 {
    let a = x.norm().ln() / q.norm().ln();
    (T::lit(0.5) - a).floor().as_f64() as i64
}

/// One representative per q-orbit of zeros, inside the fundamental annulus and in
/// canonical `(|z|, arg z)` order. Companion-matrix roots of the significant
/// coefficients are polished on the full series before they are trusted.
pub fn fundamental_orbits<T: Real>(theta: &LaurentSeries<T>, p: &ModelParams<T>) -> Result<Vec<C<T>>> {
    let (tl, th) = theta.trust_window();
    let max = (tl..=th).fold(T::zero(), |m, k| m.max(theta.coeff(k).norm()));
    let floor = max * T::epsilon() * T::epsilon();
    let sig: Vec<i64> = (tl..=th).filter(|&k| theta.coeff(k).norm() >= floor).collect();
    let (plo, phi) = match (sig.first(), sig.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(Error::EmptyTrustWindow),
    };
    let poly: Vec<C<T>> = (plo..=phi).map(|k| theta.coeff(k)).collect();
    let roots = poly_roots(&poly)?;

    let tail_tol = T::lit(1e-6);
    let zero_tol = T::lit(1e-10);
    let mut candidates: Vec<C<T>> = roots
        .into_iter()
        .filter(|r| r.norm() > T::zero() && r.norm().is_finite())
        .filter_map(|r| polish(theta, r))
        .filter(|r| match theta.eval(*r) {
            Ok(e) => e.tail < tail_tol * e.scale && e.value.norm() < zero_tol * e.scale,
            Err(_) => false,
        })
        .collect();
    // most accurate roots first: those closest to the unit circle
    candidates.sort_by(|a, b| {
        a.norm().ln().abs().partial_cmp(&b.norm().ln().abs()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let orbit_tol = T::lit(ORBIT_TOL);
    let mut reps: Vec<C<T>> = Vec::new();
    for r in candidates {
        let rep = r * cpow(p.q, annulus_shift(r, p.q));
        let same = reps.iter().any(|s| {
            [-1i64, 0, 1]
                .iter()
                .any(|k| (*s - rep * cpow(p.q, *k)).norm() < orbit_tol * s.norm())
        });
        if !same {
            reps.push(rep);
        }
    }
    if reps.len() != p.n {
        return Err(Error::ZeroCountMismatch { expected: p.n, found: reps.len() });
    }
    reps.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.arg().partial_cmp(&b.arg()).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(reps)
}

/// Zeros of `Theta` normalized so that `prod_k z_k = 1/omega`, with `Theta_0`.
pub fn extract_zeros<T: Real>(theta: &LaurentSeries<T>, p: &ModelParams<T>) -> Result<ThetaData<T>> {
    let reps = fundamental_orbits(theta, p)?;
    // prod(reps) * omega = q^m for a unique integer m
    let prod = reps.iter().fold(p.omega, |acc, z| acc * *z);
    let m = (prod.norm().ln() / p.q.norm().ln()).round().as_f64() as i64;
    let deviation = rel_diff(prod, cpow(p.q, m));
    if !(deviation < T::lit(STRUCTURE_TOL)) {
        return Err(Error::NormalizationFailure { deviation: deviation.as_f64() });
    }
    let mut orbit_shifts = vec![0i64; p.n];
    let last = p.n - 1;
    orbit_shifts[last] = -m;
    let zeros: Vec<C<T>> = reps
        .iter()
        .zip(&orbit_shifts)
        .map(|(z, k)| *z * cpow(p.q, *k))
        .collect();

    let theta0 = normalization(theta, p, &zeros)?;
    Ok(ThetaData { theta: theta.clone(), zeros, theta0, orbit_shifts })
}

/// Newton refinement of a companion-matrix root on the full trusted series, which
/// removes the distortion from the coefficients the polynomial left out.
fn polish<T: Real>(theta: &LaurentSeries<T>, mut z: C<T>) -> Option<C<T>> {
    let (tl, th) = theta.trust_window();
    let value_and_slope = |x: C<T>| {
        let mut v = C::new(T::zero(), T::zero());
        let mut d = v;
        for k in tl..=th {
            let c = theta.coeff(k);
            v += c * cpow(x, k);
            d += c * T::lit(k as f64) * cpow(x, k - 1);
        }
        (v, d)
    };
    for _ in 0..20 {
        let (v, d) = value_and_slope(z);
        if d.norm() == T::zero() || !d.norm().is_finite() {
            return None;
        }
        let step = v / d;
        z -= step;
        if !(z.norm().is_finite() && z.norm() > T::zero()) {
            return None;
        }
        if step.norm() <= T::epsilon() * T::lit(4.0) * z.norm() {
            break;
        }
    }
    Some(z)
}

/// `Theta_0` from three reference points on the unit circle away from the zeros;
/// the values must agree.
fn normalization<T: Real>(theta: &LaurentSeries<T>, p: &ModelParams<T>, zeros: &[C<T>]) -> Result<C<T>> {
    let mut values = Vec::new();
    for k in 0..16 {
        if values.len() == 3 {
            break;
        }
        let phi = T::lit(0.3 + 0.77 * k as f64);
        let x = C::from_polar(T::one(), phi);
        let near = zeros.iter().any(|z| {
            (-2i64..=2).any(|j| (x - *z * cpow(p.q, j)).norm() < T::lit(0.05))
        });
        if near {
            continue;
        }
        let num = theta.eval_checked(x, T::trust_rel())?;
        let den = zeros.iter().fold(one::<T>(), |acc, z| acc * theta_product(x, *z, p.q));
        values.push(num / den);
    }
    let first = *values.first().ok_or(Error::EmptyTrustWindow)?;
    for v in &values[1..] {
        let d = rel_diff(*v, first);
        if !(d < T::lit(THETA0_TOL)) {
            return Err(Error::NormalizationFailure { deviation: d.as_f64() });
        }
    }
    Ok(first)
}

/// Per zero: `|Theta(z)|` relative to the evaluation scale, and `|z Theta'(z)|`
/// (central difference) relative to the same scale.
pub fn zero_diagnostics<T: Real>(data: &ThetaData<T>) -> Result<Vec<(T, T)>> {
    data.zeros
        .iter()
        .map(|z| {
            let e = data.theta.eval(*z)?;
            let h = *z * T::lit(1e-5);
            let up = data.theta.eval(*z + h)?.value;
            let down = data.theta.eval(*z - h)?.value;
            let deriv = (up - down) / (h * T::lit(2.0));
            Ok((
                crate::scalar::ratio_or_zero(e.value.norm(), e.scale),
                crate::scalar::ratio_or_zero((deriv * *z).norm(), e.scale),
            ))
        })
        .collect()
}
