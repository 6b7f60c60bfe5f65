//! q-Pochhammer symbols: finite (any integer order), infinite, and truncated
//! series expansions of the infinite product.

use crate::error::{Error, Result};
use crate::qseries::series::{LaurentSeries, Tail};
use crate::scalar::{one, Real, C};

/// Absolute size below which a Pochhammer factor counts as vanishing.
pub fn pole_tolerance<T: Real>() -> T {
    T::epsilon().powf(T::lit(0.75))
}

/// `(a;q)_n`, with `(a;q)_n = 1 / prod_{k=n}^{-1} (1 - a q^k)` for negative `n`.
pub fn poch_finite<T: Real>(a: C<T>, q: C<T>, n: i64) -> Result<C<T>> {
    let mut acc = one::<T>();
    if n >= 0 {
        let mut aqk = a;
        for _ in 0..n {
            acc *= one::<T>() - aqk;
            aqk *= q;
        }
        return Ok(acc);
    }
    // each factor 1 - a q^-k is carried as (q^k - a) / q^k, which stays in range
    let mut w = one::<T>();
    for _ in 0..(-n) {
        w *= q;
        let f = w - a;
        if f.norm() < pole_tolerance::<T>() * w.norm() {
            return Err(Error::PoleHit { context: "(a;q)_n with n < 0", magnitude: (f.norm() / w.norm()).as_f64() });
        }
        acc *= w / f;
    }
    Ok(acc)
}

/// `(a;q)_n / (b;q)_n` assembled factor by factor, so that neither symbol is formed
/// on its own. A vanishing factor of `(b;q)_n` (n >= 0) or of `(a;q)_{|n|}`-type
/// denominators (n < 0) is a pole.
pub fn poch_ratio<T: Real>(a: C<T>, b: C<T>, q: C<T>, n: i64) -> Result<C<T>> {
    let mut acc = one::<T>();
    if n >= 0 {
        let (mut aq, mut bq) = (a, b);
        for _ in 0..n {
            let d = one::<T>() - bq;
            if d.norm() < pole_tolerance() {
                return Err(Error::PoleHit { context: "(b;q)_n", magnitude: d.norm().as_f64() });
            }
            acc *= (one::<T>() - aq) / d;
            aq *= q;
            bq *= q;
        }
        return Ok(acc);
    }
    let mut w = one::<T>();
    for _ in 0..(-n) {
        w *= q;
        let d = w - a;
        if d.norm() < pole_tolerance::<T>() * w.norm() {
            return Err(Error::PoleHit { context: "(a;q)_n with n < 0", magnitude: (d.norm() / w.norm()).as_f64() });
        }
        acc *= (w - b) / d;
    }
    Ok(acc)
}

/// Number of factors `poch_inf` multiplies for the given arguments.
pub fn poch_inf_terms<T: Real>(a: C<T>, q: C<T>) -> usize {
    let cutoff = T::epsilon() * T::lit(0.25);
    let aq = q.norm();
    let mut m = a.norm();
    let mut k = 0usize;
    while m > cutoff && k < 100_000 {
        m *= aq;
        k += 1;
    }
    k
}

/// `(a;q)_inf = prod_{k>=0} (1 - a q^k)` for `|q| < 1`, truncated once `|a q^k|`
/// drops below a quarter of machine epsilon.
pub fn poch_inf<T: Real>(a: C<T>, q: C<T>) -> C<T> {
    let n = poch_inf_terms(a, q);
    let mut acc = one::<T>();
    let mut aqk = a;
    for _ in 0..n {
        acc *= one::<T>() - aqk;
        aqk *= q;
    }
    acc
}

/// Variable of a series expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expansion {
    /// Powers of `x`.
    Ascending,
    /// Powers of `1/x`.
    Descending,
}

/// Expansion of `(a x^{+-1}; q)_inf` retaining the powers `0..=m` (Euler's
/// formula `sum_n (-1)^n q^{n(n-1)/2} a^n / (q;q)_n y^n`).
///
/// The omitted coefficients are bounded rigorously: for `n > m` consecutive
/// coefficients shrink by at most `|a| |q|^m / (1 - |q|^{m+1})`.
pub fn poch_inf_series<T: Real>(a: C<T>, q: C<T>, dir: Expansion, m: usize) -> LaurentSeries<T> {
    let mut coeffs = Vec::with_capacity(m + 1);
    let mut c = one::<T>();
    let mut qk = one::<T>(); // q^(n-1)
    coeffs.push(c);
    for _ in 1..=m {
        let qn = qk * q;
        c = c * (-(a * qk)) / (one::<T>() - qn);
        coeffs.push(c);
        qk = qn;
    }
    let aq = q.norm();
    let ratio = a.norm() * aq.powi(m as i32) / (T::one() - aq.powi(m as i32 + 1));
    let tail = if a.norm() == T::zero() {
        Tail::Closed
    } else {
        Tail::Open { bound: coeffs[m].norm() * ratio, ratio }
    };
    let eps = T::epsilon();
    let err: Vec<T> = coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| T::lit(4.0 * (n as f64 + 1.0)) * eps * c.norm())
        .collect();
    let mag: Vec<T> = coeffs.iter().map(|c| c.norm()).collect();
    let (lo, coeffs, err, mag, below, above) = match dir {
        Expansion::Ascending => (0, coeffs, err, mag, Tail::Closed, tail),
        Expansion::Descending => {
            let (mut coeffs, mut err, mut mag) = (coeffs, err, mag);
            coeffs.reverse();
            err.reverse();
            mag.reverse();
            (-(m as i64), coeffs, err, mag, tail, Tail::Closed)
        }
    };
    LaurentSeries::from_parts(lo, coeffs, err, mag, below, above)
        .expect("Euler coefficients carry only rounding error")
}

/// Jacobi theta product `(x/z;q)_inf (q z/x;q)_inf` with a zero at every `z q^k`.
pub fn theta_product<T: Real>(x: C<T>, z: C<T>, q: C<T>) -> C<T> {
    poch_inf(x / z, q) * poch_inf(q * z / x, q)
}
