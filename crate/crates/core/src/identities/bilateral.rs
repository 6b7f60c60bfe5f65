//! Bilateral sums
//!
//! ```text
//! sum_n z^n prod_k (A_k; q)_n / (B_k; q)_n f(q^n x)
//! ```
//!
//! built term by term from neighbour ratios in both directions, so negative orders
//! use the factors `1 - a q^-j` of `(a;q)_{-n}` (each scaled by `q^j`) and no
//! infinite-product quotient is ever formed.

use crate::bethe::BetheState;
use crate::error::{Error, Result};
use crate::qseries::pole_tolerance;
use crate::scalar::{cpow, one, zero, Real, C};

pub const K_START: usize = 40;
pub const K_BUDGET: usize = 320;
/// Each of the last five terms on a side must stay below this fraction of the sum.
pub const TAIL_REL: f64 = 1e-12;

/// The function `f` multiplying each term.
#[derive(Debug, Clone, Copy)]
pub enum Weight<'a, T: Real> {
    /// `f = 1`.
    Unit,
    /// `f(x) = 1 / (Q(x/q) Q(x))`.
    Bethe(&'a BetheState<T>),
}

impl<T: Real> Weight<'_, T> {
    pub fn name(&self) -> &'static str {
        match self {
            Weight::Unit => "unit",
            Weight::Bethe(_) => "bethe",
        }
    }
}

/// Values `Q(q^j x)` computed once per index, with a pole check relative to the
/// size of the terms of `Q`. Past `|y| = 1` the cache holds `Q(y) / y^S =
/// prod_k (1/y - 1/x_k)` instead, so that deep negative orders never overflow.
struct QCache<'a, T: Real> {
    state: &'a BetheState<T>,
    x: C<T>,
    q: C<T>,
    /// `(value, reduced)` per index.
    values: std::collections::BTreeMap<i64, (C<T>, bool)>,
}

impl<T: Real> QCache<'_, T> {
    fn at(&mut self, j: i64) -> Result<(C<T>, bool)> {
        if let Some(v) = self.values.get(&j) {
            return Ok(*v);
        }
        let w = cpow(self.q, -j) / self.x;
        let (v, scale, reduced) = if w.norm() >= T::one() {
            let y = self.x * cpow(self.q, j);
            let scale = self
                .state
                .q_coeffs
                .iter()
                .enumerate()
                .fold(T::zero(), |m, (i, c)| m + c.norm() * y.norm().powi(i as i32));
            (self.state.q_at(y), scale, false)
        } else {
            self.state.roots.iter().fold((one::<T>(), T::one()), |(v, s), r| {
                let inv = one::<T>() / *r;
                (v * (w - inv), s * (w.norm() + inv.norm()))
            })
            .into_reduced()
        };
        if v.norm() < pole_tolerance::<T>() * scale {
            return Err(Error::PoleHit { context: "Q(q^n x) in the bilateral sum", magnitude: v.norm().as_f64() });
        }
        self.values.insert(j, (v, reduced));
        Ok((v, reduced))
    }

    fn y_pow_s(&self, j: i64) -> C<T> {
        cpow(self.x * cpow(self.q, j), self.state.roots.len() as i64)
    }

    fn value(&mut self, j: i64) -> Result<C<T>> {
        let (v, reduced) = self.at(j)?;
        Ok(if reduced { v * self.y_pow_s(j) } else { v })
    }

    /// `Q(q^i x) / Q(q^j x)`.
    fn ratio(&mut self, i: i64, j: i64) -> Result<C<T>> {
        let (vi, ri) = self.at(i)?;
        let (vj, rj) = self.at(j)?;
        let s = self.state.roots.len() as i64;
        Ok(match (ri, rj) {
            (false, false) => vi / vj,
            (true, true) => vi / vj * cpow(cpow(self.q, i - j), s),
            (true, false) => vi * self.y_pow_s(i) / vj,
            (false, true) => vi / (vj * self.y_pow_s(j)),
        })
    }
}

trait IntoReduced<T: Real> {
    fn into_reduced(self) -> (C<T>, T, bool);
}

impl<T: Real> IntoReduced<T> for (C<T>, T) {
    fn into_reduced(self) -> (C<T>, T, bool) {
        (self.0, self.1, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilateralSum<T: Real> {
    pub value: C<T>,
    /// `sum |T_n|` over the terms used.
    pub magnitude: T,
    /// Terms used on each side.
    pub k: usize,
}

/// One side of the sum: `terms[n - 1]` is `T_{+-n}`.
struct Side<T: Real> {
    terms: Vec<C<T>>,
    /// The Pochhammer ratio vanished: every further term is exactly zero.
    terminated: bool,
    /// The terms fell below `sqrt(MIN_POSITIVE) |T_0|` while decreasing; further
    /// factors would overflow `q^n` long before they could matter.
    negligible: bool,
}

impl<T: Real> Side<T> {
    fn new() -> Self {
        Self { terms: Vec::new(), terminated: false, negligible: false }
    }

    fn done(&self) -> bool {
        self.terminated || self.negligible
    }

    /// Marks the side negligible once its last five terms decrease strictly and
    /// sit below the underflow guard.
    fn settle(&mut self, t0: C<T>) {
        let n = self.terms.len();
        if n < 5 {
            return;
        }
        let last = &self.terms[n - 5..];
        let guard = T::min_positive_value().sqrt() * t0.norm();
        if last[4].norm() < guard && last.windows(2).all(|w| w[1].norm() < w[0].norm() || w[1].norm() == T::zero()) {
            self.negligible = true;
        }
    }

    fn certified(&self, k: usize, total: T) -> bool {
        if self.done() && self.terms.len() < k {
            return true;
        }
        if k < 5 {
            return false;
        }
        let last = &self.terms[k - 5..k];
        let limit = T::lit(TAIL_REL) * total;
        last.iter().all(|t| t.norm() < limit)
            && last.windows(2).all(|w| w[1].norm() < w[0].norm() || w[1].norm() == T::zero())
    }

    fn sum(&self, k: usize) -> C<T> {
        self.terms.iter().take(k).rev().fold(zero(), |acc, t| acc + *t)
    }

    fn magnitude(&self, k: usize) -> T {
        self.terms.iter().take(k).fold(T::zero(), |acc, t| acc + t.norm())
    }
}

fn vanishes<T: Real>(f: C<T>) -> bool {
    f.norm() < pole_tolerance::<T>()
}

/// Evaluates the sum with `K = k_start, 2 k_start, ...` terms per side until the
/// tail criterion holds on both sides, failing past `k_max`.
pub fn bilateral_sum<T: Real>(
    a_args: &[C<T>],
    b_args: &[C<T>],
    z: C<T>,
    q: C<T>,
    weight: Weight<'_, T>,
    x: C<T>,
    k_start: usize,
    k_max: usize,
) -> Result<BilateralSum<T>> {
    if a_args.len() != b_args.len() {
        return Err(Error::Shape("numerator and denominator parameter lists differ in length".into()));
    }
    let mut cache = match weight {
        Weight::Bethe(state) => Some(QCache { state, x, q, values: Default::default() }),
        Weight::Unit => None,
    };
    // f(q^n x) = 1 / (Q(q^(n-1) x) Q(q^n x))
    let t0 = match cache.as_mut() {
        Some(c) => one::<T>() / (c.value(-1)? * c.value(0)?),
        None => one(),
    };
    let mut pos = Side::new();
    let mut neg = Side::new();
    let mut k = k_start.max(5).min(k_max.max(5));
    loop {
        extend_forward(&mut pos, t0, a_args, b_args, z, q, cache.as_mut(), k)?;
        extend_backward(&mut neg, t0, a_args, b_args, z, q, cache.as_mut(), k)?;
        let value = t0 + pos.sum(k) + neg.sum(k);
        let total = value.norm();
        if pos.certified(k, total) && neg.certified(k, total) {
            return Ok(BilateralSum {
                value,
                magnitude: t0.norm() + pos.magnitude(k) + neg.magnitude(k),
                k,
            });
        }
        if k >= k_max {
            return Err(Error::NonConvergentTail { k });
        }
        k = (k * 2).min(k_max);
    }
}

#[allow(clippy::too_many_arguments)]
fn extend_forward<T: Real>(
    side: &mut Side<T>,
    t0: C<T>,
    a: &[C<T>],
    b: &[C<T>],
    z: C<T>,
    q: C<T>,
    mut cache: Option<&mut QCache<'_, T>>,
    k: usize,
) -> Result<()> {
    while side.terms.len() < k && !side.done() {
        let n = side.terms.len() as i64;
        let prev = side.terms.last().copied().unwrap_or(t0);
        let qn = cpow(q, n);
        let mut factor = z;
        for (ak, bk) in a.iter().zip(b) {
            let den = one::<T>() - *bk * qn;
            if vanishes(den) {
                return Err(Error::PoleHit { context: "(B;q)_n in the bilateral sum", magnitude: den.norm().as_f64() });
            }
            let num = one::<T>() - *ak * qn;
            if vanishes(num) {
                side.terminated = true;
            }
            factor *= num / den;
        }
        if side.terminated {
            break;
        }
        if let Some(c) = cache.as_deref_mut() {
            // f(q^(n+1) x) / f(q^n x) = Q(q^(n-1) x) / Q(q^(n+1) x)
            factor *= c.ratio(n - 1, n + 1)?;
        }
        side.terms.push(prev * factor);
        side.settle(t0);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn extend_backward<T: Real>(
    side: &mut Side<T>,
    t0: C<T>,
    a: &[C<T>],
    b: &[C<T>],
    z: C<T>,
    q: C<T>,
    mut cache: Option<&mut QCache<'_, T>>,
    k: usize,
) -> Result<()> {
    while side.terms.len() < k && !side.done() {
        // from T_n to T_(n-1), n = -len
        let n = -(side.terms.len() as i64);
        let prev = side.terms.last().copied().unwrap_or(t0);
        // (1 - B q^(n-1)) / (1 - A q^(n-1)) with both factors multiplied by w = q^(1-n),
        // which stays small where q^(n-1) would overflow
        let w = cpow(q, 1 - n);
        let unit = w.norm();
        let mut factor = one::<T>() / z;
        for (ak, bk) in a.iter().zip(b) {
            let den = w - *ak;
            if den.norm() < pole_tolerance::<T>() * unit {
                return Err(Error::PoleHit {
                    context: "(A;q)_n with n < 0 in the bilateral sum",
                    magnitude: (den.norm() / unit).as_f64(),
                });
            }
            let num = w - *bk;
            if num.norm() < pole_tolerance::<T>() * unit {
                side.terminated = true;
            }
            factor *= num / den;
        }
        if side.terminated {
            break;
        }
        if let Some(c) = cache.as_deref_mut() {
            // f(q^(n-1) x) / f(q^n x) = Q(q^n x) / Q(q^(n-2) x)
            factor *= c.ratio(n, n - 2)?;
        }
        side.terms.push(prev * factor);
        side.settle(t0);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{poch_finite, poch_ratio};
    use crate::scalar::cx;

    type Z = C<f64>;

    #[test]
    fn terms_match_direct_pochhammer_ratios() {
        let a: Z = cx(0.9, 0.1);
        let b: Z = cx(0.2, -0.05);
        let z: Z = cx(0.5, 0.0);
        let q: Z = cx(0.5, 0.0);
        let s = bilateral_sum(&[a], &[b], z, q, Weight::Unit, cx(1.0, 0.0), 40, 320).unwrap();
        let mut direct = Z::new(0.0, 0.0);
        for n in -(s.k as i64)..=s.k as i64 {
            direct += poch_ratio(a, b, q, n).unwrap() * cpow(z, n);
        }
        assert!((s.value - direct).norm() < 1e-13 * s.magnitude);
        // the n < 0 factors agree with the reciprocal definition
        let r = poch_finite(a, q, -3).unwrap() / poch_finite(b, q, -3).unwrap();
        assert!((r - poch_ratio(a, b, q, -3).unwrap()).norm() < 1e-13 * r.norm());
    }

    #[test]
    fn terminating_negative_side() {
        let q: Z = cx(0.5, 0.0);
        let s = bilateral_sum(&[cx(0.2, 0.0)], &[q], cx(0.5, 0.0), q, Weight::Unit, cx(1.0, 0.0), 40, 320)
            .unwrap();
        assert!(s.value.norm() > 0.0);
    }

    #[test]
    fn divergent_side_is_reported() {
        let q: Z = cx(0.5, 0.0);
        let r = bilateral_sum(&[cx(0.4, 0.0)], &[cx(3.0, 0.0)], cx(0.1, 0.0), q, Weight::Unit, cx(1.0, 0.0), 40, 160);
        assert!(matches!(r, Err(Error::NonConvergentTail { .. })));
    }
}
