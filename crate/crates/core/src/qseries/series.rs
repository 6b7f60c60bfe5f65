//! Truncated Laurent series over complex coefficients with explicit accuracy
//! bookkeeping.
//!
//! A [`LaurentSeries`] stores the coefficients of `x^lo .. x^hi` together with
//!
//! * `err[p]`: an absolute error estimate for the stored coefficient (rounding,
//!   propagated operand error and contributions of coefficients that were never
//!   stored),
//! * `mag[p]`: the magnitude of the terms that were combined into the coefficient,
//!   which is the scale every residual is measured against,
//! * a [`Tail`] on each side describing the coefficients beyond the stored window.
//!
//! The trust window is the maximal run of coefficients, around the largest
//! magnitude one, whose error estimate stays below [`Real::trust_rel`] times their
//! magnitude. Every arithmetic operation recomputes it deterministically from the
//! propagated estimates, so products shrink the window exactly where the partners'
//! untrusted or omitted coefficients reach.

use crate::error::{Error, Result};
use crate::scalar::{cpow, zero, Real, C};

/// Coefficients beyond one edge of the stored window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail<T> {
    /// The true series has no further coefficients on this side.
    Closed,
    /// The coefficient `d >= 1` steps past the edge is bounded by `bound * ratio^(d-1)`.
    Open { bound: T, ratio: T },
}

impl<T: Real> Tail<T> {
    pub fn is_open(&self) -> bool {
        matches!(self, Tail::Open { .. })
    }

    /// Estimated magnitude of the omitted coefficient `d` steps beyond the edge.
    pub fn at(&self, d: i64) -> T {
        match *self {
            Tail::Closed => T::zero(),
            Tail::Open { bound, ratio } => {
                if d < 1 || bound == T::zero() {
                    T::zero()
                } else if d == 1 {
                    bound
                } else {
                    bound * ratio.powi((d - 1) as i32)
                }
            }
        }
    }

    fn ratio(&self) -> T {
        match *self {
            Tail::Closed => T::zero(),
            Tail::Open { ratio, .. } => ratio,
        }
    }

    /// Sum over `d >= 1` of `at(d) * w^d`, infinite when the geometric factor is >= 1.
    fn weighted_sum(&self, w: T) -> T {
        match *self {
            Tail::Closed => T::zero(),
            Tail::Open { bound, ratio } => {
                if bound == T::zero() {
                    return T::zero();
                }
                let g = ratio * w;
                if g >= T::one() {
                    T::infinity()
                } else {
                    bound * w / (T::one() - g)
                }
            }
        }
    }

    fn scaled(&self, s: T, ratio_factor: T) -> Self {
        match *self {
            Tail::Closed => Tail::Closed,
            Tail::Open { bound, ratio } => Tail::Open { bound: bound * s, ratio: ratio * ratio_factor },
        }
    }

    fn merge(parts: &[(Tail<T>, T)]) -> Self {
        let mut any = false;
        let mut bound = T::zero();
        let mut ratio = T::zero();
        for (t, b) in parts {
            if t.is_open() {
                any = true;
                bound += *b;
                ratio = ratio.max(t.ratio());
            }
        }
        if any {
            Tail::Open { bound, ratio }
        } else {
            Tail::Closed
        }
    }
}

/// Value of a series at a point together with the accuracy estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T: Real> {
    pub value: C<T>,
    /// Bound on everything left out of `value`: coefficient errors, untrusted and
    /// omitted coefficients.
    pub tail: T,
    /// `sum |c_p| |x|^p` over the trusted coefficients.
    pub scale: T,
}

impl<T: Real> Evaluation<T> {
    pub fn relative_tail(&self) -> T {
        crate::scalar::ratio_or_zero(self.tail, self.scale.max(self.value.norm()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries<T: Real> {
    lo: i64,
    coeffs: Vec<C<T>>,
    err: Vec<T>,
    mag: Vec<T>,
    below: Tail<T>,
    above: Tail<T>,
    trust_lo: i64,
    trust_hi: i64,
}

impl<T: Real> LaurentSeries<T> {
    /// Builds a series from raw parts and computes its trust window.
    pub fn from_parts(
        lo: i64,
        coeffs: Vec<C<T>>,
        err: Vec<T>,
        mag: Vec<T>,
        below: Tail<T>,
        above: Tail<T>,
    ) -> Result<Self> {
        if coeffs.is_empty() || err.len() != coeffs.len() || mag.len() != coeffs.len() {
            return Err(Error::Shape(format!(
                "series parts of lengths {}/{}/{}",
                coeffs.len(),
                err.len(),
                mag.len()
            )));
        }
        let mut s = Self { lo, coeffs, err, mag, below, above, trust_lo: lo, trust_hi: lo };
        s.update_trust()?;
        Ok(s)
    }

    /// Exactly known Laurent polynomial `sum_k coeffs[k] x^(lo+k)`.
    pub fn exact(lo: i64, coeffs: Vec<C<T>>) -> Self {
        Self::truncated(lo, coeffs, Tail::Closed, Tail::Closed)
    }

    /// Stored coefficients taken as exact, with the given behaviour beyond the window.
    pub fn truncated(lo: i64, coeffs: Vec<C<T>>, below: Tail<T>, above: Tail<T>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        let mag = coeffs.iter().map(|c| c.norm()).collect::<Vec<_>>();
        let err = vec![T::zero(); coeffs.len()];
        Self::from_parts(lo, coeffs, err, mag, below, above)
            .expect("exact coefficients always have a trusted coefficient")
    }

    pub fn constant(c: C<T>) -> Self {
        Self::exact(0, vec![c])
    }

    pub fn one() -> Self {
        Self::constant(crate::scalar::one())
    }

    pub fn monomial(c: C<T>, power: i64) -> Self {
        Self::exact(power, vec![c])
    }

    /// Power series `sum_m c_m x^m` whose remaining coefficients follow `above`.
    pub fn power_series(coeffs: Vec<C<T>>, above: Tail<T>) -> Self {
        Self::truncated(0, coeffs, Tail::Closed, above)
    }

    /// Series `sum_m c_m x^-m` in the inverse variable, stored as a Laurent window
    /// `[-(len-1), 0]`, with the remaining coefficients following `below`.
    pub fn inverse_power_series(coeffs: Vec<C<T>>, below: Tail<T>) -> Self {
        let lo = -(coeffs.len() as i64 - 1);
        let mut rev = coeffs;
        rev.reverse();
        Self::truncated(lo, rev, below, Tail::Closed)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn below(&self) -> Tail<T> {
        self.below
    }

    pub fn above(&self) -> Tail<T> {
        self.above
    }

    /// Coefficient of `x^p`; zero outside the stored window.
    pub fn coeff(&self, p: i64) -> C<T> {
        self.index(p).map_or(zero(), |i| self.coeffs[i])
    }

    pub fn err_at(&self, p: i64) -> T {
        self.index(p).map_or(T::zero(), |i| self.err[i])
    }

    pub fn mag_at(&self, p: i64) -> T {
        self.index(p).map_or(T::zero(), |i| self.mag[i])
    }

    pub fn trust_window(&self) -> (i64, i64) {
        (self.trust_lo, self.trust_hi)
    }

    pub fn is_trusted(&self, p: i64) -> bool {
        p >= self.trust_lo && p <= self.trust_hi
    }

    fn index(&self, p: i64) -> Option<usize> {
        if p < self.lo || p > self.hi() {
            None
        } else {
            Some((p - self.lo) as usize)
        }
    }

    fn coefficient_ok(&self, i: usize) -> bool {
        let e = self.err[i];
        let m = self.mag[i];
        if !(e.is_finite() && m.is_finite() && self.coeffs[i].norm().is_finite()) {
            return false;
        }
        e <= T::trust_rel() * m
    }

    fn update_trust(&mut self) -> Result<()> {
        let n = self.coeffs.len();
        let mut best: Option<usize> = None;
        for i in 0..n {
            if self.coefficient_ok(i) && best.map_or(true, |b| self.mag[i] > self.mag[b]) {
                best = Some(i);
            }
        }
        let centre = best.ok_or(Error::EmptyTrustWindow)?;
        let mut a = centre;
        while a > 0 && self.coefficient_ok(a - 1) {
            a -= 1;
        }
        let mut b = centre;
        while b + 1 < n && self.coefficient_ok(b + 1) {
            b += 1;
        }
        self.trust_lo = self.lo + a as i64;
        self.trust_hi = self.lo + b as i64;
        Ok(())
    }

    /// Estimated magnitude of the true coefficient of `x^p` when `p` lies outside
    /// the stored window.
    fn omitted_at(&self, p: i64) -> T {
        if p > self.hi() {
            self.above.at(p - self.hi())
        } else if p < self.lo {
            self.below.at(self.lo - p)
        } else {
            T::zero()
        }
    }

    /// Contribution to coefficient `p` of `self * other` that involves at least one
    /// coefficient outside a stored window.
    fn truncation_into(&self, other: &Self, p: i64) -> T {
        let mut acc = T::zero();
        if self.above.is_open() || self.below.is_open() {
            for (j, (bm, be)) in other.mag.iter().zip(&other.err).enumerate() {
                let w = *bm + *be;
                if w == T::zero() {
                    continue;
                }
                acc += self.omitted_at(p - other.lo - j as i64) * w;
            }
        }
        if other.above.is_open() || other.below.is_open() {
            for (i, (am, ae)) in self.mag.iter().zip(&self.err).enumerate() {
                let w = *am + *ae;
                if w == T::zero() {
                    continue;
                }
                acc += other.omitted_at(p - self.lo - i as i64) * w;
            }
        }
        acc += cross_tail(self.above, self.hi(), other.below, other.lo, p);
        acc += cross_tail(other.above, other.hi(), self.below, self.lo, p);
        acc
    }

    /// Cauchy product. The trust window of the result reflects both operands'
    /// errors and the reach of their omitted coefficients.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let na = self.len();
        let nb = other.len();
        let lo = self.lo + other.lo;
        let len = na + nb - 1;
        let eps = T::epsilon();
        let mut coeffs = vec![zero(); len];
        let mut err = vec![T::zero(); len];
        let mut mag = vec![T::zero(); len];
        for (k, ((c, e), m)) in coeffs.iter_mut().zip(err.iter_mut()).zip(mag.iter_mut()).enumerate() {
            let i0 = k.saturating_sub(nb - 1);
            let i1 = k.min(na - 1);
            let mut sum = zero::<T>();
            let mut propagated = T::zero();
            let mut scale = T::zero();
            for i in i0..=i1 {
                let j = k - i;
                let a = self.coeffs[i];
                let b = other.coeffs[j];
                sum += a * b;
                scale += self.mag[i] * other.mag[j];
                propagated += a.norm() * other.err[j]
                    + self.err[i] * b.norm()
                    + self.err[i] * other.err[j];
            }
            let terms = T::lit((i1 - i0 + 3) as f64);
            *c = sum;
            *m = scale;
            *e = propagated + terms * eps * scale + self.truncation_into(other, lo + k as i64);
        }
        let hi = lo + len as i64 - 1;
        let above = if self.above.is_open() || other.above.is_open() {
            Tail::Open {
                bound: self.truncation_into(other, hi + 1),
                ratio: self.above.ratio().max(other.above.ratio()),
            }
        } else {
            Tail::Closed
        };
        let below = if self.below.is_open() || other.below.is_open() {
            Tail::Open {
                bound: self.truncation_into(other, lo - 1),
                ratio: self.below.ratio().max(other.below.ratio()),
            }
        } else {
            Tail::Closed
        };
        Self::from_parts(lo, coeffs, err, mag, below, above)
    }

    fn combine(&self, other: &Self, sign: T) -> Result<Self> {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let len = (hi - lo + 1) as usize;
        let eps = T::epsilon();
        let mut coeffs = Vec::with_capacity(len);
        let mut err = Vec::with_capacity(len);
        let mut mag = Vec::with_capacity(len);
        for p in lo..=hi {
            let a = self.coeff(p);
            let b = other.coeff(p) * sign;
            coeffs.push(a + b);
            mag.push(self.mag_at(p) + other.mag_at(p));
            err.push(
                self.err_at(p)
                    + other.err_at(p)
                    + eps * (a.norm() + b.norm())
                    + self.omitted_at(p)
                    + other.omitted_at(p),
            );
        }
        let above = Tail::merge(&[
            (self.above, self.omitted_at(hi + 1)),
            (other.above, other.omitted_at(hi + 1)),
        ]);
        let below = Tail::merge(&[
            (self.below, self.omitted_at(lo - 1)),
            (other.below, other.omitted_at(lo - 1)),
        ]);
        Self::from_parts(lo, coeffs, err, mag, below, above)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, T::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -T::one())
    }

    /// Multiplication by a complex constant.
    pub fn scale(&self, s: C<T>) -> Self {
        let a = s.norm();
        let eps = T::epsilon();
        let coeffs = self.coeffs.iter().map(|c| *c * s).collect::<Vec<_>>();
        let err = self
            .err
            .iter()
            .zip(&coeffs)
            .map(|(e, c)| *e * a + eps * c.norm())
            .collect();
        let mag = self.mag.iter().map(|m| *m * a).collect();
        let mut out = Self {
            lo: self.lo,
            coeffs,
            err,
            mag,
            below: self.below.scaled(a, T::one()),
            above: self.above.scaled(a, T::one()),
            trust_lo: self.trust_lo,
            trust_hi: self.trust_hi,
        };
        if out.update_trust().is_err() {
            // zero scaling: every coefficient is exactly zero
            out.trust_lo = self.trust_lo;
            out.trust_hi = self.trust_hi;
        }
        out
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.lo += k;
        out.trust_lo += k;
        out.trust_hi += k;
        out
    }

    /// Substitution `x -> lambda x`.
    pub fn dilate(&self, lambda: C<T>) -> Result<Self> {
        let la = lambda.norm();
        let eps = T::epsilon();
        let mut coeffs = Vec::with_capacity(self.len());
        let mut err = Vec::with_capacity(self.len());
        let mut mag = Vec::with_capacity(self.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let p = self.lo + i as i64;
            let f = cpow(lambda, p);
            let fa = la.powi(p as i32);
            let v = *c * f;
            coeffs.push(v);
            mag.push(self.mag[i] * fa);
            err.push(self.err[i] * fa + eps * T::lit((p.abs() + 2) as f64) * v.norm());
        }
        let above = self.above.scaled(la.powi((self.hi() + 1) as i32), la);
        let below = self.below.scaled(la.powi((self.lo - 1) as i32), T::one() / la);
        Self::from_parts(self.lo, coeffs, err, mag, below, above)
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, n: usize) -> Result<Self> {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Restricts the stored window to `[lo, hi]`; dropped coefficients are folded
    /// into the side tails.
    pub fn truncate(&self, lo: i64, hi: i64) -> Result<Self> {
        let lo = lo.max(self.lo);
        let hi = hi.min(self.hi());
        if lo > hi {
            return Err(Error::EmptyTrustWindow);
        }
        let fold = |range: Vec<i64>, existing: Tail<T>| -> Tail<T> {
            // range lists dropped powers ordered away from the new edge
            let mags: Vec<T> = range
                .iter()
                .map(|&p| self.coeff(p).norm() + self.err_at(p))
                .collect();
            if mags.is_empty() {
                return existing;
            }
            let mut ratio = existing.ratio();
            for w in mags.windows(2) {
                if w[0] > T::zero() {
                    ratio = ratio.max(w[1] / w[0]);
                } else if w[1] > T::zero() {
                    ratio = T::infinity();
                }
            }
            let mut bound = T::zero();
            for (d, m) in mags.iter().enumerate() {
                let denom = if d == 0 { T::one() } else { ratio.powi(d as i32) };
                if *m > T::zero() {
                    bound = bound.max(*m / denom);
                }
            }
            let beyond = existing.at(1);
            if beyond > T::zero() {
                let denom = ratio.powi(mags.len() as i32);
                bound = bound.max(beyond / denom);
            }
            Tail::Open { bound, ratio }
        };
        let above = if hi < self.hi() {
            fold(((hi + 1)..=self.hi()).collect(), self.above)
        } else {
            self.above
        };
        let below = if lo > self.lo {
            fold((self.lo..lo).rev().collect(), self.below)
        } else {
            self.below
        };
        let a = (lo - self.lo) as usize;
        let b = (hi - self.lo) as usize + 1;
        Self::from_parts(
            lo,
            self.coeffs[a..b].to_vec(),
            self.err[a..b].to_vec(),
            self.mag[a..b].to_vec(),
            below,
            above,
        )
    }

    /// Horner evaluation over the trust window plus a bound on everything omitted.
    pub fn eval(&self, x: C<T>) -> Result<Evaluation<T>> {
        let ax = x.norm();
        if ax == T::zero() && self.lo < 0 {
            return Err(Error::PoleHit { context: "series evaluation at x = 0", magnitude: 0.0 });
        }
        let (tl, th) = (self.trust_lo, self.trust_hi);
        // non-negative powers in x
        let mut pos = zero::<T>();
        let p_start = tl.max(0);
        if th >= p_start {
            for p in (p_start..=th).rev() {
                pos = pos * x + self.coeff(p);
            }
            pos *= cpow(x, p_start);
        }
        // negative powers in 1/x
        let mut neg = zero::<T>();
        let n_end = th.min(-1);
        if n_end >= tl {
            let u = crate::scalar::one::<T>() / x;
            for p in tl..=n_end {
                neg = neg * u + self.coeff(p);
            }
            neg *= cpow(u, -n_end);
        }
        let mut scale = T::zero();
        let mut tail = T::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let p = self.lo + i as i64;
            let w = ax.powi(p as i32);
            if self.is_trusted(p) {
                scale += c.norm() * w;
                tail += self.err[i] * w;
            } else {
                tail += (c.norm() + self.err[i]) * w;
            }
        }
        if self.above.is_open() {
            tail += self.above.weighted_sum(ax) * ax.powi(self.hi() as i32);
        }
        if self.below.is_open() {
            let inv = T::one() / ax;
            tail += self.below.weighted_sum(inv) * ax.powi(self.lo as i32);
        }
        tail += T::lit((self.len() + 2) as f64) * T::epsilon() * scale;
        Ok(Evaluation { value: pos + neg, tail, scale })
    }

    /// Evaluation that fails when the omitted part exceeds `rel_tol` of the value scale.
    pub fn eval_checked(&self, x: C<T>, rel_tol: T) -> Result<C<T>> {
        let e = self.eval(x)?;
        let scale = e.scale.max(e.value.norm());
        if !(e.tail <= rel_tol * scale) {
            return Err(Error::UntrustedEvaluation {
                tail: e.tail.as_f64(),
                tolerance: (rel_tol * scale).as_f64(),
            });
        }
        Ok(e.value)
    }

    /// `|c_p| / mag_p` for each trusted power, the residual profile of a series that
    /// should vanish identically.
    pub fn relative_residuals(&self) -> Vec<(i64, T)> {
        (self.trust_lo..=self.trust_hi)
            .map(|p| (p, crate::scalar::ratio_or_zero(self.coeff(p).norm(), self.mag_at(p))))
            .collect()
    }
}

/// Contribution to power `p` from products of two omitted coefficients: one past
/// the upper edge `hi_a` of `a`, one past the lower edge `lo_b` of `b`.
fn cross_tail<T: Real>(a: Tail<T>, hi_a: i64, b: Tail<T>, lo_b: i64, p: i64) -> T {
    let (Tail::Open { bound: ba, ratio: ra }, Tail::Open { bound: bb, ratio: rb }) = (a, b) else {
        return T::zero();
    };
    if ba == T::zero() || bb == T::zero() {
        return T::zero();
    }
    // (hi_a + d1) + (lo_b - d2) = p with d1, d2 >= 1
    let delta = p - hi_a - lo_b;
    let d2_min = 1.max(1 - delta);
    let g = ra * rb;
    if g >= T::one() {
        return T::infinity();
    }
    let d1_min = d2_min + delta;
    ba * bb * ra.powi((d1_min - 1) as i32) * rb.powi((d2_min - 1) as i32) / (T::one() - g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type S = LaurentSeries<f64>;

    fn geometric(q: f64, m: usize) -> S {
        let coeffs = (0..=m).map(|k| cx(q.powi(k as i32), 0.0)).collect();
        S::power_series(coeffs, Tail::Open { bound: q.abs().powi(m as i32 + 1), ratio: q.abs() })
    }

    #[test]
    fn polynomial_product_is_exact() {
        let a = S::exact(0, vec![cx(1.0, 0.0), cx(1.0, 0.0)]);
        let b = S::exact(0, vec![cx(1.0, 0.0), cx(-1.0, 0.0)]);
        let c = a.mul(&b).unwrap();
        assert_eq!(c.coeffs(), &[cx(1.0, 0.0), cx(0.0, 0.0), cx(-1.0, 0.0)]);
        assert_eq!(c.trust_window(), (0, 2));
    }

    #[test]
    fn multiplying_by_one_keeps_window() {
        let a = geometric(0.5, 20);
        let c = a.mul(&S::one()).unwrap();
        assert_eq!(c.coeffs(), a.coeffs());
        assert_eq!(c.trust_window(), a.trust_window());
    }

    #[test]
    fn geometric_product_matches_closed_form_on_trust_window() {
        let q = 0.5;
        let a = geometric(q, 64);
        let b = geometric(-q, 64);
        let c = a.mul(&b).unwrap();
        let (tl, th) = c.trust_window();
        assert_eq!(tl, 0);
        // coefficients past the shorter truncation see omitted terms
        assert_eq!(th, 64);
        for p in tl..=th {
            let expect = if p % 2 == 0 { (q * q).powi((p / 2) as i32) } else { 0.0 };
            assert!((c.coeff(p) - cx(expect, 0.0)).norm() < 1e-12, "p={p}");
        }
        assert!(!c.is_trusted(80));
    }

    #[test]
    fn eval_geometric_series() {
        let s = geometric(1.0, 64);
        // 1/(1-x) at 0.25; the "tail" is unbounded for ratio 1 so use a proper bound
        let s = S::power_series(s.coeffs().to_vec(), Tail::Open { bound: 1.0, ratio: 1.0 });
        let e = s.eval(cx(0.25, 0.0)).unwrap();
        assert!((e.value - cx(4.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(e.tail < 1e-13);
        assert!(matches!(
            s.eval_checked(cx(2.0, 0.0), 1e-8),
            Err(Error::UntrustedEvaluation { .. })
        ));
    }

    #[test]
    fn eval_constant_and_laurent() {
        let one = S::one();
        assert_eq!(one.eval(cx(0.3, 7.0)).unwrap().value, cx(1.0, 0.0));
        let s = S::exact(-2, vec![cx(1.0, 0.0), cx(2.0, 0.0), cx(3.0, 0.0), cx(4.0, 0.0)]);
        let x = cx(0.7, -0.2);
        let direct = x.powi(-2) + x.powi(-1) * 2.0 + cx(3.0, 0.0) + x * 4.0;
        assert!((s.eval(x).unwrap().value - direct).norm() < 1e-14);
        assert!(matches!(s.eval(cx(0.0, 0.0)), Err(Error::PoleHit { .. })));
    }

    #[test]
    fn dilation_and_shift() {
        let s = S::exact(-1, vec![cx(1.0, 0.0), cx(2.0, 0.0), cx(3.0, 0.0)]);
        let d = s.dilate(cx(2.0, 0.0)).unwrap();
        assert_eq!(d.coeffs(), &[cx(0.5, 0.0), cx(2.0, 0.0), cx(6.0, 0.0)]);
        let sh = s.shift(3);
        assert_eq!((sh.lo(), sh.hi()), (2, 4));
        assert_eq!(sh.trust_window(), (2, 4));
    }

    #[test]
    fn subtraction_residual_profile() {
        let a = geometric(0.5, 30);
        let r = a.sub(&a).unwrap();
        assert!(r.relative_residuals().iter().all(|(_, v)| *v == 0.0));
    }

    #[test]
    fn empty_window_is_reported() {
        let s = S::from_parts(
            0,
            vec![cx(1.0, 0.0)],
            vec![1.0],
            vec![1.0],
            Tail::Closed,
            Tail::Closed,
        );
        assert_eq!(s.unwrap_err(), Error::EmptyTrustWindow);
    }

    #[test]
    fn truncate_folds_tail() {
        let a = geometric(0.5, 40);
        let t = a.truncate(0, 10).unwrap();
        assert_eq!(t.hi(), 10);
        match t.above() {
            Tail::Open { bound, ratio } => {
                assert!((bound - 0.5f64.powi(11)).abs() < 1e-18);
                assert!((ratio - 0.5).abs() < 1e-12);
            }
            Tail::Closed => panic!("tail must stay open"),
        }
    }
}
