//! Numerical certificates for the identities tying `Q`, `H`, `H'` and `Theta`
//! together, and for the bilateral sums they produce.

pub mod bilateral;
mod spectral;
mod sums;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{cpow, Real, C};

pub use bilateral::{bilateral_sum, BilateralSum, Weight};
pub use spectral::{bae2_check, hq_wronskian_check, reconstruct_q};
pub use sums::{onepsi1_check, rr_check, rr_lhs, rrgen_check, RrgenParams};

/// Where a residual was measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe<T: Real> {
    Point(C<T>),
    /// Coefficient of `x^power` in the given line of a series identity.
    Coefficient { line: u8, power: i64 },
    Zero(usize),
    /// Agreement between the values attached to two zeros.
    Pair(usize, usize),
    /// Point probe of one of several checks in a report.
    Check { check: u8, x: C<T> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContextValue<T: Real> {
    Complex(C<T>),
    Real(T),
    Integer(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport<T: Real> {
    pub name: String,
    pub residuals: Vec<(Probe<T>, T)>,
    pub tolerance: T,
    pub passed: bool,
    pub context: Vec<(String, ContextValue<T>)>,
    /// Left-hand sides of pointwise sums, kept for cross-checks between pathways.
    pub values: Vec<(Probe<T>, C<T>)>,
}

impl<T: Real> IdentityReport<T> {
    pub fn new(name: &str, tolerance: T) -> Self {
        Self {
            name: name.to_string(),
            residuals: Vec::new(),
            tolerance,
            passed: true,
            context: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn push(&mut self, probe: Probe<T>, residual: T) {
        self.residuals.push((probe, residual));
    }

    pub fn note(&mut self, key: &str, value: ContextValue<T>) {
        self.context.push((key.to_string(), value));
    }

    /// Sets `passed` from the residuals: every one finite and below tolerance.
    pub fn finish(mut self) -> Self {
        self.passed = self.residuals.iter().all(|(_, r)| *r < self.tolerance);
        self
    }

    pub fn max_residual(&self) -> T {
        self.residuals.iter().fold(T::zero(), |m, (_, r)| if r.is_nan() { T::infinity() } else { m.max(*r) })
    }

    pub fn context_value(&self, key: &str) -> Option<&ContextValue<T>> {
        self.context.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

/// `|a - b|` relative to the largest of the given term magnitudes.
pub(crate) fn combined_residual<T: Real>(a: C<T>, b: C<T>, terms: &[T]) -> T {
    let scale = terms.iter().fold(a.norm().max(b.norm()), |m, t| m.max(*t));
    crate::scalar::ratio_or_zero((a - b).norm(), scale)
}

/// Inner and outer radius of the probe annulus.
pub const PROBE_ANNULUS: (f64, f64) = (0.4, 1.6);
/// Probes closer than this to a q-shift of an avoided point are redrawn.
pub const PROBE_EXCLUSION: f64 = 1e-3;

/// `count` reproducible points in `0.4 < |x| < 1.6`, none within `1e-3` of any
/// `p q^j` for `p` in `avoid`.
pub fn sample_probes<T: Real>(count: usize, seed: u64, q: C<T>, avoid: &[C<T>]) -> Vec<C<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let lq = q.norm().ln().as_f64();
    let mut attempts = 0usize;
    while out.len() < count && attempts < 1000 * count.max(1) {
        attempts += 1;
        let r = rng.gen_range(PROBE_ANNULUS.0..PROBE_ANNULUS.1);
        let phi = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let x = C::new(T::lit(r * phi.cos()), T::lit(r * phi.sin()));
        let near = avoid.iter().filter(|p| p.norm() > T::zero()).any(|p| {
            let j0 = ((r / p.norm().as_f64()).ln() / lq).round() as i64;
            (j0 - 1..=j0 + 1).any(|j| (x - *p * cpow(q, j)).norm().as_f64() < PROBE_EXCLUSION)
        });
        if !near {
            out.push(x);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn probes_are_reproducible_and_avoid_orbits() {
        let q = cx::<f64>(0.5, 0.0);
        let avoid = [cx(0.7, 0.0), cx(-1.975, 0.0)];
        let a = sample_probes(50, 3, q, &avoid);
        let b = sample_probes(50, 3, q, &avoid);
        assert_eq!(a, b);
        for x in &a {
            assert!(x.norm() > 0.4 && x.norm() < 1.6);
            for p in &avoid {
                for j in -5..5 {
                    assert!((*x - *p * cpow(q, j)).norm() >= 1e-3);
                }
            }
        }
    }

    #[test]
    fn report_pass_rule() {
        let mut r = IdentityReport::<f64>::new("x", 1e-8);
        r.push(Probe::Zero(0), 1e-9);
        assert!(r.clone().finish().passed);
        r.push(Probe::Zero(1), f64::NAN);
        assert!(!r.finish().passed);
    }
}
