//! Model parameters `(q, xi, omega, N, S)` and their regime checks.

use crate::error::{Error, Result};
use crate::scalar::{cpow, one, Real, C};

/// Nome `q`, inhomogeneity `xi`, field `omega`, chain length `n` and total spin `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T: Real> {
    pub q: C<T>,
    pub xi: C<T>,
    pub omega: C<T>,
    pub n: usize,
    pub s: usize,
}

impl<T: Real> ModelParams<T> {
    /// Validates the regime `|q| < 1`, `|xi| < 1`, `q != 0`, `omega != 0`, `n >= 1`.
    pub fn new(q: C<T>, xi: C<T>, omega: C<T>, n: usize, s: usize) -> Result<Self> {
        let p = Self { q, xi, omega, n, s };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |z: C<T>| z.re.is_finite() && z.im.is_finite();
        if !finite(self.q) || self.q.norm() >= T::one() || self.q.norm() == T::zero() {
            return Err(Error::InvalidParams {
                field: "q",
                reason: format!("need 0 < |q| < 1, got |q| = {}", self.q.norm()),
            });
        }
        if !finite(self.xi) || self.xi.norm() >= T::one() {
            return Err(Error::InvalidParams {
                field: "xi",
                reason: format!("need |xi| < 1, got |xi| = {}", self.xi.norm()),
            });
        }
        if !finite(self.omega) || self.omega.norm() == T::zero() {
            return Err(Error::InvalidParams {
                field: "omega",
                reason: "omega must be finite and nonzero".into(),
            });
        }
        if self.n == 0 {
            return Err(Error::InvalidParams {
                field: "n",
                reason: "chain length must be positive".into(),
            });
        }
        Ok(())
    }

    /// `q^S xi^N`.
    pub fn qs_xin(&self) -> C<T> {
        cpow(self.q, self.s as i64) * cpow(self.xi, self.n as i64)
    }

    /// `omega q^S xi^N`: the eigenvalue of the limiting transfer matrix that governs
    /// the forward series and product.
    pub fn twist(&self) -> C<T> {
        self.omega * self.qs_xin()
    }

    /// `omega^-1 q^S xi^N`, the mirrored counterpart.
    pub fn dual_twist(&self) -> C<T> {
        self.qs_xin() / self.omega
    }

    /// Gate for bilateral sums and semi-infinite matrix products.
    pub fn check_convergence(&self) -> Result<()> {
        let c = self.twist().norm();
        if c >= T::one() {
            return Err(Error::ConvergenceGate { which: "omega q^S xi^N", value: c.as_f64() });
        }
        let cp = self.dual_twist().norm();
        if cp >= T::one() {
            return Err(Error::ConvergenceGate { which: "omega^-1 q^S xi^N", value: cp.as_f64() });
        }
        Ok(())
    }

    /// Same model with `omega` replaced (used for homotopy continuation).
    pub fn with_omega(&self, omega: C<T>) -> Result<Self> {
        Self::new(self.q, self.xi, omega, self.n, self.s)
    }

    /// Required constant term `1 + omega q^S xi^N` of the transfer matrix.
    pub fn t_constant(&self) -> C<T> {
        one::<T>() + self.twist()
    }

    /// Required leading coefficient `(-1)^N (omega + q^S xi^N)` of the transfer matrix.
    pub fn t_leading(&self) -> C<T> {
        let v = self.omega + self.qs_xin();
        if self.n % 2 == 0 {
            v
        } else {
            -v
        }
    }
}
