use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Numerical and validation failures raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },

    #[error("convergence gate failed: |{which}| = {value:.6e} >= 1")]
    ConvergenceGate { which: &'static str, value: f64 },

    #[error("no certifiable coefficient in the result window")]
    EmptyTrustWindow,

    #[error("pole hit in {context}: |factor| = {magnitude:.3e}")]
    PoleHit { context: &'static str, magnitude: f64 },

    #[error("untrusted evaluation: tail estimate {tail:.3e} exceeds tolerance {tolerance:.3e}")]
    UntrustedEvaluation { tail: f64, tolerance: f64 },

    #[error("degenerate Bethe roots {first} and {second}")]
    DegenerateRoots { first: usize, second: usize },

    #[error("Bethe root search failed after {attempts} seed(s)")]
    RootFindFailure { attempts: usize },

    #[error("division of the TQ numerator by Q left remainder {max_relative:.3e}")]
    NonVanishingRemainder { max_relative: f64 },

    #[error("transfer matrix coefficient {which} deviates from its required value by {deviation:.3e}")]
    StructureViolation { which: &'static str, deviation: f64 },

    #[error("resonant recursion denominator at order {order}: |D| = {magnitude:.3e}")]
    Resonance { order: usize, magnitude: f64 },

    #[error("matrix product ratios did not converge within {steps} steps")]
    NonConvergentProduct { steps: usize },

    #[error("expected {expected} theta zero orbits in the fundamental annulus, found {found}")]
    ZeroCountMismatch { expected: usize, found: usize },

    #[error("no integer q-shift normalizes the zero product (deviation {deviation:.3e})")]
    NormalizationFailure { deviation: f64 },

    #[error("probe ({re}, {im}) sits at a zero of Theta")]
    ProbeAtPole { re: f64, im: f64 },

    #[error("vanishing denominator at theta zero #{index}")]
    ZeroDenominator { index: usize },

    #[error("bilateral sum tail not certified up to K = {k}")]
    NonConvergentTail { k: usize },

    #[error("outside the bilateral convergence region: {reason}")]
    RegionViolation { reason: String },

    #[error("eigenvalue iteration did not converge for a degree-{degree} polynomial")]
    EigenFailure { degree: usize },

    #[error("input length mismatch: {0}")]
    Shape(String),
}

impl Error {
    /// Failures caused by the numerics (as opposed to bad input or failed identities).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidParams { .. } | Error::Shape(_))
    }
}
