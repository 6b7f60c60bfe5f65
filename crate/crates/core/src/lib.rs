//! Baxter TQ equations for the XXZ-type chain with `|q| < 1`: Bethe roots, the
//! `H`/`H'` series, their Wronskian theta function and the bilateral q-series
//! identities that follow from them.
//!
//! Numerical code is generic over the real type (`f32` or `f64`); the aliases
//! below fix it to `f64` for everyday use.

pub mod bethe;
pub mod cli;
pub mod error;
pub mod hfun;
pub mod identities;
pub mod linalg;
pub mod params;
pub mod qseries;
pub mod scalar;
pub mod wronskian;

pub use error::{Error, Result};

pub type Complex64 = num_complex::Complex<f64>;
pub type Series64 = qseries::LaurentSeries<f64>;
pub type Series32 = qseries::LaurentSeries<f32>;
pub type Params64 = params::ModelParams<f64>;
pub type BetheState64 = bethe::BetheState<f64>;
pub type HPair64 = hfun::HPair<f64>;
pub type ThetaData64 = wronskian::ThetaData<f64>;
pub type IdentityReport64 = identities::IdentityReport<f64>;
