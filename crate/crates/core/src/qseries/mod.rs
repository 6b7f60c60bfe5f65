//! Truncated Laurent series and q-Pochhammer primitives.

mod pochhammer;
mod series;

pub use pochhammer::{
    poch_finite, poch_inf, poch_inf_series, poch_inf_terms, poch_ratio, pole_tolerance,
    theta_product, Expansion,
};
pub use series::{Evaluation, LaurentSeries, Tail};

/// Laurent polynomial `(c0 + c1 x)^n`.
pub fn binomial_power<T: crate::scalar::Real>(
    c0: crate::scalar::C<T>,
    c1: crate::scalar::C<T>,
    n: usize,
) -> LaurentSeries<T> {
    let lin = LaurentSeries::exact(0, vec![c0, c1]);
    lin.pow(n).expect("exact polynomials always multiply")
}
