//! The measure-r, depolarization and fidelity error models.
//!
//! Measure-r is carried as its explicit finite set of error states; the
//! worst case is the minimum over that set. Mixtures are kept as weighted
//! lists and collapsed only when a caller needs a single matrix.

mod bits;
mod depolar;
mod extended;
mod indicator;
mod model;

pub use bits::{binomial, combinations, BitString};
pub use depolar::{
    binomial_recombination, depolarization_pure_ensemble, depolarization_state, depolarize, depolarized_pair,
    depolarizing_kraus, ensemble_density, random_corrupt_ensemble,
};
pub use extended::{
    count_consistent_extended, discrepancy, enumerate_extended, extended_error_state, ExtendedIndicatorVector,
};
pub use indicator::{consistent, enumerate_indicators, error_state, IndicatorVector, MAX_ENUMERATION_N};
pub use model::{epsilon_prime, fidelity_model_samples, fidelity_witness, ErrorModel, ModelState};

use crate::qcore::PureState;
use crate::Result;

/// Uniform mixture over all `2^r · C(n, r)` measure-r error states.
pub fn measure_r_ensemble(n: usize, r: usize) -> Result<Vec<(f64, PureState)>> {
    let vs = enumerate_indicators(n, r)?;
    let w = 1.0 / vs.len() as f64;
    vs.iter().map(|v| Ok((w, error_state(v)?))).collect()
}
