//! Exact protocol values checked against the closed-form bounds.

use super::report::{BoundKind, BoundReport};
use crate::errmodels::{fidelity_witness, ErrorModel};
use crate::locc::{
    ideal_success_probability, make_first_pair, make_random_pair, make_simple_random_hash, protocol_fidelity, run,
    Protocol,
};
use crate::qcore::AnyState;
use crate::{tolerance, Result};

/// Agreement required between an exact protocol value and its closed form.
pub const EXACT_VALUE: f64 = 1e-12;
pub const DEPOLARIZATION_VALUE: f64 = 1e-10;

/// `F^c(ρ₀) ≤ 1 − εp/2^{s+1}` for `protocol`, where `p` is its success
/// probability on `Ψ_n`, `s` its number of message rounds and `ρ₀` the
/// fidelity-model witness.
pub fn verify_neg_fidelity(protocol: &Protocol, epsilon: f64) -> Result<BoundReport> {
    let p = ideal_success_probability(protocol)?;
    let s = protocol.bits();
    let witness = fidelity_witness(protocol.n, epsilon)?;
    let fc = run(protocol, &AnyState::Mixed(witness))?.conditional_fidelity()?;
    let bound = 1.0 - epsilon * p / (1u64 << (s + 1)) as f64;
    Ok(
        BoundReport::new("neg_fidelity", BoundKind::Upper, bound, fc, tolerance::DERIVED)
            .param("protocol", &protocol.name)
            .param("n", protocol.n)
            .param("s", s)
            .param("epsilon", epsilon)
            .param("p", p),
    )
}

/// `F^c(ρ₀) ≥ 1 − 2^{−s}/(1 − ε)` for the `s`-round simple random hash.
pub fn verify_pos_fidelity(n: usize, s: usize, epsilon: f64) -> Result<BoundReport> {
    let protocol = make_simple_random_hash(n, s)?;
    let witness = fidelity_witness(n, epsilon)?;
    let fc = run(&protocol, &AnyState::Mixed(witness))?.conditional_fidelity()?;
    let bound = 1.0 - (0.5f64).powi(s as i32) / (1.0 - epsilon);
    Ok(
        BoundReport::new("pos_fidelity", BoundKind::Achievability, bound, fc, tolerance::DERIVED)
            .param("protocol", &protocol.name)
            .param("n", n)
            .param("s", s)
            .param("epsilon", epsilon),
    )
}

/// The random-pair protocol's fidelity over the measure-r model equals
/// `1 − r/2n`.
pub fn verify_random_pair_measure_r(n: usize, r: usize) -> Result<BoundReport> {
    let f = protocol_fidelity(&make_random_pair(n)?, &ErrorModel::MeasureR { n, r })?;
    let bound = 1.0 - r as f64 / (2 * n) as f64;
    Ok(
        BoundReport::new("neg_measure_r_tight", BoundKind::Exact, bound, f, EXACT_VALUE)
            .param("n", n)
            .param("r", r),
    )
}

/// Keeping the first pair over the depolarization model has fidelity
/// `1 − 3p/4`.
pub fn verify_first_pair_depolarization(n: usize, p: f64) -> Result<BoundReport> {
    let f = protocol_fidelity(&make_first_pair(n)?, &ErrorModel::Depolarization { n, p })?;
    let bound = 1.0 - 0.75 * p;
    Ok(BoundReport::new(
        "first_pair_depolarization",
        BoundKind::Exact,
        bound,
        f,
        DEPOLARIZATION_VALUE,
    )
    .param("n", n)
    .param("p", p))
}
