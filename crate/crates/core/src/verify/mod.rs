//! Numerical checks of the bounds and lemmas: property sweeps, dominance
//! tests, the splitting tracker, unitary-group optimizers and exact
//! counting identities.

mod bounds;
mod counting;
mod dominance;
mod lemmas;
mod optimize;
mod random_protocol;
mod report;
mod splitting;

pub use bounds::{
    verify_first_pair_depolarization, verify_neg_fidelity, verify_pos_fidelity, verify_random_pair_measure_r,
    DEPOLARIZATION_VALUE, EXACT_VALUE,
};
pub use counting::{
    aggregate_identity, binary_pair_count, extended_pair_count, verify_counting, AggregateCheck, CountingCheck,
    CountingReport, RecombinationCheck,
};
pub use dominance::{check_dominance, check_measurement_consequence, DominanceReport};
pub use lemmas::{lemma_suite, LemmaReport, LemmaResult, LEMMA_NAMES};
pub use optimize::{
    optimize_0bit_depolarization, optimize_0bit_measure_r, zero_bit_value, OptimizationReport, OptimizerConfig,
    MAX_ANCILLAS, MAX_N,
};
pub use random_protocol::random_protocol;
pub use report::{BoundKind, BoundReport};
pub use splitting::{verify_splitting, NodeDominance, SeedSplitting, SplittingReport, Stage};
