//! One-way LOCC protocols: representation, builders and exact execution.

mod builders;
mod eval;
mod op;
mod protocol;
mod run;
mod spec;

pub use builders::{
    decode_hashes, make_first_pair, make_random_pair, make_random_permutation, make_simple_random_hash,
    make_simple_random_hash_with, parity_permutation, permutations, qubit_permutation, HashFamily,
};
pub use eval::{conditional_fidelity, evaluate_model, protocol_fidelity, ModelEvaluation, StateEvaluation};
pub use op::{Keyed, Operation};
pub use protocol::{AcceptRule, OutputPair, Protocol, Step};
pub use run::{
    ideal_success_probability, run, run_with, LeafRecord, NodeRecord, RunOptions, RunResult, SeedRun, Transcript,
};
pub use spec::{AcceptKind, AcceptSpec, AncillaSpec, OutputSpec, ProtocolSpec, RoundKind, RoundSpec};
