//! Exact dense simulation of two-party LOCC entanglement distillation
//! protocols, together with numerical checks of their fidelity and
//! communication bounds.
//!
//! The crate is split into four layers:
//!
//! * [`qcore`]: bipartite states, local operators, partial traces and the
//!   fidelity notions used throughout (squared convention).
//! * [`errmodels`]: the measure-r, depolarization and fidelity error models,
//!   with their indicator-vector machinery.
//! * [`locc`]: protocols as rounds of local instruments that each emit one
//!   classical bit, evaluated by exact transcript-tree enumeration.
//! * [`verify`]: dominance checks, the splitting tracker, unitary-group
//!   optimizers probing bound tightness, lemma sweeps and counting identities.

pub mod errmodels;
mod error;
pub mod locc;
pub mod qcore;
pub mod seed;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
