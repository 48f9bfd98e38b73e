//! Dense complex linear algebra for bipartite qubit systems.
//!
//! Layout: a state on `n_alice + n_bob` qubits is indexed so that
//! `|x⟩^A |y⟩^B` sits at `x * 2^n_bob + y`. Within a block, qubit 0 is the
//! most significant bit, so pair `j` is (Alice qubit `j`, Bob qubit `j`) and
//! `Ψ_n = (Φ+)^{⊗n}` has amplitude `2^{-n/2}` wherever the two blocks agree.
//!
//! Fidelity follows the squared convention `F(ρ, σ) = Tr²√(√ρ σ √ρ)`, which
//! reduces to `⟨φ|ρ|φ⟩` for a pure `σ`. This is the square of the textbook
//! (Nielsen–Chuang) fidelity; only the squared form is exposed.

mod fidelity;
pub mod kernel;
pub mod linalg;
mod pauli;
pub mod random;
pub mod serde_matrix;
mod state;

pub use fidelity::{base_fidelity, epr_fidelity, fidelity, fidelity_with_pure, pair_fidelity, phi_plus_overlap};
pub use pauli::{
    bell_action, bell_identity_check, bell_table_self_test, pauli_deviation_sum, BellState, Pauli, UnitaryOp,
};
pub(crate) use state::partial_trace_matrix;
pub use state::{tensor, AnyState, Bipartite, DensityMatrix, PureState};

use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

/// Default cap on the total number of simulated qubits.
pub const DEFAULT_MAX_QUBITS: usize = 14;

/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "EDPLAB_MAX_QUBITS";

/// Current qubit capacity, honouring `EDPLAB_MAX_QUBITS`.
pub fn max_qubits() -> usize {
    std::env::var(MAX_QUBITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0 && v < 30)
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

pub(crate) fn check_capacity(total_qubits: usize) -> Result<()> {
    let limit = max_qubits();
    if total_qubits > limit {
        return Err(Error::Capacity {
            requested: total_qubits,
            limit,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Party::Alice => f.write_str("alice"),
            Party::Bob => f.write_str("bob"),
        }
    }
}

/// A qubit addressed by owner and position inside the owner's block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Qubit {
    pub party: Party,
    pub index: usize,
}

impl Qubit {
    pub const fn alice(index: usize) -> Self {
        Qubit {
            party: Party::Alice,
            index,
        }
    }

    pub const fn bob(index: usize) -> Self {
        Qubit {
            party: Party::Bob,
            index,
        }
    }

    /// Position in the global register, Alice's block first.
    pub fn global(self, n_alice: usize, n_bob: usize) -> Result<usize> {
        match self.party {
            Party::Alice if self.index < n_alice => Ok(self.index),
            Party::Bob if self.index < n_bob => Ok(n_alice + self.index),
            _ => Err(Error::Dimension(format!(
                "{} qubit {} out of range for partition ({n_alice}, {n_bob})",
                self.party, self.index
            ))),
        }
    }
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
