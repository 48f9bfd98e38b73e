use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::kernel::{conjugate_hermitian, PreparedOp, TargetLayout};
use super::linalg::unitarity_error;
use super::state::{Bipartite, DensityMatrix, PureState};
use super::{c, CMatrix, CVector, Qubit, C64};
use crate::{tolerance, Error, Result};

/// Single-qubit Paulis. `Y` follows `Y(α|0⟩ + β|1⟩) = iβ|0⟩ − iα|1⟩`, the
/// negative of the usual matrix; every quantity built here (`|⟨·|U|·⟩|²`,
/// `U ⊗ U*`) is insensitive to that sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        let (a, b, cc, d) = match self {
            Pauli::I => (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
            Pauli::X => (c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
            Pauli::Y => (c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)),
            Pauli::Z => (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
        };
        CMatrix::from_row_slice(2, 2, &[a, b, cc, d])
    }

    /// Entrywise complex conjugate `U*`.
    pub fn conj_matrix(self) -> CMatrix {
        self.matrix().map(|z| z.conj())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    /// The state on one Alice and one Bob qubit.
    pub fn state(self) -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let v = match self {
            BellState::PhiPlus => [c(h, 0.0), z, z, c(h, 0.0)],
            BellState::PhiMinus => [c(h, 0.0), z, z, c(-h, 0.0)],
            BellState::PsiPlus => [z, c(h, 0.0), c(h, 0.0), z],
            BellState::PsiMinus => [z, c(h, 0.0), c(-h, 0.0), z],
        };
        PureState::from_parts_unchecked(1, 1, CVector::from_row_slice(&v))
    }
}

/// Every Bell state is an eigenvector of `U ⊗ U*`; this is the sign.
fn table_sign(u: Pauli, bell: BellState) -> i8 {
    use BellState::*;
    match (u, bell) {
        (Pauli::I, _) => 1,
        (Pauli::X, PhiPlus | PsiPlus) => 1,
        (Pauli::X, PhiMinus | PsiMinus) => -1,
        (Pauli::Y, PhiPlus | PsiMinus) => 1,
        (Pauli::Y, PhiMinus | PsiPlus) => -1,
        (Pauli::Z, PhiPlus | PhiMinus) => 1,
        (Pauli::Z, PsiPlus | PsiMinus) => -1,
    }
}

/// Compares the sign table against the explicit action of `U ⊗ U*`, for
/// both sign conventions of `Y`.
pub fn bell_table_self_test() -> Result<()> {
    let standard_y = Pauli::Y.matrix() * c(-1.0, 0.0);
    for u in Pauli::ALL {
        let mut variants = vec![u.matrix()];
        if u == Pauli::Y {
            variants.push(standard_y.clone());
        }
        for m in variants {
            let op = m.kronecker(&m.map(|z| z.conj()));
            for bell in BellState::ALL {
                let v = bell.state().amplitudes().clone();
                let image = &op * &v;
                let expect = &v * c(f64::from(table_sign(u, bell)), 0.0);
                let err = (image - expect).norm();
                if err > 1e-12 {
                    return Err(Error::InvalidOperator(format!(
                        "Bell table entry ({u:?}, {bell:?}) is off by {err:e}"
                    )));
                }
            }
        }
    }
    Ok(())
}

static SELF_TEST: OnceLock<std::result::Result<(), String>> = OnceLock::new();

/// `(U ⊗ U*)|bell⟩ = sign · |bell⟩`.
pub fn bell_action(u: Pauli, bell: BellState) -> (i8, BellState) {
    let ok = SELF_TEST.get_or_init(|| bell_table_self_test().map_err(|e| e.to_string()));
    if let Err(msg) = ok {
        panic!("Bell table self-test failed: {msg}");
    }
    (table_sign(u, bell), bell)
}

/// A unitary acting on the listed qubits, in the matrix's own bit order
/// (first target is the most significant bit).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    matrix: CMatrix,
    targets: Vec<Qubit>,
}

impl UnitaryOp {
    pub fn new(matrix: CMatrix, targets: Vec<Qubit>) -> Result<Self> {
        if matrix.nrows() != 1 << targets.len() || matrix.ncols() != matrix.nrows() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix on {} targets",
                matrix.nrows(),
                matrix.ncols(),
                targets.len()
            )));
        }
        let err = unitarity_error(&matrix);
        if err > tolerance::OPERATOR {
            return Err(Error::InvalidOperator(format!("not unitary (deviation {err:e})")));
        }
        Ok(UnitaryOp { matrix, targets })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn targets(&self) -> &[Qubit] {
        &self.targets
    }
}

impl PureState {
    pub fn apply(&self, op: &UnitaryOp) -> Result<PureState> {
        let v = self.apply_matrix_raw(op.matrix(), op.targets())?;
        Ok(PureState::from_parts_unchecked(self.n_alice(), self.n_bob(), v))
    }
}

impl DensityMatrix {
    pub fn apply_unitary(&self, op: &UnitaryOp) -> Result<DensityMatrix> {
        let globals: Vec<usize> = op
            .targets()
            .iter()
            .map(|q| q.global(self.n_alice(), self.n_bob()))
            .collect::<Result<_>>()?;
        let layout = TargetLayout::new(&globals, self.n_qubits())?;
        let m = conjugate_hermitian(&PreparedOp::new(op.matrix()), &layout, self.matrix());
        Ok(DensityMatrix::from_parts_unchecked(self.n_alice(), self.n_bob(), m))
    }
}

fn first_qubit(state: &PureState) -> Result<Qubit> {
    if state.n_alice() > 0 {
        Ok(Qubit::alice(0))
    } else if state.n_bob() > 0 {
        Ok(Qubit::bob(0))
    } else {
        Err(Error::Dimension("state has no qubits".into()))
    }
}

/// `Σ_{U ∈ {I,X,Y,Z}} |⟨φ|U|ψ⟩|²` with `U` on the first qubit of the register.
pub fn pauli_deviation_sum(phi: &PureState, psi: &PureState) -> Result<f64> {
    if phi.n_alice() != psi.n_alice() || phi.n_bob() != psi.n_bob() {
        return Err(Error::Dimension("states have different partitions".into()));
    }
    let q = first_qubit(psi)?;
    let mut total = 0.0;
    for u in Pauli::ALL {
        let moved = psi.apply_matrix_raw(&u.matrix(), &[q])?;
        total += phi.amplitudes().dotc(&moved).norm_sqr();
    }
    Ok(total)
}

/// Returns `(⟨φ|φ⟩ + Σ_{U=X,Y,Z} ⟨φ|U ⊗ U*|φ⟩, 4·F̃(φ))` with the Paulis on
/// the first pair.
pub fn bell_identity_check(phi: &PureState) -> Result<(f64, f64)> {
    let mut lhs = phi.amplitudes().norm_squared();
    for u in [Pauli::X, Pauli::Y, Pauli::Z] {
        let op = u.matrix().kronecker(&u.conj_matrix());
        let moved = phi.apply_matrix_raw(&op, &[Qubit::alice(0), Qubit::bob(0)])?;
        let term: C64 = phi.amplitudes().dotc(&moved);
        lhs += term.re;
    }
    Ok((lhs, 4.0 * phi.base_fidelity()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random;
    use crate::seed::stream_rng;

    fn single(v: [C64; 2]) -> PureState {
        PureState::new(1, 0, CVector::from_row_slice(&v)).unwrap()
    }

    #[test]
    fn y_matches_its_action() {
        // Y(α|0⟩ + β|1⟩) = iβ|0⟩ − iα|1⟩ with α = 1, β = 2.
        let out = Pauli::Y.matrix() * CVector::from_row_slice(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(out[0], c(0.0, 2.0));
        assert_eq!(out[1], c(0.0, -1.0));
    }

    #[test]
    fn self_test_passes_and_table_entries() {
        bell_table_self_test().unwrap();
        assert_eq!(bell_action(Pauli::X, BellState::PhiMinus), (-1, BellState::PhiMinus));
        assert_eq!(bell_action(Pauli::Z, BellState::PsiPlus), (-1, BellState::PsiPlus));
        for b in BellState::ALL {
            assert_eq!(bell_action(Pauli::I, b), (1, b));
        }
        // Φ+ is fixed by all four operators.
        for u in Pauli::ALL {
            assert_eq!(bell_action(u, BellState::PhiPlus).0, 1);
        }
    }

    #[test]
    fn deviation_sum_examples() {
        let zero = single([c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((pauli_deviation_sum(&zero, &zero).unwrap() - 2.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = single([c(h, 0.0), c(h, 0.0)]);
        let minus = single([c(h, 0.0), c(-h, 0.0)]);
        assert!((pauli_deviation_sum(&plus, &minus).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bell_identity_on_bell_states() {
        let (l, r) = bell_identity_check(&BellState::PhiPlus.state()).unwrap();
        assert!((l - 4.0).abs() < 1e-12 && (r - 4.0).abs() < 1e-12);
        let (l, r) = bell_identity_check(&BellState::PsiMinus.state()).unwrap();
        assert!(l.abs() < 1e-12 && r.abs() < 1e-12);
    }

    #[test]
    fn bell_identity_random() {
        let mut rng = stream_rng(21, 0);
        for _ in 0..100 {
            let s = random::random_pure_state(2, 2, &mut rng);
            let (l, r) = bell_identity_check(&s).unwrap();
            assert!((l - r).abs() < 1e-10);
        }
    }

    #[test]
    fn unitary_validation_and_application() {
        assert!(UnitaryOp::new(CMatrix::identity(2, 2) * c(2.0, 0.0), vec![Qubit::alice(0)]).is_err());
        assert!(UnitaryOp::new(CMatrix::identity(4, 4), vec![Qubit::alice(0)]).is_err());
        let x = UnitaryOp::new(Pauli::X.matrix(), vec![Qubit::bob(0)]).unwrap();
        let s = PureState::basis(1, 1, 0, 0).unwrap().apply(&x).unwrap();
        assert_eq!(s.amplitude(0, 1), c(1.0, 0.0));
        let rho = PureState::basis(1, 1, 0, 0)
            .unwrap()
            .to_density()
            .apply_unitary(&x)
            .unwrap();
        assert_eq!(rho.matrix()[(1, 1)], c(1.0, 0.0));
    }
}
