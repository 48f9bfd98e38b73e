use super::linalg::{psd_sqrt, trace_sqrt};
use super::state::{Bipartite, DensityMatrix, PureState};
use super::{CMatrix, Qubit, C64};
use crate::{tolerance, Error, Result};

/// `Tr²√(√ρ σ √ρ)`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.n_alice() != sigma.n_alice() || rho.n_bob() != sigma.n_bob() {
        return Err(Error::Dimension(format!(
            "fidelity of ({}, {}) and ({}, {}) states",
            rho.n_alice(),
            rho.n_bob(),
            sigma.n_alice(),
            sigma.n_bob()
        )));
    }
    let root = psd_sqrt(rho.matrix(), tolerance::STRUCTURAL)?;
    let inner = &root * sigma.matrix() * &root;
    let t = trace_sqrt(&inner, tolerance::STRUCTURAL)?;
    Ok((t * t).clamp(0.0, 1.0))
}

/// `⟨φ|ρ|φ⟩`, the pure-state shortcut.
pub fn fidelity_with_pure(rho: &DensityMatrix, phi: &PureState) -> Result<f64> {
    if rho.n_alice() != phi.n_alice() || rho.n_bob() != phi.n_bob() {
        return Err(Error::Dimension(format!(
            "fidelity of ({}, {}) state with ({}, {}) vector",
            rho.n_alice(),
            rho.n_bob(),
            phi.n_alice(),
            phi.n_bob()
        )));
    }
    let v = phi.amplitudes();
    Ok(v.dotc(&(rho.matrix() * v)).re)
}

/// `⟨Ψ_n|ρ|Ψ_n⟩`.
pub fn epr_fidelity(rho: &DensityMatrix) -> Result<f64> {
    let n = rho.n_alice();
    if rho.n_bob() != n {
        return Err(Error::Dimension(format!(
            "EPR fidelity needs equal halves, got ({n}, {})",
            rho.n_bob()
        )));
    }
    Ok(epr_overlap(rho.matrix(), n))
}

/// `⟨Ψ_n|m|Ψ_n⟩` for a raw matrix in the bipartite layout.
pub(crate) fn epr_overlap(m: &CMatrix, n: usize) -> f64 {
    let diag: Vec<usize> = (0..1usize << n).map(|x| (x << n) | x).collect();
    let mut acc = C64::new(0.0, 0.0);
    for &i in &diag {
        for &j in &diag {
            acc += m[(i, j)];
        }
    }
    acc.re / (1u64 << n) as f64
}

/// `⟨Φ+|m|Φ+⟩` for a two-qubit matrix.
pub fn phi_plus_overlap(m: &CMatrix) -> f64 {
    (m[(0, 0)] + m[(0, 3)] + m[(3, 0)] + m[(3, 3)]).re / 2.0
}

/// Overlap of pair `k` (Alice `k`, Bob `k`) with `Φ+`.
pub fn pair_fidelity(rho: &DensityMatrix, k: usize) -> Result<f64> {
    if k >= rho.n_alice().min(rho.n_bob()) {
        return Err(Error::Dimension(format!(
            "pair {k} does not exist in partition ({}, {})",
            rho.n_alice(),
            rho.n_bob()
        )));
    }
    let pair = rho.partial_trace(&[Qubit::alice(k), Qubit::bob(k)])?;
    Ok(phi_plus_overlap(pair.matrix()))
}

/// `F̃(ρ)`: overlap of the first pair with `Φ+`.
pub fn base_fidelity(rho: &DensityMatrix) -> Result<f64> {
    pair_fidelity(rho, 0)
}

impl PureState {
    pub fn base_fidelity(&self) -> Result<f64> {
        if self.n_alice() == 0 || self.n_bob() == 0 {
            return Err(Error::Dimension("base fidelity needs at least one pair".into()));
        }
        let pair = self.reduced(&[Qubit::alice(0), Qubit::bob(0)])?;
        Ok(phi_plus_overlap(pair.matrix()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{random, tensor, BellState};
    use crate::seed::stream_rng;

    #[test]
    fn self_fidelity_of_pure_state_is_one() {
        let mut rng = stream_rng(11, 0);
        for _ in 0..20 {
            let s = random::random_pure_state(2, 1, &mut rng).to_density();
            assert!((fidelity(&s, &s).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn maximally_mixed_against_epr_pairs() {
        for n in 1..=3 {
            let mixed = DensityMatrix::maximally_mixed(n, n).unwrap();
            let psi = PureState::epr_pairs(n).unwrap();
            let want = 1.0 / (1u64 << (2 * n)) as f64;
            assert!((epr_fidelity(&mixed).unwrap() - want).abs() < 1e-15);
            assert!((fidelity(&mixed, &psi.to_density()).unwrap() - want).abs() < 1e-9);
        }
    }

    #[test]
    fn general_formula_matches_pure_shortcut() {
        let mut rng = stream_rng(12, 0);
        for _ in 0..50 {
            let rho = random::random_density_matrix(1, 2, 3, &mut rng);
            let phi = random::random_pure_state(1, 2, &mut rng);
            let a = fidelity(&rho, &phi.to_density()).unwrap();
            let b = fidelity_with_pure(&rho, &phi).unwrap();
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn fidelity_is_symmetric() {
        let mut rng = stream_rng(13, 0);
        let a = random::random_density_matrix(1, 1, 2, &mut rng);
        let b = random::random_density_matrix(1, 1, 4, &mut rng);
        assert!((fidelity(&a, &b).unwrap() - fidelity(&b, &a).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn base_fidelity_examples() {
        let phi = BellState::PhiPlus.state();
        let mut rng = stream_rng(14, 0);
        let junk = random::random_pure_state(2, 1, &mut rng);
        let joined = tensor(&phi, &junk).unwrap();
        assert!((joined.base_fidelity().unwrap() - 1.0).abs() < 1e-12);
        assert!((base_fidelity(&joined.to_density()).unwrap() - 1.0).abs() < 1e-12);

        let zz = PureState::basis(1, 1, 0, 0).unwrap().to_density();
        assert!((base_fidelity(&zz).unwrap() - 0.5).abs() < 1e-15);
        assert!((epr_fidelity(&PureState::epr_pairs(3).unwrap().to_density()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_partition_is_rejected() {
        let rho = DensityMatrix::maximally_mixed(2, 1).unwrap();
        assert!(epr_fidelity(&rho).is_err());
        assert!(pair_fidelity(&rho, 1).is_err());
        assert!(pair_fidelity(&rho, 0).is_ok());
    }
}
