use serde::Serialize;

use crate::qcore::{linalg, CMatrix};
use crate::{tolerance, Error, Result};

/// Outcome of testing `A ⪰ B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominanceReport {
    /// Smallest eigenvalue of the Hermitian part of `A − B`.
    pub min_eigenvalue: f64,
    pub holds: bool,
}

/// Tests `A ⪰ B`, i.e. `A − B` positive semidefinite up to
/// [`tolerance::DOMINANCE`].
pub fn check_dominance(a: &CMatrix, b: &CMatrix) -> Result<DominanceReport> {
    if a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "cannot compare {:?} with {:?}",
            a.shape(),
            b.shape()
        )));
    }
    linalg::ensure_hermitian(a)?;
    linalg::ensure_hermitian(b)?;
    let min_eigenvalue = linalg::min_eigenvalue(&(a - b));
    Ok(DominanceReport {
        min_eigenvalue,
        holds: min_eigenvalue >= -tolerance::DOMINANCE,
    })
}

/// For `ρ ⪰ a·σ` and each POVM element `E_m`, checks
/// `Tr(ρ E_m) ≥ a·Tr(σ E_m)`. Returns the smallest slack.
pub fn check_measurement_consequence(rho: &CMatrix, sigma: &CMatrix, a: f64, povm: &[CMatrix]) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for e in povm {
        if e.shape() != rho.shape() {
            return Err(Error::Dimension("POVM element and state differ in size".into()));
        }
        let p = linalg::trace(&(rho * e)).re;
        let q = linalg::trace(&(sigma * e)).re;
        worst = worst.min(p - a * q);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::{random_density_matrix, random_kraus_channel};
    use crate::qcore::C64;
    use crate::seed::stream_rng;

    fn apply(kraus: &[CMatrix], m: &CMatrix) -> CMatrix {
        kraus
            .iter()
            .map(|k| k * m * k.adjoint())
            .fold(CMatrix::zeros(m.nrows(), m.ncols()), |acc, x| acc + x)
    }

    #[test]
    fn equal_matrices_dominate_each_other() {
        let mut rng = stream_rng(61, 0);
        let rho = random_density_matrix(1, 1, 2, &mut rng).into_matrix();
        let r = check_dominance(&rho, &rho).unwrap();
        assert!(r.holds && r.min_eigenvalue.abs() < 1e-12);
    }

    #[test]
    fn identity_dominates_states() {
        let mut rng = stream_rng(62, 0);
        for _ in 0..20 {
            let rho = random_density_matrix(2, 1, 3, &mut rng).into_matrix();
            assert!(check_dominance(&CMatrix::identity(8, 8), &rho).unwrap().holds);
        }
    }

    #[test]
    fn channels_preserve_dominance() {
        let mut rng = stream_rng(63, 0);
        for _ in 0..20 {
            let b = random_density_matrix(1, 1, 2, &mut rng).into_matrix();
            let extra = random_density_matrix(1, 1, 1, &mut rng).into_matrix();
            let a = &b + extra * C64::new(0.3, 0.0);
            let kraus = random_kraus_channel(4, 3, &mut rng);
            assert!(check_dominance(&apply(&kraus, &a), &apply(&kraus, &b)).unwrap().holds);
        }
    }

    #[test]
    fn strict_failure_is_reported() {
        let a = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        let b = CMatrix::identity(2, 2);
        let r = check_dominance(&a, &b).unwrap();
        assert!(!r.holds && (r.min_eigenvalue + 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(check_dominance(&a, &a), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn dominance_bounds_outcome_probabilities() {
        let mut rng = stream_rng(64, 0);
        let sigma = random_density_matrix(1, 1, 2, &mut rng).into_matrix();
        let other = random_density_matrix(1, 1, 2, &mut rng).into_matrix();
        let a = 0.4;
        let rho = &sigma * C64::new(a, 0.0) + other * C64::new(1.0 - a, 0.0);
        let povm: Vec<CMatrix> = random_kraus_channel(4, 3, &mut rng)
            .iter()
            .map(|k| k.adjoint() * k)
            .collect();
        assert!(check_measurement_consequence(&rho, &sigma, a, &povm).unwrap() >= -1e-12);
    }
}
