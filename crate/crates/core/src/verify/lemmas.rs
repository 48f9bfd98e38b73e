use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::qcore::random::{random_density_matrix, random_kraus_channel, random_pure_state, random_separable};
use crate::qcore::{
    base_fidelity, bell_identity_check, fidelity, fidelity_with_pure, linalg, pauli_deviation_sum, CMatrix,
    DensityMatrix, PureState, C64,
};
use crate::seed::{child_seed, stream_rng, Rng};
use crate::{tolerance, Result};

use super::dominance::{check_dominance, check_measurement_consequence};

/// The checks run by [`lemma_suite`], in report order.
pub const LEMMA_NAMES: [&str; 7] = [
    "pauli_sum_at_most_two",
    "bell_identity",
    "disentangled_base_fidelity",
    "fidelity_linearity",
    "fidelity_monotonicity",
    "dominance_under_positive_maps",
    "dominance_bounds_probabilities",
];

#[derive(Debug, Clone, Serialize)]
pub struct LemmaResult {
    pub name: String,
    pub instances: usize,
    pub violations: usize,
    /// Smallest margin seen; negative beyond `-tolerance` is a violation.
    pub worst_margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub seed: u64,
    pub lemmas: Vec<LemmaResult>,
    pub pass: bool,
}

fn default_tolerance(name: &str) -> f64 {
    match name {
        "bell_identity" => tolerance::STRUCTURAL,
        "dominance_under_positive_maps" => tolerance::DOMINANCE,
        _ => tolerance::DERIVED,
    }
}

/// Sizes for a random bipartite register with at least one pair.
fn sizes(rng: &mut Rng) -> (usize, usize) {
    (rng.random_range(1..=3), rng.random_range(1..=2))
}

fn weights(rng: &mut Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn kraus_apply(kraus: &[CMatrix], m: &CMatrix) -> CMatrix {
    kraus
        .iter()
        .fold(CMatrix::zeros(m.nrows(), m.ncols()), |acc, k| acc + k * m * k.adjoint())
}

/// Margin of one instance: positive when the statement holds.
fn instance(name: &str, rng: &mut Rng, index: usize) -> Result<f64> {
    match name {
        "pauli_sum_at_most_two" => {
            let (na, nb) = sizes(rng);
            let phi = random_pure_state(na, nb, rng);
            // Every fourth instance probes the equality-prone case ψ = φ.
            let psi = if index.is_multiple_of(4) {
                phi.clone()
            } else {
                random_pure_state(na, nb, rng)
            };
            Ok(2.0 - pauli_deviation_sum(&phi, &psi)?)
        }
        "bell_identity" => {
            let (na, nb) = sizes(rng);
            let phi = random_pure_state(na, nb, rng);
            let (lhs, rhs) = bell_identity_check(&phi)?;
            Ok(-(lhs - rhs).abs())
        }
        "disentangled_base_fidelity" => {
            let (na, nb) = sizes(rng);
            let rho = random_separable(na, nb, rng.random_range(1..=4), rng);
            Ok(0.5 - base_fidelity(&rho)?)
        }
        "fidelity_linearity" => {
            let (na, nb) = sizes(rng);
            let k = rng.random_range(1..=4);
            let w = weights(rng, k);
            let states: Vec<PureState> = (0..k).map(|_| random_pure_state(na, nb, rng)).collect();
            let sigma = random_pure_state(na, nb, rng);
            let mixed = DensityMatrix::mixture(
                &w.iter()
                    .zip(&states)
                    .map(|(wi, s)| (*wi, s.to_density()))
                    .collect::<Vec<_>>(),
            )?;
            // The general square-root formula on the mixture against the
            // ensemble average of pure overlaps.
            let whole = fidelity(&mixed, &sigma.to_density())?;
            let parts: f64 = w
                .iter()
                .zip(&states)
                .map(|(wi, s)| wi * s.inner(&sigma).map(|z| z.norm_sqr()).unwrap_or(0.0))
                .sum();
            let shortcut = fidelity_with_pure(&mixed, &sigma)?;
            Ok(-(whole - parts).abs().max((shortcut - parts).abs()))
        }
        "fidelity_monotonicity" => {
            let (na, nb) = (rng.random_range(1..=2), 1);
            let rho = random_density_matrix(na, nb, rng.random_range(1..=3), rng);
            let sigma = random_density_matrix(na, nb, rng.random_range(1..=3), rng);
            let dim = rho.matrix().nrows();
            let kraus = random_kraus_channel(dim, rng.random_range(1..=3), rng);
            let map = |s: &DensityMatrix| {
                DensityMatrix::new(na, nb, linalg::hermitian_part(&kraus_apply(&kraus, s.matrix())))
            };
            let before = fidelity(&rho, &sigma)?;
            let after = fidelity(&map(&rho)?, &map(&sigma)?)?;
            Ok(after - before)
        }
        "dominance_under_positive_maps" => {
            let b = random_density_matrix(2, 1, rng.random_range(1..=4), rng).into_matrix();
            let extra = random_density_matrix(2, 1, rng.random_range(1..=4), rng).into_matrix();
            let a = &b + extra * C64::new(rng.random::<f64>(), 0.0);
            // A positive (not trace-preserving) map: a random channel scaled.
            let scale = C64::new(rng.random::<f64>() * 2.0, 0.0);
            let kraus: Vec<CMatrix> = random_kraus_channel(8, rng.random_range(1..=3), rng)
                .into_iter()
                .map(|k| k * scale)
                .collect();
            Ok(check_dominance(&kraus_apply(&kraus, &a), &kraus_apply(&kraus, &b))?.min_eigenvalue)
        }
        "dominance_bounds_probabilities" => {
            let sigma = random_density_matrix(1, 1, rng.random_range(1..=4), rng).into_matrix();
            let other = random_density_matrix(1, 1, rng.random_range(1..=4), rng).into_matrix();
            let a = rng.random::<f64>();
            let rho = &sigma * C64::new(a, 0.0) + other * C64::new(1.0 - a, 0.0);
            let povm: Vec<CMatrix> = random_kraus_channel(4, rng.random_range(2..=4), rng)
                .iter()
                .map(|k| k.adjoint() * k)
                .collect();
            check_measurement_consequence(&rho, &sigma, a, &povm)
        }
        other => unreachable!("unknown lemma {other}"),
    }
}

/// Runs every lemma on `instances` seeded random instances. `tolerance`
/// overrides the per-lemma defaults. Instance `i` of lemma `k` draws from
/// stream `i` of `child_seed(seed, k)`, so the report does not depend on
/// scheduling.
pub fn lemma_suite(seed: u64, instances: usize, tolerance: Option<f64>) -> Result<LemmaReport> {
    let lemmas = LEMMA_NAMES
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let root = child_seed(seed, k as u64);
            let tol = tolerance.unwrap_or_else(|| default_tolerance(name));
            let margins: Vec<f64> = (0..instances)
                .into_par_iter()
                .map(|i| instance(name, &mut stream_rng(root, i as u64), i))
                .collect::<Result<_>>()?;
            let violations = margins.iter().filter(|m| **m < -tol).count();
            let worst_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(LemmaResult {
                name: name.to_string(),
                instances,
                violations,
                worst_margin,
                tolerance: tol,
                pass: violations == 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = lemmas.iter().all(|l| l.pass);
    Ok(LemmaReport { seed, lemmas, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_is_reproducible() {
        let a = lemma_suite(5, 40, None).unwrap();
        assert!(a.pass, "{a:?}");
        let b = lemma_suite(5, 40, None).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn tolerance_override_applies_to_every_lemma() {
        let r = lemma_suite(5, 20, Some(1e-15)).unwrap();
        for l in &r.lemmas {
            assert_eq!(l.tolerance, 1e-15);
            assert_eq!(l.violations == 0, l.worst_margin >= -1e-15, "{l:?}");
        }
    }
}
