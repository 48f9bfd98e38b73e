use edplab_core::errmodels::{
    binomial, binomial_recombination, depolarization_pure_ensemble, depolarization_state, depolarized_pair,
    ensemble_density, enumerate_extended, enumerate_indicators, epsilon_prime, error_state, extended_error_state,
    fidelity_model_samples, fidelity_witness, measure_r_ensemble, random_corrupt_ensemble, ErrorModel,
};
use edplab_core::qcore::linalg::min_eigenvalue;
use edplab_core::qcore::{base_fidelity, epr_fidelity, tensor, CMatrix, DensityMatrix, PureState, C64};
use edplab_core::seed::stream_rng;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

/// `(|00⟩⟨00| + |11⟩⟨11|)/2` on one pair.
fn dephased_pair() -> DensityMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = C64::new(0.5, 0.0);
    m[(3, 3)] = C64::new(0.5, 0.0);
    DensityMatrix::new(1, 1, m).unwrap()
}

fn product(pairs: &[DensityMatrix]) -> DensityMatrix {
    let mut acc = pairs[0].clone();
    for pair in &pairs[1..] {
        acc = tensor(&acc, pair).unwrap();
    }
    acc
}

#[test]
fn measure_r_is_a_uniform_mixture_of_dephased_patterns() {
    let phi = PureState::epr_pairs(1).unwrap().to_density();
    let dephased = dephased_pair();
    for n in 1..=3 {
        for r in 0..=n {
            let model = ensemble_density(&measure_r_ensemble(n, r).unwrap()).unwrap();
            let mut components = Vec::new();
            for mask in 0..1usize << n {
                if mask.count_ones() as usize != r {
                    continue;
                }
                let pairs: Vec<_> = (0..n)
                    .map(|j| {
                        if mask >> j & 1 == 1 {
                            dephased.clone()
                        } else {
                            phi.clone()
                        }
                    })
                    .collect();
                components.push((1.0 / binomial(n as u64, r as u64) as f64, product(&pairs)));
            }
            let oracle = DensityMatrix::mixture(&components).unwrap();
            assert!(model.max_abs_diff(&oracle) < TOL, "n={n} r={r}");
            let f = epr_fidelity(&model).unwrap();
            assert!((f - 0.5f64.powi(r as i32)).abs() < TOL, "n={n} r={r} fidelity {f}");
        }
    }
}

#[test]
fn indicator_error_states_overlap_the_epr_pairs() {
    for n in 1..=3 {
        let psi = PureState::epr_pairs(n).unwrap();
        for r in 0..=n {
            let vs = enumerate_indicators(n, r).unwrap();
            assert_eq!(vs.len() as u128, (1u128 << r) * binomial(n as u64, r as u64) as u128);
            for v in &vs {
                let phi = error_state(v).unwrap();
                let overlap = psi.inner(&phi).unwrap().norm_sqr();
                assert!((overlap - 0.5f64.powi(r as i32)).abs() < TOL);
            }
        }
    }
}

#[test]
fn extended_error_states_overlap_only_on_the_diagonal() {
    for n in 1..=3 {
        let psi = PureState::epr_pairs(n).unwrap();
        for r in 0..=n {
            let us = enumerate_extended(n, r).unwrap();
            assert_eq!(
                us.len() as u128,
                (1u128 << (2 * r)) * binomial(n as u64, r as u64) as u128
            );
            for u in &us {
                let diagonal = u.entries().iter().flatten().all(|(a, b)| a == b);
                let expected = if diagonal { 0.5f64.powi(r as i32) } else { 0.0 };
                let overlap = psi.inner(&extended_error_state(u).unwrap()).unwrap().norm_sqr();
                assert!((overlap - expected).abs() < TOL, "{u:?}");
            }
        }
    }
}

#[test]
fn random_corrupt_fidelity_is_a_power_of_a_quarter() {
    for n in 1..=3 {
        for r in 0..=n {
            let ensemble = random_corrupt_ensemble(n, r).unwrap();
            assert_eq!(ensemble.len() as u128, binomial(n as u64, r as u64));
            let rho = DensityMatrix::mixture(&ensemble).unwrap();
            assert!((epr_fidelity(&rho).unwrap() - 0.25f64.powi(r as i32)).abs() < TOL);
        }
    }
}

#[test]
fn out_of_range_parameters_are_rejected() {
    assert!(depolarized_pair(-0.1).is_err());
    assert!(depolarized_pair(1.5).is_err());
    assert!(random_corrupt_ensemble(2, 3).is_err());
    assert!(enumerate_indicators(2, 3).is_err());
    assert!(epsilon_prime(1, 0.8).is_err());
    assert!(epsilon_prime(0, 0.1).is_err());
    assert!(ErrorModel::MeasureR { n: 2, r: 3 }.validate().is_err());
    assert!(ErrorModel::Depolarization { n: 2, p: 1.2 }.validate().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn depolarization_has_three_equal_forms(n in 1usize..=3, p in 0.0f64..=1.0) {
        let state = depolarization_state(n, p).unwrap();
        let ensemble = ensemble_density(&depolarization_pure_ensemble(n, p).unwrap()).unwrap();
        let recombined = binomial_recombination(n, p).unwrap();
        prop_assert!(state.max_abs_diff(&ensemble) < TOL);
        prop_assert!(state.max_abs_diff(&recombined) < TOL);
    }

    #[test]
    fn depolarization_fidelities_follow_the_closed_form(n in 1usize..=3, p in 0.0f64..=1.0) {
        let rho = depolarization_state(n, p).unwrap();
        let per_pair = 1.0 - 3.0 * p / 4.0;
        prop_assert!((epr_fidelity(&rho).unwrap() - per_pair.powi(n as i32)).abs() < TOL);
        prop_assert!((base_fidelity(&rho).unwrap() - per_pair).abs() < TOL);
        prop_assert!((rho.trace() - 1.0).abs() < TOL);
    }

    #[test]
    fn witness_sits_at_the_requested_fidelity(n in 1usize..=2, epsilon in 0.0f64..0.75) {
        let rho = fidelity_witness(n, epsilon).unwrap();
        prop_assert!((epr_fidelity(&rho).unwrap() - (1.0 - epsilon)).abs() < TOL);
        prop_assert!(min_eigenvalue(rho.matrix()) > -TOL);
    }

    #[test]
    fn model_samples_sit_at_the_requested_fidelity(n in 1usize..=2, epsilon in 0.01f64..0.7, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        for rho in fidelity_model_samples(n, epsilon, 3, &mut rng).unwrap() {
            prop_assert!((epr_fidelity(&rho).unwrap() - (1.0 - epsilon)).abs() < TOL);
            prop_assert!((rho.trace() - 1.0).abs() < TOL);
            prop_assert!(min_eigenvalue(rho.matrix()) > -TOL);
        }
    }
}
