use edplab_core::errmodels::{
    epsilon_prime, error_state, fidelity_witness, measure_r_ensemble, ErrorModel, IndicatorVector,
};
use edplab_core::locc::{
    conditional_fidelity, decode_hashes, evaluate_model, ideal_success_probability, make_first_pair, make_random_pair,
    make_random_permutation, make_simple_random_hash, make_simple_random_hash_with, protocol_fidelity, run, run_with,
    HashFamily, Protocol, ProtocolSpec, RunOptions, RunResult,
};
use edplab_core::qcore::random::{random_density_matrix, random_product_state};
use edplab_core::qcore::{AnyState, DensityMatrix, PureState};
use edplab_core::seed::stream_rng;
use edplab_core::Error;

fn indicator(s: &str) -> IndicatorVector {
    s.parse().unwrap()
}

fn epr(n: usize) -> AnyState {
    PureState::epr_pairs(n).unwrap().into()
}

#[test]
fn first_pair_on_epr_pairs() {
    for n in 1..=3 {
        let r = run(&make_first_pair(n).unwrap(), &epr(n)).unwrap();
        assert!((r.success_probability - 1.0).abs() < 1e-12);
        assert!((r.fidelity() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn first_pair_on_measured_first_pair() {
    let v = indicator("0**");
    let r = run(&make_first_pair(3).unwrap(), &error_state(&v).unwrap().into()).unwrap();
    assert!((r.fidelity() - 0.5).abs() < 1e-12);
}

#[test]
fn random_pair_two_leaves() {
    let v = indicator("0*");
    let r = run(&make_random_pair(2).unwrap(), &error_state(&v).unwrap().into()).unwrap();
    assert!((r.fidelity() - 0.75).abs() < 1e-12);
    assert_eq!(r.seeds.len(), 2);
}

#[test]
fn random_pair_over_measure_r() {
    for n in 1..=5 {
        let p = make_random_pair(n).unwrap();
        for r in 0..=n {
            let f = protocol_fidelity(&p, &ErrorModel::MeasureR { n, r }).unwrap();
            let expected = 1.0 - r as f64 / (2 * n) as f64;
            assert!((f - expected).abs() < 1e-12, "n={n} r={r}: {f} vs {expected}");
        }
    }
}

#[test]
fn random_pair_fully_measured() {
    let v = indicator("0110");
    let r = run(&make_random_pair(4).unwrap(), &error_state(&v).unwrap().into()).unwrap();
    assert!((r.fidelity() - 0.5).abs() < 1e-12);
}

#[test]
fn first_pair_over_depolarization() {
    for n in 1..=3 {
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let f = protocol_fidelity(&make_first_pair(n).unwrap(), &ErrorModel::Depolarization { n, p }).unwrap();
            assert!((f - (1.0 - 0.75 * p)).abs() < 1e-10, "n={n} p={p}: {f}");
        }
    }
}

#[test]
fn hash_is_ideal() {
    for n in 2..=4 {
        for s in 1..n {
            for family in [HashFamily::Nonzero, HashFamily::Uniform] {
                let p = make_simple_random_hash_with(n, s, family).unwrap();
                let r = run(&p, &epr(n)).unwrap();
                assert!((r.success_probability - 1.0).abs() < 1e-10, "n={n} s={s} {family:?}");
                assert!((r.conditional_fidelity().unwrap() - 1.0).abs() < 1e-10);
                assert!((ideal_success_probability(&p).unwrap() - 1.0).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn hash_needs_a_spare_pair() {
    assert!(matches!(make_simple_random_hash(3, 3), Err(Error::Parameter(_))));
}

#[test]
fn hash_seed_counts() {
    // Nonzero strings on 4, 3, 2 alive pairs; all strings on the same.
    assert_eq!(make_simple_random_hash(4, 3).unwrap().seeds(), 15 * 7 * 3);
    assert_eq!(
        make_simple_random_hash_with(4, 3, HashFamily::Uniform).unwrap().seeds(),
        16 * 8 * 4
    );
    assert_eq!(make_simple_random_hash(4, 3).unwrap().bits(), 3);
}

/// `|x⟩^A |x ⊕ e⟩^B` for a nonzero discrepancy `e`.
fn discrepant(n: usize, x: usize, e: usize) -> AnyState {
    PureState::basis(n, n, x, x ^ e).unwrap().into()
}

/// Classical model of one hash round acting on a bit-flip discrepancy
/// `e` (entry `i` is pair `i`): the round passes iff `h · e = 0`, after
/// which the parity permutation is applied and the check pair dropped.
fn hash_round(e: &mut Vec<bool>, h: &[bool]) -> bool {
    let check = e.len() - 1;
    let parity = h.iter().zip(e.iter()).filter(|(a, b)| **a && **b).count() % 2 == 1;
    if parity {
        return false;
    }
    if let Some(target) = (0..=check).rev().find(|&i| h[i]) {
        e[target] = parity;
        e.swap(target, check);
    }
    e.pop();
    true
}

#[test]
fn single_uniform_round_rejects_half() {
    for n in 2..=4 {
        let p = make_simple_random_hash_with(n, 1, HashFamily::Uniform).unwrap();
        for e in 1..(1usize << n) {
            let r = run(&p, &discrepant(n, 0b1, e)).unwrap();
            assert!((r.success_probability - 0.5).abs() < 1e-12, "n={n} e={e}");
        }
    }
}

/// Several rounds against the classical oracle. A vacuous round (`h = 0`)
/// drops its check pair untested, so a discrepancy living only there
/// escapes and the total is not always `2^{-s}`.
#[test]
fn uniform_hash_matches_classical_oracle() {
    let mut escapes = 0;
    for n in 2..=4 {
        for s in 1..n {
            let p = make_simple_random_hash_with(n, s, HashFamily::Uniform).unwrap();
            for e in 1..(1usize << n) {
                let flips: Vec<bool> = (0..n).map(|i| (e >> (n - 1 - i)) & 1 == 1).collect();
                let mut passed = 0usize;
                for seed in 0..p.seeds() {
                    let mut d = flips.clone();
                    if decode_hashes(n, s, HashFamily::Uniform, seed)
                        .iter()
                        .all(|h| hash_round(&mut d, h))
                    {
                        passed += 1;
                    }
                }
                let expected = passed as f64 / p.seeds() as f64;
                let r = run(&p, &discrepant(n, 0b1, e)).unwrap();
                assert!((r.success_probability - expected).abs() < 1e-12, "n={n} s={s} e={e}");
                if (expected - 0.5f64.powi(s as i32)).abs() > 1e-12 {
                    escapes += 1;
                }
            }
        }
    }
    assert!(escapes > 0);
}

#[test]
fn nonzero_hash_rejection_rate() {
    // With m alive pairs, 2^{m-1} of the 2^m - 1 nonzero parities see a
    // nonzero discrepancy.
    for n in 2..=4 {
        for s in 1..n {
            let p = make_simple_random_hash(n, s).unwrap();
            let expected: f64 = (0..s)
                .map(|j| {
                    let m = (n - j) as i32;
                    (2f64.powi(m - 1) - 1.0) / (2f64.powi(m) - 1.0)
                })
                .product();
            for e in 1..(1usize << n) {
                let r = run(&p, &discrepant(n, 0, e)).unwrap();
                assert!((r.success_probability - expected).abs() < 1e-12, "n={n} s={s} e={e}");
            }
        }
    }
}

#[test]
fn hash_conditional_fidelity_on_witness() {
    for n in 2..=4 {
        for s in 1..n.min(4) {
            let p = make_simple_random_hash(n, s).unwrap();
            for epsilon in [0.1, 0.25] {
                let f = conditional_fidelity(&p, &ErrorModel::Fidelity { n, epsilon }).unwrap();
                let bound = 1.0 - 0.5f64.powi(s as i32) / (1.0 - epsilon);
                assert!(f >= bound - 1e-9, "n={n} s={s} eps={epsilon}: {f} < {bound}");
            }
        }
    }
}

#[test]
fn permutation_seeds() {
    let p = make_random_permutation(3).unwrap();
    assert_eq!(p.seeds(), 6);
    assert!(p.shared_randomness.iter().all(|&w| (w - 1.0 / 6.0).abs() < 1e-15));
    let r = run(&p, &epr(3)).unwrap();
    assert!((r.fidelity() - 1.0).abs() < 1e-10);
}

/// Independent oracle for the witness: the permutation leaves `ρ₀` fixed
/// and dephasing a pair of `Ψ_n` does not touch the first pair, so the
/// output is `(1 − ε′) Φ+ + ε′ I/4`.
#[test]
fn permutation_on_witness() {
    for (n, epsilon) in [(2, 0.2), (2, 0.1), (3, 0.2)] {
        let e = epsilon_prime(n, epsilon).unwrap();
        let r = run(
            &make_random_permutation(n).unwrap(),
            &fidelity_witness(n, epsilon).unwrap().into(),
        )
        .unwrap();
        assert!((r.fidelity() - (1.0 - 0.75 * e)).abs() < 1e-10);
    }
}

/// The closed form `1 − (2^n/(2^n − 1))·ε/2` is not met on `ρ₀` at
/// `n = 2, ε = 0.2`: the protocol reaches 0.84, below 0.8667. See the
/// decisions ledger.
#[test]
fn permutation_closed_form_fails_on_witness() {
    let r = run(
        &make_random_permutation(2).unwrap(),
        &fidelity_witness(2, 0.2).unwrap().into(),
    )
    .unwrap();
    let claimed = 1.0 - (4.0 / 3.0) * 0.1;
    assert!((r.fidelity() - 0.84).abs() < 1e-10);
    assert!(r.fidelity() < claimed - 1e-3);
}

/// The same closed form is exact on a classically correlated state at
/// EPR fidelity `1 − ε`: errors uniform over the nonzero bit-flip patterns.
#[test]
fn permutation_closed_form_on_correlated_errors() {
    for n in [2, 3] {
        let epsilon = 0.2;
        let dim = 1usize << n;
        let mut parts = vec![(1.0 - epsilon, PureState::epr_pairs(n).unwrap().to_density())];
        for e in 1..dim {
            let m = measure_r_ensemble(n, 0).unwrap();
            // Ψ_n with Bob's side XOR e: apply the flip by relabeling.
            let amps = m[0].1.amplitudes();
            let mut flipped = amps.clone() * num_complex::Complex64::new(0.0, 0.0);
            for a in 0..dim {
                for b in 0..dim {
                    flipped[a * dim + (b ^ e)] = amps[a * dim + b];
                }
            }
            let psi = PureState::new(n, n, flipped).unwrap();
            parts.push((epsilon / (dim - 1) as f64, psi.to_density()));
        }
        let rho = DensityMatrix::mixture(&parts).unwrap();
        let r = run(&make_random_permutation(n).unwrap(), &rho.into()).unwrap();
        let closed = 1.0 - (dim as f64 / (dim as f64 - 1.0)) * epsilon / 2.0;
        assert!((r.fidelity() - closed).abs() < 1e-10, "n={n}: {}", r.fidelity());
    }
}

fn martingale(r: &RunResult) {
    for seed in &r.seeds {
        let at = |len: usize, value: usize| &seed.nodes[(1 << len) - 1 + value];
        for node in &seed.nodes {
            let (len, v) = (node.transcript.len, node.transcript.value);
            if (1 << (len + 1)) - 1 + 2 * v + 1 >= seed.nodes.len() {
                continue;
            }
            let children = at(len + 1, 2 * v).probability + at(len + 1, 2 * v + 1).probability;
            assert!((node.probability - children).abs() < 1e-12);
        }
        let total: f64 = seed.leaves.iter().map(|l| l.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn transcript_tree_is_a_martingale() {
    let mut rng = stream_rng(401, 0);
    let rho = random_density_matrix(3, 3, 3, &mut rng);
    for p in [
        make_simple_random_hash(3, 2).unwrap(),
        make_simple_random_hash_with(3, 2, HashFamily::Uniform).unwrap(),
    ] {
        martingale(&run(&p, &rho.clone().into()).unwrap());
    }
}

/// Alice's state right before Bob's bit against her states after it.
fn receiver_states(p: &Protocol, input: &AnyState, product: bool) {
    let r = run_with(
        p,
        input,
        RunOptions {
            record_local_states: true,
        },
    )
    .unwrap();
    for seed in &r.seeds {
        for node in &seed.nodes {
            let Some(before) = &node.departure_alice else { continue };
            let (len, v) = (node.transcript.len, node.transcript.value);
            let child = |b: usize| &seed.nodes[(1 << (len + 1)) - 1 + 2 * v + b];
            let mut mix = before.matrix() * num_complex::Complex64::new(0.0, 0.0);
            for b in 0..2 {
                let c = child(b);
                if let Some(a) = &c.alice {
                    mix += a.matrix() * num_complex::Complex64::new(c.probability / node.probability, 0.0);
                    if product {
                        assert!(a.max_abs_diff(before) < 1e-9);
                    }
                }
            }
            assert!((mix - before.matrix()).camax() < 1e-9);
        }
    }
}

#[test]
fn receiver_state_splits_exactly() {
    let mut rng = stream_rng(402, 0);
    for _ in 0..3 {
        let rho = random_density_matrix(3, 3, 2, &mut rng);
        receiver_states(&make_simple_random_hash(3, 2).unwrap(), &rho.into(), false);
    }
}

#[test]
fn bit_carries_no_information_on_product_inputs() {
    let mut rng = stream_rng(403, 0);
    for _ in 0..3 {
        let psi = random_product_state(3, 3, &mut rng);
        receiver_states(&make_simple_random_hash(3, 2).unwrap(), &psi.into(), true);
    }
}

#[test]
fn zero_bit_protocols_are_linear() {
    let mut rng = stream_rng(404, 0);
    let a = random_density_matrix(2, 2, 2, &mut rng);
    let b = random_density_matrix(2, 2, 3, &mut rng);
    let w = 0.3;
    let mixed = DensityMatrix::mixture(&[(w, a.clone()), (1.0 - w, b.clone())]).unwrap();
    for p in [
        make_first_pair(2).unwrap(),
        make_random_pair(2).unwrap(),
        make_random_permutation(2).unwrap(),
    ] {
        let ra = run(&p, &a.clone().into()).unwrap().output;
        let rb = run(&p, &b.clone().into()).unwrap().output;
        let rm = run(&p, &mixed.clone().into()).unwrap().output;
        let combo = DensityMatrix::mixture(&[(w, ra), (1.0 - w, rb)]).unwrap();
        assert!(rm.max_abs_diff(&combo) < 1e-12);
    }
}

#[test]
fn model_evaluation_reports_worst_state() {
    let p = make_random_pair(3).unwrap();
    let e = evaluate_model(&p, &ErrorModel::MeasureR { n: 3, r: 2 }).unwrap();
    assert_eq!(e.states.len(), 4 * 3);
    assert!((e.fidelity - (1.0 - 2.0 / 6.0)).abs() < 1e-12);
    assert!(e.exhaustive);
    assert!((e.ideal_success_probability - 1.0).abs() < 1e-12);
    assert!(matches!(
        evaluate_model(&p, &ErrorModel::MeasureR { n: 2, r: 1 }),
        Err(Error::Parameter(_))
    ));
}

#[test]
fn zero_acceptance_is_an_error() {
    let json = r#"{"n": 1, "accept_rule": {"kind": "table", "r": 0.0}}"#;
    let p = ProtocolSpec::from_json(json).unwrap().build().unwrap();
    let r = run(&p, &epr(1)).unwrap();
    assert!(matches!(r.conditional_output(), Err(Error::ZeroAcceptance)));
}

#[test]
fn spec_round_trip() {
    for p in [
        make_first_pair(2).unwrap(),
        make_random_pair(2).unwrap(),
        make_simple_random_hash(3, 1).unwrap(),
    ] {
        let json = ProtocolSpec::from_protocol(&p).unwrap().to_json().unwrap();
        let q = ProtocolSpec::from_json(&json).unwrap().build().unwrap();
        let mut rng = stream_rng(405, 0);
        let rho: AnyState = random_density_matrix(p.n, p.n, 2, &mut rng).into();
        let (a, b) = (run(&p, &rho).unwrap(), run(&q, &rho).unwrap());
        assert!(a.output.max_abs_diff(&b.output) < 1e-12);
        assert!((a.success_probability - b.success_probability).abs() < 1e-12);
    }
}

#[test]
fn spec_errors_name_the_field() {
    let bad_field = r#"{"n": 1, "rounds": [{"party": "bob", "kraus": [[[[[1,0]]]]], "colour": 1}]}"#;
    match ProtocolSpec::from_json(bad_field) {
        Err(Error::Spec { path, .. }) => assert!(path.starts_with("rounds[0]"), "{path}"),
        other => panic!("{other:?}"),
    }
    // Not trace preserving.
    let not_tp = r#"{"n": 1, "rounds": [{"party": "bob", "targets": [0],
        "kraus": [[[[[1,0],[0,0]],[[0,0],[0,0]]]], [[[[0,0],[0,0]],[[0,0],[0.5,0]]]]]}]}"#;
    match ProtocolSpec::from_json(not_tp).unwrap().build() {
        Err(Error::Spec { path, .. }) => assert_eq!(path, "rounds[0].kraus"),
        other => panic!("{other:?}"),
    }
    let two_tables = r#"{"n": 1, "rounds": [{"party": "bob", "kraus": [[[[[1,0]]]]], "kraus_by_seed": []}]}"#;
    assert!(matches!(
        ProtocolSpec::from_json(two_tables).unwrap().build(),
        Err(Error::Spec { .. })
    ));
}

#[test]
fn spec_export_rejects_mixed_targets() {
    use edplab_core::locc::{AcceptRule, Keyed, Operation, OutputPair, Step};
    use edplab_core::qcore::{CMatrix, Party};
    let flip = |t: usize| {
        let x = CMatrix::from_row_slice(
            2,
            2,
            &[0.0, 1.0, 1.0, 0.0].map(|v| edplab_core::qcore::C64::new(v, 0.0)),
        );
        Operation::unitary(Some(vec![t]), x).unwrap()
    };
    let p = Protocol {
        name: "mixed".into(),
        n: 2,
        ancillas: (0, 0),
        shared_randomness: vec![0.5, 0.5],
        steps: vec![Step::Local {
            party: Party::Alice,
            op: Keyed::BySeed(vec![flip(0), flip(1)]),
        }],
        accept: AcceptRule::Always,
        output: OutputPair::Fixed(0),
    };
    p.validate().unwrap();
    match ProtocolSpec::from_protocol(&p) {
        Err(Error::Spec { path, .. }) => assert_eq!(path, "rounds[0].targets"),
        other => panic!("expected a spec error, got {other:?}"),
    }
}
