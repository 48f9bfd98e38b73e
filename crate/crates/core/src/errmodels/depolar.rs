use super::bits::{binomial, combinations};
use super::extended::{enumerate_extended, extended_error_state};
use crate::qcore::{tensor, BellState, Bipartite, CMatrix, DensityMatrix, Pauli, PureState, Qubit, C64};
use crate::{Error, Result};

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("probability {p} is outside [0, 1]")));
    }
    Ok(())
}

/// Kraus set of `ρ ↦ (1 − p)ρ + p · Tr_q(ρ) ⊗ I/2` on one qubit.
pub fn depolarizing_kraus(p: f64) -> Result<Vec<CMatrix>> {
    check_probability(p)?;
    let keep = C64::new((1.0 - 0.75 * p).sqrt(), 0.0);
    let flip = C64::new((0.25 * p).sqrt(), 0.0);
    Ok(vec![
        Pauli::I.matrix() * keep,
        Pauli::X.matrix() * flip,
        Pauli::Y.matrix() * flip,
        Pauli::Z.matrix() * flip,
    ])
}

/// Depolarizes `qubit` with probability `p`.
pub fn depolarize(rho: &DensityMatrix, p: f64, qubit: Qubit) -> Result<DensityMatrix> {
    rho.apply_channel(&depolarizing_kraus(p)?, &[qubit])
}

/// `ρ_p`: `Φ+` after Bob's qubit is depolarized.
pub fn depolarized_pair(p: f64) -> Result<DensityMatrix> {
    depolarize(&BellState::PhiPlus.state().to_density(), p, Qubit::bob(0))
}

/// `ρ_p^{⊗n}`.
pub fn depolarization_state(n: usize, p: f64) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(Error::Parameter("depolarization model needs n >= 1".into()));
    }
    crate::qcore::check_capacity(2 * n)?;
    let pair = depolarized_pair(p)?;
    let mut acc = pair.clone();
    for _ in 1..n {
        acc = tensor(&acc, &pair)?;
    }
    Ok(acc)
}

/// Uniform mixture over the `C(n, r)` ways of replacing `r` of the `n` EPR
/// pairs by `I/4`, as a weighted list (one entry per pattern).
pub fn random_corrupt_ensemble(n: usize, r: usize) -> Result<Vec<(f64, DensityMatrix)>> {
    if r > n || n == 0 {
        return Err(Error::Parameter(format!(
            "random-corrupt model needs 1 <= n and r <= n, got n={n}, r={r}"
        )));
    }
    crate::qcore::check_capacity(2 * n)?;
    let phi = BellState::PhiPlus.state().to_density();
    let noise = DensityMatrix::maximally_mixed(1, 1)?;
    let patterns = combinations(n, r);
    let weight = 1.0 / patterns.len() as f64;
    patterns
        .into_iter()
        .map(|chosen| {
            let pair = |j: usize| if chosen.contains(&j) { &noise } else { &phi };
            let mut acc = pair(0).clone();
            for j in 1..n {
                acc = tensor(&acc, pair(j))?;
            }
            Ok((weight, acc))
        })
        .collect()
}

/// `Σ_r C(n,r) p^r (1−p)^{n−r} · (random-corrupt model r)`, collapsed.
pub fn binomial_recombination(n: usize, p: f64) -> Result<DensityMatrix> {
    check_probability(p)?;
    let mut components = Vec::new();
    for r in 0..=n {
        let w = binomial(n as u64, r as u64) as f64 * p.powi(r as i32) * (1.0 - p).powi((n - r) as i32);
        for (u, rho) in random_corrupt_ensemble(n, r)? {
            components.push((w * u, rho));
        }
    }
    DensityMatrix::mixture(&components)
}

/// `ρ_p^{⊗n}` as a weighted list of extended error states, weight
/// `(1 − p)^{n − deg u} (p/4)^{deg u}`.
pub fn depolarization_pure_ensemble(n: usize, p: f64) -> Result<Vec<(f64, PureState)>> {
    check_probability(p)?;
    let mut out = Vec::new();
    for r in 0..=n {
        let w = (1.0 - p).powi((n - r) as i32) * (0.25 * p).powi(r as i32);
        if w == 0.0 {
            continue;
        }
        for u in enumerate_extended(n, r)? {
            out.push((w, extended_error_state(&u)?));
        }
    }
    Ok(out)
}

/// Collapses a weighted pure-state list into one density matrix.
pub fn ensemble_density(ensemble: &[(f64, PureState)]) -> Result<DensityMatrix> {
    let (_, first) = ensemble
        .first()
        .ok_or_else(|| Error::Parameter("empty ensemble".into()))?;
    let (na, nb) = (first.n_alice(), first.n_bob());
    let components: Vec<(f64, DensityMatrix)> = ensemble
        .iter()
        .map(|(w, s)| {
            if (s.n_alice(), s.n_bob()) != (na, nb) {
                return Err(Error::Dimension("ensemble members have different partitions".into()));
            }
            Ok((*w, s.to_density()))
        })
        .collect::<Result<_>>()?;
    DensityMatrix::mixture(&components)
}
