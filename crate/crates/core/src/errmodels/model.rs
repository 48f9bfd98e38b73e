use rand::Rng;
use serde::{Deserialize, Serialize};

use super::depolar::depolarization_state;
use super::indicator::{enumerate_indicators, error_state};
use crate::qcore::{check_capacity, epr_fidelity, random, AnyState, CMatrix, DensityMatrix, PureState, C64};
use crate::{Error, Result};

/// The three error models. JSON form:
/// `{"model": "measure_r" | "depolarization" | "fidelity", "n": .., "r" | "p" | "epsilon": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ErrorModel {
    #[serde(alias = "measure-r")]
    MeasureR {
        n: usize,
        r: usize,
    },
    #[serde(alias = "depolar")]
    Depolarization {
        n: usize,
        p: f64,
    },
    Fidelity {
        n: usize,
        epsilon: f64,
    },
}

/// One state the model is evaluated on.
#[derive(Debug, Clone)]
pub struct ModelState {
    pub label: String,
    pub state: AnyState,
}

impl ErrorModel {
    pub fn n(&self) -> usize {
        match *self {
            ErrorModel::MeasureR { n, .. } | ErrorModel::Depolarization { n, .. } | ErrorModel::Fidelity { n, .. } => n,
        }
    }

    /// Short command-line name.
    pub fn name(&self) -> &'static str {
        match self {
            ErrorModel::MeasureR { .. } => "measure-r",
            ErrorModel::Depolarization { .. } => "depolar",
            ErrorModel::Fidelity { .. } => "fidelity",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::Parameter("error models need n >= 1".into()));
        }
        match *self {
            ErrorModel::MeasureR { n, r } if r > n => {
                Err(Error::Parameter(format!("measure-r needs r <= n, got r={r}, n={n}")))
            }
            ErrorModel::Depolarization { p, .. } if !(0.0..=1.0).contains(&p) => {
                Err(Error::Parameter(format!("depolarization needs 0 <= p <= 1, got {p}")))
            }
            ErrorModel::Fidelity { n, epsilon } => {
                epsilon_prime(n, epsilon)?;
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The states a protocol's worst case is taken over: every error state
    /// for measure-r, the single product state for depolarization, and the
    /// witness `ρ₀` for the fidelity model.
    pub fn evaluation_states(&self) -> Result<Vec<ModelState>> {
        self.validate()?;
        check_capacity(2 * self.n())?;
        match *self {
            ErrorModel::MeasureR { n, r } => enumerate_indicators(n, r)?
                .into_iter()
                .map(|v| {
                    Ok(ModelState {
                        label: v.to_string(),
                        state: AnyState::Pure(error_state(&v)?),
                    })
                })
                .collect(),
            ErrorModel::Depolarization { n, p } => Ok(vec![ModelState {
                label: "product".into(),
                state: AnyState::Mixed(depolarization_state(n, p)?),
            }]),
            ErrorModel::Fidelity { n, epsilon } => Ok(vec![ModelState {
                label: "witness".into(),
                state: AnyState::Mixed(fidelity_witness(n, epsilon)?),
            }]),
        }
    }
}

/// `ε′ = 4^n ε / (4^n − 1)`. Errors when the witness would not be a state.
pub fn epsilon_prime(n: usize, epsilon: f64) -> Result<f64> {
    if n == 0 || !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Parameter(format!(
            "fidelity model needs n >= 1 and 0 <= epsilon < 1, got n={n}, epsilon={epsilon}"
        )));
    }
    let d = 4f64.powi(n as i32);
    let e = d * epsilon / (d - 1.0);
    if e > 1.0 {
        return Err(Error::Parameter(format!(
            "epsilon {epsilon} exceeds {} for n={n}; no state is that far from the EPR pairs",
            (d - 1.0) / d
        )));
    }
    Ok(e)
}

/// `ρ₀ = (1 − ε′) Ψ_n + ε′ I/4^n`, with EPR fidelity exactly `1 − ε`.
pub fn fidelity_witness(n: usize, epsilon: f64) -> Result<DensityMatrix> {
    let e = epsilon_prime(n, epsilon)?;
    check_capacity(2 * n)?;
    let psi = PureState::epr_pairs(n)?.to_density().into_matrix();
    let dim = psi.nrows();
    let m = psi * C64::new(1.0 - e, 0.0) + CMatrix::identity(dim, dim) * C64::new(e / dim as f64, 0.0);
    Ok(DensityMatrix::from_parts_unchecked(n, n, m))
}

/// Random members of the fidelity model with EPR fidelity exactly `1 − ε`:
/// `(1 − t) Ψ_n + t σ` for random `σ`, with `t` solved for. Samples whose
/// `σ` is too close to `Ψ_n` are redrawn.
pub fn fidelity_model_samples<R: Rng + ?Sized>(
    n: usize,
    epsilon: f64,
    count: usize,
    rng: &mut R,
) -> Result<Vec<DensityMatrix>> {
    epsilon_prime(n, epsilon)?;
    check_capacity(2 * n)?;
    let psi = PureState::epr_pairs(n)?.to_density();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let rank = rng.random_range(1..=4);
        let sigma = random::random_density_matrix(n, n, rank, rng);
        let gap = 1.0 - epr_fidelity(&sigma)?;
        if gap < epsilon || gap <= 0.0 {
            continue;
        }
        let t = epsilon / gap;
        let m = psi.matrix() * C64::new(1.0 - t, 0.0) + sigma.matrix() * C64::new(t, 0.0);
        out.push(DensityMatrix::from_parts_unchecked(n, n, m));
    }
    Ok(out)
}
