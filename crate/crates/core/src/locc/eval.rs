use rayon::prelude::*;
use serde::Serialize;

use super::protocol::Protocol;
use super::run::{ideal_success_probability, run};
use crate::errmodels::ErrorModel;
use crate::{Error, Result};

/// A protocol's result on one state of a model.
#[derive(Debug, Clone, Serialize)]
pub struct StateEvaluation {
    pub label: String,
    pub fidelity: f64,
    pub success_probability: f64,
    pub conditional_fidelity: Option<f64>,
}

/// Worst case of a protocol over a model's evaluated states.
#[derive(Debug, Clone, Serialize)]
pub struct ModelEvaluation {
    pub protocol: String,
    pub model: ErrorModel,
    pub bits: usize,
    pub ideal_success_probability: f64,
    /// Minimum output fidelity over the evaluated states.
    pub fidelity: f64,
    pub worst_state: String,
    /// Minimum conditional fidelity; `None` if some state is never accepted.
    pub conditional_fidelity: Option<f64>,
    pub worst_conditional_state: Option<String>,
    /// False for the fidelity model, where only the witness `ρ₀` is tried
    /// and the minimum is an upper estimate.
    pub exhaustive: bool,
    pub states: Vec<StateEvaluation>,
}

pub fn evaluate_model(protocol: &Protocol, model: &ErrorModel) -> Result<ModelEvaluation> {
    if model.n() != protocol.n {
        return Err(Error::Parameter(format!(
            "protocol has n = {} but the model has n = {}",
            protocol.n,
            model.n()
        )));
    }
    let inputs = model.evaluation_states()?;
    let states: Vec<StateEvaluation> = inputs
        .par_iter()
        .map(|ms| {
            let r = run(protocol, &ms.state)?;
            Ok(StateEvaluation {
                label: ms.label.clone(),
                fidelity: r.fidelity(),
                success_probability: r.success_probability,
                conditional_fidelity: r.conditional_fidelity().ok(),
            })
        })
        .collect::<Result<_>>()?;
    let worst = states
        .iter()
        .min_by(|a, b| a.fidelity.total_cmp(&b.fidelity))
        .ok_or_else(|| Error::Parameter("model has no states".into()))?;
    let conditional: Option<Vec<(f64, &str)>> = states
        .iter()
        .map(|s| s.conditional_fidelity.map(|f| (f, s.label.as_str())))
        .collect();
    let worst_conditional = conditional.and_then(|c| c.into_iter().min_by(|a, b| a.0.total_cmp(&b.0)));
    Ok(ModelEvaluation {
        protocol: protocol.name.clone(),
        model: *model,
        bits: protocol.bits(),
        ideal_success_probability: ideal_success_probability(protocol)?,
        fidelity: worst.fidelity,
        worst_state: worst.label.clone(),
        conditional_fidelity: worst_conditional.map(|w| w.0),
        worst_conditional_state: worst_conditional.map(|w| w.1.to_string()),
        exhaustive: !matches!(model, ErrorModel::Fidelity { .. }),
        states,
    })
}

/// `F_M(P)`: minimum output fidelity over the model.
pub fn protocol_fidelity(protocol: &Protocol, model: &ErrorModel) -> Result<f64> {
    Ok(evaluate_model(protocol, model)?.fidelity)
}

/// `F^c_M(P)`: minimum conditional fidelity over the model.
pub fn conditional_fidelity(protocol: &Protocol, model: &ErrorModel) -> Result<f64> {
    evaluate_model(protocol, model)?
        .conditional_fidelity
        .ok_or(Error::ZeroAcceptance)
}
