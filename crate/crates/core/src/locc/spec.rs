//! JSON form of a protocol.
//!
//! ```json
//! {
//!   "name": "example",
//!   "n": 2,
//!   "ancillas": {"alice": 0, "bob": 0},
//!   "shared_randomness": [0.5, 0.5],
//!   "rounds": [
//!     {"party": "bob", "kind": "message", "targets": [1], "kraus": [[P0], [P1]]}
//!   ],
//!   "accept_rule": {"kind": "always"},
//!   "output_pair": 0
//! }
//! ```
//!
//! Matrices are nested arrays of `[re, im]` pairs. An operation is a list
//! of outcomes, each a list of Kraus matrices. Each round or instrument
//! accept rule gives exactly one of `kraus` (shared), `kraus_by_seed`,
//! `kraus_by_transcript` or `kraus_by_key` (index `seed · 2^k + transcript`,
//! where `k` is the number of bits sent before it). A `"table"` accept rule
//! gives SUCC probabilities through `r`, `r_by_seed`, `r_by_transcript` or
//! `r_by_key` instead. `output_pair` is an index or `{"per_seed": [...]}`.

use serde::{Deserialize, Serialize};

use super::op::{Keyed, Operation};
use super::protocol::{AcceptRule, OutputPair, Protocol, Step};
use crate::qcore::serde_matrix::{matrix_to_rows, rows_to_matrix, JsonMatrix};
use crate::qcore::Party;
use crate::{Error, Result};

type OperationJson = Vec<Vec<JsonMatrix>>;

/// One table in each of the four keyings; exactly one is set.
type KeyedJson = (
    Option<OperationJson>,
    Option<Vec<OperationJson>>,
    Option<Vec<OperationJson>>,
    Option<Vec<OperationJson>>,
);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AncillaSpec {
    #[serde(default)]
    pub alice: usize,
    #[serde(default)]
    pub bob: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundKind {
    #[default]
    Message,
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundSpec {
    pub party: Party,
    #[serde(default)]
    pub kind: RoundKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<OperationJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus_by_seed: Option<Vec<OperationJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus_by_transcript: Option<Vec<OperationJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus_by_key: Option<Vec<OperationJson>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcceptKind {
    #[default]
    Always,
    Table,
    Instrument,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptSpec {
    #[serde(default)]
    pub kind: AcceptKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_by_seed: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_by_transcript: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_by_key: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<OperationJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus_by_seed: Option<Vec<OperationJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus_by_transcript: Option<Vec<OperationJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus_by_key: Option<Vec<OperationJson>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutputSpec {
    Fixed(usize),
    PerSeed { per_seed: Vec<usize> },
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec::Fixed(0)
    }
}

fn point_mass() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub n: usize,
    #[serde(default)]
    pub ancillas: AncillaSpec,
    #[serde(default = "point_mass")]
    pub shared_randomness: Vec<f64>,
    #[serde(default)]
    pub rounds: Vec<RoundSpec>,
    #[serde(default)]
    pub accept_rule: AcceptSpec,
    #[serde(default)]
    pub output_pair: OutputSpec,
}

fn spec_err(path: impl Into<String>, e: impl std::fmt::Display) -> Error {
    Error::Spec {
        path: path.into(),
        message: e.to_string(),
    }
}

fn build_op(json: &OperationJson, targets: &Option<Vec<usize>>, path: &str) -> Result<Operation> {
    let branches = json
        .iter()
        .enumerate()
        .map(|(b, kraus)| {
            kraus
                .iter()
                .enumerate()
                .map(|(k, m)| rows_to_matrix(m).map_err(|e| spec_err(format!("{path}[{b}][{k}]"), e)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Operation::new(targets.clone(), branches).map_err(|e| spec_err(path, e))
}

fn build_table(
    path: &str,
    targets: &Option<Vec<usize>>,
    shared: &Option<OperationJson>,
    by_seed: &Option<Vec<OperationJson>>,
    by_transcript: &Option<Vec<OperationJson>>,
    by_key: &Option<Vec<OperationJson>>,
) -> Result<Keyed<Operation>> {
    let list = |field: &str, v: &[OperationJson]| {
        v.iter()
            .enumerate()
            .map(|(i, j)| build_op(j, targets, &format!("{path}.{field}[{i}]")))
            .collect::<Result<Vec<_>>>()
    };
    match (shared, by_seed, by_transcript, by_key) {
        (Some(j), None, None, None) => Ok(Keyed::Shared(build_op(j, targets, &format!("{path}.kraus"))?)),
        (None, Some(v), None, None) => Ok(Keyed::BySeed(list("kraus_by_seed", v)?)),
        (None, None, Some(v), None) => Ok(Keyed::ByTranscript(list("kraus_by_transcript", v)?)),
        (None, None, None, Some(v)) => Ok(Keyed::BySeedAndTranscript(list("kraus_by_key", v)?)),
        _ => Err(spec_err(
            path,
            "exactly one of kraus, kraus_by_seed, kraus_by_transcript, kraus_by_key is required",
        )),
    }
}

impl ProtocolSpec {
    /// Parses JSON, reporting the field path of any error.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            spec_err(path, e.into_inner())
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| spec_err(".", e))
    }

    pub fn build(&self) -> Result<Protocol> {
        let mut steps = Vec::with_capacity(self.rounds.len());
        for (i, round) in self.rounds.iter().enumerate() {
            let path = format!("rounds[{i}]");
            let op = build_table(
                &path,
                &round.targets,
                &round.kraus,
                &round.kraus_by_seed,
                &round.kraus_by_transcript,
                &round.kraus_by_key,
            )?;
            steps.push(match round.kind {
                RoundKind::Message => Step::Message { party: round.party, op },
                RoundKind::Local => Step::Local { party: round.party, op },
            });
        }
        let a = &self.accept_rule;
        let accept = match a.kind {
            AcceptKind::Always => AcceptRule::Always,
            AcceptKind::Instrument => AcceptRule::Alice(build_table(
                "accept_rule",
                &a.targets,
                &a.kraus,
                &a.kraus_by_seed,
                &a.kraus_by_transcript,
                &a.kraus_by_key,
            )?),
            AcceptKind::Table => {
                let coins = |field: &str, v: &[f64]| {
                    v.iter()
                        .enumerate()
                        .map(|(i, &r)| Operation::coin(r).map_err(|e| spec_err(format!("accept_rule.{field}[{i}]"), e)))
                        .collect::<Result<Vec<_>>>()
                };
                let table = match (&a.r, &a.r_by_seed, &a.r_by_transcript, &a.r_by_key) {
                    (Some(r), None, None, None) => {
                        Keyed::Shared(Operation::coin(*r).map_err(|e| spec_err("accept_rule.r", e))?)
                    }
                    (None, Some(v), None, None) => Keyed::BySeed(coins("r_by_seed", v)?),
                    (None, None, Some(v), None) => Keyed::ByTranscript(coins("r_by_transcript", v)?),
                    (None, None, None, Some(v)) => Keyed::BySeedAndTranscript(coins("r_by_key", v)?),
                    _ => {
                        return Err(spec_err(
                            "accept_rule",
                            "exactly one of r, r_by_seed, r_by_transcript, r_by_key is required",
                        ))
                    }
                };
                AcceptRule::Alice(table)
            }
        };
        let output = match &self.output_pair {
            OutputSpec::Fixed(k) => OutputPair::Fixed(*k),
            OutputSpec::PerSeed { per_seed } => OutputPair::PerSeed(per_seed.clone()),
        };
        let protocol = Protocol {
            name: self.name.clone().unwrap_or_else(|| "custom".into()),
            n: self.n,
            ancillas: (self.ancillas.alice, self.ancillas.bob),
            shared_randomness: self.shared_randomness.clone(),
            steps,
            accept,
            output,
        };
        protocol.validate().map_err(|e| spec_err(".", e))?;
        Ok(protocol)
    }

    /// The JSON form of an existing protocol. Fails if a table mixes
    /// target lists, which the format stores once per table.
    pub fn from_protocol(p: &Protocol) -> Result<Self> {
        let op_json = |op: &Operation| -> OperationJson {
            op.branches()
                .iter()
                .map(|b| b.iter().map(matrix_to_rows).collect())
                .collect()
        };
        let targets_of = |t: &Keyed<Operation>, path: String| -> Result<Option<Vec<usize>>> {
            let first = t.values().next().and_then(|op| op.targets());
            if t.values().any(|op| op.targets() != first) {
                return Err(Error::Spec {
                    path,
                    message: "operations in one table act on different targets".into(),
                });
            }
            Ok(first.map(<[usize]>::to_vec))
        };
        let fill = |t: &Keyed<Operation>| {
            let mut out: KeyedJson = (None, None, None, None);
            match t {
                Keyed::Shared(op) => out.0 = Some(op_json(op)),
                Keyed::BySeed(v) => out.1 = Some(v.iter().map(op_json).collect()),
                Keyed::ByTranscript(v) => out.2 = Some(v.iter().map(op_json).collect()),
                Keyed::BySeedAndTranscript(v) => out.3 = Some(v.iter().map(op_json).collect()),
            }
            out
        };
        let rounds = p
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let (kraus, kraus_by_seed, kraus_by_transcript, kraus_by_key) = fill(s.op());
                Ok(RoundSpec {
                    party: s.party(),
                    kind: if s.is_message() {
                        RoundKind::Message
                    } else {
                        RoundKind::Local
                    },
                    targets: targets_of(s.op(), format!("rounds[{i}].targets"))?,
                    kraus,
                    kraus_by_seed,
                    kraus_by_transcript,
                    kraus_by_key,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let accept_rule = match &p.accept {
            AcceptRule::Always => AcceptSpec::default(),
            AcceptRule::Alice(t) => {
                let (kraus, kraus_by_seed, kraus_by_transcript, kraus_by_key) = fill(t);
                AcceptSpec {
                    kind: AcceptKind::Instrument,
                    targets: targets_of(t, "accept_rule.targets".into())?,
                    kraus,
                    kraus_by_seed,
                    kraus_by_transcript,
                    kraus_by_key,
                    ..AcceptSpec::default()
                }
            }
        };
        Ok(ProtocolSpec {
            name: Some(p.name.clone()),
            n: p.n,
            ancillas: AncillaSpec {
                alice: p.ancillas.0,
                bob: p.ancillas.1,
            },
            shared_randomness: p.shared_randomness.clone(),
            rounds,
            accept_rule,
            output_pair: match &p.output {
                OutputPair::Fixed(k) => OutputSpec::Fixed(*k),
                OutputPair::PerSeed(v) => OutputSpec::PerSeed { per_seed: v.clone() },
            },
        })
    }
}
