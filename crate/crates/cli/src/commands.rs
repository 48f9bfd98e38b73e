use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use edplab_core::errmodels::ErrorModel;
use edplab_core::locc::{evaluate_model, make_first_pair, make_simple_random_hash, ProtocolSpec};
use edplab_core::verify::{
    lemma_suite, optimize_0bit_depolarization, optimize_0bit_measure_r, verify_first_pair_depolarization,
    verify_neg_fidelity, verify_pos_fidelity, verify_random_pair_measure_r, OptimizerConfig,
};
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{Command, ExperimentConfig, ModelKind};
use crate::output::{render_evaluation, render_lemmas, render_records, Outcome, Record};

pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Lemmas => lemmas(cfg),
        Command::Bounds => grid(cfg, bounds_cell),
        Command::Sweep => grid(cfg, sweep_cell),
        Command::Protocol => protocol(cfg),
    }
}

fn lemmas(cfg: &ExperimentConfig) -> Result<Outcome> {
    let report = lemma_suite(cfg.seed, cfg.instances, cfg.tolerance)?;
    render_lemmas(&report, cfg.format)
}

/// One grid point. Fields the model does not use stay `None`.
#[derive(Debug, Clone, Copy)]
struct Cell {
    model: ModelKind,
    n: usize,
    r: Option<usize>,
    p: Option<f64>,
    epsilon: Option<f64>,
    s: Option<usize>,
    ancillas: usize,
}

impl Cell {
    fn params(&self) -> BTreeMap<String, Value> {
        let mut m = BTreeMap::new();
        m.insert("n".into(), self.n.into());
        if let Some(r) = self.r {
            m.insert("r".into(), r.into());
        }
        if let Some(p) = self.p {
            m.insert("p".into(), p.into());
        }
        if let Some(e) = self.epsilon {
            m.insert("epsilon".into(), e.into());
        }
        if let Some(s) = self.s {
            m.insert("s".into(), s.into());
        }
        m
    }
}

fn required<'a, T>(v: &'a Option<Vec<T>>, flag: &str, model: ModelKind) -> Result<&'a [T]> {
    v.as_deref()
        .with_context(|| format!("--{flag} is required for the {model:?} model"))
}

fn cells(cfg: &ExperimentConfig, with_ancillas: bool) -> Result<Vec<Cell>> {
    let model = cfg.model.context("--model is required")?;
    let ns = required(&cfg.n, "n", model)?;
    let ancillas: &[usize] = if with_ancillas { &cfg.ancillas } else { &[0] };
    let base = |n| Cell {
        model,
        n,
        r: None,
        p: None,
        epsilon: None,
        s: None,
        ancillas: 0,
    };
    let mut out = Vec::new();
    for &n in ns {
        match model {
            ModelKind::MeasureR => {
                for &r in required(&cfg.r, "r", model)? {
                    for &a in ancillas {
                        out.push(Cell {
                            r: Some(r),
                            ancillas: a,
                            ..base(n)
                        });
                    }
                }
            }
            ModelKind::Depolarization => {
                for &p in required(&cfg.p, "p", model)? {
                    for &a in ancillas {
                        out.push(Cell {
                            p: Some(p),
                            ancillas: a,
                            ..base(n)
                        });
                    }
                }
            }
            ModelKind::Fidelity => {
                for &s in required(&cfg.s, "s", model)? {
                    for &e in required(&cfg.epsilon, "epsilon", model)? {
                        out.push(Cell {
                            s: Some(s),
                            epsilon: Some(e),
                            ..base(n)
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Evaluates every cell on the worker pool; rows keep grid order.
fn grid(cfg: &ExperimentConfig, eval: fn(&ExperimentConfig, &Cell) -> Result<Vec<Record>>) -> Result<Outcome> {
    let cells = cells(cfg, cfg.command == Command::Bounds)?;
    let rows: Vec<Vec<Record>> = cells.par_iter().map(|c| eval(cfg, c)).collect::<Result<_>>()?;
    render_records(&rows.concat(), cfg.format)
}

fn bounds_cell(cfg: &ExperimentConfig, c: &Cell) -> Result<Vec<Record>> {
    if cfg.restarts == 0 {
        bail!("--restarts must be at least 1");
    }
    let opt = OptimizerConfig {
        restarts: cfg.restarts,
        seed: cfg.seed,
        ..Default::default()
    };
    let anc = (c.ancillas, c.ancillas);
    Ok(match c.model {
        ModelKind::MeasureR => {
            let r = c.r.expect("measure-r cell");
            if r > c.n {
                vec![Record::skipped("neg_measure_r", c.params(), "r > n")]
            } else {
                vec![optimize_0bit_measure_r(c.n, r, anc, &opt)?.into()]
            }
        }
        ModelKind::Depolarization => {
            vec![optimize_0bit_depolarization(c.n, c.p.expect("depolarization cell"), anc, &opt)?.into()]
        }
        ModelKind::Fidelity => {
            let (s, e) = (c.s.expect("fidelity cell"), c.epsilon.expect("fidelity cell"));
            let protocol = match s {
                0 => make_first_pair(c.n)?,
                s if s >= c.n => return Ok(vec![Record::skipped("neg_fidelity", c.params(), "hash needs s < n")]),
                s => make_simple_random_hash(c.n, s)?,
            };
            vec![verify_neg_fidelity(&protocol, e)?.into()]
        }
    })
}

fn sweep_cell(_cfg: &ExperimentConfig, c: &Cell) -> Result<Vec<Record>> {
    Ok(match c.model {
        ModelKind::MeasureR => {
            let r = c.r.expect("measure-r cell");
            if r > c.n {
                vec![Record::skipped("neg_measure_r_tight", c.params(), "r > n")]
            } else {
                vec![verify_random_pair_measure_r(c.n, r)?.into()]
            }
        }
        ModelKind::Depolarization => {
            vec![verify_first_pair_depolarization(c.n, c.p.expect("depolarization cell"))?.into()]
        }
        ModelKind::Fidelity => {
            let (s, e) = (c.s.expect("fidelity cell"), c.epsilon.expect("fidelity cell"));
            if s >= c.n {
                vec![Record::skipped("pos_fidelity", c.params(), "hash needs s < n")]
            } else {
                vec![verify_pos_fidelity(c.n, s, e)?.into()]
            }
        }
    })
}

fn single<T: Copy>(v: &Option<Vec<T>>, flag: &str) -> Result<Option<T>> {
    match v.as_deref() {
        None => Ok(None),
        Some([x]) => Ok(Some(*x)),
        Some(_) => bail!("`protocol` takes a single value for --{flag}"),
    }
}

fn protocol(cfg: &ExperimentConfig) -> Result<Outcome> {
    let path = cfg.spec.as_ref().context("--spec is required for `protocol`")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let protocol = ProtocolSpec::from_json(&text)
        .and_then(|s| s.build())
        .with_context(|| format!("in {}", path.display()))?;
    let model = match &cfg.model_file {
        Some(file) => {
            let text = std::fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
            serde_json::from_str::<ErrorModel>(&text).with_context(|| format!("in {}", file.display()))?
        }
        None => {
            let kind = cfg.model.context("`protocol` needs --model or --model-file")?;
            let n = single(&cfg.n, "n")?.unwrap_or(protocol.n);
            let need =
                |v: Option<f64>, flag: &str| v.with_context(|| format!("--{flag} is required for the {kind:?} model"));
            match kind {
                ModelKind::MeasureR => ErrorModel::MeasureR {
                    n,
                    r: single(&cfg.r, "r")?.context("--r is required for the MeasureR model")?,
                },
                ModelKind::Depolarization => ErrorModel::Depolarization {
                    n,
                    p: need(single(&cfg.p, "p")?, "p")?,
                },
                ModelKind::Fidelity => ErrorModel::Fidelity {
                    n,
                    epsilon: need(single(&cfg.epsilon, "epsilon")?, "epsilon")?,
                },
            }
        }
    };
    let eval = evaluate_model(&protocol, &model)?;
    render_evaluation(&eval, cfg.format)
}
