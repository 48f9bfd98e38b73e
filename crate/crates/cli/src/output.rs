//! Report records and their JSON and CSV renderings.

use std::collections::BTreeMap;

use anyhow::Result;
use edplab_core::locc::ModelEvaluation;
use edplab_core::verify::{BoundKind, BoundReport, LemmaReport, OptimizationReport};
use serde::Serialize;
use serde_json::Value;

use crate::config::Format;

/// One row of a `bounds` or `sweep` report.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub theorem: String,
    pub params: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<BoundKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// `None` for skipped cells.
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchSummary {
    pub searched_class: String,
    pub converged: bool,
    pub best_restart: usize,
    pub restart_values: Vec<f64>,
}

impl From<BoundReport> for Record {
    fn from(r: BoundReport) -> Self {
        Record {
            theorem: r.theorem,
            params: r.params,
            kind: Some(r.kind),
            bound: Some(r.bound),
            achieved: Some(r.achieved),
            floor: r.floor,
            margin: Some(r.margin),
            tolerance: Some(r.tolerance),
            pass: Some(r.pass),
            seed: r.seed,
            note: r.note,
            search: None,
        }
    }
}

impl From<OptimizationReport> for Record {
    fn from(r: OptimizationReport) -> Self {
        let mut rec = Record::from(r.bound);
        rec.search = Some(SearchSummary {
            searched_class: r.searched_class,
            converged: r.converged,
            best_restart: r.best_restart,
            restart_values: r.restart_values,
        });
        rec
    }
}

impl Record {
    pub fn skipped(theorem: &str, params: BTreeMap<String, Value>, reason: &str) -> Self {
        Record {
            theorem: theorem.into(),
            params,
            kind: None,
            bound: None,
            achieved: None,
            floor: None,
            margin: None,
            tolerance: None,
            pass: None,
            seed: None,
            note: Some(format!("skipped: {reason}")),
            search: None,
        }
    }
}

/// What a command produced: the rendered report and whether every check
/// in it passed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub body: String,
    pub pass: bool,
    pub rows: usize,
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Shortest round-trip form, with exponents for tiny values.
fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn param(params: &BTreeMap<String, Value>, key: &str) -> String {
    match params.get(key) {
        Some(Value::String(s)) => s.clone(),
        Some(v) => v.to_string(),
        None => String::new(),
    }
}

pub fn render_records(records: &[Record], format: Format) -> Result<Outcome> {
    let pass = records.iter().all(|r| r.pass != Some(false));
    let body = match format {
        Format::Json => json(&records)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "theorem",
                "protocol",
                "n",
                "r",
                "p",
                "epsilon",
                "s",
                "ancillas_alice",
                "ancillas_bob",
                "bound",
                "achieved",
                "floor",
                "margin",
                "pass",
                "seed",
                "note",
            ])?;
            for r in records {
                let p = &r.params;
                w.write_record([
                    r.theorem.clone(),
                    param(p, "protocol"),
                    param(p, "n"),
                    param(p, "r"),
                    param(p, "p"),
                    param(p, "epsilon"),
                    param(p, "s"),
                    param(p, "ancillas_alice"),
                    param(p, "ancillas_bob"),
                    opt_num(r.bound),
                    opt_num(r.achieved),
                    opt_num(r.floor),
                    opt_num(r.margin),
                    opt(r.pass),
                    opt(r.seed),
                    r.note.clone().unwrap_or_default(),
                ])?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    Ok(Outcome {
        body,
        pass,
        rows: records.len(),
    })
}

pub fn render_lemmas(report: &LemmaReport, format: Format) -> Result<Outcome> {
    let body = match format {
        Format::Json => json(report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "lemma",
                "instances",
                "violations",
                "worst_margin",
                "tolerance",
                "pass",
                "seed",
            ])?;
            for l in &report.lemmas {
                w.write_record([
                    l.name.clone(),
                    l.instances.to_string(),
                    l.violations.to_string(),
                    num(l.worst_margin),
                    num(l.tolerance),
                    l.pass.to_string(),
                    report.seed.to_string(),
                ])?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    Ok(Outcome {
        body,
        pass: report.pass,
        rows: report.lemmas.len(),
    })
}

pub fn render_evaluation(eval: &ModelEvaluation, format: Format) -> Result<Outcome> {
    let body = match format {
        Format::Json => json(eval)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "protocol",
                "model",
                "bits",
                "state",
                "fidelity",
                "success_probability",
                "conditional_fidelity",
            ])?;
            let model = serde_json::to_value(eval.model)?;
            let model = model.get("model").and_then(Value::as_str).unwrap_or("").to_string();
            for s in &eval.states {
                w.write_record([
                    eval.protocol.clone(),
                    model.clone(),
                    eval.bits.to_string(),
                    s.label.clone(),
                    num(s.fidelity),
                    num(s.success_probability),
                    opt_num(s.conditional_fidelity),
                ])?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    Ok(Outcome {
        body,
        pass: true,
        rows: eval.states.len(),
    })
}
