use rayon::prelude::*;
use serde::Serialize;

use super::op::{Keyed, Operation};
use super::protocol::{AcceptRule, Protocol, Step};
use crate::qcore::kernel::{apply_kraus_sum, apply_left_columns, PreparedOp, TargetLayout};
use crate::qcore::partial_trace_matrix;
use crate::qcore::{
    linalg, phi_plus_overlap, tensor, AnyState, CMatrix, CVector, DensityMatrix, Party, PureState, Qubit, C64,
};
use crate::{tolerance, Error, Result};

/// What to keep from a run beyond the aggregate output.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Record each party's normalized local state at every node and leaf.
    pub record_local_states: bool,
}

/// The bits sent so far, first bit most significant in `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transcript {
    pub value: usize,
    pub len: usize,
}

impl Transcript {
    pub const EMPTY: Transcript = Transcript { value: 0, len: 0 };

    pub fn push(self, bit: usize) -> Transcript {
        Transcript {
            value: (self.value << 1) | bit,
            len: self.len + 1,
        }
    }

    pub fn bit(&self, i: usize) -> usize {
        (self.value >> (self.len - 1 - i)) & 1
    }

    /// The transcript without its last bit.
    pub fn parent(&self) -> Option<Transcript> {
        (self.len > 0).then(|| Transcript {
            value: self.value >> 1,
            len: self.len - 1,
        })
    }
}

impl std::fmt::Display for Transcript {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.len == 0 {
            return f.write_str("-");
        }
        for i in 0..self.len {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

impl Serialize for Transcript {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A node of the transcript tree.
#[derive(Debug, Clone)]
pub struct NodeRecord {
    pub transcript: Transcript,
    /// Probability of reaching this node, given the seed.
    pub probability: f64,
    /// Local states right after the message that produced the node.
    pub alice: Option<DensityMatrix>,
    pub bob: Option<DensityMatrix>,
    /// Local states right before the next message is sent, after any
    /// silent steps. `None` at full depth.
    pub departure_alice: Option<DensityMatrix>,
    pub departure_bob: Option<DensityMatrix>,
}

impl NodeRecord {
    fn new(transcript: Transcript, probability: f64, alice: Option<DensityMatrix>, bob: Option<DensityMatrix>) -> Self {
        NodeRecord {
            transcript,
            probability,
            alice,
            bob,
            departure_alice: None,
            departure_bob: None,
        }
    }
}

/// A complete transcript, after any trailing silent steps.
#[derive(Debug, Clone)]
pub struct LeafRecord {
    pub transcript: Transcript,
    pub probability: f64,
    /// `r_t`: probability that Alice declares SUCC at this leaf.
    pub accept_probability: f64,
    /// Normalized output pair at this leaf, before the accept decision.
    pub output: Option<DensityMatrix>,
    pub alice: Option<DensityMatrix>,
    pub bob: Option<DensityMatrix>,
}

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub seed: usize,
    pub weight: f64,
    pub output_pair: usize,
    /// Nodes in breadth-first order, root first.
    pub nodes: Vec<NodeRecord>,
    pub leaves: Vec<LeafRecord>,
    output: CMatrix,
    accepted: CMatrix,
}

impl SeedRun {
    /// `Σ_t p_t r_t` for this seed.
    pub fn success_probability(&self) -> f64 {
        self.leaves.iter().map(|l| l.probability * l.accept_probability).sum()
    }
}

/// Result of an exact run: per-seed transcript trees and the aggregate
/// (seed-averaged) output and accepted output.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub seeds: Vec<SeedRun>,
    pub success_probability: f64,
    pub output: DensityMatrix,
    accepted: CMatrix,
}

impl RunResult {
    /// The output conditioned on SUCC.
    pub fn conditional_output(&self) -> Result<DensityMatrix> {
        if self.success_probability <= tolerance::NEGLIGIBLE_PROBABILITY {
            return Err(Error::ZeroAcceptance);
        }
        let m = &self.accepted * C64::new(1.0 / self.success_probability, 0.0);
        Ok(DensityMatrix::from_parts_unchecked(1, 1, m))
    }

    /// `F̃` of the output.
    pub fn fidelity(&self) -> f64 {
        phi_plus_overlap(self.output.matrix())
    }

    /// `F̃` of the conditional output.
    pub fn conditional_fidelity(&self) -> Result<f64> {
        Ok(phi_plus_overlap(self.conditional_output()?.matrix()))
    }

    /// Leaf list as JSON rows, one per (seed, transcript).
    pub fn leaves_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .seeds
            .iter()
            .flat_map(|s| {
                s.leaves.iter().map(move |l| {
                    serde_json::json!({
                        "seed": s.seed,
                        "transcript": l.transcript,
                        "probability": l.probability,
                        "accept_probability": l.accept_probability,
                        "output_pair": s.output_pair,
                        "leaf_fidelity": l.output.as_ref().map(|o| phi_plus_overlap(o.matrix())),
                    })
                })
            })
            .collect();
        serde_json::json!({
            "success_probability": self.success_probability,
            "fidelity": self.fidelity(),
            "conditional_fidelity": self.conditional_fidelity().ok(),
            "leaves": rows,
        })
    }
}

struct Frame<'a> {
    protocol: &'a Protocol,
    na: usize,
    nb: usize,
    options: RunOptions,
}

/// Unnormalized state of one transcript branch. Stays a vector while every
/// Kraus list applied to it has a single operator.
enum Branch {
    Pure(CVector),
    Mixed(CMatrix),
}

impl Branch {
    fn weight(&self) -> f64 {
        match self {
            Branch::Pure(v) => v.norm_squared(),
            Branch::Mixed(m) => trace_re(m),
        }
    }

    fn apply(&self, ops: &[PreparedOp], layout: &TargetLayout) -> Branch {
        match self {
            Branch::Pure(v) if ops.len() <= 1 => {
                let mut w = v.clone();
                match ops.first() {
                    Some(op) => {
                        let dim = w.len();
                        apply_left_columns(op, layout, w.as_mut_slice(), dim);
                    }
                    None => w.fill(C64::new(0.0, 0.0)),
                }
                Branch::Pure(w)
            }
            Branch::Pure(v) => Branch::Mixed(apply_kraus_sum(ops, layout, &(v * v.adjoint()))),
            Branch::Mixed(m) => Branch::Mixed(apply_kraus_sum(ops, layout, m)),
        }
    }
}

impl Frame<'_> {
    fn layout(&self, party: Party, op: &Operation) -> Result<TargetLayout> {
        let local: Vec<usize> = match op.targets() {
            Some(t) => t.to_vec(),
            None => (0..self.protocol.register_size(party)).collect(),
        };
        let globals = local
            .iter()
            .map(|&index| Qubit { party, index }.global(self.na, self.nb))
            .collect::<Result<Vec<_>>>()?;
        TargetLayout::new(&globals, self.na + self.nb)
    }

    fn lookup<'k>(&self, table: &'k Keyed<Operation>, seed: usize, t: Transcript) -> Result<&'k Operation> {
        table
            .get(seed, t.value, t.len)
            .ok_or_else(|| Error::Parameter(format!("no operation for seed {seed}, transcript {t}")))
    }

    fn reduce(&self, s: &Branch, keep: &[Qubit]) -> Result<CMatrix> {
        match s {
            Branch::Pure(v) => Ok(PureState::from_parts_unchecked(self.na, self.nb, v.clone())
                .reduced(keep)?
                .into_matrix()),
            Branch::Mixed(m) => partial_trace_matrix(m, self.na, self.nb, keep),
        }
    }

    fn local_states(&self, s: &Branch, p: f64) -> Result<(Option<DensityMatrix>, Option<DensityMatrix>)> {
        if !self.options.record_local_states || p <= tolerance::NEGLIGIBLE_PROBABILITY {
            return Ok((None, None));
        }
        let scale = C64::new(1.0 / p, 0.0);
        let alice: Vec<Qubit> = (0..self.na).map(Qubit::alice).collect();
        let bob: Vec<Qubit> = (0..self.nb).map(Qubit::bob).collect();
        Ok((
            Some(DensityMatrix::from_parts_unchecked(
                self.na,
                0,
                self.reduce(s, &alice)? * scale,
            )),
            Some(DensityMatrix::from_parts_unchecked(
                0,
                self.nb,
                self.reduce(s, &bob)? * scale,
            )),
        ))
    }

    fn pair(&self, s: &Branch, k: usize) -> Result<CMatrix> {
        self.reduce(s, &[Qubit::alice(k), Qubit::bob(k)])
    }
}

fn trace_re(m: &CMatrix) -> f64 {
    linalg::trace(m).re
}

fn with_ancillas(input: &AnyState, ancillas: (usize, usize)) -> Result<Branch> {
    let zeros = PureState::basis(ancillas.0, ancillas.1, 0, 0)?;
    Ok(match input {
        AnyState::Pure(psi) if ancillas == (0, 0) => Branch::Pure(psi.amplitudes().clone()),
        AnyState::Pure(psi) => Branch::Pure(tensor(psi, &zeros)?.amplitudes().clone()),
        AnyState::Mixed(rho) if ancillas == (0, 0) => Branch::Mixed(rho.matrix().clone()),
        AnyState::Mixed(rho) => Branch::Mixed(tensor(rho, &zeros.to_density())?.into_matrix()),
    })
}

fn run_seed(frame: &Frame<'_>, input: &AnyState, seed: usize) -> Result<SeedRun> {
    let protocol = frame.protocol;
    let k = protocol
        .output
        .for_seed(seed)
        .ok_or_else(|| Error::Parameter(format!("no output pair for seed {seed}")))?;
    let weight = protocol.shared_randomness[seed];

    // Nothing happens to the input: reduce it directly.
    if protocol.steps.is_empty() && protocol.accept == AcceptRule::Always && !frame.options.record_local_states {
        let out = input.reduced(&[Qubit::alice(k), Qubit::bob(k)])?;
        let m = out.matrix().clone();
        return Ok(SeedRun {
            seed,
            weight,
            output_pair: k,
            nodes: vec![NodeRecord::new(Transcript::EMPTY, 1.0, None, None)],
            leaves: vec![LeafRecord {
                transcript: Transcript::EMPTY,
                probability: 1.0,
                accept_probability: 1.0,
                output: Some(out),
                alice: None,
                bob: None,
            }],
            output: m.clone(),
            accepted: m,
        });
    }

    let start = with_ancillas(input, protocol.ancillas)?;
    let (alice, bob) = frame.local_states(&start, 1.0)?;
    let mut nodes = vec![NodeRecord::new(Transcript::EMPTY, 1.0, alice, bob)];
    let mut frontier: Vec<(Transcript, f64, Option<Branch>)> = vec![(Transcript::EMPTY, 1.0, Some(start))];

    for step in &protocol.steps {
        match step {
            Step::Local { party, op } => {
                for (t, _, state) in frontier.iter_mut() {
                    if let Some(s) = state.as_mut() {
                        let op = frame.lookup(op, seed, *t)?;
                        let layout = frame.layout(*party, op)?;
                        *s = s.apply(&op.prepared()[0], &layout);
                    }
                }
            }
            Step::Message { party, op } => {
                let mut next = Vec::with_capacity(frontier.len() * 2);
                for (t, p_t, state) in frontier {
                    if let Some(s) = &state {
                        // Nodes are stored breadth-first, so depth-d node v sits at 2^d - 1 + v.
                        let (alice, bob) = frame.local_states(s, p_t)?;
                        let node = &mut nodes[(1usize << t.len) - 1 + t.value];
                        node.departure_alice = alice;
                        node.departure_bob = bob;
                    }
                    let prepared = match &state {
                        Some(_) => {
                            let op = frame.lookup(op, seed, t)?;
                            Some((op.prepared(), frame.layout(*party, op)?))
                        }
                        None => None,
                    };
                    for bit in 0..2 {
                        let child = t.push(bit);
                        let (p, s) = match (&state, &prepared) {
                            (Some(s), Some((branches, layout))) => {
                                let out = s.apply(&branches[bit], layout);
                                let p = out.weight();
                                if p > tolerance::NEGLIGIBLE_PROBABILITY {
                                    (p, Some(out))
                                } else {
                                    (p.max(0.0), None)
                                }
                            }
                            _ => (0.0, None),
                        };
                        let (alice, bob) = match &s {
                            Some(m) => frame.local_states(m, p)?,
                            None => (None, None),
                        };
                        nodes.push(NodeRecord::new(child, p, alice, bob));
                        next.push((child, p, s));
                    }
                }
                frontier = next;
            }
        }
    }

    let mut output = CMatrix::zeros(4, 4);
    let mut accepted = CMatrix::zeros(4, 4);
    let mut leaves = Vec::with_capacity(frontier.len());
    for (t, p, state) in frontier {
        let Some(s) = state else {
            leaves.push(LeafRecord {
                transcript: t,
                probability: p,
                accept_probability: 0.0,
                output: None,
                alice: None,
                bob: None,
            });
            continue;
        };
        let out = frame.pair(&s, k)?;
        let (acc, r) = match &protocol.accept {
            AcceptRule::Always => (out.clone(), 1.0),
            AcceptRule::Alice(table) => {
                let op = frame.lookup(table, seed, t)?;
                let layout = frame.layout(Party::Alice, op)?;
                let a = s.apply(&op.prepared()[0], &layout);
                let r = (a.weight() / p).clamp(0.0, 1.0);
                (frame.pair(&a, k)?, r)
            }
        };
        let (alice, bob) = frame.local_states(&s, p)?;
        let normalized = DensityMatrix::from_parts_unchecked(1, 1, &out * C64::new(1.0 / p, 0.0));
        output += &out;
        accepted += &acc;
        leaves.push(LeafRecord {
            transcript: t,
            probability: p,
            accept_probability: r,
            output: Some(normalized),
            alice,
            bob,
        });
    }
    Ok(SeedRun {
        seed,
        weight,
        output_pair: k,
        nodes,
        leaves,
        output,
        accepted,
    })
}

fn check_input(protocol: &Protocol, input: &AnyState) -> Result<()> {
    if input.n_alice() != protocol.n || input.n_bob() != protocol.n {
        return Err(Error::Dimension(format!(
            "protocol on {} pairs given a ({}, {}) input",
            protocol.n,
            input.n_alice(),
            input.n_bob()
        )));
    }
    Ok(())
}

/// Exact evaluation by enumerating every seed and transcript.
pub fn run(protocol: &Protocol, input: &AnyState) -> Result<RunResult> {
    run_with(protocol, input, RunOptions::default())
}

pub fn run_with(protocol: &Protocol, input: &AnyState, options: RunOptions) -> Result<RunResult> {
    protocol.validate()?;
    check_input(protocol, input)?;
    let frame = Frame {
        protocol,
        na: protocol.register_size(Party::Alice),
        nb: protocol.register_size(Party::Bob),
        options,
    };
    let seeds: Vec<SeedRun> = (0..protocol.seeds())
        .into_par_iter()
        .map(|seed| run_seed(&frame, input, seed))
        .collect::<Result<_>>()?;
    let mut output = CMatrix::zeros(4, 4);
    let mut accepted = CMatrix::zeros(4, 4);
    for s in &seeds {
        output += &s.output * C64::new(s.weight, 0.0);
        accepted += &s.accepted * C64::new(s.weight, 0.0);
    }
    let success_probability = trace_re(&accepted).clamp(0.0, 1.0);
    Ok(RunResult {
        seeds,
        success_probability,
        output: DensityMatrix::from_parts_unchecked(1, 1, output),
        accepted,
    })
}

/// Success probability on `Ψ_n`.
pub fn ideal_success_probability(protocol: &Protocol) -> Result<f64> {
    Ok(run(protocol, &AnyState::Pure(PureState::epr_pairs(protocol.n)?))?.success_probability)
}
