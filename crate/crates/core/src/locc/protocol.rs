use super::op::{Keyed, Operation};
use crate::qcore::{check_capacity, Party};
use crate::{tolerance, Error, Result};

/// One step of a protocol.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    /// `party` applies a two-outcome instrument and announces the outcome.
    Message { party: Party, op: Keyed<Operation> },
    /// `party` applies a channel and says nothing.
    Local { party: Party, op: Keyed<Operation> },
}

impl Step {
    pub fn party(&self) -> Party {
        match self {
            Step::Message { party, .. } | Step::Local { party, .. } => *party,
        }
    }

    pub fn op(&self) -> &Keyed<Operation> {
        match self {
            Step::Message { op, .. } | Step::Local { op, .. } => op,
        }
    }

    pub fn is_message(&self) -> bool {
        matches!(self, Step::Message { .. })
    }
}

/// Alice's final SUCC/FAIL decision. Outcome 0 of the instrument is SUCC.
#[derive(Debug, Clone, PartialEq)]
pub enum AcceptRule {
    Always,
    Alice(Keyed<Operation>),
}

/// Which input pair is the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputPair {
    Fixed(usize),
    PerSeed(Vec<usize>),
}

impl OutputPair {
    pub fn for_seed(&self, seed: usize) -> Option<usize> {
        match self {
            OutputPair::Fixed(k) => Some(*k),
            OutputPair::PerSeed(v) => v.get(seed).copied(),
        }
    }
}

/// A two-party protocol: local steps and one-bit messages, a shared random
/// seed, Alice's accept rule and the designated output pair.
///
/// Alice's register holds her `n` input qubits followed by
/// `ancillas.0` workspace qubits prepared in `|0⟩`; likewise for Bob.
#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    pub name: String,
    pub n: usize,
    pub ancillas: (usize, usize),
    /// Distribution over seeds; a single entry means no shared randomness.
    pub shared_randomness: Vec<f64>,
    pub steps: Vec<Step>,
    pub accept: AcceptRule,
    pub output: OutputPair,
}

impl Protocol {
    /// Communication cost: one bit per message step.
    pub fn bits(&self) -> usize {
        self.steps.iter().filter(|s| s.is_message()).count()
    }

    pub fn seeds(&self) -> usize {
        self.shared_randomness.len()
    }

    pub fn is_deterministic(&self) -> bool {
        self.shared_randomness.len() == 1
    }

    pub fn register_size(&self, party: Party) -> usize {
        match party {
            Party::Alice => self.n + self.ancillas.0,
            Party::Bob => self.n + self.ancillas.1,
        }
    }

    pub fn total_qubits(&self) -> usize {
        2 * self.n + self.ancillas.0 + self.ancillas.1
    }

    fn check_op(&self, op: &Operation, party: Party, outcomes: usize, what: &str) -> Result<()> {
        if op.outcomes() != outcomes {
            return Err(Error::InvalidOperator(format!(
                "{what}: expected {outcomes} outcome(s), got {}",
                op.outcomes()
            )));
        }
        let size = self.register_size(party);
        match op.targets() {
            Some(t) => {
                if let Some(&bad) = t.iter().find(|&&q| q >= size) {
                    return Err(Error::Dimension(format!(
                        "{what}: target {bad} outside {party}'s {size}-qubit register"
                    )));
                }
                let mut sorted = t.to_vec();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != t.len() {
                    return Err(Error::Dimension(format!("{what}: repeated target")));
                }
            }
            None => {
                if op.arity() != size {
                    return Err(Error::Dimension(format!(
                        "{what}: operator acts on {} qubits but {party}'s register has {size}",
                        op.arity()
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_table(
        &self,
        table: &Keyed<Operation>,
        party: Party,
        outcomes: usize,
        depth: usize,
        what: &str,
    ) -> Result<()> {
        if let Some(len) = table.expected_len(self.seeds(), depth) {
            if table.len() != len {
                return Err(Error::Parameter(format!(
                    "{what}: table has {} entries, expected {len}",
                    table.len()
                )));
            }
        }
        table
            .values()
            .try_for_each(|op| self.check_op(op, party, outcomes, what))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Parameter("a protocol needs at least one input pair".into()));
        }
        check_capacity(self.total_qubits())?;
        if self.shared_randomness.is_empty() {
            return Err(Error::Parameter("shared randomness needs at least one seed".into()));
        }
        if self.shared_randomness.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Parameter("seed weights must be non-negative".into()));
        }
        let total: f64 = self.shared_randomness.iter().sum();
        if (total - 1.0).abs() > tolerance::STRUCTURAL {
            return Err(Error::Parameter(format!("seed weights sum to {total}, not 1")));
        }
        let mut depth = 0;
        for (i, step) in self.steps.iter().enumerate() {
            let outcomes = if step.is_message() { 2 } else { 1 };
            self.check_table(step.op(), step.party(), outcomes, depth, &format!("step {i}"))?;
            if step.is_message() {
                depth += 1;
            }
        }
        if let AcceptRule::Alice(table) = &self.accept {
            self.check_table(table, Party::Alice, 2, depth, "accept rule")?;
        }
        match &self.output {
            OutputPair::Fixed(k) if *k >= self.n => {
                return Err(Error::Parameter(format!(
                    "output pair {k} does not exist (n = {})",
                    self.n
                )));
            }
            OutputPair::PerSeed(v) => {
                if v.len() != self.seeds() {
                    return Err(Error::Parameter(format!(
                        "output table has {} entries for {} seeds",
                        v.len(),
                        self.seeds()
                    )));
                }
                if let Some(k) = v.iter().find(|&&k| k >= self.n) {
                    return Err(Error::Parameter(format!(
                        "output pair {k} does not exist (n = {})",
                        self.n
                    )));
                }
            }
            OutputPair::Fixed(_) => {}
        }
        Ok(())
    }
}
