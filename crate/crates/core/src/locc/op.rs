use crate::qcore::kernel::PreparedOp;
use crate::qcore::{CMatrix, C64};
use crate::{tolerance, Error, Result};

/// A local instrument: one Kraus list per classical outcome, acting on
/// `targets` of one party's register (the whole register when `None`).
/// A single outcome makes it a plain channel; an empty Kraus list is the
/// zero map.
#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    targets: Option<Vec<usize>>,
    branches: Vec<Vec<CMatrix>>,
}

impl Operation {
    /// Validates shapes and `Σ K†K = I` over every branch.
    pub fn new(targets: Option<Vec<usize>>, branches: Vec<Vec<CMatrix>>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidOperator("an operation needs at least one outcome".into()));
        }
        let dim = branches
            .iter()
            .flatten()
            .map(|k| k.nrows())
            .next()
            .ok_or_else(|| Error::InvalidOperator("an operation needs at least one Kraus operator".into()))?;
        if !dim.is_power_of_two() {
            return Err(Error::Dimension(format!("Kraus dimension {dim} is not a power of two")));
        }
        if let Some(t) = &targets {
            if dim != 1 << t.len() {
                return Err(Error::Dimension(format!(
                    "{dim}-dimensional Kraus operators on {} targets",
                    t.len()
                )));
            }
        }
        let mut completeness = CMatrix::zeros(dim, dim);
        for k in branches.iter().flatten() {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::Dimension(format!(
                    "Kraus operator is {}x{}, expected {dim}x{dim}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            completeness += k.adjoint() * k;
        }
        let dev = (completeness - CMatrix::identity(dim, dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > tolerance::OPERATOR {
            return Err(Error::InvalidOperator(format!(
                "Kraus operators are not trace preserving (deviation {dev:e})"
            )));
        }
        Ok(Operation { targets, branches })
    }

    pub fn channel(targets: Option<Vec<usize>>, kraus: Vec<CMatrix>) -> Result<Self> {
        Self::new(targets, vec![kraus])
    }

    pub fn unitary(targets: Option<Vec<usize>>, u: CMatrix) -> Result<Self> {
        Self::new(targets, vec![vec![u]])
    }

    /// Two-outcome instrument.
    pub fn instrument(targets: Option<Vec<usize>>, zero: Vec<CMatrix>, one: Vec<CMatrix>) -> Result<Self> {
        Self::new(targets, vec![zero, one])
    }

    /// Outcome 0 with probability `r`, independent of the state.
    pub fn coin(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Parameter(format!("probability {r} is outside [0, 1]")));
        }
        let scalar = |v: f64| CMatrix::from_element(1, 1, C64::new(v.sqrt(), 0.0));
        Self::instrument(Some(Vec::new()), vec![scalar(r)], vec![scalar(1.0 - r)])
    }

    pub fn targets(&self) -> Option<&[usize]> {
        self.targets.as_deref()
    }

    pub fn branches(&self) -> &[Vec<CMatrix>] {
        &self.branches
    }

    pub fn outcomes(&self) -> usize {
        self.branches.len()
    }

    /// Number of qubits the Kraus operators act on.
    pub fn arity(&self) -> usize {
        self.branches
            .iter()
            .flatten()
            .next()
            .map_or(0, |k| k.nrows().trailing_zeros() as usize)
    }

    pub(crate) fn prepared(&self) -> Vec<Vec<PreparedOp>> {
        self.branches
            .iter()
            .map(|b| b.iter().map(PreparedOp::new).collect())
            .collect()
    }
}

/// A value looked up by shared-randomness seed and, optionally, by the
/// transcript so far (read as a binary number, first bit most significant).
#[derive(Debug, Clone, PartialEq)]
pub enum Keyed<T> {
    Shared(T),
    BySeed(Vec<T>),
    ByTranscript(Vec<T>),
    /// Index `seed · 2^depth + transcript`.
    BySeedAndTranscript(Vec<T>),
}

impl<T> Keyed<T> {
    pub fn get(&self, seed: usize, transcript: usize, depth: usize) -> Option<&T> {
        match self {
            Keyed::Shared(v) => Some(v),
            Keyed::BySeed(v) => v.get(seed),
            Keyed::ByTranscript(v) => v.get(transcript),
            Keyed::BySeedAndTranscript(v) => v.get((seed << depth) | transcript),
        }
    }

    pub fn values(&self) -> Box<dyn Iterator<Item = &T> + '_> {
        match self {
            Keyed::Shared(v) => Box::new(std::iter::once(v)),
            Keyed::BySeed(v) | Keyed::ByTranscript(v) | Keyed::BySeedAndTranscript(v) => Box::new(v.iter()),
        }
    }

    /// Number of entries the table must hold for `seeds` seeds at `depth`.
    pub fn expected_len(&self, seeds: usize, depth: usize) -> Option<usize> {
        match self {
            Keyed::Shared(_) => None,
            Keyed::BySeed(_) => Some(seeds),
            Keyed::ByTranscript(_) => Some(1 << depth),
            Keyed::BySeedAndTranscript(_) => Some(seeds << depth),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Keyed::Shared(_) => 1,
            Keyed::BySeed(v) | Keyed::ByTranscript(v) | Keyed::BySeedAndTranscript(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Keyed<U> {
        match self {
            Keyed::Shared(v) => Keyed::Shared(f(v)),
            Keyed::BySeed(v) => Keyed::BySeed(v.iter().map(f).collect()),
            Keyed::ByTranscript(v) => Keyed::ByTranscript(v.iter().map(f).collect()),
            Keyed::BySeedAndTranscript(v) => Keyed::BySeedAndTranscript(v.iter().map(f).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Pauli;

    #[test]
    fn validation() {
        assert!(Operation::unitary(None, Pauli::X.matrix()).is_ok());
        assert!(Operation::unitary(Some(vec![0, 1]), Pauli::X.matrix()).is_err());
        assert!(Operation::channel(None, vec![Pauli::X.matrix() * C64::new(0.5, 0.0)]).is_err());
        let p0 = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let p1 = CMatrix::identity(2, 2) - &p0;
        let m = Operation::instrument(Some(vec![3]), vec![p0], vec![p1]).unwrap();
        assert_eq!((m.outcomes(), m.arity()), (2, 1));
        let coin = Operation::coin(0.3).unwrap();
        assert_eq!(coin.arity(), 0);
        assert!(Operation::coin(1.3).is_err());
    }

    #[test]
    fn keyed_lookup() {
        let k = Keyed::BySeedAndTranscript((0..8).collect::<Vec<_>>());
        assert_eq!(k.get(1, 2, 2), Some(&6));
        assert_eq!(k.expected_len(2, 2), Some(8));
        assert_eq!(Keyed::Shared(5).get(9, 9, 9), Some(&5));
        assert_eq!(Keyed::ByTranscript(vec![1, 2]).get(3, 1, 1), Some(&2));
    }
}
