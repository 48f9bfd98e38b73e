use std::fmt;

use super::bits::{combinations, BitString};
use crate::qcore::{check_capacity, CVector, PureState, C64};
use crate::{Error, Result};

/// Largest `n` accepted by [`enumerate_indicators`].
pub const MAX_ENUMERATION_N: usize = 12;

/// A vector over `{0, 1, *}`. Non-`*` entries mark pairs that were
/// measured with the given outcome; `*` marks an intact pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndicatorVector {
    entries: Vec<Option<bool>>,
}

impl IndicatorVector {
    pub fn new(entries: Vec<Option<bool>>) -> Self {
        IndicatorVector { entries }
    }

    pub fn intact(n: usize) -> Self {
        IndicatorVector { entries: vec![None; n] }
    }

    pub fn entries(&self) -> &[Option<bool>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of non-`*` entries.
    pub fn degree(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    /// `x ⊑ v`. Panics if the lengths differ.
    pub fn admits(&self, x: &BitString) -> bool {
        assert_eq!(x.len(), self.len(), "length mismatch");
        self.entries
            .iter()
            .enumerate()
            .all(|(j, e)| e.is_none_or(|b| x.get(j) == b))
    }

    /// Every `x` with `x ⊑ v`, ordered by basis index.
    pub fn consistent_vectors(&self) -> Vec<BitString> {
        let free: Vec<usize> = (0..self.len()).filter(|&j| self.entries[j].is_none()).collect();
        let mut out: Vec<BitString> = (0..1usize << free.len())
            .map(|mask| {
                let entries: Vec<bool> = self
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(j, e)| match e {
                        Some(b) => *b,
                        None => {
                            let pos = free.iter().position(|&f| f == j).expect("free entry");
                            (mask >> pos) & 1 == 1
                        }
                    })
                    .collect();
                BitString::from_entries(&entries)
            })
            .collect();
        out.sort_by_key(|x| x.basis_index());
        out
    }
}

impl fmt::Display for IndicatorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            f.write_str(match e {
                Some(false) => "0",
                Some(true) => "1",
                None => "*",
            })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for IndicatorVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '*' => Ok(None),
                other => Err(Error::Parameter(format!("`{other}` is not an indicator entry"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IndicatorVector { entries })
    }
}

/// `x ⊑ v`.
pub fn consistent(x: &BitString, v: &IndicatorVector) -> Result<bool> {
    if x.len() != v.len() {
        return Err(Error::Dimension(format!(
            "vector of length {} against indicator of length {}",
            x.len(),
            v.len()
        )));
    }
    Ok(v.admits(x))
}

/// All `2^r · C(n, r)` indicator vectors of degree `r`: measured positions
/// in lexicographic order, then outcomes counting up.
pub fn enumerate_indicators(n: usize, r: usize) -> Result<Vec<IndicatorVector>> {
    if n > MAX_ENUMERATION_N || r > n {
        return Err(Error::Parameter(format!(
            "indicator enumeration needs r <= n <= {MAX_ENUMERATION_N}, got n={n}, r={r}"
        )));
    }
    let mut out = Vec::new();
    for positions in combinations(n, r) {
        for outcome in 0..1usize << r {
            let mut entries = vec![None; n];
            for (k, &j) in positions.iter().enumerate() {
                entries[j] = Some((outcome >> (r - 1 - k)) & 1 == 1);
            }
            out.push(IndicatorVector { entries });
        }
    }
    Ok(out)
}

/// `|φ_v⟩ = 2^{-(n-r)/2} Σ_{x ⊑ v} |x⟩^A |x⟩^B`.
pub fn error_state(v: &IndicatorVector) -> Result<PureState> {
    let n = v.len();
    check_capacity(2 * n)?;
    let xs = v.consistent_vectors();
    let amp = C64::new(1.0 / (xs.len() as f64).sqrt(), 0.0);
    let mut amplitudes = CVector::zeros(1 << (2 * n));
    for x in xs {
        let i = x.basis_index();
        amplitudes[(i << n) | i] = amp;
    }
    PureState::new(n, n, amplitudes)
}
