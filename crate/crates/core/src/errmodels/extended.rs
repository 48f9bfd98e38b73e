use std::fmt;

use super::bits::{binomial, combinations, BitString};
use crate::qcore::{check_capacity, CVector, PureState, C64};
use crate::{Error, Result};

/// A vector over `{00, 01, 10, 11, *}`. Entry `ab` pins pair `j` to
/// `|a⟩^A |b⟩^B`; `*` leaves it as `Φ+`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtendedIndicatorVector {
    entries: Vec<Option<(bool, bool)>>,
}

impl ExtendedIndicatorVector {
    pub fn new(entries: Vec<Option<(bool, bool)>>) -> Self {
        ExtendedIndicatorVector { entries }
    }

    pub fn intact(n: usize) -> Self {
        ExtendedIndicatorVector { entries: vec![None; n] }
    }

    pub fn entries(&self) -> &[Option<(bool, bool)>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    /// `x ⊑ u` for a `2n`-bit `x = LL(x) ; RT(x)`.
    pub fn admits(&self, x: &BitString) -> bool {
        let n = self.len();
        assert_eq!(x.len(), 2 * n, "length mismatch");
        self.entries.iter().enumerate().all(|(j, e)| match e {
            Some((a, b)) => x.get(j) == *a && x.get(n + j) == *b,
            None => x.get(j) == x.get(n + j),
        })
    }

    /// Every `x ⊑ u`, ordered by the bipartite basis index.
    pub fn consistent_vectors(&self) -> Vec<BitString> {
        let n = self.len();
        let free: Vec<usize> = (0..n).filter(|&j| self.entries[j].is_none()).collect();
        let mut out: Vec<BitString> = (0..1usize << free.len())
            .map(|mask| {
                let mut left = vec![false; n];
                let mut right = vec![false; n];
                for j in 0..n {
                    let (a, b) = match self.entries[j] {
                        Some(pair) => pair,
                        None => {
                            let pos = free.iter().position(|&f| f == j).expect("free entry");
                            let bit = (mask >> pos) & 1 == 1;
                            (bit, bit)
                        }
                    };
                    left[j] = a;
                    right[j] = b;
                }
                BitString::from_entries(&left).concat(&BitString::from_entries(&right))
            })
            .collect();
        out.sort_by_key(bipartite_index);
        out
    }
}

fn bipartite_index(x: &BitString) -> usize {
    let n = x.len() / 2;
    let (l, r) = x.split(n);
    (l.basis_index() << n) | r.basis_index()
}

impl fmt::Display for ExtendedIndicatorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, e) in self.entries.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            match e {
                Some((a, b)) => write!(f, "{}{}", u8::from(*a), u8::from(*b))?,
                None => f.write_str("*")?,
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for ExtendedIndicatorVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Ok(ExtendedIndicatorVector { entries: Vec::new() });
        }
        let entries = s
            .split(',')
            .map(|tok| match tok.trim() {
                "*" => Ok(None),
                "00" => Ok(Some((false, false))),
                "01" => Ok(Some((false, true))),
                "10" => Ok(Some((true, false))),
                "11" => Ok(Some((true, true))),
                other => Err(Error::Parameter(format!(
                    "`{other}` is not an extended indicator entry"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtendedIndicatorVector { entries })
    }
}

/// All `4^r · C(n, r)` extended indicator vectors of degree `r`.
pub fn enumerate_extended(n: usize, r: usize) -> Result<Vec<ExtendedIndicatorVector>> {
    if n > super::MAX_ENUMERATION_N || r > n {
        return Err(Error::Parameter(format!(
            "extended enumeration needs r <= n <= {}, got n={n}, r={r}",
            super::MAX_ENUMERATION_N
        )));
    }
    let mut out = Vec::new();
    for positions in combinations(n, r) {
        for label in 0..1usize << (2 * r) {
            let mut entries = vec![None; n];
            for (k, &j) in positions.iter().enumerate() {
                let pair = (label >> (2 * (r - 1 - k))) & 3;
                entries[j] = Some((pair & 2 != 0, pair & 1 != 0));
            }
            out.push(ExtendedIndicatorVector { entries });
        }
    }
    Ok(out)
}

/// `|ψ_u⟩ = 2^{-(n-r)/2} Σ_{x ⊑ u} |LL(x)⟩^A |RT(x)⟩^B`.
pub fn extended_error_state(u: &ExtendedIndicatorVector) -> Result<PureState> {
    let n = u.len();
    check_capacity(2 * n)?;
    let xs = u.consistent_vectors();
    let amp = C64::new(1.0 / (xs.len() as f64).sqrt(), 0.0);
    let mut amplitudes = CVector::zeros(1 << (2 * n));
    for x in &xs {
        amplitudes[bipartite_index(x)] = amp;
    }
    PureState::new(n, n, amplitudes)
}

/// `DIS(x) = LL(x) ⊕ RT(x)`.
pub fn discrepancy(x: &BitString) -> Result<BitString> {
    if !x.len().is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "discrepancy of an odd-length vector ({})",
            x.len()
        )));
    }
    let (l, r) = x.split(x.len() / 2);
    Ok(l.xor(&r))
}

/// Number of degree-`r` extended vectors `u` with `x ⊑ u`, for `x` of
/// discrepancy degree `d`: `C(n - d, r - d)`, or 0 when `d > r`.
pub fn count_consistent_extended(d: usize, n: usize, r: usize) -> u128 {
    if d > r || d > n {
        return 0;
    }
    binomial((n - d) as u64, (r - d) as u64)
}
