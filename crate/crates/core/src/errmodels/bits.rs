use std::fmt;

use crate::{Error, Result};

/// A fixed-length 0-1 vector. Entry `j` is stored in bit `j` of `bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    bits: u64,
}

impl BitString {
    pub const MAX_LEN: usize = 64;

    pub fn new(len: usize, bits: u64) -> Result<Self> {
        if len > Self::MAX_LEN || (len < 64 && bits >> len != 0) {
            return Err(Error::Parameter(format!("bits {bits:#x} do not fit in length {len}")));
        }
        Ok(BitString { len, bits })
    }

    pub fn zeros(len: usize) -> Self {
        assert!(len <= Self::MAX_LEN);
        BitString { len, bits: 0 }
    }

    pub fn from_entries(entries: &[bool]) -> Self {
        assert!(entries.len() <= Self::MAX_LEN);
        let bits = entries
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(j, _)| 1u64 << j)
            .sum();
        BitString {
            len: entries.len(),
            bits,
        }
    }

    /// Every vector of length `len`, ordered by `bits`.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64);
        (0..1u64 << len).map(move |bits| BitString { len, bits })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn raw(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.len, "entry {j} out of range for length {}", self.len);
        (self.bits >> j) & 1 == 1
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        assert_eq!(self.len, other.len, "xor of different lengths");
        BitString {
            len: self.len,
            bits: self.bits ^ other.bits,
        }
    }

    /// `self ; other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        assert!(self.len + other.len <= Self::MAX_LEN);
        BitString {
            len: self.len + other.len,
            bits: self.bits | (other.bits << self.len),
        }
    }

    /// Splits into the first `at` entries and the rest.
    pub fn split(&self, at: usize) -> (BitString, BitString) {
        assert!(at <= self.len);
        let low = if at == 64 {
            self.bits
        } else {
            self.bits & ((1u64 << at) - 1)
        };
        let high = if at == 64 { 0 } else { self.bits >> at };
        (
            BitString { len: at, bits: low },
            BitString {
                len: self.len - at,
                bits: high,
            },
        )
    }

    /// Computational-basis index with entry 0 as the most significant bit.
    pub fn basis_index(&self) -> usize {
        (0..self.len)
            .filter(|&j| self.get(j))
            .map(|j| 1usize << (self.len - 1 - j))
            .sum()
    }

    pub fn from_basis_index(len: usize, index: usize) -> Self {
        let entries: Vec<bool> = (0..len).map(|j| (index >> (len - 1 - j)) & 1 == 1).collect();
        Self::from_entries(&entries)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            f.write_str(if self.get(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parameter(format!("`{other}` is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if entries.len() > Self::MAX_LEN {
            return Err(Error::Parameter("bit string longer than 64".into()));
        }
        Ok(Self::from_entries(&entries))
    }
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let b: BitString = "0110".parse().unwrap();
        assert_eq!(b.basis_index(), 0b0110);
        assert_eq!(BitString::from_basis_index(4, 0b1011).to_string(), "1011");
        assert_eq!(b.weight(), 2);
    }

    #[test]
    fn split_and_concat() {
        let a: BitString = "10".parse().unwrap();
        let b: BitString = "011".parse().unwrap();
        let ab = a.concat(&b);
        assert_eq!(ab.to_string(), "10011");
        assert_eq!(ab.split(2), (a, b));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(4, 5), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }
}
