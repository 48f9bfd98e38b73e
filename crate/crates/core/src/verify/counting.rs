//! Exact counting identities behind the 0-bit upper bounds, checked by
//! brute force in integer arithmetic.
//!
//! Indicator vectors are enumerated here as bitmasks, independently of the
//! `errmodels` enumerators: a binary vector is `(mask, bits)` with `mask`
//! marking non-`*` entries, an extended one is `(mask, left, right)`.

use serde::Serialize;

use crate::errmodels::{
    binomial, binomial_recombination, depolarization_state, enumerate_extended, enumerate_indicators,
};
use crate::{tolerance, Result};

#[derive(Debug, Clone, Serialize)]
pub struct CountingCheck {
    pub identity: String,
    pub n: usize,
    pub cases: u64,
    pub mismatches: u64,
    pub pass: bool,
}

/// The closing display of the measure-r argument at one `(n, r)`, scaled
/// by `n` to stay integral. `corrected` uses `C(n−1, r)` for the `x ≠ y`
/// count, `printed` uses `C(n−1, r−1)` as displayed.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateCheck {
    pub n: usize,
    pub r: usize,
    pub target: u128,
    pub corrected: u128,
    pub printed: u128,
    pub corrected_holds: bool,
    pub printed_holds: bool,
    /// The same closing step with `2^r` weights, as used for the
    /// depolarization bound.
    pub extended_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecombinationCheck {
    pub n: usize,
    pub p: f64,
    pub max_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountingReport {
    pub checks: Vec<CountingCheck>,
    pub aggregates: Vec<AggregateCheck>,
    pub recombination: Vec<RecombinationCheck>,
    pub pass: bool,
}

fn c(n: i64, k: i64) -> u128 {
    if n < 0 || k < 0 || k > n {
        0
    } else {
        binomial(n as u64, k as u64)
    }
}

/// All binary indicator vectors of length `n` as `(mask, bits)`.
fn binary_vectors(n: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for mask in 0..1u32 << n {
        let mut sub = mask;
        loop {
            out.push((mask, sub));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
    }
    out
}

/// All extended indicator vectors of length `n` as `(mask, left, right)`.
fn extended_vectors(n: usize) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for (mask, left) in binary_vectors(n) {
        let mut right = mask;
        loop {
            out.push((mask, left, right));
            if right == 0 {
                break;
            }
            right = (right - 1) & mask;
        }
    }
    out
}

fn binary_consistent(x: u32, (mask, bits): (u32, u32)) -> bool {
    (x ^ bits) & mask == 0
}

fn extended_consistent(l: u32, r: u32, (mask, left, right): (u32, u32, u32), full: u32) -> bool {
    (l ^ left) & mask == 0 && (r ^ right) & mask == 0 && (l ^ r) & !mask & full == 0
}

/// `#{v : deg v = r, x ⊑ v, y ⊑ v}` by enumeration.
pub fn binary_pair_count(n: usize, r: usize, x: u32, y: u32) -> u128 {
    binary_vectors(n)
        .into_iter()
        .filter(|&(m, b)| m.count_ones() as usize == r && binary_consistent(x, (m, b)) && binary_consistent(y, (m, b)))
        .count() as u128
}

/// `Σ_c #{u : deg u = r, (a; a⊕c) ⊑ u, (b; b⊕c) ⊑ u}` by enumeration.
pub fn extended_pair_count(n: usize, r: usize, a: u32, b: u32) -> u128 {
    let full = (1u32 << n) - 1;
    let us: Vec<_> = extended_vectors(n)
        .into_iter()
        .filter(|u| u.0.count_ones() as usize == r)
        .collect();
    let mut count = 0u128;
    for cc in 0..1u32 << n {
        for &u in &us {
            if extended_consistent(a, a ^ cc, u, full) && extended_consistent(b, b ^ cc, u, full) {
                count += 1;
            }
        }
    }
    count
}

pub fn aggregate_identity(n: usize, r: usize) -> AggregateCheck {
    let (ni, ri) = (n as i64, r as i64);
    let cnr = c(ni, ri);
    let p = |e: usize| 1u128 << e;
    // n · 2^{n+2} C(n,r) (1 − r/2n) = 2^{n+1} C(n,r) (2n − r)
    let target = p(n + 1) * cnr * (2 * n - r) as u128;
    let closing = |k: u128| n as u128 * ((cnr - k) * p(n + 1) + k * p(n + 2));
    let corrected = closing(c(ni - 1, ri));
    let printed = closing(c(ni - 1, ri - 1));
    let ext_target = p(r) * target;
    let ext = n as u128 * (p(n + r + 1) * (cnr - c(ni - 1, ri)) + p(n + r + 2) * c(ni - 1, ri));
    AggregateCheck {
        n,
        r,
        target,
        corrected,
        printed,
        corrected_holds: corrected == target,
        printed_holds: printed == target,
        extended_holds: ext == ext_target,
    }
}

fn check(identity: &str, n: usize, cases: u64, mismatches: u64) -> CountingCheck {
    CountingCheck {
        identity: identity.into(),
        n,
        cases,
        mismatches,
        pass: mismatches == 0,
    }
}

/// Brute-forces the counting identities for binary vectors up to
/// `n_binary` and extended vectors up to `n_extended`, the closing
/// binomial displays up to `n_aggregate`, and the depolarization
/// recombination for `n ≤ 3`.
pub fn verify_counting(n_binary: usize, n_extended: usize, n_aggregate: usize) -> Result<CountingReport> {
    let mut checks = Vec::new();
    for n in 1..=n_binary {
        let vs = binary_vectors(n);
        let (mut cases, mut bad) = (0u64, 0u64);
        for r in 0..=n {
            for x in 0..1u32 << n {
                for y in 0..1u32 << n {
                    let d = (x ^ y).count_ones() as i64;
                    let found = vs
                        .iter()
                        .filter(|&&(m, b)| {
                            m.count_ones() as usize == r && binary_consistent(x, (m, b)) && binary_consistent(y, (m, b))
                        })
                        .count() as u128;
                    cases += 1;
                    bad += u64::from(found != c(n as i64 - d, n as i64 - r as i64 - d));
                }
            }
        }
        checks.push(check("binary_pair_count", n, cases, bad));

        let (mut cases, mut bad) = (0u64, 0u64);
        for r in 0..=n {
            let of_degree: Vec<_> = vs.iter().filter(|v| v.0.count_ones() as usize == r).collect();
            cases += 2;
            bad += u64::from(of_degree.len() as u128 != (1u128 << r) * c(n as i64, r as i64));
            bad += u64::from(enumerate_indicators(n, r)?.len() != of_degree.len());
            for &&v in &of_degree {
                cases += 1;
                let consistent = (0..1u32 << n).filter(|&x| binary_consistent(x, v)).count();
                bad += u64::from(consistent != 1 << (n - r));
            }
        }
        checks.push(check("binary_degree_counts", n, cases, bad));
    }

    for n in 1..=n_extended {
        let full = (1u32 << n) - 1;
        let us = extended_vectors(n);
        let (mut cases, mut bad) = (0u64, 0u64);
        for r in 0..=n {
            let of_degree: Vec<_> = us.iter().copied().filter(|u| u.0.count_ones() as usize == r).collect();
            cases += 2;
            bad += u64::from(of_degree.len() as u128 != (1u128 << (2 * r)) * c(n as i64, r as i64));
            bad += u64::from(enumerate_extended(n, r)?.len() != of_degree.len());
            // Discrepancy degree d admits C(n−d, r−d) vectors.
            for l in 0..1u32 << n {
                for rt in 0..1u32 << n {
                    let d = (l ^ rt).count_ones() as i64;
                    let found = of_degree
                        .iter()
                        .filter(|&&u| extended_consistent(l, rt, u, full))
                        .count() as u128;
                    cases += 1;
                    bad += u64::from(found != c(n as i64 - d, r as i64 - d));
                }
            }
        }
        checks.push(check("extended_discrepancy_count", n, cases, bad));

        let (mut cases, mut bad) = (0u64, 0u64);
        for r in 0..=n {
            for a in 0..1u32 << n {
                for b in 0..1u32 << n {
                    let k = (a ^ b).count_ones() as i64;
                    cases += 1;
                    bad += u64::from(extended_pair_count(n, r, a, b) != (1u128 << r) * c(n as i64 - k, r as i64));
                }
            }
        }
        checks.push(check("extended_pair_count", n, cases, bad));
    }

    // Σ_r C(n,r) p^r (1−p)^{n−r} (1 − r/2n) = 1 − p/2 at p = k/10, scaled
    // by 2n·10^n.
    for n in 1..=n_aggregate {
        let (mut cases, mut bad) = (0u64, 0u64);
        for k in 0..=10u128 {
            let lhs: u128 = (0..=n)
                .map(|r| c(n as i64, r as i64) * k.pow(r as u32) * (10 - k).pow((n - r) as u32) * (2 * n - r) as u128)
                .sum();
            let rhs = n as u128 * 10u128.pow(n as u32 - 1) * (20 - k);
            cases += 1;
            bad += u64::from(lhs != rhs);
        }
        checks.push(check("depolarization_binomial_average", n, cases, bad));
    }

    let aggregates: Vec<AggregateCheck> = (1..=n_aggregate)
        .flat_map(|n| (0..=n).map(move |r| aggregate_identity(n, r)))
        .collect();

    let mut recombination = Vec::new();
    for n in 1..=3 {
        for p in [0.1, 0.3, 0.7] {
            let direct = depolarization_state(n, p)?;
            let mixed = binomial_recombination(n, p)?;
            let max_deviation = direct.max_abs_diff(&mixed);
            recombination.push(RecombinationCheck {
                n,
                p,
                max_deviation,
                pass: max_deviation <= tolerance::DERIVED,
            });
        }
    }

    let pass = checks.iter().all(|c| c.pass)
        && aggregates.iter().all(|a| a.corrected_holds && a.extended_holds)
        && recombination.iter().all(|r| r.pass);
    Ok(CountingReport {
        checks,
        aggregates,
        recombination,
        pass,
    })
}
