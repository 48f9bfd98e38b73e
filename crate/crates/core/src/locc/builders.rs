use super::op::{Keyed, Operation};
use super::protocol::{AcceptRule, OutputPair, Protocol, Step};
use crate::qcore::{CMatrix, Party, C64};
use crate::{Error, Result};

/// Output the first pair; no communication, no randomness.
pub fn make_first_pair(n: usize) -> Result<Protocol> {
    let p = Protocol {
        name: "first_pair".into(),
        n,
        ancillas: (0, 0),
        shared_randomness: vec![1.0],
        steps: Vec::new(),
        accept: AcceptRule::Always,
        output: OutputPair::Fixed(0),
    };
    p.validate()?;
    Ok(p)
}

/// Output a uniformly random pair chosen by the shared seed.
pub fn make_random_pair(n: usize) -> Result<Protocol> {
    if n == 0 {
        return Err(Error::Parameter("random pair needs n >= 1".into()));
    }
    let p = Protocol {
        name: "random_pair".into(),
        n,
        ancillas: (0, 0),
        shared_randomness: vec![1.0 / n as f64; n],
        steps: Vec::new(),
        accept: AcceptRule::Always,
        output: OutputPair::PerSeed((0..n).collect()),
    };
    p.validate()?;
    Ok(p)
}

/// Which parity strings the hashing protocol draws from in each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HashFamily {
    /// Uniform over nonzero strings on the pairs still in play.
    #[default]
    Nonzero,
    /// Uniform over all strings; the zero string makes the round vacuous,
    /// so an error on the remaining pairs is caught with probability
    /// exactly 1/2 per round.
    Uniform,
}

/// Basis permutation of the `n`-qubit register that leaves the parity
/// `h · x` of the alive pairs in qubit `check`. Qubit `i` is bit `n - 1 - i`
/// of the index.
pub fn parity_permutation(n: usize, h: &[bool], check: usize) -> CMatrix {
    let dim = 1usize << n;
    let bit = |x: usize, i: usize| (x >> (n - 1 - i)) & 1;
    let set = |x: usize, i: usize, v: usize| (x & !(1 << (n - 1 - i))) | (v << (n - 1 - i));
    let target = if h[check] {
        Some(check)
    } else {
        h.iter().rposition(|&b| b)
    };
    let mut m = CMatrix::zeros(dim, dim);
    for x in 0..dim {
        let mut y = x;
        if let Some(t) = target {
            let parity = (0..h.len()).filter(|&i| h[i]).fold(0, |acc, i| acc ^ bit(x, i));
            y = set(y, t, parity);
            if t != check {
                let (a, b) = (bit(y, t), bit(y, check));
                y = set(set(y, t, b), check, a);
            }
        }
        m[(y, x)] = C64::new(1.0, 0.0);
    }
    m
}

fn projector(dim: usize, index: usize) -> CMatrix {
    let mut p = CMatrix::zeros(dim, dim);
    p[(index, index)] = C64::new(1.0, 0.0);
    p
}

/// Decodes seed `seed` into one parity string per round (mixed radix, round
/// 0 most significant).
pub fn decode_hashes(n: usize, s: usize, family: HashFamily, seed: usize) -> Vec<Vec<bool>> {
    let offset = usize::from(family == HashFamily::Nonzero);
    let radices: Vec<usize> = (0..s).map(|j| (1usize << (n - j)) - offset).collect();
    let mut rest = seed;
    let mut digits = vec![0; s];
    for j in (0..s).rev() {
        digits[j] = rest % radices[j];
        rest /= radices[j];
    }
    digits
        .iter()
        .enumerate()
        .map(|(j, &d)| {
            let m = n - j;
            let value = d + offset;
            (0..m).map(|i| (value >> (m - 1 - i)) & 1 == 1).collect()
        })
        .collect()
}

/// `s` rounds of random parity checks. In round `j` the pairs `0..n-j` are
/// in play and pair `n-1-j` is the check pair: both parties permute their
/// register so the chosen parity lands in the check qubit, Bob measures his
/// and sends the bit, and at the end Alice accepts iff her check qubits
/// match every bit. Pair 0 is the output.
pub fn make_simple_random_hash(n: usize, s: usize) -> Result<Protocol> {
    make_simple_random_hash_with(n, s, HashFamily::Nonzero)
}

pub fn make_simple_random_hash_with(n: usize, s: usize, family: HashFamily) -> Result<Protocol> {
    if s >= n {
        return Err(Error::Parameter(format!(
            "simple random hash with {s} rounds needs more than {s} pairs, got {n}"
        )));
    }
    crate::qcore::check_capacity(2 * n)?;
    let offset = usize::from(family == HashFamily::Nonzero);
    let seeds: usize = (0..s).map(|j| (1usize << (n - j)) - offset).product();
    let dim = 1usize << n;
    let hashes: Vec<Vec<Vec<bool>>> = (0..seeds).map(|seed| decode_hashes(n, s, family, seed)).collect();

    let mut steps = Vec::with_capacity(2 * s);
    for j in 0..s {
        let check = n - 1 - j;
        let mut alice_ops = Vec::with_capacity(seeds);
        let mut bob_ops = Vec::with_capacity(seeds);
        for h in &hashes {
            let mut full = h[j].clone();
            full.resize(n, false);
            if !full.iter().any(|&b| b) {
                // Vacuous round: nothing to compare, Bob always sends 0.
                alice_ops.push(Operation::unitary(None, CMatrix::identity(dim, dim))?);
                bob_ops.push(Operation::instrument(
                    None,
                    vec![CMatrix::identity(dim, dim)],
                    Vec::new(),
                )?);
                continue;
            }
            let v = parity_permutation(n, &full, check);
            let keep = |b: usize| {
                let mut p = CMatrix::zeros(dim, dim);
                for x in 0..dim {
                    if (x >> (n - 1 - check)) & 1 == b {
                        p[(x, x)] = C64::new(1.0, 0.0);
                    }
                }
                p
            };
            alice_ops.push(Operation::unitary(None, v.clone())?);
            bob_ops.push(Operation::instrument(None, vec![keep(0) * &v], vec![keep(1) * &v])?);
        }
        steps.push(Step::Local {
            party: Party::Alice,
            op: Keyed::BySeed(alice_ops),
        });
        steps.push(Step::Message {
            party: Party::Bob,
            op: Keyed::BySeed(bob_ops),
        });
    }

    let accept = match family {
        HashFamily::Nonzero => {
            let targets: Vec<usize> = (0..s).map(|j| n - 1 - j).collect();
            let ops = (0..1usize << s)
                .map(|t| {
                    let p = projector(1 << s, t);
                    let rest = CMatrix::identity(1 << s, 1 << s) - &p;
                    Operation::instrument(Some(targets.clone()), vec![p], vec![rest])
                })
                .collect::<Result<Vec<_>>>()?;
            AcceptRule::Alice(Keyed::ByTranscript(ops))
        }
        HashFamily::Uniform => {
            let mut ops = Vec::with_capacity(seeds << s);
            for h in &hashes {
                let live: Vec<usize> = (0..s).filter(|&j| h[j].iter().any(|&b| b)).collect();
                let targets: Vec<usize> = live.iter().map(|&j| n - 1 - j).collect();
                let d = 1usize << live.len();
                for t in 0..1usize << s {
                    let expect = live.iter().fold(0, |acc, &j| (acc << 1) | ((t >> (s - 1 - j)) & 1));
                    let p = projector(d, expect);
                    let rest = CMatrix::identity(d, d) - &p;
                    ops.push(Operation::instrument(Some(targets.clone()), vec![p], vec![rest])?);
                }
            }
            AcceptRule::Alice(Keyed::BySeedAndTranscript(ops))
        }
    };

    let name = match family {
        HashFamily::Nonzero => "simple_random_hash",
        HashFamily::Uniform => "simple_random_hash_uniform",
    };
    let p = Protocol {
        name: name.into(),
        n,
        ancillas: (0, 0),
        shared_randomness: vec![1.0 / seeds as f64; seeds],
        steps,
        accept,
        output: OutputPair::Fixed(0),
    };
    p.validate()?;
    Ok(p)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

/// Moves qubit `i` of an `n`-qubit register to position `perm[i]`.
pub fn qubit_permutation(n: usize, perm: &[usize]) -> CMatrix {
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for x in 0..dim {
        let y = (0..n).fold(0, |acc, i| acc | (((x >> (n - 1 - i)) & 1) << (n - 1 - perm[i])));
        m[(y, x)] = C64::new(1.0, 0.0);
    }
    m
}

/// Both parties apply the same uniformly random permutation of their
/// pairs, measure every pair but the first in the computational basis and
/// pretend the outcomes agree; the first pair is the output.
pub fn make_random_permutation(n: usize) -> Result<Protocol> {
    if n == 0 || n > 8 {
        return Err(Error::Parameter(format!(
            "random permutation supports 1 <= n <= 8, got {n}"
        )));
    }
    crate::qcore::check_capacity(2 * n)?;
    let perms = permutations(n);
    let ops = perms
        .iter()
        .map(|p| Operation::unitary(None, qubit_permutation(n, p)))
        .collect::<Result<Vec<_>>>()?;
    let mut steps = vec![
        Step::Local {
            party: Party::Alice,
            op: Keyed::BySeed(ops.clone()),
        },
        Step::Local {
            party: Party::Bob,
            op: Keyed::BySeed(ops),
        },
    ];
    if n > 1 {
        let rest: Vec<usize> = (1..n).collect();
        let d = 1usize << (n - 1);
        let dephase = Operation::channel(Some(rest), (0..d).map(|i| projector(d, i)).collect())?;
        steps.push(Step::Local {
            party: Party::Alice,
            op: Keyed::Shared(dephase.clone()),
        });
        steps.push(Step::Local {
            party: Party::Bob,
            op: Keyed::Shared(dephase),
        });
    }
    let seeds = perms.len();
    let p = Protocol {
        name: "random_permutation".into(),
        n,
        ancillas: (0, 0),
        shared_randomness: vec![1.0 / seeds as f64; seeds],
        steps,
        accept: AcceptRule::Always,
        output: OutputPair::Fixed(0),
    };
    p.validate()?;
    Ok(p)
}
