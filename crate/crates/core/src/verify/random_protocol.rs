//! Random protocols for property checks of the splitting tracker and the
//! transcript tree.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::locc::{AcceptRule, Keyed, Operation, OutputPair, Protocol, Step};
use crate::qcore::random::{random_instrument, random_kraus_channel};
use crate::qcore::Party;
use crate::{Error, Result};

fn random_targets<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Vec<usize> {
    let k = rng.random_range(1..=size.min(2));
    let mut all: Vec<usize> = (0..size).collect();
    all.shuffle(rng);
    all.truncate(k);
    all
}

fn random_op<R: Rng + ?Sized>(size: usize, outcomes: usize, rng: &mut R) -> Result<Operation> {
    let targets = random_targets(size, rng);
    let dim = 1 << targets.len();
    let kraus = rng.random_range(1..=2);
    let branches = if outcomes == 1 {
        vec![random_kraus_channel(dim, kraus, rng)]
    } else {
        random_instrument(dim, outcomes, kraus, rng)
    };
    Operation::new(Some(targets), branches)
}

fn keyed<R: Rng + ?Sized>(
    seeds: usize,
    depth: usize,
    rng: &mut R,
    mut make: impl FnMut(&mut R) -> Result<Operation>,
) -> Result<Keyed<Operation>> {
    let per_seed = 1 << depth;
    let ops = (0..seeds * per_seed).map(|_| make(rng)).collect::<Result<Vec<_>>>()?;
    Ok(if seeds == 1 {
        Keyed::ByTranscript(ops)
    } else {
        Keyed::BySeedAndTranscript(ops)
    })
}

/// A protocol on `n` input pairs with `bits` message rounds and `seeds`
/// equally likely shared-randomness values.
///
/// Each message round is a random two-outcome instrument on one or two
/// qubits of a random party, chosen afresh for every seed and transcript
/// prefix. Local channels may be interleaved, either party may hold one
/// ancilla, and Alice accepts through a random instrument or a random
/// coin.
pub fn random_protocol<R: Rng + ?Sized>(n: usize, bits: usize, seeds: usize, rng: &mut R) -> Result<Protocol> {
    if n == 0 || seeds == 0 {
        return Err(Error::Parameter(
            "random_protocol needs n ≥ 1 and at least one seed".into(),
        ));
    }
    let ancillas = (rng.random_range(0..=1), rng.random_range(0..=1));
    let size = |p: Party| match p {
        Party::Alice => n + ancillas.0,
        Party::Bob => n + ancillas.1,
    };
    let party = |rng: &mut R| if rng.random_bool(0.5) { Party::Alice } else { Party::Bob };

    let mut steps = Vec::new();
    for depth in 0..bits {
        if rng.random_bool(0.3) {
            let p = party(rng);
            let op = keyed(seeds, depth, rng, |rng| random_op(size(p), 1, rng))?;
            steps.push(Step::Local { party: p, op });
        }
        let p = party(rng);
        let op = keyed(seeds, depth, rng, |rng| random_op(size(p), 2, rng))?;
        steps.push(Step::Message { party: p, op });
    }

    let accept = if rng.random_bool(0.5) {
        AcceptRule::Alice(keyed(seeds, bits, rng, |rng| random_op(size(Party::Alice), 2, rng))?)
    } else {
        AcceptRule::Alice(keyed(seeds, bits, rng, |rng| {
            Operation::coin(rng.random_range(0.2..=1.0))
        })?)
    };
    let output = if seeds == 1 {
        OutputPair::Fixed(rng.random_range(0..n))
    } else {
        OutputPair::PerSeed((0..seeds).map(|_| rng.random_range(0..n)).collect())
    };
    let protocol = Protocol {
        name: format!("random(n={n}, bits={bits}, seeds={seeds})"),
        n,
        ancillas,
        shared_randomness: vec![1.0 / seeds as f64; seeds],
        steps,
        accept,
        output,
    };
    protocol.validate()?;
    Ok(protocol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_rng;

    #[test]
    fn random_protocols_validate() {
        for i in 0..20 {
            let mut rng = stream_rng(5, i);
            let p = random_protocol(2, (i % 3) as usize, 1 + (i % 2) as usize, &mut rng).unwrap();
            assert_eq!(p.bits(), (i % 3) as usize);
        }
    }
}
