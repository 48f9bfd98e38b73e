//! Seeded random states, unitaries and channels for property sweeps.

use rand::Rng;
use rand_distr::StandardNormal;

use super::state::{tensor, DensityMatrix, PureState};
use super::{CMatrix, CVector, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Complex Ginibre matrix with standard normal entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(n_alice: usize, n_bob: usize, rng: &mut R) -> PureState {
    let dim = 1usize << (n_alice + n_bob);
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    let norm = v.norm();
    PureState::from_parts_unchecked(n_alice, n_bob, v / C64::new(norm, 0.0))
}

/// Random density matrix `G G† / Tr(G G†)` with `G` of the given rank.
pub fn random_density_matrix<R: Rng + ?Sized>(n_alice: usize, n_bob: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let dim = 1usize << (n_alice + n_bob);
    let g = ginibre(dim, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    DensityMatrix::from_parts_unchecked(n_alice, n_bob, m / C64::new(tr, 0.0))
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// A `rows × cols` isometry (`V†V = I`), `rows ≥ cols`.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    random_unitary(rows, rng).columns(0, cols).into_owned()
}

/// Random anti-Hermitian matrix `scale · (G − G†)/2`.
pub fn random_anti_hermitian<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> CMatrix {
    let g = ginibre(dim, dim, rng);
    (&g - g.adjoint()) * C64::new(0.5 * scale, 0.0)
}

/// Random instrument on a `dim`-dimensional system: `branches` outcomes,
/// each with `kraus_per_branch` operators, jointly trace preserving.
pub fn random_instrument<R: Rng + ?Sized>(
    dim: usize,
    branches: usize,
    kraus_per_branch: usize,
    rng: &mut R,
) -> Vec<Vec<CMatrix>> {
    let total = branches * kraus_per_branch;
    let v = random_isometry(total * dim, dim, rng);
    (0..branches)
        .map(|b| {
            (0..kraus_per_branch)
                .map(|k| v.rows((b * kraus_per_branch + k) * dim, dim).into_owned())
                .collect()
        })
        .collect()
}

/// Random trace-preserving channel with `count` Kraus operators.
pub fn random_kraus_channel<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Vec<CMatrix> {
    random_instrument(dim, 1, count, rng).pop().unwrap_or_default()
}

/// `|a⟩^A ⊗ |b⟩^B` with independent Haar-random factors.
pub fn random_product_state<R: Rng + ?Sized>(n_alice: usize, n_bob: usize, rng: &mut R) -> PureState {
    let a = random_pure_state(n_alice, 0, rng);
    let b = random_pure_state(0, n_bob, rng);
    tensor(&a, &b).expect("product of in-capacity factors")
}

/// Mixture of `terms` random product states with random weights.
pub fn random_separable<R: Rng + ?Sized>(n_alice: usize, n_bob: usize, terms: usize, rng: &mut R) -> DensityMatrix {
    let weights: Vec<f64> = (0..terms.max(1)).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let dim = 1usize << (n_alice + n_bob);
    let mut m = CMatrix::zeros(dim, dim);
    for w in weights {
        let s = random_product_state(n_alice, n_bob, rng);
        m += s.to_density().into_matrix() * C64::new(w / total, 0.0);
    }
    DensityMatrix::from_parts_unchecked(n_alice, n_bob, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{min_eigenvalue, unitarity_error};
    use crate::seed::stream_rng;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = stream_rng(31, 0);
        for dim in [1, 2, 5, 16] {
            assert!(unitarity_error(&random_unitary(dim, &mut rng)) < 1e-12);
        }
    }

    #[test]
    fn instruments_are_trace_preserving() {
        let mut rng = stream_rng(32, 0);
        let inst = random_instrument(4, 2, 3, &mut rng);
        let mut sum = CMatrix::zeros(4, 4);
        for branch in &inst {
            for k in branch {
                sum += k.adjoint() * k;
            }
        }
        assert!((sum - CMatrix::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn states_are_valid() {
        let mut rng = stream_rng(33, 0);
        let rho = random_density_matrix(1, 2, 2, &mut rng);
        assert!(DensityMatrix::new(1, 2, rho.matrix().clone()).is_ok());
        let sep = random_separable(1, 1, 3, &mut rng);
        assert!(min_eigenvalue(sep.matrix()) > -1e-12);
        assert!(PureState::new(2, 1, random_pure_state(2, 1, &mut rng).amplitudes().clone()).is_ok());
    }
}
