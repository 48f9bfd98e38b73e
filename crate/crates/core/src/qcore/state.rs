use serde::{Deserialize, Serialize};

use super::kernel::{apply_kraus_sum, apply_left_columns, PreparedOp, TargetLayout};
use super::linalg::{self, trace};
use super::serde_matrix::{self, JsonMatrix};
use super::{check_capacity, CMatrix, CVector, Party, Qubit, C64};
use crate::{tolerance, Error, Result};

/// Shared shape information for bipartite states.
pub trait Bipartite: Sized {
    fn n_alice(&self) -> usize;
    fn n_bob(&self) -> usize;

    fn n_qubits(&self) -> usize {
        self.n_alice() + self.n_bob()
    }

    fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    /// Tensor product with Alice's blocks concatenated and Bob's blocks
    /// concatenated, so pair `j` of `other` becomes pair `n_alice + j`.
    fn tensor_with(&self, other: &Self) -> Result<Self>;
}

/// `a ⊗ b` with party-aware reindexing.
pub fn tensor<T: Bipartite>(a: &T, b: &T) -> Result<T> {
    a.tensor_with(b)
}

/// Index map from the plain Kronecker layout `(A_a, B_a, A_b, B_b)` to the
/// bipartite layout `(A_a, A_b, B_a, B_b)`.
fn tensor_permutation(a: (usize, usize), b: (usize, usize)) -> Vec<usize> {
    let (aa, ab) = a;
    let (ba, bb) = b;
    let total = aa + ab + ba + bb;
    (0..1usize << total)
        .map(|i| {
            let yb = i & ((1 << bb) - 1);
            let xb = (i >> bb) & ((1 << ba) - 1);
            let ya = (i >> (bb + ba)) & ((1 << ab) - 1);
            let xa = i >> (bb + ba + ab);
            let alice = (xa << ba) | xb;
            let bob = (ya << bb) | yb;
            (alice << (ab + bb)) | bob
        })
        .collect()
}

/// Layout of the kept and traced qubits for a partial trace.
struct TraceLayout {
    n_alice: usize,
    n_bob: usize,
    keep_offsets: Vec<usize>,
    rest_offsets: Vec<usize>,
}

impl TraceLayout {
    fn new(n_alice: usize, n_bob: usize, keep: &[Qubit]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let n = n_alice + n_bob;
        let mut globals = Vec::with_capacity(keep.len());
        for party in [Party::Alice, Party::Bob] {
            for q in keep.iter().filter(|q| q.party == party) {
                let g = q.global(n_alice, n_bob)?;
                if globals.contains(&g) {
                    return Err(Error::Dimension(format!("qubit {q:?} listed twice")));
                }
                globals.push(g);
            }
        }
        let rest: Vec<usize> = (0..n).filter(|g| !globals.contains(g)).collect();
        let offsets = |qs: &[usize]| -> Vec<usize> {
            let k = qs.len();
            (0..1usize << k)
                .map(|a| {
                    (0..k)
                        .filter(|j| (a >> (k - 1 - j)) & 1 == 1)
                        .map(|j| 1usize << (n - 1 - qs[j]))
                        .sum()
                })
                .collect()
        };
        Ok(TraceLayout {
            n_alice: keep.iter().filter(|q| q.party == Party::Alice).count(),
            n_bob: keep.iter().filter(|q| q.party == Party::Bob).count(),
            keep_offsets: offsets(&globals),
            rest_offsets: offsets(&rest),
        })
    }
}

fn party_qubits(party: Party, count: usize) -> Vec<Qubit> {
    (0..count).map(|index| Qubit { party, index }).collect()
}

fn global_targets(targets: &[Qubit], n_alice: usize, n_bob: usize) -> Result<Vec<usize>> {
    targets.iter().map(|q| q.global(n_alice, n_bob)).collect()
}

/// Pure bipartite state `Σ α_{xy} |x⟩^A |y⟩^B`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_alice: usize,
    n_bob: usize,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(n_alice: usize, n_bob: usize, amplitudes: CVector) -> Result<Self> {
        check_capacity(n_alice + n_bob)?;
        if amplitudes.len() != 1 << (n_alice + n_bob) {
            return Err(Error::Dimension(format!(
                "{} amplitudes for {} qubits",
                amplitudes.len(),
                n_alice + n_bob
            )));
        }
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > tolerance::STRUCTURAL {
            return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
        }
        Ok(PureState {
            n_alice,
            n_bob,
            amplitudes,
        })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn from_unnormalized(n_alice: usize, n_bob: usize, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Self::new(n_alice, n_bob, amplitudes / C64::new(norm, 0.0))
    }

    pub(crate) fn from_parts_unchecked(n_alice: usize, n_bob: usize, amplitudes: CVector) -> Self {
        PureState {
            n_alice,
            n_bob,
            amplitudes,
        }
    }

    /// `|x⟩^A |y⟩^B`.
    pub fn basis(n_alice: usize, n_bob: usize, alice_index: usize, bob_index: usize) -> Result<Self> {
        if alice_index >= 1 << n_alice || bob_index >= 1 << n_bob {
            return Err(Error::Dimension("basis index out of range".into()));
        }
        check_capacity(n_alice + n_bob)?;
        let mut v = CVector::zeros(1 << (n_alice + n_bob));
        v[(alice_index << n_bob) | bob_index] = C64::new(1.0, 0.0);
        Ok(PureState {
            n_alice,
            n_bob,
            amplitudes: v,
        })
    }

    /// `Ψ_n`, n perfect EPR pairs.
    pub fn epr_pairs(n: usize) -> Result<Self> {
        check_capacity(2 * n)?;
        let amp = C64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
        let mut v = CVector::zeros(1 << (2 * n));
        for x in 0..1usize << n {
            v[(x << n) | x] = amp;
        }
        Ok(PureState {
            n_alice: n,
            n_bob: n,
            amplitudes: v,
        })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, alice_index: usize, bob_index: usize) -> C64 {
        self.amplitudes[(alice_index << self.n_bob) | bob_index]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::Dimension(
                "inner product of states with different dimensions".into(),
            ));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_parts_unchecked(self.n_alice, self.n_bob, m)
    }

    /// Applies a matrix to `targets` (in the matrix's own bit order) without
    /// checking unitarity; the result is not renormalized.
    pub(crate) fn apply_matrix_raw(&self, op: &CMatrix, targets: &[Qubit]) -> Result<CVector> {
        let globals = global_targets(targets, self.n_alice, self.n_bob)?;
        if op.nrows() != 1 << globals.len() || op.ncols() != op.nrows() {
            return Err(Error::Dimension(format!(
                "{}x{} operator on {} qubits",
                op.nrows(),
                op.ncols(),
                globals.len()
            )));
        }
        let layout = TargetLayout::new(&globals, self.n_qubits())?;
        let mut v = self.amplitudes.clone();
        let dim = v.len();
        apply_left_columns(&PreparedOp::new(op), &layout, v.as_mut_slice(), dim);
        Ok(v)
    }

    /// Reduced density matrix on `keep`.
    pub fn reduced(&self, keep: &[Qubit]) -> Result<DensityMatrix> {
        let layout = TraceLayout::new(self.n_alice, self.n_bob, keep)?;
        let k = layout.keep_offsets.len();
        let mut m = CMatrix::zeros(k, k);
        for (i, oi) in layout.keep_offsets.iter().enumerate() {
            for (j, oj) in layout.keep_offsets.iter().enumerate().skip(i) {
                let mut acc = C64::new(0.0, 0.0);
                for r in &layout.rest_offsets {
                    acc += self.amplitudes[oi + r] * self.amplitudes[oj + r].conj();
                }
                m[(i, j)] = acc;
                m[(j, i)] = acc.conj();
            }
        }
        Ok(DensityMatrix::from_parts_unchecked(layout.n_alice, layout.n_bob, m))
    }
}

impl Bipartite for PureState {
    fn n_alice(&self) -> usize {
        self.n_alice
    }

    fn n_bob(&self) -> usize {
        self.n_bob
    }

    fn tensor_with(&self, other: &Self) -> Result<Self> {
        check_capacity(self.n_qubits() + other.n_qubits())?;
        let kron = self.amplitudes.kronecker(&other.amplitudes);
        let perm = tensor_permutation((self.n_alice, self.n_bob), (other.n_alice, other.n_bob));
        let mut v = CVector::zeros(kron.len());
        for (i, &p) in perm.iter().enumerate() {
            v[p] = kron[i];
        }
        Ok(PureState {
            n_alice: self.n_alice + other.n_alice,
            n_bob: self.n_bob + other.n_bob,
            amplitudes: v,
        })
    }
}

/// Mixed bipartite state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_alice: usize,
    n_bob: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates shape, Hermiticity, unit trace and positivity.
    pub fn new(n_alice: usize, n_bob: usize, matrix: CMatrix) -> Result<Self> {
        check_capacity(n_alice + n_bob)?;
        let dim = 1usize << (n_alice + n_bob);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for {} qubits",
                matrix.nrows(),
                matrix.ncols(),
                n_alice + n_bob
            )));
        }
        let dev = linalg::hermitian_deviation(&matrix);
        if dev > tolerance::STRUCTURAL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = trace(&matrix).re;
        if (tr - 1.0).abs() > tolerance::STRUCTURAL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let lowest = linalg::min_eigenvalue(&matrix);
        if lowest < -tolerance::STRUCTURAL {
            return Err(Error::InvalidState(format!("eigenvalue {lowest:e} is negative")));
        }
        Ok(DensityMatrix { n_alice, n_bob, matrix })
    }

    pub(crate) fn from_parts_unchecked(n_alice: usize, n_bob: usize, matrix: CMatrix) -> Self {
        DensityMatrix { n_alice, n_bob, matrix }
    }

    /// `I / 2^(n_alice + n_bob)`.
    pub fn maximally_mixed(n_alice: usize, n_bob: usize) -> Result<Self> {
        check_capacity(n_alice + n_bob)?;
        let dim = 1usize << (n_alice + n_bob);
        let m = CMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0);
        Ok(DensityMatrix {
            n_alice,
            n_bob,
            matrix: m,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    /// Convex combination of states sharing one partition.
    pub fn mixture(components: &[(f64, DensityMatrix)]) -> Result<Self> {
        let (_, first) = components
            .first()
            .ok_or_else(|| Error::Parameter("empty mixture".into()))?;
        let mut total = 0.0;
        let mut m = CMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in components {
            if *w < 0.0 || !w.is_finite() {
                return Err(Error::Parameter(format!("mixture weight {w} is negative")));
            }
            if rho.n_alice != first.n_alice || rho.n_bob != first.n_bob {
                return Err(Error::Dimension("mixture components have different partitions".into()));
            }
            total += w;
            m += &rho.matrix * C64::new(*w, 0.0);
        }
        if (total - 1.0).abs() > tolerance::STRUCTURAL {
            return Err(Error::Parameter(format!("mixture weights sum to {total}")));
        }
        Ok(DensityMatrix {
            n_alice: first.n_alice,
            n_bob: first.n_bob,
            matrix: m,
        })
    }

    /// Reduced state on `keep`: Alice's kept qubits first (in listed order),
    /// then Bob's.
    pub fn partial_trace(&self, keep: &[Qubit]) -> Result<DensityMatrix> {
        let layout = TraceLayout::new(self.n_alice, self.n_bob, keep)?;
        Ok(DensityMatrix::from_parts_unchecked(
            layout.n_alice,
            layout.n_bob,
            reduce_with(&self.matrix, &layout),
        ))
    }

    /// The state of one party's whole register.
    pub fn local_state(&self, party: Party) -> Result<DensityMatrix> {
        let count = match party {
            Party::Alice => self.n_alice,
            Party::Bob => self.n_bob,
        };
        self.partial_trace(&party_qubits(party, count))
    }

    /// Applies a Kraus channel on `targets`. The Kraus set must be
    /// trace-preserving.
    pub fn apply_channel(&self, kraus: &[CMatrix], targets: &[Qubit]) -> Result<DensityMatrix> {
        let k = targets.len();
        let mut completeness = CMatrix::zeros(1 << k, 1 << k);
        for op in kraus {
            if op.nrows() != 1 << k || op.ncols() != 1 << k {
                return Err(Error::Dimension(format!(
                    "Kraus operator is {}x{} for {k} targets",
                    op.nrows(),
                    op.ncols()
                )));
            }
            completeness += op.adjoint() * op;
        }
        let dev = (completeness - CMatrix::identity(1 << k, 1 << k))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > tolerance::OPERATOR {
            return Err(Error::InvalidOperator(format!(
                "Kraus set is not trace preserving (deviation {dev:e})"
            )));
        }
        Ok(DensityMatrix::from_parts_unchecked(
            self.n_alice,
            self.n_bob,
            self.apply_kraus_raw(kraus, targets)?,
        ))
    }

    /// `Σ K ρ K†` without completeness checks; may be subnormalized.
    pub(crate) fn apply_kraus_raw(&self, kraus: &[CMatrix], targets: &[Qubit]) -> Result<CMatrix> {
        let globals = global_targets(targets, self.n_alice, self.n_bob)?;
        let layout = TargetLayout::new(&globals, self.n_qubits())?;
        let ops: Vec<PreparedOp> = kraus.iter().map(PreparedOp::new).collect();
        Ok(apply_kraus_sum(&ops, &layout, &self.matrix))
    }

    /// Largest entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Partial trace of a raw (possibly unnormalized) matrix on `keep`.
pub(crate) fn partial_trace_matrix(m: &CMatrix, n_alice: usize, n_bob: usize, keep: &[Qubit]) -> Result<CMatrix> {
    Ok(reduce_with(m, &TraceLayout::new(n_alice, n_bob, keep)?))
}

fn reduce_with(m: &CMatrix, layout: &TraceLayout) -> CMatrix {
    let k = layout.keep_offsets.len();
    let mut out = CMatrix::zeros(k, k);
    for (i, oi) in layout.keep_offsets.iter().enumerate() {
        for (j, oj) in layout.keep_offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for r in &layout.rest_offsets {
                acc += m[(oi + r, oj + r)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

impl Bipartite for DensityMatrix {
    fn n_alice(&self) -> usize {
        self.n_alice
    }

    fn n_bob(&self) -> usize {
        self.n_bob
    }

    fn tensor_with(&self, other: &Self) -> Result<Self> {
        check_capacity(self.n_qubits() + other.n_qubits())?;
        let kron = self.matrix.kronecker(&other.matrix);
        let perm = tensor_permutation((self.n_alice, self.n_bob), (other.n_alice, other.n_bob));
        let dim = kron.nrows();
        let mut m = CMatrix::zeros(dim, dim);
        for (j, &pj) in perm.iter().enumerate() {
            for (i, &pi) in perm.iter().enumerate() {
                m[(pi, pj)] = kron[(i, j)];
            }
        }
        Ok(DensityMatrix {
            n_alice: self.n_alice + other.n_alice,
            n_bob: self.n_bob + other.n_bob,
            matrix: m,
        })
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(state: &PureState) -> Self {
        state.to_density()
    }
}

/// Either kind of state; inputs stay pure for as long as the evaluation
/// allows.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl AnyState {
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            AnyState::Pure(s) => s.to_density(),
            AnyState::Mixed(rho) => rho.clone(),
        }
    }

    pub fn n_alice(&self) -> usize {
        match self {
            AnyState::Pure(s) => s.n_alice(),
            AnyState::Mixed(rho) => rho.n_alice(),
        }
    }

    pub fn n_bob(&self) -> usize {
        match self {
            AnyState::Pure(s) => s.n_bob(),
            AnyState::Mixed(rho) => rho.n_bob(),
        }
    }

    /// Reduced state on `keep`, without forming the full density matrix for
    /// pure inputs.
    pub fn reduced(&self, keep: &[Qubit]) -> Result<DensityMatrix> {
        match self {
            AnyState::Pure(s) => s.reduced(keep),
            AnyState::Mixed(rho) => rho.partial_trace(keep),
        }
    }
}

impl From<PureState> for AnyState {
    fn from(s: PureState) -> Self {
        AnyState::Pure(s)
    }
}

impl From<DensityMatrix> for AnyState {
    fn from(rho: DensityMatrix) -> Self {
        AnyState::Mixed(rho)
    }
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    n_alice: usize,
    n_bob: usize,
    matrix: JsonMatrix,
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DensityJson {
            n_alice: self.n_alice,
            n_bob: self.n_bob,
            matrix: serde_matrix::matrix_to_rows(&self.matrix),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = DensityJson::deserialize(d)?;
        let m = serde_matrix::rows_to_matrix(&raw.matrix).map_err(serde::de::Error::custom)?;
        DensityMatrix::new(raw.n_alice, raw.n_bob, m).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct PureJson {
    n_alice: usize,
    n_bob: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl Serialize for PureState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PureJson {
            n_alice: self.n_alice,
            n_bob: self.n_bob,
            amplitudes: serde_matrix::vector_to_pairs(&self.amplitudes),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PureJson::deserialize(d)?;
        PureState::new(raw.n_alice, raw.n_bob, serde_matrix::pairs_to_vector(&raw.amplitudes))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{random, BellState};
    use crate::seed::stream_rng;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        a.shape() == b.shape() && (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn basis_tensor_is_index_zero() {
        let a = PureState::basis(1, 0, 0, 0).unwrap();
        let b = PureState::basis(0, 1, 0, 0).unwrap();
        let ab = tensor(&a, &b).unwrap();
        assert_eq!((ab.n_alice(), ab.n_bob()), (1, 1));
        assert_eq!(ab.amplitudes()[0], C64::new(1.0, 0.0));
        assert_eq!(ab.amplitudes().iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn pair_tensor_builds_epr_pairs() {
        let phi = BellState::PhiPlus.state();
        let psi2 = tensor(&phi, &phi).unwrap();
        let expect = PureState::epr_pairs(2).unwrap();
        assert!((psi2.amplitudes() - expect.amplitudes()).norm() < 1e-15);
        for x in 0..4 {
            for y in 0..4 {
                let want = if x == y { 0.5 } else { 0.0 };
                assert!((psi2.amplitude(x, y).re - want).abs() < 1e-15);
            }
        }
        // Density-matrix route agrees.
        let rho = tensor(&phi.to_density(), &phi.to_density()).unwrap();
        assert!(close(rho.matrix(), expect.to_density().matrix(), 1e-15));
    }

    #[test]
    fn tensor_preserves_trace() {
        let mut rng = stream_rng(3, 0);
        for _ in 0..10 {
            let a = random::random_density_matrix(1, 2, 2, &mut rng);
            let b = random::random_density_matrix(2, 1, 3, &mut rng);
            let t = tensor(&a, &b).unwrap();
            assert!((t.trace() - 1.0).abs() < 1e-12);
            assert_eq!((t.n_alice(), t.n_bob()), (3, 3));
            // Tracing out b's qubits recovers a.
            let back = t
                .partial_trace(&[Qubit::alice(0), Qubit::bob(0), Qubit::bob(1)])
                .unwrap();
            assert!(close(back.matrix(), a.matrix(), 1e-12));
        }
    }

    #[test]
    fn partial_trace_examples() {
        let phi = BellState::PhiPlus.state().to_density();
        let a = phi.partial_trace(&[Qubit::alice(0)]).unwrap();
        assert!(close(
            a.matrix(),
            &(CMatrix::identity(2, 2) * C64::new(0.5, 0.0)),
            1e-15
        ));

        let psi3 = PureState::epr_pairs(3).unwrap().to_density();
        let first = psi3.partial_trace(&[Qubit::alice(0), Qubit::bob(0)]).unwrap();
        assert!(close(first.matrix(), phi.matrix(), 1e-15));

        let zz = PureState::basis(1, 1, 0, 0).unwrap().to_density();
        let a = zz.partial_trace(&[Qubit::alice(0)]).unwrap();
        assert!((a.matrix()[(0, 0)].re - 1.0).abs() < 1e-15 && a.matrix()[(1, 1)].norm() < 1e-15);

        assert!(matches!(psi3.partial_trace(&[]), Err(Error::EmptyKeepSet)));
    }

    #[test]
    fn pure_and_mixed_reduction_agree() {
        let mut rng = stream_rng(4, 0);
        let s = random::random_pure_state(2, 2, &mut rng);
        let keep = [Qubit::bob(1), Qubit::alice(1)];
        let a = s.reduced(&keep).unwrap();
        let b = s.to_density().partial_trace(&keep).unwrap();
        assert!(close(a.matrix(), b.matrix(), 1e-13));
    }

    #[test]
    fn validation() {
        assert!(PureState::new(1, 1, CVector::zeros(4)).is_err());
        assert!(PureState::new(1, 1, CVector::zeros(3)).is_err());
        let bad = CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(1.2, 0.0), C64::new(-0.2, 0.0)]));
        assert!(DensityMatrix::new(1, 0, bad).is_err());
        let mut nonherm = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        nonherm[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(0, 1, nonherm).is_err());
    }

    #[test]
    fn capacity_is_enforced() {
        // 8 + 8 qubits exceeds the default cap of 14.
        assert!(matches!(PureState::epr_pairs(8), Err(Error::Capacity { .. })));
    }

    #[test]
    fn json_round_trip() {
        let mut rng = stream_rng(8, 0);
        let rho = random::random_density_matrix(1, 1, 2, &mut rng);
        let text = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&text).unwrap();
        assert!(close(back.matrix(), rho.matrix(), 1e-15));
        let psi = PureState::epr_pairs(1).unwrap();
        let back: PureState = serde_json::from_str(&serde_json::to_string(&psi).unwrap()).unwrap();
        assert_eq!(back, psi);
    }
}
