//! Application of operators on a subset of qubits without forming the full
//! Kronecker product.

use super::{CMatrix, C64};
use crate::{Error, Result};

/// Precomputed index layout for an operator acting on `targets` inside an
/// `n_qubits` register. Target `targets[0]` is the most significant bit of
/// the operator's own basis index.
#[derive(Debug, Clone)]
pub struct TargetLayout {
    offsets: Vec<usize>,
    bases: Vec<usize>,
}

impl TargetLayout {
    pub fn new(targets: &[usize], n_qubits: usize) -> Result<Self> {
        let k = targets.len();
        let mut mask = 0usize;
        for &t in targets {
            if t >= n_qubits {
                return Err(Error::Dimension(format!(
                    "target qubit {t} outside {n_qubits}-qubit register"
                )));
            }
            let bit = 1usize << (n_qubits - 1 - t);
            if mask & bit != 0 {
                return Err(Error::Dimension(format!("target qubit {t} repeated")));
            }
            mask |= bit;
        }
        let offsets = (0..1usize << k)
            .map(|a| {
                (0..k)
                    .filter(|j| (a >> (k - 1 - j)) & 1 == 1)
                    .map(|j| 1usize << (n_qubits - 1 - targets[j]))
                    .sum()
            })
            .collect();
        let bases = (0..1usize << n_qubits).filter(|i| i & mask == 0).collect();
        Ok(TargetLayout { offsets, bases })
    }

    pub fn local_dim(&self) -> usize {
        self.offsets.len()
    }
}

/// An operator prepared for repeated application: either dense, or
/// monomial (at most one nonzero per column, e.g. permutations and
/// computational-basis projectors) which is applied by scatter.
#[derive(Debug, Clone)]
pub enum PreparedOp {
    Dense(CMatrix),
    Monomial(Vec<Option<(usize, C64)>>),
}

impl PreparedOp {
    pub fn new(op: &CMatrix) -> Self {
        let mut image = Vec::with_capacity(op.ncols());
        for col in 0..op.ncols() {
            let mut hit = None;
            for row in 0..op.nrows() {
                let v = op[(row, col)];
                if v.norm_sqr() > 0.0 {
                    if hit.is_some() {
                        return PreparedOp::Dense(op.clone());
                    }
                    hit = Some((row, v));
                }
            }
            image.push(hit);
        }
        PreparedOp::Monomial(image)
    }

    fn apply_block(&self, input: &[C64], out: &mut [C64]) {
        match self {
            PreparedOp::Monomial(image) => {
                out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
                for (a, hit) in image.iter().enumerate() {
                    if let Some((b, v)) = hit {
                        out[*b] += v * input[a];
                    }
                }
            }
            PreparedOp::Dense(m) => {
                for (b, o) in out.iter_mut().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for (a, x) in input.iter().enumerate() {
                        acc += m[(b, a)] * x;
                    }
                    *o = acc;
                }
            }
        }
    }
}

/// Replaces every column `v` of `data` (column-major, `dim` rows) by `op v`.
pub fn apply_left_columns(op: &PreparedOp, layout: &TargetLayout, data: &mut [C64], dim: usize) {
    let k = layout.local_dim();
    let mut input = vec![C64::new(0.0, 0.0); k];
    let mut out = vec![C64::new(0.0, 0.0); k];
    for col in data.chunks_mut(dim) {
        for &base in &layout.bases {
            for (a, off) in layout.offsets.iter().enumerate() {
                input[a] = col[base + off];
            }
            op.apply_block(&input, &mut out);
            for (b, off) in layout.offsets.iter().enumerate() {
                col[base + off] = out[b];
            }
        }
    }
}

/// `K ρ K†` for Hermitian `rho`.
pub fn conjugate_hermitian(op: &PreparedOp, layout: &TargetLayout, rho: &CMatrix) -> CMatrix {
    let mut acc = CMatrix::zeros(rho.nrows(), rho.ncols());
    add_conjugated(op, layout, rho, &mut acc);
    acc
}

/// Where each basis index of the whole register goes under a monomial
/// operator.
fn register_image(image: &[Option<(usize, C64)>], layout: &TargetLayout, dim: usize) -> Vec<Option<(usize, C64)>> {
    let mut full = vec![None; dim];
    for &base in &layout.bases {
        for (a, hit) in image.iter().enumerate() {
            full[base + layout.offsets[a]] = hit.map(|(b, v)| (base + layout.offsets[b], v));
        }
    }
    full
}

/// `acc += K ρ K†` for Hermitian `rho`. Monomial operators are applied to
/// both sides in one scatter pass.
pub fn add_conjugated(op: &PreparedOp, layout: &TargetLayout, rho: &CMatrix, acc: &mut CMatrix) {
    let dim = rho.nrows();
    match op {
        PreparedOp::Monomial(image) => {
            let full = register_image(image, layout, dim);
            for (j, hit) in full.iter().enumerate() {
                let Some((j2, vj)) = hit else { continue };
                let vj = vj.conj();
                let src = rho.column(j);
                let mut dst = acc.column_mut(*j2);
                for (i, hit) in full.iter().enumerate() {
                    if let Some((i2, vi)) = hit {
                        dst[*i2] += vi * vj * src[i];
                    }
                }
            }
        }
        PreparedOp::Dense(_) => {
            let mut m = rho.clone();
            apply_left_columns(op, layout, m.as_mut_slice(), dim);
            m.adjoint_mut();
            apply_left_columns(op, layout, m.as_mut_slice(), dim);
            *acc += m;
        }
    }
}

/// `Σ_K K ρ K†` over a Kraus list sharing one layout.
pub fn apply_kraus_sum(ops: &[PreparedOp], layout: &TargetLayout, rho: &CMatrix) -> CMatrix {
    let mut acc = CMatrix::zeros(rho.nrows(), rho.ncols());
    for op in ops {
        add_conjugated(op, layout, rho, &mut acc);
    }
    acc
}
