//! Hermitian eigen-decomposition helpers. The decomposition itself is
//! delegated to LAPACK's `zheevd`; pure-Rust solvers tried here produced
//! NaNs or failed to converge on large rank-one projectors such as
//! `|Ψ_3⟩⟨Ψ_3|`.

use std::os::raw::c_char;

use nalgebra::DVector;

use super::{CMatrix, C64};
use crate::{tolerance, Error, Result};

/// Largest entrywise deviation `|m - m†|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Runs `zheevd` on the Hermitian part of `m`. Returns ascending
/// eigenvalues and, if requested, the eigenvectors as columns.
fn zheevd(m: &CMatrix, vectors: bool) -> (DVector<f64>, Option<CMatrix>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigen-decomposition of a non-square matrix");
    if n == 0 {
        return (DVector::zeros(0), vectors.then(|| CMatrix::zeros(0, 0)));
    }
    // nalgebra storage is column-major, as LAPACK expects.
    let mut a = hermitian_part(m);
    let mut w = vec![0.0f64; n];
    let jobz = if vectors { b'V' } else { b'N' } as c_char;
    let uplo = b'L' as c_char;
    let dim = i32::try_from(n).expect("matrix dimension fits in i32");
    let mut info = 0i32;

    let mut work_query = [lapack_sys::__BindgenComplex { re: 0.0, im: 0.0 }];
    let mut rwork_query = [0.0f64];
    let mut iwork_query = [0i32];
    // SAFETY: workspace query; every pointer is valid for the sizes passed.
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &dim,
            a.as_mut_slice().as_mut_ptr().cast(),
            &dim,
            w.as_mut_ptr(),
            work_query.as_mut_ptr(),
            &-1,
            rwork_query.as_mut_ptr(),
            &-1,
            iwork_query.as_mut_ptr(),
            &-1,
            &mut info,
        );
    }
    assert_eq!(info, 0, "zheevd workspace query failed (info {info})");
    let lwork = (work_query[0].re as usize).max(1);
    let lrwork = (rwork_query[0] as usize).max(1);
    let liwork = (iwork_query[0] as usize).max(1);
    let mut work = vec![lapack_sys::__BindgenComplex { re: 0.0, im: 0.0 }; lwork];
    let mut rwork = vec![0.0f64; lrwork];
    let mut iwork = vec![0i32; liwork];
    // SAFETY: buffers sized from the workspace query above.
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &dim,
            a.as_mut_slice().as_mut_ptr().cast(),
            &dim,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &(lwork as i32),
            rwork.as_mut_ptr(),
            &(lrwork as i32),
            iwork.as_mut_ptr(),
            &(liwork as i32),
            &mut info,
        );
    }
    assert_eq!(info, 0, "zheevd failed to converge (info {info})");
    (DVector::from_vec(w), vectors.then_some(a))
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `m`.
pub fn eigh(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let (values, vectors) = zheevd(m, true);
    (values, vectors.expect("eigenvectors requested"))
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn eigenvalues(m: &CMatrix) -> DVector<f64> {
    zheevd(m, false).0
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    eigenvalues(m)[0]
}

/// Eigenvalues this close to zero, relative to the spectrum's scale, are
/// rounding noise; taking their square root would inflate them to ~1e-8.
fn noise_floor(values: &DVector<f64>) -> f64 {
    let scale = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    4.0 * f64::EPSILON * values.len() as f64 * scale
}

fn clamped_roots(values: &DVector<f64>, tol: f64) -> Result<DVector<f64>> {
    if let Some(&lowest) = values.iter().next() {
        if lowest < -tol {
            return Err(Error::InvalidState(format!(
                "matrix has eigenvalue {lowest:e} below -{tol:e}"
            )));
        }
    }
    let floor = noise_floor(values);
    Ok(values.map(|v| if v <= floor { 0.0 } else { v.sqrt() }))
}

/// Square root of a positive semidefinite matrix. Eigenvalues in
/// `[-tol, 0)` are clamped to zero; anything more negative is rejected.
pub fn psd_sqrt(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let (values, vectors) = eigh(m);
    let roots = clamped_roots(&values, tol)?.map(|v| C64::new(v, 0.0));
    Ok(&vectors * CMatrix::from_diagonal(&roots) * vectors.adjoint())
}

/// `Tr √m` from the clamped eigenvalues.
pub fn trace_sqrt(m: &CMatrix, tol: f64) -> Result<f64> {
    Ok(clamped_roots(&eigenvalues(m), tol)?.iter().sum())
}

/// `exp(h)` for anti-Hermitian `h`, computed from the eigenbasis of the
/// Hermitian matrix `-i h`. The result is unitary to machine precision.
pub fn expm_anti_hermitian(h: &CMatrix) -> CMatrix {
    let herm = h * C64::new(0.0, -1.0);
    let (values, vectors) = eigh(&herm);
    let phases = values.map(|v| C64::new(0.0, v).exp());
    &vectors * CMatrix::from_diagonal(&phases) * vectors.adjoint()
}

/// `max |U U† - I|` entrywise.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let prod = u * u.adjoint();
    let id = CMatrix::identity(u.nrows(), u.ncols());
    (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn ensure_hermitian(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "{}x{} matrix is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = hermitian_deviation(m);
    if dev > tolerance::STRUCTURAL {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}
