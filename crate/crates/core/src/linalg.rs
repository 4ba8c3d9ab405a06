//! Dense complex linear-algebra helpers shared by every module.
//!
//! All matrices are `ndarray::Array2<Complex64>` with row-major layout.
//! Hermitian eigenproblems go through LAPACK (`zheev` via ndarray-linalg);
//! everything else is small enough for direct loops.

use crate::error::{HamError, Result};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, SVD, UPLO};
use num_complex::Complex64 as C64;

pub const C_ZERO: C64 = C64::new(0.0, 0.0);
pub const C_ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// max_{ij} |M[i,j] - conj(M[j,i])|
pub fn hermiticity_defect(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let d = (m[[i, j]] - m[[j, i]].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn check_hermitian(m: &Array2<C64>, tol: f64) -> Result<()> {
    let d = hermiticity_defect(m);
    if d > tol {
        return Err(HamError::NotHermitian(d));
    }
    Ok(())
}

pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::eye(n)
}

pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == C_ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Explicit column-major copy. The LAPACK bindings hand back eigenvectors of
/// the transpose when given row-major complex data, so every eigh call routes
/// through this.
fn to_f_order(m: &Array2<C64>) -> Array2<C64> {
    use ndarray::ShapeBuilder;
    let (r, c) = m.dim();
    let mut data = Vec::with_capacity(r * c);
    for j in 0..c {
        for i in 0..r {
            data.push(m[[i, j]]);
        }
    }
    Array2::from_shape_vec((r, c).f(), data).expect("f-order copy")
}

/// Eigenvalues and eigenvectors of a Hermitian matrix, ascending.
/// Column `k` of the returned matrix is the eigenvector of eigenvalue `k`.
pub fn eigh(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let (vals, vecs) = to_f_order(m).eigh(UPLO::Lower)?;
    Ok((vals, vecs))
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &Array2<C64>) -> Result<Array1<f64>> {
    use ndarray_linalg::Eigh as _;
    let (vals, _) = m.eigh(UPLO::Lower)?;
    Ok(vals)
}

/// Spectral norm of a Hermitian matrix (max |eigenvalue|).
pub fn hermitian_norm(m: &Array2<C64>) -> Result<f64> {
    let vals = eigvalsh(m)?;
    Ok(vals.iter().fold(0.0f64, |acc, &v| acc.max(v.abs())))
}

/// Operator (spectral) norm of an arbitrary matrix via SVD.
pub fn operator_norm(m: &Array2<C64>) -> Result<f64> {
    let (_, s, _) = m.svd(false, false)?;
    Ok(s.iter().fold(0.0f64, |acc, &v| acc.max(v)))
}

/// Trace norm ||M||_1 of a Hermitian matrix: sum of |eigenvalues|.
pub fn hermitian_trace_norm(m: &Array2<C64>) -> Result<f64> {
    let vals = eigvalsh(m)?;
    Ok(vals.iter().map(|v| v.abs()).sum())
}

pub fn trace(m: &Array2<C64>) -> C64 {
    (0..m.nrows()).map(|i| m[[i, i]]).sum()
}

pub fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b)
}

/// <v|M|v> for a unit vector.
pub fn quadratic_form(m: &Array2<C64>, v: &Array1<C64>) -> C64 {
    let mv = m.dot(v);
    v.iter().zip(mv.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn inner(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm2(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(v: &mut Array1<C64>) {
    let n = norm2(v);
    if n > 0.0 {
        v.mapv_inplace(|z| z / n);
    }
}

/// Projector onto the span of the given orthonormal columns.
pub fn projector_from_columns(cols: &Array2<C64>) -> Array2<C64> {
    cols.dot(&dagger(cols))
}

/// |psi><psi| for a unit vector.
pub fn pure_density(v: &Array1<C64>) -> Array2<C64> {
    let n = v.len();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] = v[i] * v[j].conj();
        }
    }
    out
}

/// Closest isometry to M with the same column space: the unitary polar factor
/// U V^dag from the SVD M = U S V^dag. Returns (isometry, smallest singular value).
pub fn polar_isometry(m: &Array2<C64>) -> Result<(Array2<C64>, f64)> {
    let (u, s, vt) = m.svd(true, true)?;
    let u = u.ok_or_else(|| HamError::Lapack("svd returned no U".into()))?;
    let vt = vt.ok_or_else(|| HamError::Lapack("svd returned no Vt".into()))?;
    let k = s.len();
    let min_sv = s.iter().cloned().fold(f64::INFINITY, f64::min);
    // economy-size: keep the first k columns of U
    let u_thin = u.slice(ndarray::s![.., 0..k]).to_owned();
    Ok((u_thin.dot(&vt), min_sv))
}

/// Pauli matrices.
pub fn pauli_x() -> Array2<C64> {
    ndarray::array![[C_ZERO, C_ONE], [C_ONE, C_ZERO]]
}

pub fn pauli_y() -> Array2<C64> {
    ndarray::array![[C_ZERO, c(0.0, -1.0)], [c(0.0, 1.0), C_ZERO]]
}

pub fn pauli_z() -> Array2<C64> {
    ndarray::array![[C_ONE, C_ZERO], [C_ZERO, c(-1.0, 0.0)]]
}

/// |b><b| on one qubit.
pub fn qubit_proj(b: usize) -> Array2<C64> {
    let mut m = Array2::zeros((2, 2));
    m[[b, b]] = C_ONE;
    m
}

/// Random Hermitian matrix with entries of magnitude O(1), seeded.
pub fn random_hermitian(n: usize, rng: &mut impl rand::Rng) -> Array2<C64> {
    let mut m: Array2<C64> = Array2::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = c(rng.gen_range(-1.0..1.0), 0.0);
        for j in (i + 1)..n {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[[i, j]] = z;
            m[[j, i]] = z.conj();
        }
    }
    m
}

/// Random unit vector, seeded.
pub fn random_state(n: usize, rng: &mut impl rand::Rng) -> Array1<C64> {
    let mut v: Array1<C64> =
        Array1::from_iter((0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
    normalize(&mut v);
    v
}
