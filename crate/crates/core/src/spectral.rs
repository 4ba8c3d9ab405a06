//! Eigensolvers and numerical verifiers for the spectral statements the
//! constructions rely on: minimum eigenvalues, low-energy projectors, the
//! low-energy trace-distance bound, the projection-lemma sandwich and its
//! nullspace-closeness corollary, and the commutative union bound.

use crate::error::{HamError, Result};
use crate::linalg::{self, C_ZERO};
use crate::operator::{dense_cap, Hamiltonian, StateVector};
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

pub const LANCZOS_MAX_ITER: usize = 500;
pub const CUT_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub lambda_min: f64,
    pub ground_vector: StateVector,
    /// ||H v - lambda v||_2 for the reported pair.
    pub residual: f64,
}

/// Minimum eigenvalue with a certified residual. Dense path under the cap,
/// Lanczos (matvec only, full reorthogonalization, fixed start vector) above.
pub fn min_eigenvalue(h: &Hamiltonian, tol: f64) -> Result<SpectralResult> {
    let dim = h.dim();
    if dim <= dense_cap() {
        let m = h.to_dense()?;
        let (vals, vecs) = linalg::eigh(&m)?;
        let v = vecs.column(0).to_owned();
        let residual = eig_residual(h, &v, vals[0])?;
        return Ok(SpectralResult {
            lambda_min: vals[0],
            ground_vector: StateVector::from_amplitudes(v),
            residual,
        });
    }
    lanczos_min(h, tol)
}

fn eig_residual(h: &Hamiltonian, v: &Array1<C64>, lambda: f64) -> Result<f64> {
    let hv = h.matvec(v)?;
    let diff = &hv - &v.mapv(|z| z * C64::new(lambda, 0.0));
    Ok(linalg::norm2(&diff))
}

/// Lanczos with full reorthogonalization. Deterministic: the start vector is a
/// fixed pseudo-random sequence, convergence is checked on the lowest Ritz
/// residual.
pub fn lanczos_min(h: &Hamiltonian, tol: f64) -> Result<SpectralResult> {
    let dim = h.dim();
    let scale = h.norm_bound()?.max(1.0);
    let tol_abs = tol * scale;

    // fixed, seed-free start vector (golden-ratio stepping)
    let mut q: Array1<C64> = Array1::from_iter(
        (0..dim).map(|i| C64::new(((i as f64 + 1.0) * 0.618_033_988_749_895).fract() - 0.5, 0.0)),
    );
    linalg::normalize(&mut q);

    let max_iter = LANCZOS_MAX_ITER.min(dim);
    let mut basis: Vec<Array1<C64>> = vec![q.clone()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();

    for j in 0..max_iter {
        let mut w = h.matvec(&basis[j])?;
        let a = linalg::inner(&basis[j], &w).re;
        alpha.push(a);
        // full reorthogonalization against every stored vector
        for qi in &basis {
            let ov = linalg::inner(qi, &w);
            if ov != C_ZERO {
                w = &w - &qi.mapv(|z| z * ov);
            }
        }
        // second pass for numerical safety
        for qi in &basis {
            let ov = linalg::inner(qi, &w);
            if ov != C_ZERO {
                w = &w - &qi.mapv(|z| z * ov);
            }
        }
        let b = linalg::norm2(&w);

        let (theta, ritz_res) = tridiag_lowest(&alpha, &beta, b);
        if ritz_res < tol_abs || b < 1e-14 || j + 1 == max_iter {
            // assemble the Ritz vector and certify the residual
            let (vals, vecs) = tridiag_eigh(&alpha, &beta);
            let mut v: Array1<C64> = Array1::from_elem(dim, C_ZERO);
            for (k, qk) in basis.iter().enumerate() {
                let ck = C64::new(vecs[[k, 0]], 0.0);
                v = &v + &qk.mapv(|z| z * ck);
            }
            linalg::normalize(&mut v);
            let residual = eig_residual(h, &v, vals[0])?;
            if residual < tol_abs || b < 1e-14 {
                return Ok(SpectralResult {
                    lambda_min: vals[0],
                    ground_vector: StateVector::from_amplitudes(v),
                    residual,
                });
            }
            if j + 1 == max_iter {
                return Err(HamError::NoConvergence(max_iter));
            }
            let _ = theta;
        }
        beta.push(b);
        basis.push(w.mapv(|z| z / C64::new(b, 0.0)));
    }
    Err(HamError::NoConvergence(max_iter))
}

/// Lowest eigenvalue of the tridiagonal (alpha, beta) and the Ritz residual
/// estimate |beta_last * s_last|.
fn tridiag_lowest(alpha: &[f64], beta: &[f64], b_next: f64) -> (f64, f64) {
    let (vals, vecs) = tridiag_eigh(alpha, beta);
    let m = alpha.len();
    (vals[0], b_next * vecs[[m - 1, 0]].abs())
}

fn tridiag_eigh(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, Array2<f64>) {
    let m = alpha.len();
    let mut t: Array2<C64> = Array2::zeros((m, m));
    for i in 0..m {
        t[[i, i]] = C64::new(alpha[i], 0.0);
        if i > 0 {
            t[[i, i - 1]] = C64::new(beta[i - 1], 0.0);
            t[[i - 1, i]] = C64::new(beta[i - 1], 0.0);
        }
    }
    let (vals, vecs) = linalg::eigh(&t).expect("tridiagonal eigh");
    (vals.to_vec(), vecs.mapv(|z| z.re))
}

#[derive(Debug, Clone)]
pub struct LowEnergyProjector {
    pub threshold: f64,
    /// Orthonormal basis vectors (columns) of span{eigenvectors with eigenvalue < threshold}.
    pub basis: Array2<C64>,
    pub eigenvalues: Vec<f64>,
}

impl LowEnergyProjector {
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projector(&self) -> Array2<C64> {
        linalg::projector_from_columns(&self.basis)
    }
}

/// Projector onto span{eigenvectors of H with eigenvalue < delta}. Eigenvalues
/// within `cut_tol` of the threshold are an error: the callers always have the
/// freedom to pick a threshold strictly between spectral points.
pub fn low_energy_projector(h: &Hamiltonian, delta: f64) -> Result<LowEnergyProjector> {
    low_energy_projector_dense(&h.to_dense()?, delta, CUT_TOL)
}

pub fn low_energy_projector_with_tol(
    h: &Hamiltonian,
    delta: f64,
    cut_tol: f64,
) -> Result<LowEnergyProjector> {
    low_energy_projector_dense(&h.to_dense()?, delta, cut_tol)
}

/// Same, for callers that already hold a dense matrix (e.g. an operator
/// restricted to an explicit invariant-subspace basis).
pub fn low_energy_projector_dense(
    m: &Array2<C64>,
    delta: f64,
    cut_tol: f64,
) -> Result<LowEnergyProjector> {
    let (vals, vecs) = linalg::eigh(m)?;
    for &v in vals.iter() {
        if (v - delta).abs() < cut_tol {
            return Err(HamError::AmbiguousCut {
                eig: v,
                cut: delta,
                tol: cut_tol,
            });
        }
    }
    let rank = vals.iter().take_while(|&&v| v < delta).count();
    let basis = vecs.slice(ndarray::s![.., 0..rank]).to_owned();
    Ok(LowEnergyProjector {
        threshold: delta,
        basis,
        eigenvalues: vals.iter().take(rank).cloned().collect(),
    })
}

/// <psi|A|psi> with a hard check that the imaginary residue is negligible.
pub fn expectation(a: &Hamiltonian, psi: &StateVector) -> Result<f64> {
    if psi.amplitudes.len() != a.dim() {
        return Err(HamError::DimensionMismatch {
            expected: a.dim(),
            got: psi.amplitudes.len(),
        });
    }
    let av = a.matvec(&psi.amplitudes)?;
    let val: C64 = linalg::inner(&psi.amplitudes, &av);
    if val.im.abs() > 1e-10 {
        return Err(HamError::InvalidInstance(format!(
            "expectation has imaginary residue {:.3e}",
            val.im
        )));
    }
    Ok(val.re)
}

#[derive(Debug, Clone)]
pub struct LowEnergyDistanceReport {
    /// (1/2)||rho - rho'||_1
    pub lhs: f64,
    /// sqrt(delta / delta')
    pub rhs: f64,
    pub trace_p_rho: f64,
    /// true when tr(P rho) = 0 and the statement is vacuous
    pub vacuous: bool,
    pub pass: bool,
}

/// Lemma: for tr(H rho) <= lambda(H) + delta and P the projector onto
/// eigenvectors with energy < lambda(H) + delta', the renormalized projection
/// rho' = P rho P / tr(P rho) satisfies (1/2)||rho - rho'||_1 <= sqrt(delta/delta').
pub fn check_low_energy_distance(
    h: &Hamiltonian,
    rho: &Array2<C64>,
    delta: f64,
    delta_p: f64,
) -> Result<LowEnergyDistanceReport> {
    if delta_p <= 0.0 {
        return Err(HamError::InvalidInstance("delta' must be positive".into()));
    }
    let m = h.to_dense()?;
    let (vals, vecs) = linalg::eigh(&m)?;
    let lambda = vals[0];
    // verify the precondition on rho
    let energy = linalg::trace(&m.dot(rho)).re;
    if energy > lambda + delta + 1e-9 {
        return Err(HamError::InvalidInstance(format!(
            "tr(H rho) = {energy} exceeds lambda + delta = {}",
            lambda + delta
        )));
    }
    let cut = lambda + delta_p;
    let rank = vals.iter().take_while(|&&v| v < cut).count();
    let basis = vecs.slice(ndarray::s![.., 0..rank]).to_owned();
    let p = linalg::projector_from_columns(&basis);
    let prp = p.dot(rho).dot(&p);
    let tr = linalg::trace(&prp).re;
    if tr <= 1e-14 {
        return Ok(LowEnergyDistanceReport {
            lhs: f64::NAN,
            rhs: (delta / delta_p).sqrt(),
            trace_p_rho: tr,
            vacuous: true,
            pass: false,
        });
    }
    let rho_p = prp.mapv(|z| z / C64::new(tr, 0.0));
    let diff = rho - &rho_p;
    let lhs = 0.5 * linalg::hermitian_trace_norm(&diff)?;
    let rhs = (delta / delta_p).sqrt();
    Ok(LowEnergyDistanceReport {
        lhs,
        rhs,
        trace_p_rho: tr,
        vacuous: false,
        pass: lhs <= rhs + 1e-9,
    })
}

#[derive(Debug, Clone)]
pub struct ProjectionLemmaReport {
    pub lower: f64,
    pub upper: f64,
    pub lambda_h: f64,
    pub k2: f64,
    pub pass: bool,
}

/// Projection-lemma sandwich: with H1 annihilating S, eigenvalues >= J on the
/// orthogonal complement, and J > 2||H2||,
///   lambda(H2|_S) - ||H2||^2/(J - 2||H2||) <= lambda(H1+H2) <= lambda(H2|_S).
/// `s_basis` holds orthonormal columns spanning S.
pub fn projection_lemma_bounds(
    h1: &Hamiltonian,
    h2: &Hamiltonian,
    s_basis: &Array2<C64>,
    j: f64,
) -> Result<ProjectionLemmaReport> {
    let m1 = h1.to_dense()?;
    let m2 = h2.to_dense()?;
    // hypothesis: H1 annihilates S
    let h1s = m1.dot(s_basis);
    let worst = h1s.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if worst > 1e-8 {
        return Err(HamError::InvalidInstance(format!(
            "H1 does not annihilate S (residual {worst:.3e})"
        )));
    }
    let k2 = linalg::hermitian_norm(&m2)?;
    if j <= 2.0 * k2 {
        return Err(HamError::HypothesisViolated { j, k2 });
    }
    // lambda(H2|_S) from the restriction S^dag H2 S
    let restricted = linalg::dagger(s_basis).dot(&m2).dot(s_basis);
    let vals = linalg::eigvalsh(&restricted)?;
    let lam_restricted = vals[0];
    let lower = lam_restricted - k2 * k2 / (j - 2.0 * k2);
    let upper = lam_restricted;
    let total = &m1 + &m2;
    let lambda_h = linalg::eigvalsh(&total)?[0];
    let pass = lower <= lambda_h + 1e-9 && lambda_h <= upper + 1e-9;
    Ok(ProjectionLemmaReport {
        lower,
        upper,
        lambda_h,
        k2,
        pass,
    })
}

#[derive(Debug, Clone)]
pub struct NullspaceClosenessReport {
    /// ||  |psi><psi| - |psi'><psi'|  ||_1
    pub trace_distance: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Corollary to the projection lemma: any |psi> with <psi|H|psi> <= lambda(H)+delta
/// is trace-norm close to some |psi'> in S, with the explicit bound
/// 2 (K + sqrt(K^2 + delta (J - 2K))) / (J - 2K), K = ||H2||.
/// The candidate |psi'> is the normalized projection of |psi> onto S.
pub fn closeness_to_nullspace(
    h1: &Hamiltonian,
    h2: &Hamiltonian,
    s_basis: &Array2<C64>,
    j: f64,
    delta: f64,
    psi: &StateVector,
) -> Result<NullspaceClosenessReport> {
    let m1 = h1.to_dense()?;
    let m2 = h2.to_dense()?;
    let k = linalg::hermitian_norm(&m2)?;
    if j <= 2.0 * k {
        return Err(HamError::HypothesisViolated { j, k2: k });
    }
    let total = &m1 + &m2;
    let lambda_h = linalg::eigvalsh(&total)?[0];
    let energy = linalg::quadratic_form(&total, &psi.amplitudes).re;
    if energy > lambda_h + delta + 1e-9 {
        return Err(HamError::InvalidInstance(format!(
            "<psi|H|psi> = {energy} exceeds lambda + delta = {}",
            lambda_h + delta
        )));
    }
    // best candidate in S: projection of psi, normalized
    let coeffs = linalg::dagger(s_basis).dot(&psi.amplitudes);
    let mut proj = s_basis.dot(&coeffs);
    let nrm = linalg::norm2(&proj);
    if nrm < 1e-14 {
        return Err(HamError::InvalidInstance(
            "psi has no overlap with S".into(),
        ));
    }
    proj.mapv_inplace(|z| z / C64::new(nrm, 0.0));
    let d1 = linalg::pure_density(&psi.amplitudes);
    let d2 = linalg::pure_density(&proj);
    let diff = &d1 - &d2;
    let trace_distance = linalg::hermitian_trace_norm(&diff)?;
    let bound = 2.0 * (k + (k * k + delta * (j - 2.0 * k)).sqrt()) / (j - 2.0 * k);
    Ok(NullspaceClosenessReport {
        trace_distance,
        bound,
        pass: trace_distance <= bound + 1e-9,
    })
}

#[derive(Debug, Clone)]
pub struct UnionBoundReport {
    /// 1 - tr(P_m ... P_1 rho P_1 ... P_m)
    pub lhs: f64,
    /// sum_i tr((I - P_i) rho)
    pub rhs: f64,
    pub pass: bool,
}

/// Commutative quantum union bound over a family of pairwise commuting
/// projectors 0 <= P_i <= I.
pub fn union_bound_check(projectors: &[Array2<C64>], rho: &Array2<C64>) -> Result<UnionBoundReport> {
    let n = rho.nrows();
    for (i, p) in projectors.iter().enumerate() {
        let vals = linalg::eigvalsh(p)?;
        if vals[0] < -1e-9 || vals[vals.len() - 1] > 1.0 + 1e-9 {
            return Err(HamError::InvalidInstance(format!(
                "operator {i} is not within 0 <= P <= I"
            )));
        }
    }
    for i in 0..projectors.len() {
        for j in (i + 1)..projectors.len() {
            let comm = &projectors[i].dot(&projectors[j]) - &projectors[j].dot(&projectors[i]);
            let dev = comm.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            if dev > 1e-10 {
                return Err(HamError::NonCommuting(i, j, dev));
            }
        }
    }
    let mut left: Array2<C64> = Array2::eye(n);
    for p in projectors {
        left = p.dot(&left);
    }
    // P_m...P_1 rho P_1...P_m
    let sandwich = left.dot(rho).dot(&linalg::dagger(&left));
    let lhs = 1.0 - linalg::trace(&sandwich).re;
    let mut rhs = 0.0;
    let eye: Array2<C64> = Array2::eye(n);
    for p in projectors {
        rhs += linalg::trace(&(&eye - p).dot(rho)).re;
    }
    Ok(UnionBoundReport {
        lhs,
        rhs,
        pass: lhs <= rhs + 1e-9,
    })
}
