//! Analog-simulation machinery: encodings E(M) = V (M (x) P + conj(M) (x) Q) V^dag,
//! numerical verification of (Delta, eta, eps)-simulations, observable
//! translation, and the instance reduction that preserves forall-APX-SIM
//! verdicts.

use crate::apxsim::{exhaustive_scan, ApxSimInstance, ScanReport};
use crate::error::{HamError, Result};
use crate::layout::{RegisterLayout, SiteId};
use crate::linalg::{self, C_ONE};
use crate::operator::{Hamiltonian, LocalTerm};
use crate::spectral;
use crate::textio;
use ndarray::Array2;
use num_complex::Complex64 as C64;

/// An encoding with per-site isometries and orthogonal ancilla projectors.
/// The special case has a trivial ancilla (P = 1, Q = 0); the general case
/// keeps an explicit ancilla space E with PQ = 0.
#[derive(Debug, Clone)]
pub struct Encoding {
    /// isometry per source site, mapping its qudit into one or more target qudits
    pub site_isometries: Vec<Array2<C64>>,
    /// source layout the encoding applies to
    pub source: RegisterLayout,
    /// target layout
    pub target: RegisterLayout,
    /// dimension of the ancilla space E (1 = trivial)
    pub ancilla_dim: usize,
    /// projector P on E
    pub p: Array2<C64>,
    /// projector Q on E, with PQ = 0
    pub q: Array2<C64>,
}

impl Encoding {
    /// The identity encoding on a layout.
    pub fn trivial(layout: &RegisterLayout) -> Self {
        let site_isometries = layout
            .sites()
            .iter()
            .map(|&(_, d)| Array2::eye(d))
            .collect();
        Self {
            site_isometries,
            source: layout.clone(),
            target: layout.clone(),
            ancilla_dim: 1,
            p: Array2::eye(1),
            q: Array2::zeros((1, 1)),
        }
    }

    /// Per-site isometries with a trivial ancilla: E(M) = V M V^dag.
    pub fn from_site_isometries(
        source: &RegisterLayout,
        target: RegisterLayout,
        site_isometries: Vec<Array2<C64>>,
    ) -> Result<Self> {
        if site_isometries.len() != source.num_sites() {
            return Err(HamError::DimensionMismatch {
                expected: source.num_sites(),
                got: site_isometries.len(),
            });
        }
        let enc = Self {
            site_isometries,
            source: source.clone(),
            target,
            ancilla_dim: 1,
            p: Array2::eye(1),
            q: Array2::zeros((1, 1)),
        };
        enc.check()?;
        Ok(enc)
    }

    /// Complex-conjugation fixture for the general path: V = I on H (x) E with
    /// a one-qubit ancilla, P = |0><0|, Q = |1><1| (so P + Q = I, PQ = 0).
    pub fn conjugation_fixture(layout: &RegisterLayout) -> Result<Self> {
        let mut target_sites: Vec<(SiteId, usize)> = layout.sites().to_vec();
        let next = target_sites.iter().map(|&(i, _)| i).max().unwrap_or(0) + 1;
        target_sites.push((next, 2));
        let target = RegisterLayout::new(target_sites)?;
        let enc = Self {
            site_isometries: layout.sites().iter().map(|&(_, d)| Array2::eye(d)).collect(),
            source: layout.clone(),
            target,
            ancilla_dim: 2,
            p: linalg::qubit_proj(0),
            q: linalg::qubit_proj(1),
        };
        enc.check()?;
        Ok(enc)
    }

    /// Validate the isometry and projector invariants.
    pub fn check(&self) -> Result<()> {
        for (i, v) in self.site_isometries.iter().enumerate() {
            let g = linalg::dagger(v).dot(v);
            let eye: Array2<C64> = Array2::eye(g.nrows());
            let dev = (&g - &eye).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            if dev > 1e-10 {
                return Err(HamError::InvalidInstance(format!(
                    "site isometry {i} fails V^dag V = I by {dev:.3e}"
                )));
            }
        }
        let pq = self.p.dot(&self.q);
        let qp = self.q.dot(&self.p);
        let dev = pq
            .iter()
            .chain(qp.iter())
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        if dev > 1e-10 {
            return Err(HamError::InvalidInstance(format!(
                "ancilla projectors fail PQ = QP = 0 by {dev:.3e}"
            )));
        }
        Ok(())
    }

    /// The full isometry V: H (x) E -> H' as a dense matrix (site order, then
    /// ancilla last).
    pub fn full_isometry(&self) -> Result<Array2<C64>> {
        let mut v: Array2<C64> = Array2::eye(1);
        for vi in &self.site_isometries {
            v = linalg::kron(&v, vi);
        }
        if self.ancilla_dim > 1 {
            v = linalg::kron(&v, &Array2::eye(self.ancilla_dim));
        }
        Ok(v)
    }

    pub fn source_dim(&self) -> usize {
        self.source.total_dim().expect("validated")
    }

    pub fn target_dim(&self) -> Result<usize> {
        let d: usize = self
            .site_isometries
            .iter()
            .map(|v| v.nrows())
            .product::<usize>()
            * self.ancilla_dim;
        Ok(d)
    }

    /// Rank of E(I): the dimension the low-energy space must match.
    pub fn encoded_rank(&self) -> usize {
        let p_rank = linalg::eigvalsh(&self.p)
            .map(|v| v.iter().filter(|x| **x > 0.5).count())
            .unwrap_or(0);
        let q_rank = linalg::eigvalsh(&self.q)
            .map(|v| v.iter().filter(|x| **x > 0.5).count())
            .unwrap_or(0);
        self.source_dim() * (p_rank + q_rank)
    }
}

/// E(M) = V (M (x) P + conj(M) (x) Q) V^dag as a dense matrix.
pub fn apply_encoding(enc: &Encoding, m: &Array2<C64>) -> Result<Array2<C64>> {
    if m.nrows() != enc.source_dim() {
        return Err(HamError::DimensionMismatch {
            expected: enc.source_dim(),
            got: m.nrows(),
        });
    }
    let v = enc.full_isometry()?;
    let inner = if enc.ancilla_dim == 1 {
        let scale_p = enc.p[[0, 0]];
        let scale_q = enc.q[[0, 0]];
        &m.mapv(|z| z * scale_p) + &m.mapv(|z| z.conj() * scale_q)
    } else {
        &linalg::kron(m, &enc.p) + &linalg::kron(&m.mapv(|z| z.conj()), &enc.q)
    };
    Ok(v.dot(&inner).dot(&linalg::dagger(&v)))
}

/// Convenience: E(H) for a Hamiltonian given by local terms.
pub fn apply_encoding_ham(enc: &Encoding, h: &Hamiltonian) -> Result<Array2<C64>> {
    apply_encoding(enc, &h.to_dense()?)
}

#[derive(Debug, Clone)]
pub struct SimulationWitness {
    pub source: Hamiltonian,
    pub target: Hamiltonian,
    pub encoding: Encoding,
    pub delta_cut: f64,
    pub eta: f64,
    pub eps: f64,
}

#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub rank_expected: usize,
    pub rank_found: usize,
    pub rank_ok: bool,
    pub eta_measured: f64,
    pub eps_measured: f64,
    pub eta_pass: bool,
    pub eps_pass: bool,
    /// |lambda(H') - lambda(H)|, which the simulation keeps within eps
    pub eigenvalue_shift: f64,
    pub eigenvalue_shift_ok: bool,
    pub norm_target: f64,
    pub pass: bool,
}

/// Verify both simulation conditions numerically. The candidate isometry
/// Vtilde aligning the encoded space with the low-energy space is built by the
/// polar decomposition of P_{<=Delta} V; its measured distance to V upper
/// bounds the optimal eta.
pub fn verify_simulation(w: &SimulationWitness) -> Result<SimulationReport> {
    let h_target = w.target.to_dense()?;
    let (vals, vecs) = linalg::eigh(&h_target)?;
    for &ev in vals.iter() {
        if (ev - w.delta_cut).abs() < spectral::CUT_TOL {
            return Err(HamError::AmbiguousCut {
                eig: ev,
                cut: w.delta_cut,
                tol: spectral::CUT_TOL,
            });
        }
    }
    let rank_found = vals.iter().take_while(|&&v| v < w.delta_cut).count();
    let rank_expected = w.encoding.encoded_rank();
    if rank_found != rank_expected {
        return Ok(SimulationReport {
            rank_expected,
            rank_found,
            rank_ok: false,
            eta_measured: f64::NAN,
            eps_measured: f64::NAN,
            eta_pass: false,
            eps_pass: false,
            eigenvalue_shift: f64::NAN,
            eigenvalue_shift_ok: false,
            norm_target: linalg::hermitian_norm(&h_target)?,
            pass: false,
        });
    }
    let low_basis = vecs.slice(ndarray::s![.., 0..rank_found]).to_owned();
    let p_low = linalg::projector_from_columns(&low_basis);

    let v = w.encoding.full_isometry()?;
    // restrict V to the image of I (x) (P + Q) when the ancilla is nontrivial;
    // for the fixtures used here P + Q = I on E, so V itself is the candidate.
    let b = p_low.dot(&v);
    let (vtilde, smin) = linalg::polar_isometry(&b)?;
    if smin < 1e-9 {
        return Err(HamError::InvalidInstance(format!(
            "low-energy space nearly orthogonal to the encoded space (sigma_min = {smin:.3e})"
        )));
    }
    let diff = &vtilde - &v;
    let eta_measured = linalg::operator_norm(&diff)?;

    // condition 2: ||H'_{<=Delta} - Etilde(H)|| with Etilde built from Vtilde
    let h_low = p_low.dot(&h_target).dot(&p_low);
    let h_source = w.source.to_dense()?;
    let inner = if w.encoding.ancilla_dim == 1 {
        h_source.clone()
    } else {
        &linalg::kron(&h_source, &w.encoding.p)
            + &linalg::kron(&h_source.mapv(|z| z.conj()), &w.encoding.q)
    };
    let encoded = vtilde.dot(&inner).dot(&linalg::dagger(&vtilde));
    let diff2 = &h_low - &encoded;
    let eps_measured = linalg::operator_norm(&diff2)?;

    let lam_target = vals[0];
    let lam_source = linalg::eigvalsh(&h_source)?[0];
    let eigenvalue_shift = (lam_target - lam_source).abs();

    let eta_pass = eta_measured <= w.eta + 1e-12;
    let eps_pass = eps_measured <= w.eps + 1e-12;
    let eigenvalue_shift_ok = eigenvalue_shift <= eps_measured + 1e-9;
    Ok(SimulationReport {
        rank_expected,
        rank_found,
        rank_ok: true,
        eta_measured,
        eps_measured,
        eta_pass,
        eps_pass,
        eigenvalue_shift,
        eigenvalue_shift_ok,
        norm_target: linalg::hermitian_norm(&h_target)?,
        pass: eta_pass && eps_pass && eigenvalue_shift_ok,
    })
}

/// Repetition-code test fixture: every qubit is encoded |b> -> |bb>, each
/// source term is conjugated into the code space by the per-site isometries,
/// a penalty of the given strength on |01><01| + |10><10| per pair carves out
/// the code space, and each source term contributes a weak leakage field
/// (X on the second qubit of its first pair, which annihilates the code
/// space) so that the measured epsilon residual is a genuine second-order
/// perturbative quantity shrinking as 1/strength. The witness carries
/// Delta = strength / 2 and the measured (eta, eps).
pub const CODE_LEAKAGE: f64 = 1.0;

pub fn build_code_simulation(h: &Hamiltonian, strength: f64) -> Result<SimulationWitness> {
    for &(_, d) in h.layout.sites() {
        if d != 2 {
            return Err(HamError::InvalidInstance(
                "repetition-code fixture expects qubits".into(),
            ));
        }
    }
    let n = h.layout.num_sites();
    let target = RegisterLayout::qubits(2 * n);
    // |b> -> |bb>
    let mut v_site: Array2<C64> = Array2::zeros((4, 2));
    v_site[[0, 0]] = C_ONE;
    v_site[[3, 1]] = C_ONE;
    let encoding = Encoding::from_site_isometries(
        &h.layout,
        target.clone(),
        (0..n).map(|_| v_site.clone()).collect(),
    )?;

    let mut terms: Vec<LocalTerm> = Vec::new();
    for t in &h.terms {
        // V_S-conjugated block on both qubits of every encoded pair
        let mut v_s: Array2<C64> = Array2::eye(1);
        let mut support: Vec<SiteId> = Vec::new();
        for &s in &t.support {
            let pos = h.layout.position(s)?;
            v_s = linalg::kron(&v_s, &v_site);
            support.push(2 * pos as SiteId);
            support.push(2 * pos as SiteId + 1);
        }
        let block = v_s.dot(&t.block).dot(&linalg::dagger(&v_s));
        terms.push(LocalTerm::new(support, block, t.weight)?);
        // leakage field off the code space, tied to the term's first site
        let first = h.layout.position(t.support[0])?;
        terms.push(LocalTerm::new(
            vec![2 * first as SiteId + 1],
            linalg::pauli_x(),
            CODE_LEAKAGE,
        )?);
    }
    // code-space penalties per pair
    for i in 0..n {
        terms.push(LocalTerm::new(
            vec![2 * i as SiteId, 2 * i as SiteId + 1],
            crate::cooklevin::disagreement_block(),
            strength,
        )?);
    }
    let target_h = Hamiltonian::new(target, terms)?;

    let mut w = SimulationWitness {
        source: h.clone(),
        target: target_h,
        encoding,
        delta_cut: strength / 2.0,
        eta: f64::NAN,
        eps: f64::NAN,
    };
    let report = verify_simulation(&w)?;
    if !report.rank_ok {
        return Err(HamError::InvalidInstance(format!(
            "code simulation rank mismatch: expected {}, found {}",
            report.rank_expected, report.rank_found
        )));
    }
    w.eta = report.eta_measured;
    w.eps = report.eps_measured;
    Ok(w)
}

/// Translate an observable supported on sites S through an encoding:
/// A' = V_S A V_S^dag on the target qudits of those sites (special case), or
/// the P/Q-dressed version in the general case. The defining identity
/// V^dag (A' (x) I) V = A (x) I is asserted numerically.
pub fn translate_observable(
    a: &Hamiltonian,
    enc: &Encoding,
    support: &[SiteId],
) -> Result<Hamiltonian> {
    // A must be supported on S
    for t in &a.terms {
        for s in &t.support {
            if !support.contains(s) {
                return Err(HamError::InvalidInstance(format!(
                    "observable support escapes S: site {s}"
                )));
            }
        }
    }
    // positions and target-site ranges per source site
    let mut target_sites_of: Vec<Vec<SiteId>> = Vec::new();
    let mut cursor = 0usize;
    for (pos, &(_, d)) in enc.source.sites().iter().enumerate() {
        let rows = enc.site_isometries[pos].nrows();
        let mut count = 0usize;
        let mut dim = 1usize;
        let mut idx = cursor;
        while dim < rows {
            dim *= enc.target.sites()[idx].1;
            idx += 1;
            count += 1;
        }
        if dim != rows {
            return Err(HamError::InvalidInstance(
                "target layout does not factor the site isometries".into(),
            ));
        }
        let _ = d;
        target_sites_of.push(
            enc.target.sites()[cursor..cursor + count]
                .iter()
                .map(|&(id, _)| id)
                .collect(),
        );
        cursor += count;
    }

    let mut terms = Vec::new();
    for t in &a.terms {
        // V_S for the term's own support
        let mut v_s: Array2<C64> = Array2::eye(1);
        let mut tgt_support: Vec<SiteId> = Vec::new();
        for &s in &t.support {
            let pos = enc.source.position(s)?;
            v_s = linalg::kron(&v_s, &enc.site_isometries[pos]);
            tgt_support.extend(target_sites_of[pos].iter().cloned());
        }
        let block = if enc.ancilla_dim == 1 {
            v_s.dot(&t.block).dot(&linalg::dagger(&v_s))
        } else {
            // general case on one site: V_i (B (x) P_E + conj(B) (x) Q_E) V_i^dag
            // with the ancilla qudit adjacent to the translated support
            let dressed = &linalg::kron(&t.block, &enc.p)
                + &linalg::kron(&t.block.mapv(|z| z.conj()), &enc.q);
            let vfull = linalg::kron(&v_s, &Array2::eye(enc.ancilla_dim));
            // the ancilla site is the last target site
            let anc = enc.target.sites().last().unwrap().0;
            tgt_support.push(anc);
            vfull.dot(&dressed).dot(&linalg::dagger(&vfull))
        };
        terms.push(LocalTerm::new(tgt_support, block, t.weight)?);
    }
    let a_prime = Hamiltonian::new(enc.target.clone(), terms)?;

    // assert V^dag (A' (x) I) V = A (x) I on the encoded space
    let v = enc.full_isometry()?;
    let a_dense = a.to_dense()?;
    let ap_dense = a_prime.to_dense()?;
    let pulled = linalg::dagger(&v).dot(&ap_dense).dot(&v);
    let reference = if enc.ancilla_dim == 1 {
        a_dense
    } else {
        &linalg::kron(&a_dense, &enc.p) + &linalg::kron(&a_dense.mapv(|z| z.conj()), &enc.q)
    };
    let dev = (&pulled - &reference)
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    if dev > 1e-10 {
        return Err(HamError::InvalidInstance(format!(
            "translated observable fails V^dag A' V = A by {dev:.3e}"
        )));
    }
    Ok(a_prime)
}

/// A builder able to produce candidate simulations of increasing strength.
pub trait SimulationBuilder {
    /// Build a witness whose low-energy cut sits at `delta_cut`.
    fn build(&self, h: &Hamiltonian, delta_cut: f64) -> Result<SimulationWitness>;
}

/// The repetition-code fixture as a builder: strength = 2 * Delta.
pub struct CodeSimulationBuilder;

impl SimulationBuilder for CodeSimulationBuilder {
    fn build(&self, h: &Hamiltonian, delta_cut: f64) -> Result<SimulationWitness> {
        build_code_simulation(h, 2.0 * delta_cut)
    }
}

#[derive(Debug, Clone)]
pub struct ReductionOutcome {
    pub reduced: ApxSimInstance,
    pub witness_delta: f64,
    pub eta_measured: f64,
    pub eps_measured: f64,
    /// delta' + 2 eps < delta, with realized values
    pub params_ok: bool,
    /// ||A|| (2 sqrt(delta'/(Delta - lambda(H'))) + 2 eta) < (b - a)/3
    pub observable_ok: bool,
    pub doublings: usize,
}

pub const MAX_DOUBLINGS: usize = 30;

/// Reduce a forall-APX-SIM instance through a simulation builder: thresholds
/// move to a' = a + (b-a)/3, b' = b - (b-a)/3, the low-energy window shrinks
/// to delta' = delta/4, and Delta grows geometrically until both realized
/// parameter inequalities hold.
pub fn reduce_apxsim2_instance(
    inst: &ApxSimInstance,
    builder: &dyn SimulationBuilder,
    delta0: f64,
) -> Result<ReductionOutcome> {
    let delta_p = inst.delta / 4.0;
    let eps_target = inst.delta / 4.0;
    let a_norm = linalg::hermitian_norm(&inst.observable.to_dense()?)?;
    let obs_support: Vec<SiteId> = {
        let mut v: Vec<SiteId> = inst
            .observable
            .terms
            .iter()
            .flat_map(|t| t.support.iter().cloned())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };

    let mut delta_cut = delta0;
    for doublings in 0..=MAX_DOUBLINGS {
        let w = builder.build(&inst.hamiltonian, delta_cut)?;
        let report = verify_simulation(&w)?;
        if report.rank_ok {
            let eta = report.eta_measured;
            let eps = report.eps_measured;
            let lam_target = spectral::min_eigenvalue(&w.target, 1e-10)?.lambda_min;
            let lhs = a_norm * (2.0 * (delta_p / (delta_cut - lam_target)).sqrt() + 2.0 * eta);
            let params_ok = delta_p + 2.0 * eps < inst.delta && eps <= eps_target + 1e-12;
            let observable_ok = lhs < (inst.b - inst.a) / 3.0;
            if params_ok && observable_ok {
                let a_prime = translate_observable(&inst.observable, &w.encoding, &obs_support)?;
                let reduced = ApxSimInstance {
                    hamiltonian: w.target.clone(),
                    observable: a_prime,
                    h_locality: inst.h_locality.max(2),
                    obs_locality: inst.obs_locality * 2,
                    a: inst.a + (inst.b - inst.a) / 3.0,
                    b: inst.b - (inst.b - inst.a) / 3.0,
                    delta: delta_p,
                };
                return Ok(ReductionOutcome {
                    reduced,
                    witness_delta: delta_cut,
                    eta_measured: eta,
                    eps_measured: eps,
                    params_ok,
                    observable_ok,
                    doublings,
                });
            }
        }
        delta_cut *= 2.0;
    }
    Err(HamError::InfeasibleReduction(format!(
        "no feasible simulation within {MAX_DOUBLINGS} doublings from Delta0 = {delta0}"
    )))
}

/// Classify an instance and its reduction, for verdict-preservation checks.
pub fn scan_pair(inst: &ApxSimInstance, reduced: &ApxSimInstance) -> Result<(ScanReport, ScanReport)> {
    Ok((exhaustive_scan(inst)?, exhaustive_scan(reduced)?))
}

/// Serialize a witness: source, ISO blocks, target, and the parameter line.
pub fn write_witness(w: &SimulationWitness) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    textio::write_hamiltonian_into(&w.source, &mut out);
    for (pos, iso) in w.encoding.site_isometries.iter().enumerate() {
        let site = w.encoding.source.sites()[pos].0;
        textio::write_iso_into(site, iso, &mut out);
    }
    let _ = writeln!(out, "SIMPARAMS {} {} {}", w.delta_cut, w.eta, w.eps);
    textio::write_hamiltonian_into(&w.target, &mut out);
    out
}
