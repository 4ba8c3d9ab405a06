//! APX-SIM instances and exhaustive ground-truth classification by
//! diagonalization.
//!
//! An instance is the tuple (H, A, k, l, a, b, delta): decide whether some
//! ground state of H has <A> <= a (YES) or every state within delta of the
//! ground energy has <A> >= b (NO). The forall-variant strengthens YES to all
//! low-energy states. The scan below diagonalizes H, extremizes A over the
//! relevant eigenspaces, and reports the verdict; instances violating both
//! promises classify as INVALID rather than erroring.

use crate::error::Result;
use crate::linalg;
use crate::operator::Hamiltonian;
use ndarray::Array2;
use num_complex::Complex64 as C64;

pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ApxSimInstance {
    pub hamiltonian: Hamiltonian,
    pub observable: Hamiltonian,
    pub h_locality: usize,
    pub obs_locality: usize,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Invalid,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Yes => write!(f, "YES"),
            Verdict::No => write!(f, "NO"),
            Verdict::Invalid => write!(f, "INVALID"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub lambda: f64,
    /// extremal <A> over the ground eigenspace
    pub ground_min_a: f64,
    pub ground_max_a: f64,
    /// extremal <A> over span{eigenvectors with energy <= lambda + delta}
    pub low_min_a: f64,
    pub low_max_a: f64,
    pub low_rank: usize,
    pub verdict: Verdict,
    pub forall_verdict: Verdict,
}

/// Extremal expectation values of `a_mat` over the span of the given columns.
fn extremize_over(a_mat: &Array2<C64>, basis: &Array2<C64>) -> Result<(f64, f64)> {
    let restricted = linalg::dagger(basis).dot(a_mat).dot(basis);
    let vals = linalg::eigvalsh(&restricted)?;
    Ok((vals[0], vals[vals.len() - 1]))
}

/// Exhaustive scan of an instance by dense diagonalization. Both the APX-SIM
/// and the forall-APX-SIM verdicts are computed.
pub fn exhaustive_scan(inst: &ApxSimInstance) -> Result<ScanReport> {
    let h = inst.hamiltonian.to_dense()?;
    let a_mat = inst.observable.to_dense()?;
    let (vals, vecs) = linalg::eigh(&h)?;
    let lambda = vals[0];

    let ground_rank = vals
        .iter()
        .take_while(|&&v| v - lambda <= DEGENERACY_TOL)
        .count();
    let low_rank = vals
        .iter()
        .take_while(|&&v| v <= lambda + inst.delta + DEGENERACY_TOL)
        .count();

    let ground_basis = vecs.slice(ndarray::s![.., 0..ground_rank]).to_owned();
    let low_basis = vecs.slice(ndarray::s![.., 0..low_rank]).to_owned();

    let (ground_min_a, ground_max_a) = extremize_over(&a_mat, &ground_basis)?;
    let (low_min_a, low_max_a) = extremize_over(&a_mat, &low_basis)?;

    let verdict = if ground_min_a <= inst.a {
        Verdict::Yes
    } else if low_min_a >= inst.b {
        Verdict::No
    } else {
        Verdict::Invalid
    };
    let forall_verdict = if low_max_a <= inst.a {
        Verdict::Yes
    } else if low_min_a >= inst.b {
        Verdict::No
    } else {
        Verdict::Invalid
    };

    Ok(ScanReport {
        lambda,
        ground_min_a,
        ground_max_a,
        low_min_a,
        low_max_a,
        low_rank,
        verdict,
        forall_verdict,
    })
}

/// Certified minimum of <A> over every state with <H> <= lambda(H) + delta,
/// not just eigenvectors: the concave Lagrangian dual
/// g(t) = lambda_min(A + t H) - t (lambda + delta) is maximized over t >= 0.
/// Strong duality holds for a pair of quadratic forms on the complex sphere,
/// so the maximum equals the true minimum up to search precision.
pub fn certified_low_energy_min(inst: &ApxSimInstance) -> Result<f64> {
    let h = inst.hamiltonian.to_dense()?;
    let a = inst.observable.to_dense()?;
    let lambda = linalg::eigvalsh(&h)?[0];
    let cap = lambda + inst.delta;
    let g = |t: f64| -> Result<f64> {
        let m = &a + &h.mapv(|z| z * C64::new(t, 0.0));
        Ok(linalg::eigvalsh(&m)?[0] - t * cap)
    };
    // bracket the maximum of the concave g
    let mut hi = 1.0;
    while g(2.0 * hi)? > g(hi)? && hi < 1e12 {
        hi *= 2.0;
    }
    let (mut lo, mut hi) = (0.0, 2.0 * hi);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if g(m1)? < g(m2)? {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    g(0.5 * (lo + hi))
}

/// Serialize an instance: the Hamiltonian, an OBS marker, the observable's
/// terms on the same layout, and the THRESH record.
pub fn write_instance(inst: &ApxSimInstance) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    crate::textio::write_hamiltonian_into(&inst.hamiltonian, &mut out);
    let _ = writeln!(out, "OBS");
    for t in &inst.observable.terms {
        crate::textio::write_term_into(t, &mut out);
    }
    let _ = writeln!(out, "THRESH {} {} {}", inst.a, inst.b, inst.delta);
    out
}

pub fn read_instance(text: &str) -> Result<ApxSimInstance> {
    use crate::error::HamError;
    let mut p = crate::textio::LineParser::new(text);
    let h = crate::textio::parse_hamiltonian(&mut p)?;
    match p.next_line() {
        Some((_, line)) if line.trim() == "OBS" => {}
        _ => return Err(p.err("expected OBS record")),
    }
    let obs_terms = crate::textio::parse_terms_for_layout(&mut p, &h.layout)?;
    let vals = crate::textio::parse_keyword_floats(&mut p, "THRESH", 3)?;
    let observable = Hamiltonian::new(h.layout.clone(), obs_terms)?;
    if let Some(line) = p.peek() {
        return Err(HamError::Parse {
            line: 0,
            msg: format!("unexpected trailing record {line:?}"),
        });
    }
    Ok(ApxSimInstance {
        hamiltonian: h,
        observable,
        h_locality: 0,
        obs_locality: 0,
        a: vals[0],
        b: vals[1],
        delta: vals[2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::RegisterLayout;
    use crate::linalg::{pauli_z, qubit_proj};
    use crate::operator::LocalTerm;

    fn one_qubit(block: Array2<C64>, weight: f64) -> Hamiltonian {
        Hamiltonian::new(
            RegisterLayout::qubits(1),
            vec![LocalTerm::new(vec![0], block, weight).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn yes_instance_ground_z() {
        // H = |1><1|: ground |0> with <Z> = 1; A = -Z makes it a YES at a = -0.9
        let inst = ApxSimInstance {
            hamiltonian: one_qubit(qubit_proj(1), 1.0),
            observable: one_qubit(pauli_z(), -1.0),
            h_locality: 1,
            obs_locality: 1,
            a: -0.9,
            b: 0.9,
            delta: 0.1,
        };
        let r = exhaustive_scan(&inst).unwrap();
        assert_eq!(r.verdict, Verdict::Yes);
        assert!((r.ground_min_a + 1.0).abs() < 1e-10);
    }

    #[test]
    fn no_instance() {
        // H = |1><1|, A = Z: every low-energy state has <Z> near 1 >= b
        let inst = ApxSimInstance {
            hamiltonian: one_qubit(qubit_proj(1), 1.0),
            observable: one_qubit(pauli_z(), 1.0),
            h_locality: 1,
            obs_locality: 1,
            a: -0.9,
            b: 0.9,
            delta: 0.1,
        };
        let r = exhaustive_scan(&inst).unwrap();
        assert_eq!(r.verdict, Verdict::No);
    }

    #[test]
    fn invalid_instance_reported_not_errored() {
        // A = X has ground expectation 0 on |0>, between a and b
        let inst = ApxSimInstance {
            hamiltonian: one_qubit(qubit_proj(1), 1.0),
            observable: one_qubit(crate::linalg::pauli_x(), 1.0),
            h_locality: 1,
            obs_locality: 1,
            a: -0.9,
            b: 0.9,
            delta: 0.1,
        };
        let r = exhaustive_scan(&inst).unwrap();
        assert_eq!(r.verdict, Verdict::Invalid);
    }
}
