//! Acceptance suite: one test per quantitative criterion, each printing a
//! pass/fail line with its measured quantities. Tolerances are pinned in the
//! assertions.

use hamforge::apxsim::{self, exhaustive_scan, ApxSimInstance, Verdict};
use hamforge::circuit::{Gate, ReversibleCircuit};
use hamforge::cooklevin::{
    build_hardness_instance, build_prop_hamiltonian, build_spatially_sparse_instance,
    check_spatial_sparsity, history_index, history_string, GridLayout, LatticeQuery,
};
use hamforge::layout::RegisterLayout;
use hamforge::linalg::{self, c};
use hamforge::onedim;
use hamforge::operator::{Hamiltonian, LocalTerm, StateVector};
use hamforge::query::{
    build_query_hamiltonian, classify_query, decide_apxsim_adaptive, run_parallel_oracle_machine,
    verify_query_gap, AdversaryPolicy, ParallelOracleComputation, QueryInstance, QueryStatus,
    StandInOracle,
};
use hamforge::simulate::{
    build_code_simulation, reduce_apxsim2_instance, verify_simulation, CodeSimulationBuilder,
};
use hamforge::spectral;
use hamforge::textio;
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn random_two_qubit_query(rng: &mut ChaCha8Rng, min_gap: f64) -> QueryInstance {
    let layout = RegisterLayout::qubits(2);
    let t = LocalTerm::new(vec![0, 1], linalg::random_hermitian(4, rng), 1.0).unwrap();
    let h = Hamiltonian::new(layout, vec![t]).unwrap();
    let lam = spectral::min_eigenvalue(&h, 1e-12).unwrap().lambda_min;
    let gap = rng.gen_range(min_gap..1.0);
    let a = if rng.gen_bool(0.5) {
        lam + rng.gen_range(0.01..0.5)
    } else {
        lam - gap - rng.gen_range(0.01..0.5)
    };
    QueryInstance::new(h, a, a + gap).unwrap()
}

/// Criterion 1: every incorrect query string pays at least
/// epsilon = min_i (b_i - a_i)/2 over the global minimum, which itself lies
/// on a correct string; 100 seeded random batches with m <= 3.
#[test]
fn criterion_01_query_gap() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let m = rng.gen_range(1..=3);
        let queries: Vec<QueryInstance> = (0..m)
            .map(|_| random_two_qubit_query(&mut rng, 0.05))
            .collect();
        let r = verify_query_gap(&queries).unwrap();
        assert!(r.global_min_on_correct, "global minimum on incorrect string");
        if r.min_incorrect_margin.is_finite() {
            assert!(
                r.min_incorrect_margin >= r.epsilon - 1e-9,
                "margin {} below epsilon {}",
                r.min_incorrect_margin,
                r.epsilon
            );
            worst = worst.min(r.min_incorrect_margin - r.epsilon);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "1 query-gap",
        elapsed <= 30.0,
        &format!("100 batches, worst margin slack {worst:.3e}, {elapsed:.1}s"),
    );
}

/// Independent combinatorial oracle for the Cook-Levin diagonal: the energy of
/// a basis state is the number of violated propagation, no-change and pin
/// constraints, counted directly from the bit grid.
fn combinatorial_energy(circuit: &ReversibleCircuit, grid_bits: &[Vec<bool>]) -> usize {
    let mut violations = 0;
    for (t, gate) in circuit.gates.iter().enumerate() {
        let mut bits = grid_bits[t].clone();
        gate.apply(&mut bits);
        for i in 0..circuit.width {
            if gate.support.contains(&i) {
                // the gate constraint is violated when the acted-on bits do not
                // match the gate output; count once per gate, not per bit
                continue;
            }
            if grid_bits[t][i] != grid_bits[t + 1][i] {
                violations += 1;
            }
        }
        let acted_match = gate
            .support
            .iter()
            .all(|&i| bits[i] == grid_bits[t + 1][i]);
        if !acted_match {
            violations += 1;
        }
    }
    for i in 0..circuit.width {
        if grid_bits[0][i] {
            violations += 1;
        }
    }
    violations
}

fn gate_pool(n: usize) -> Vec<Gate> {
    let mut pool = Vec::new();
    for i in 0..n {
        pool.push(Gate::not(i));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pool.push(Gate::cnot(i, j));
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            pool.push(Gate::swap(i, j));
        }
    }
    if n >= 3 {
        pool.push(Gate::toffoli(0, 1, 2));
        pool.push(Gate::toffoli(0, 2, 1));
        pool.push(Gate::toffoli(1, 2, 0));
    }
    pool
}

/// Criterion 2: for every circuit with n <= 3 wires and up to 3 gates from
/// the standard reversible pool, H_prop plus all-zero input pins has a unique
/// ground state |w(0^n)> at energy exactly 0, second eigenvalue >= 1, and an
/// integer spectrum.
#[test]
fn criterion_02_cook_levin_structure() {
    let start = Instant::now();
    let mut checked = 0usize;
    for n in 1..=3usize {
        let pool = gate_pool(n);
        // all gate sequences of length 1..=3 (the empty circuit is covered by
        // the single-identity case below)
        let mut sequences: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..3 {
            let mut next = Vec::new();
            for s in &sequences {
                if s.len() < 3 {
                    for g in 0..pool.len() {
                        let mut s2 = s.clone();
                        s2.push(g);
                        next.push(s2);
                    }
                }
            }
            sequences.extend(next.clone());
            sequences.retain(|s| s.len() <= 3);
            sequences.dedup();
        }
        let mut sequences: Vec<Vec<usize>> = sequences.into_iter().filter(|s| !s.is_empty()).collect();
        sequences.sort();
        sequences.dedup();
        for seq in sequences {
            let gates: Vec<Gate> = seq.iter().map(|&g| pool[g].clone()).collect();
            let circuit = ReversibleCircuit::new(n, gates, 0).unwrap();
            let rows = circuit.gates.len() + 1;
            let dim_bits = rows * n;
            // scan every basis state with the combinatorial oracle
            let mut zero_count = 0usize;
            let mut second = usize::MAX;
            for idx in 0..(1usize << dim_bits) {
                let grid_bits: Vec<Vec<bool>> = (0..rows)
                    .map(|t| {
                        (0..n)
                            .map(|i| (idx >> (dim_bits - 1 - (t * n + i))) & 1 == 1)
                            .collect()
                    })
                    .collect();
                let e = combinatorial_energy(&circuit, &grid_bits);
                if e == 0 {
                    zero_count += 1;
                } else {
                    second = second.min(e);
                }
            }
            assert_eq!(zero_count, 1, "ground degeneracy for {seq:?} on {n} wires");
            assert!(second >= 1);
            checked += 1;
            // cross-check the operator route on a subsample
            if checked % 97 == 0 {
                let grid = GridLayout::new(rows, n, 0);
                let prop = build_prop_hamiltonian(&circuit, &grid).unwrap();
                let mut terms = prop.terms.clone();
                for i in 0..n {
                    terms.push(
                        LocalTerm::new(vec![grid.site(0, i)], linalg::qubit_proj(1), 1.0).unwrap(),
                    );
                }
                let h = Hamiltonian::new(prop.layout.clone(), terms).unwrap();
                let vals = linalg::eigvalsh(&h.to_dense_capped(4096).unwrap()).unwrap();
                assert!(vals[0].abs() < 1e-12);
                assert!(vals[1] >= 1.0 - 1e-9);
                for v in vals.iter() {
                    assert!((v - v.round()).abs() < 1e-9, "non-integer eigenvalue {v}");
                }
                let rows_bits = history_string(&circuit, &vec![false; n]).unwrap();
                let widx = history_index(&grid, &rows_bits);
                let v = StateVector::basis_state(h.dim(), widx);
                let hv = h.matvec(&v.amplitudes).unwrap();
                assert!(hv.iter().all(|z| z.norm() < 1e-12));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "2 cook-levin structure",
        elapsed <= 10.0,
        &format!("{checked} circuits, {elapsed:.1}s"),
    );
}

fn one_qubit_query(kind: QueryStatus, rng: &mut ChaCha8Rng) -> QueryInstance {
    let one = RegisterLayout::qubits(1);
    let jitter = rng.gen_range(0.0..0.1);
    match kind {
        QueryStatus::Yes => QueryInstance::new(
            Hamiltonian::new(
                one,
                vec![LocalTerm::new(vec![0], linalg::qubit_proj(1), 1.0 + jitter).unwrap()],
            )
            .unwrap(),
            0.25,
            0.75,
        )
        .unwrap(),
        _ => QueryInstance::new(
            Hamiltonian::new(
                one,
                vec![LocalTerm::new(vec![0], Array2::eye(2), 1.0 + jitter).unwrap()],
            )
            .unwrap(),
            0.25,
            0.75,
        )
        .unwrap(),
    }
}

fn toy_computations(rng: &mut ChaCha8Rng) -> Vec<ParallelOracleComputation> {
    let mut out = Vec::new();
    // m = 1: copy and negation machines over YES and NO queries
    for kind in [QueryStatus::Yes, QueryStatus::No] {
        let q = one_qubit_query(kind, rng);
        let copy = ReversibleCircuit::new(1, vec![Gate::identity(vec![0])], 0).unwrap();
        out.push(ParallelOracleComputation::new(copy, vec![q.clone()]).unwrap());
        let negate = ReversibleCircuit::new(1, vec![Gate::not(0)], 0).unwrap();
        out.push(ParallelOracleComputation::new(negate, vec![q]).unwrap());
    }
    // m = 2: XOR (in place) and AND (toffoli onto an ancilla)
    for kinds in [
        [QueryStatus::Yes, QueryStatus::Yes],
        [QueryStatus::Yes, QueryStatus::No],
        [QueryStatus::No, QueryStatus::No],
    ] {
        let qs: Vec<QueryInstance> = kinds.iter().map(|&k| one_qubit_query(k, rng)).collect();
        let xor = ReversibleCircuit::new(2, vec![Gate::cnot(0, 1)], 1).unwrap();
        out.push(ParallelOracleComputation::new(xor, qs.clone()).unwrap());
        let and = ReversibleCircuit::new(3, vec![Gate::toffoli(0, 1, 2)], 2).unwrap();
        out.push(ParallelOracleComputation::new(and, qs).unwrap());
    }
    out
}

/// Criterion 3: on >= 10 toy parallel-oracle computations (m <= 2), every
/// eigenvector with energy <= lambda + delta (delta = epsilon/16) has
/// <Z_out> <= -1/2 for accepting machines and >= +1/2 for rejecting ones,
/// matching ground truth.
#[test]
fn criterion_03_hardness_separation() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let comps = toy_computations(&mut rng);
    assert!(comps.len() >= 10);
    let mut count = 0;
    for comp in &comps {
        let truth = run_parallel_oracle_machine(comp).unwrap();
        let built = build_hardness_instance(comp).unwrap();
        assert!((built.instance.delta - built.epsilon / 16.0).abs() < 1e-15);
        let scan = exhaustive_scan(&built.instance).unwrap();
        if truth.accept {
            assert!(
                scan.low_max_a <= -0.5 + 1e-6,
                "accepting machine: low-energy <Z_out> max = {}",
                scan.low_max_a
            );
            assert_eq!(scan.forall_verdict, Verdict::Yes);
        } else {
            assert!(
                scan.low_min_a >= 0.5 - 1e-6,
                "rejecting machine: low-energy <Z_out> min = {}",
                scan.low_min_a
            );
            assert_eq!(scan.forall_verdict, Verdict::No);
        }
        count += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "3 hardness separation",
        elapsed <= 60.0,
        &format!("{count} computations, {elapsed:.1}s"),
    );
}

/// Criterion 4: the adaptive binary-search decision agrees with scan ground
/// truth on every valid instance; the transcript stays within
/// ceil(log2(2 normbound / eps)) + 2 queries; b' - a' = delta (b - a)/2 to
/// 1e-12.
#[test]
fn criterion_04_adaptive_containment() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut suite: Vec<ApxSimInstance> = Vec::new();
    // hardness instances (H and Z_out commute, so the scan is exact)
    for comp in toy_computations(&mut rng).into_iter().take(6) {
        suite.push(build_hardness_instance(&comp).unwrap().instance);
    }
    // random 2-qubit instances, certified against the dual bound
    while suite.len() < 14 {
        let layout = RegisterLayout::qubits(2);
        let h = Hamiltonian::new(
            layout.clone(),
            vec![LocalTerm::new(vec![0, 1], linalg::random_hermitian(4, &mut rng), 1.0).unwrap()],
        )
        .unwrap();
        let a_obs = Hamiltonian::new(
            layout,
            vec![LocalTerm::new(vec![0], linalg::pauli_z(), 1.0).unwrap()],
        )
        .unwrap();
        let inst = ApxSimInstance {
            hamiltonian: h,
            observable: a_obs,
            h_locality: 2,
            obs_locality: 1,
            a: -0.5,
            b: 0.5,
            delta: 0.05,
        };
        let scan = exhaustive_scan(&inst).unwrap();
        match scan.verdict {
            Verdict::Yes => suite.push(inst),
            Verdict::No => {
                if apxsim::certified_low_energy_min(&inst).unwrap() >= inst.b {
                    suite.push(inst);
                }
            }
            Verdict::Invalid => {}
        }
    }
    let mut checked = 0;
    let mut worst_defect = 0.0f64;
    for (k, inst) in suite.iter().enumerate() {
        let truth = exhaustive_scan(inst).unwrap();
        if truth.verdict == Verdict::Invalid {
            continue;
        }
        for policy in [
            AdversaryPolicy::AlwaysYes,
            AdversaryPolicy::AlwaysNo,
            AdversaryPolicy::Coin,
        ] {
            let mut oracle = StandInOracle::new(policy, k as u64);
            let out = decide_apxsim_adaptive(inst, &mut oracle).unwrap();
            assert_eq!(
                out.accept,
                truth.verdict == Verdict::Yes,
                "instance {k} policy {policy:?}"
            );
            assert!(
                out.transcript.len() <= out.transcript_bound,
                "instance {k}: transcript {} over bound {}",
                out.transcript.len(),
                out.transcript_bound
            );
            assert!(out.threshold_identity_defect <= 1e-12);
            worst_defect = worst_defect.max(out.threshold_identity_defect);
        }
        checked += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "4 adaptive containment",
        checked >= 10,
        &format!("{checked} instances, worst identity defect {worst_defect:.1e}, {elapsed:.1}s"),
    );
}

/// Criterion 5: the low-energy trace-distance bound holds on 1000 seeded
/// random (H, rho, delta, delta') trials on <= 3 qubits.
#[test]
fn criterion_05_trace_distance_lemma() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut effective = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=3);
        let layout = RegisterLayout::qubits(n);
        let mut terms = Vec::new();
        for i in 0..n {
            terms
                .push(LocalTerm::new(vec![i as u32], linalg::random_hermitian(2, &mut rng), 1.0).unwrap());
            if i + 1 < n {
                terms.push(
                    LocalTerm::new(
                        vec![i as u32, i as u32 + 1],
                        linalg::random_hermitian(4, &mut rng),
                        0.5,
                    )
                    .unwrap(),
                );
            }
        }
        let h = Hamiltonian::new(layout, terms).unwrap();
        let m = h.to_dense().unwrap();
        let (vals, vecs) = linalg::eigh(&m).unwrap();
        let lambda = vals[0];
        let delta = rng.gen_range(0.01..0.2);
        let delta_p = delta * rng.gen_range(2.0..20.0);
        // random mixture with tr(H rho) <= lambda + delta, built top-down
        let dim = m.nrows();
        let mut rho: Array2<C64> = Array2::zeros((dim, dim));
        let mut weight_left = 1.0;
        let mut budget = delta * 0.9;
        for k in (0..dim).rev() {
            let cost = vals[k] - lambda;
            let w = if cost <= 1e-12 {
                weight_left
            } else {
                rng.gen_range(0.0..=(budget / cost).min(weight_left))
            };
            if w > 0.0 {
                let col = vecs.column(k).to_owned();
                rho = &rho + &linalg::pure_density(&col).mapv(|z| z * c(w, 0.0));
                weight_left -= w;
                budget -= w * cost;
            }
            if weight_left <= 0.0 {
                break;
            }
        }
        if weight_left > 0.0 {
            let col = vecs.column(0).to_owned();
            rho = &rho + &linalg::pure_density(&col).mapv(|z| z * c(weight_left, 0.0));
        }
        let r = spectral::check_low_energy_distance(&h, &rho, delta, delta_p).unwrap();
        if !r.vacuous {
            assert!(
                r.lhs <= r.rhs + 1e-9,
                "lhs {} exceeds rhs {} at delta={delta} delta'={delta_p}",
                r.lhs,
                r.rhs
            );
            effective += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "5 trace-distance lemma",
        effective >= 990 && elapsed <= 20.0,
        &format!("{effective}/1000 non-vacuous trials, {elapsed:.1}s"),
    );
}

/// Criterion 6: the projection-lemma sandwich and the nullspace-closeness
/// corollary hold on 200 seeded random 2-3 qubit instances with J in {50, 100}.
#[test]
fn criterion_06_projection_lemma() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for trial in 0..200 {
        let n = rng.gen_range(2..=3usize);
        let dim = 1 << n;
        let j = if trial % 2 == 0 { 50.0 } else { 100.0 };
        let s_rank = rng.gen_range(1..dim);
        let h_rand = linalg::random_hermitian(dim, &mut rng);
        let (_, basis) = linalg::eigh(&h_rand).unwrap();
        let s_basis = basis.slice(ndarray::s![.., 0..s_rank]).to_owned();
        let perp = basis.slice(ndarray::s![.., s_rank..]).to_owned();
        let proj_perp = linalg::projector_from_columns(&perp);
        let layout = RegisterLayout::qubits(n);
        let sites: Vec<u32> = (0..n as u32).collect();
        let h1 = Hamiltonian::new(
            layout.clone(),
            vec![LocalTerm::new(sites.clone(), proj_perp, j).unwrap()],
        )
        .unwrap();
        let h2 = Hamiltonian::new(
            layout,
            vec![LocalTerm::new(sites, linalg::random_hermitian(dim, &mut rng), 1.0).unwrap()],
        )
        .unwrap();
        let r = spectral::projection_lemma_bounds(&h1, &h2, &s_basis, j).unwrap();
        assert!(r.pass, "sandwich failed: {} <= {} <= {}", r.lower, r.lambda_h, r.upper);
        let total = &h1.to_dense().unwrap() + &h2.to_dense().unwrap();
        let (_, vecs) = linalg::eigh(&total).unwrap();
        let psi = StateVector::from_amplitudes(vecs.column(0).to_owned());
        let rc = spectral::closeness_to_nullspace(&h1, &h2, &s_basis, j, 0.01, &psi).unwrap();
        assert!(
            rc.pass,
            "closeness failed: {} > {}",
            rc.trace_distance, rc.bound
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "6 projection lemma",
        elapsed <= 20.0,
        &format!("200 instances, {elapsed:.1}s"),
    );
}

/// Criterion 7: the commutative union bound holds on 1000 seeded trials with
/// random diagonal projector families on up to 6 qubits.
#[test]
fn criterion_07_union_bound() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let nq = rng.gen_range(1..=6usize);
        let dim = 1 << nq;
        let m = rng.gen_range(1..=4usize);
        let projectors: Vec<Array2<C64>> = (0..m)
            .map(|_| {
                let mut p: Array2<C64> = Array2::zeros((dim, dim));
                for i in 0..dim {
                    if rng.gen_bool(0.5) {
                        p[[i, i]] = c(1.0, 0.0);
                    }
                }
                p
            })
            .collect();
        let psi = linalg::random_state(dim, &mut rng);
        let rho = linalg::pure_density(&psi);
        let r = spectral::union_bound_check(&projectors, &rho).unwrap();
        assert!(r.lhs <= r.rhs + 1e-9, "lhs {} > rhs {}", r.lhs, r.rhs);
        worst = worst.min(r.rhs - r.lhs);
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "7 union bound",
        elapsed <= 10.0,
        &format!("1000 trials, worst slack {worst:.3e}, {elapsed:.1}s"),
    );
}

/// Criterion 8: the repetition-code simulation passes at strengths 10, 100,
/// 1000 with a monotonically decreasing epsilon residual, and the instance
/// reduction preserves the scan verdict on >= 5 YES and >= 5 NO instances
/// while meeting both realized parameter inequalities.
#[test]
fn criterion_08_simulation_reduction() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    // monotone residuals
    let layout = RegisterLayout::qubits(2);
    let h = Hamiltonian::new(
        layout,
        vec![
            LocalTerm::new(vec![0, 1], linalg::random_hermitian(4, &mut rng), 0.5).unwrap(),
            LocalTerm::new(vec![0], linalg::random_hermitian(2, &mut rng), 1.0).unwrap(),
        ],
    )
    .unwrap();
    let mut last = f64::INFINITY;
    for strength in [10.0, 100.0, 1000.0] {
        let w = build_code_simulation(&h, strength).unwrap();
        let r = verify_simulation(&w).unwrap();
        assert!(r.pass, "witness failed at strength {strength}");
        assert!(
            r.eps_measured < last,
            "eps {} not below {last} at strength {strength}",
            r.eps_measured
        );
        last = r.eps_measured;
    }
    // verdict preservation
    let mut yes_count = 0;
    let mut no_count = 0;
    let mut attempts = 0;
    while (yes_count < 5 || no_count < 5) && attempts < 200 {
        attempts += 1;
        let layout = RegisterLayout::qubits(1);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let inst = ApxSimInstance {
            hamiltonian: Hamiltonian::new(
                layout.clone(),
                vec![LocalTerm::new(vec![0], linalg::qubit_proj(1), rng.gen_range(0.5..1.5)).unwrap()],
            )
            .unwrap(),
            observable: Hamiltonian::new(
                layout,
                vec![LocalTerm::new(vec![0], linalg::pauli_z(), sign).unwrap()],
            )
            .unwrap(),
            h_locality: 1,
            obs_locality: 1,
            a: -0.5,
            b: 0.5,
            delta: 0.2,
        };
        let before = exhaustive_scan(&inst).unwrap();
        if before.forall_verdict == Verdict::Invalid {
            continue;
        }
        let out = reduce_apxsim2_instance(&inst, &CodeSimulationBuilder, 4.0).unwrap();
        assert!(out.params_ok, "delta' + 2 eps < delta violated");
        assert!(out.observable_ok, "observable condition violated");
        assert!((out.reduced.a - (inst.a + (inst.b - inst.a) / 3.0)).abs() < 1e-12);
        assert!((out.reduced.b - (inst.b - (inst.b - inst.a) / 3.0)).abs() < 1e-12);
        let after = exhaustive_scan(&out.reduced).unwrap();
        assert_eq!(before.forall_verdict, after.forall_verdict);
        match before.forall_verdict {
            Verdict::Yes => yes_count += 1,
            Verdict::No => no_count += 1,
            Verdict::Invalid => {}
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "8 simulation reduction",
        yes_count >= 5 && no_count >= 5 && elapsed <= 120.0,
        &format!("{yes_count} YES + {no_count} NO reductions preserved, {elapsed:.1}s"),
    );
}

/// Criterion 9: the 1D construction at n = 2, R <= 2, m = 1 satisfies the
/// null-space claim, the YES/NO observable separation at 1/(4L) and 3/(4L),
/// the sifter-position and unique-gate-label audits, and the R = 1 full-space
/// check (dimension 4096) agrees with the legal-subspace computation.
#[test]
fn criterion_09_one_dimensional_construction() {
    let start = Instant::now();
    let one = RegisterLayout::qubits(1);
    let yes_q = QueryInstance::new(
        Hamiltonian::new(
            one.clone(),
            vec![LocalTerm::new(vec![0], linalg::qubit_proj(1), 1.0).unwrap()],
        )
        .unwrap(),
        0.25,
        0.75,
    )
    .unwrap();
    let no_q = QueryInstance::new(
        Hamiltonian::new(
            one,
            vec![LocalTerm::new(vec![0], Array2::eye(2), 1.0).unwrap()],
        )
        .unwrap(),
        0.25,
        0.75,
    )
    .unwrap();

    // (i) + (ii): R = 2 YES/NO toys on the legal subspace
    for (q, want_yes) in [(yes_q.clone(), true), (no_q.clone(), false)] {
        let mut toy = onedim::build_toy_instance(q, 1, 2f64.powi(-20)).unwrap();
        let rep = onedim::verify_low_energy_structure(&mut toy).unwrap();
        assert!(rep.null_space_ok, "null space: {rep:?}");
        assert!(rep.low_energy_ok, "low-energy distance: {rep:?}");
        assert!(rep.answer_overlaps_ok, "answer overlap bound: {rep:?}");
        assert!(rep.gamma_product_ok, "product bound: {rep:?}");
        if want_yes {
            assert!(
                rep.observable_low_max <= toy.params.a + 1e-9,
                "YES instance: <A> max {} above a = {}",
                rep.observable_low_max,
                toy.params.a
            );
        } else {
            assert!(
                rep.observable_low_min >= toy.params.b - 1e-9,
                "NO instance: <A> min {} below b = {}",
                rep.observable_low_min,
                toy.params.b
            );
        }
        // (iii) audits
        let audit = onedim::audit_enumeration(&toy.ham.rc, &toy.ham.enumeration).unwrap();
        assert!(audit.pass_core(), "enumeration audit: {audit:?}");
        let s_cell = onedim::sifter_cell(2, 1, 1);
        assert_eq!(s_cell, 0);
        assert_eq!(audit.gate_counts[s_cell], 1, "sifter cell gate label not unique");
        assert_eq!(
            audit.gate_counts[toy.observable_cell], 1,
            "observable cell gate label not unique"
        );
    }
    assert_eq!(onedim::sifter_cell(3, 2, 2), 8); // the paper arithmetic example

    // (iv) R = 1 full-space check against the legal-subspace computation
    let mut toy = onedim::build_toy_instance(yes_q, 0, 2f64.powi(-20)).unwrap();
    let rep = onedim::verify_low_energy_structure(&mut toy).unwrap();
    assert!(rep.null_space_ok);
    let g_full = toy.ham.assemble(&toy.params).unwrap();
    let mut h_full_terms = g_full.terms.clone();
    h_full_terms.extend(toy.sifters.clone());
    let h_full = Hamiltonian::new(g_full.layout.clone(), h_full_terms).unwrap();
    let dense = h_full.to_dense_capped(4096).unwrap();
    assert_eq!(dense.nrows(), 4096);
    let full_vals = linalg::eigvalsh(&dense).unwrap();
    let h_res = toy.h_restricted();
    let res_vals = linalg::eigvalsh(&h_res).unwrap();
    // every restricted eigenvalue appears in the full spectrum
    for rv in res_vals.iter() {
        let hit = full_vals.iter().any(|fv| (fv - rv).abs() < 1e-8);
        assert!(hit, "restricted eigenvalue {rv} missing from the full spectrum");
    }
    // the full null space of G matches the restricted null dimension
    let g_dense = g_full.to_dense_capped(4096).unwrap();
    let g_vals = linalg::eigvalsh(&g_dense).unwrap();
    let full_null = g_vals.iter().filter(|v| v.abs() < 1e-10).count();
    let g_res = toy.ham.g_restricted(&toy.params);
    let g_res_vals = linalg::eigvalsh(&g_res).unwrap();
    let res_null = g_res_vals.iter().filter(|v| v.abs() < 1e-10).count();
    assert_eq!(full_null, res_null, "null-space dimensions disagree");

    let elapsed = start.elapsed().as_secs_f64();
    report(
        "9 one-dimensional construction",
        elapsed <= 300.0,
        &format!(
            "R=2 separation + audits, R=1 full dim-4096 agreement (null dim {full_null}), {elapsed:.1}s"
        ),
    );
}

/// Criterion 10: build -> write -> read -> dense-compare is entrywise exact
/// for every instance kind.
#[test]
fn criterion_10_serialization_roundtrip() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);

    let exact_eq = |a: &Array2<C64>, b: &Array2<C64>| {
        a.iter().zip(b.iter()).all(|(x, y)| {
            x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()
        })
    };

    // query batch
    let queries: Vec<QueryInstance> = (0..3)
        .map(|_| random_two_qubit_query(&mut rng, 0.05))
        .collect();
    let text = hamforge::query::write_query_batch(&queries);
    let back = hamforge::query::read_query_batch(&text).unwrap();
    for (q, q2) in queries.iter().zip(back.iter()) {
        assert!(exact_eq(
            &q.hamiltonian.to_dense().unwrap(),
            &q2.hamiltonian.to_dense().unwrap()
        ));
        assert_eq!(q.a.to_bits(), q2.a.to_bits());
        assert_eq!(q.b.to_bits(), q2.b.to_bits());
    }
    let qh = build_query_hamiltonian(&queries).unwrap();
    let text2 = textio::write_hamiltonian(&qh.hamiltonian);
    let back2 = textio::read_hamiltonian(&text2).unwrap();
    assert!(exact_eq(
        &qh.hamiltonian.to_dense_capped(1 << 14).unwrap(),
        &back2.to_dense_capped(1 << 14).unwrap()
    ));

    // cook-levin hardness instance
    let comp = ParallelOracleComputation::new(
        ReversibleCircuit::new(1, vec![Gate::identity(vec![0])], 0).unwrap(),
        vec![one_qubit_query(QueryStatus::Yes, &mut rng)],
    )
    .unwrap();
    let built = build_hardness_instance(&comp).unwrap();
    let text = apxsim::write_instance(&built.instance);
    let back = apxsim::read_instance(&text).unwrap();
    assert!(exact_eq(
        &built.instance.hamiltonian.to_dense().unwrap(),
        &back.hamiltonian.to_dense().unwrap()
    ));
    assert!(exact_eq(
        &built.instance.observable.to_dense().unwrap(),
        &back.observable.to_dense().unwrap()
    ));
    assert_eq!(built.instance.a.to_bits(), back.a.to_bits());
    assert_eq!(built.instance.delta.to_bits(), back.delta.to_bits());

    // spatially sparse instance
    let lat = LatticeQuery {
        rows: 1,
        cols: 2,
        edges: vec![((0, 0), (0, 1), {
            let mut m: Array2<C64> = Array2::zeros((4, 4));
            m[[1, 1]] = c(1.0, 0.0);
            m[[2, 2]] = c(1.0, 0.0);
            m
        })],
        a: 0.25,
        b: 0.75,
    };
    let circuit = ReversibleCircuit::new(1, vec![Gate::identity(vec![0])], 0).unwrap();
    let sparse = build_spatially_sparse_instance(&circuit, &[lat]).unwrap();
    let text = apxsim::write_instance(&sparse.instance);
    let back = apxsim::read_instance(&text).unwrap();
    let cap = 1 << 22;
    let dense_terms_equal = sparse
        .instance
        .hamiltonian
        .terms
        .iter()
        .zip(back.hamiltonian.terms.iter())
        .all(|(a, b)| {
            a.weight.to_bits() == b.weight.to_bits()
                && a.support == b.support
                && exact_eq(&a.block, &b.block)
        });
    assert!(dense_terms_equal);
    let _ = cap;
    let report_sp = check_spatial_sparsity(&sparse.graph, 6, 8);
    assert!(report_sp.pass, "sparse layout exceeded caps: {report_sp:?}");

    // 1D instance (R = 1 keeps the dense compare under the cap)
    let toy = onedim::build_toy_instance(one_qubit_query(QueryStatus::Yes, &mut rng), 0, 2f64.powi(-20))
        .unwrap();
    let g = toy.ham.assemble(&toy.params).unwrap();
    let mut terms = g.terms;
    terms.extend(toy.sifters.clone());
    let h = Hamiltonian::new(g.layout, terms).unwrap();
    let observable = onedim::build_observable(2, 1).unwrap();
    let inst = ApxSimInstance {
        hamiltonian: h,
        observable,
        h_locality: 2,
        obs_locality: 1,
        a: toy.params.a,
        b: toy.params.b,
        delta: toy.params.delta,
    };
    let text = apxsim::write_instance(&inst);
    let back = apxsim::read_instance(&text).unwrap();
    assert!(exact_eq(
        &inst.hamiltonian.to_dense_capped(4096).unwrap(),
        &back.hamiltonian.to_dense_capped(4096).unwrap()
    ));

    // simulation witness
    let src = Hamiltonian::new(
        RegisterLayout::qubits(1),
        vec![LocalTerm::new(vec![0], linalg::pauli_z(), 1.0).unwrap()],
    )
    .unwrap();
    let w = build_code_simulation(&src, 10.0).unwrap();
    let text = hamforge::simulate::write_witness(&w);
    // the witness text re-parses: source, ISO blocks, SIMPARAMS, target
    let mut p = textio::LineParser::new(&text);
    let src_back = textio::parse_hamiltonian(&mut p).unwrap();
    assert!(exact_eq(
        &src.to_dense().unwrap(),
        &src_back.to_dense().unwrap()
    ));
    let (site, iso) = textio::parse_iso(&mut p).unwrap();
    assert_eq!(site, 0);
    assert!(exact_eq(&iso, &w.encoding.site_isometries[0]));
    let params = textio::parse_keyword_floats(&mut p, "SIMPARAMS", 3).unwrap();
    assert_eq!(params[0].to_bits(), w.delta_cut.to_bits());
    let tgt_back = textio::parse_hamiltonian(&mut p).unwrap();
    assert!(exact_eq(
        &w.target.to_dense().unwrap(),
        &tgt_back.to_dense().unwrap()
    ));

    let elapsed = start.elapsed().as_secs_f64();
    report(
        "10 serialization roundtrip",
        true,
        &format!("all five instance kinds bit-exact, {elapsed:.1}s"),
    );
}

/// Classify-query smoke checks shared by several criteria.
#[test]
fn query_classification_fixtures() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let yes = one_qubit_query(QueryStatus::Yes, &mut rng);
    let no = one_qubit_query(QueryStatus::No, &mut rng);
    assert_eq!(classify_query(&yes).unwrap().status, QueryStatus::Yes);
    assert_eq!(classify_query(&no).unwrap().status, QueryStatus::No);
}
