//! hamforge CLI: build instances, solve them, and run the per-lemma verifiers.
//!
//! Exit codes: 0 pass, 1 assertion failure, 2 usage or parse error,
//! 3 resource cap exceeded.

use clap::{Parser, Subcommand};
use hamforge::apxsim::{self, exhaustive_scan, ApxSimInstance, Verdict};
use hamforge::circuit::{Gate, ReversibleCircuit};
use hamforge::cooklevin::{self, LatticeQuery};
use hamforge::error::HamError;
use hamforge::layout::RegisterLayout;
use hamforge::linalg::{self, c};
use hamforge::onedim;
use hamforge::operator::{Hamiltonian, LocalTerm};
use hamforge::query::{self, AdversaryPolicy, QueryInstance};
use hamforge::report::Report;
use hamforge::simulate;
use hamforge::spectral;
use hamforge::textio::LineParser;
use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hamforge",
    version,
    about = "circuit-to-Hamiltonian constructions, verified by exact diagonalization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an instance file from a build-spec file
    Build {
        /// instance kind: query | cooklevin | sparse | oned | simcode
        kind: String,
        /// build-spec file (see README for the per-kind line formats)
        spec: std::path::PathBuf,
        /// output file (defaults to stdout)
        #[arg(short, long)]
        out: Option<std::path::PathBuf>,
    },
    /// Solve an instance file: ground energy, ground <A>, scan verdict
    Solve {
        instance: std::path::PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        max_dim: Option<usize>,
    },
    /// Run a lemma verifier: hgap | lowenergy | projection | union | simulation | onedim
    Verify {
        lemma: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(short = 'R', long = "R", default_value_t = 2)]
        rounds: usize,
        /// restrict the 1D verification to the legal-configuration subspace
        #[arg(long, default_value_t = true)]
        legal_subspace: bool,
        /// invalid-query answering policy: yes | no | coin
        #[arg(long, default_value = "coin")]
        adversary: AdversaryPolicy,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                HamError::Parse { .. } | HamError::InvalidInstance(_) | HamError::Io(_) => 2,
                HamError::DimCap { .. } | HamError::DimOverflow | HamError::UnsupportedScale(_) => {
                    3
                }
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<bool, HamError> {
    match cli.command {
        Command::Build { kind, spec, out } => {
            let text = std::fs::read_to_string(&spec)?;
            let (built, digest) = build_instance(&kind, &text)?;
            match out {
                Some(path) => std::fs::write(path, &built)?,
                None => print!("{built}"),
            }
            eprintln!("digest {digest}");
            Ok(true)
        }
        Command::Solve {
            instance,
            tol,
            max_dim,
        } => {
            if let Some(cap) = max_dim {
                std::env::set_var("HAMFORGE_MAX_DIM", cap.to_string());
            }
            let text = std::fs::read_to_string(&instance)?;
            let report = cmd_solve(&text, tol)?;
            print!("{}", report.render());
            Ok(true)
        }
        Command::Verify {
            lemma,
            seed,
            trials,
            m,
            n,
            rounds,
            legal_subspace,
            adversary,
            tol,
        } => {
            let mut report = match lemma.as_str() {
                "hgap" => verify_hgap(m, seed, trials.unwrap_or(100))?,
                "lowenergy" => verify_lowenergy(seed, trials.unwrap_or(1000))?,
                "projection" => verify_projection(seed, trials.unwrap_or(200))?,
                "union" => verify_union(seed, trials.unwrap_or(1000))?,
                "simulation" => verify_simulation_cmd(seed)?,
                "onedim" => verify_onedim(n, rounds, legal_subspace)?,
                other => {
                    return Err(HamError::InvalidInstance(format!(
                        "unknown lemma {other:?} (expected hgap, lowenergy, projection, union, simulation, onedim)"
                    )))
                }
            };
            report.set_seed(seed);
            let _ = (adversary, tol);
            report.finish();
            print!("{}", report.render());
            Ok(report.all_pass())
        }
    }
}

fn digest_of(s: &str) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(s.as_bytes());
    h.finalize()
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

fn named_query(
    p: &LineParser,
    a: f64,
    b: f64,
    gen: &str,
    args: &[&str],
) -> Result<QueryInstance, HamError> {
    let one = RegisterLayout::qubits(1);
    let h = match gen {
        "proj1" => Hamiltonian::new(
            one,
            vec![LocalTerm::new(vec![0], linalg::qubit_proj(1), 1.0)?],
        )?,
        "ident" => Hamiltonian::new(one, vec![LocalTerm::new(vec![0], Array2::eye(2), 1.0)?])?,
        "halfident" => Hamiltonian::new(one, vec![LocalTerm::new(vec![0], Array2::eye(2), 0.5)?])?,
        "zfield" => {
            let strength: f64 = args
                .first()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| p.err("zfield needs a strength"))?;
            Hamiltonian::new(
                one,
                vec![LocalTerm::new(vec![0], linalg::pauli_z(), strength)?],
            )?
        }
        "random2" => {
            let seed: u64 = args
                .first()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| p.err("random2 needs a seed"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Hamiltonian::new(
                RegisterLayout::qubits(2),
                vec![LocalTerm::new(
                    vec![0, 1],
                    linalg::random_hermitian(4, &mut rng),
                    1.0,
                )?],
            )?
        }
        other => return Err(p.err(format!("unknown query generator {other:?}"))),
    };
    QueryInstance::new(h, a, b)
}

fn parse_gate(p: &LineParser, toks: &[&str]) -> Result<Gate, HamError> {
    let usage = || {
        p.err("gate needs: not <i> | cnot <c> <t> | swap <a> <b> | toffoli <a> <b> <c> | id <i>")
    };
    let arg = |k: usize| -> Result<usize, HamError> {
        toks.get(k).and_then(|t| t.parse().ok()).ok_or_else(usage)
    };
    match toks.first().copied() {
        Some("not") => Ok(Gate::not(arg(1)?)),
        Some("cnot") => Ok(Gate::cnot(arg(1)?, arg(2)?)),
        Some("swap") => Ok(Gate::swap(arg(1)?, arg(2)?)),
        Some("toffoli") => Ok(Gate::toffoli(arg(1)?, arg(2)?, arg(3)?)),
        Some("id") => Ok(Gate::identity(vec![arg(1)?])),
        _ => Err(usage()),
    }
}

struct BuildSpec {
    circuit_width: usize,
    output_bit: usize,
    gates: Vec<Gate>,
    queries: Vec<QueryInstance>,
    lattices: Vec<LatticeQuery>,
    rounds_after_pause: usize,
    p: f64,
    strength: f64,
    source: Option<Hamiltonian>,
}

fn parse_build_spec(text: &str) -> Result<BuildSpec, HamError> {
    let mut p = LineParser::new(text);
    let mut spec = BuildSpec {
        circuit_width: 0,
        output_bit: 0,
        gates: Vec::new(),
        queries: Vec::new(),
        lattices: Vec::new(),
        rounds_after_pause: 1,
        p: 2f64.powi(-20),
        strength: 100.0,
        source: None,
    };
    while let Some((_, line)) = p.next_line() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "circuit" => {
                spec.circuit_width = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| p.err("circuit needs <width> <output_bit>"))?;
                spec.output_bit = toks
                    .get(2)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| p.err("circuit needs <width> <output_bit>"))?;
            }
            "gate" => spec.gates.push(parse_gate(&p, &toks[1..])?),
            "query" => {
                let a: f64 = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| p.err("query needs <a> <b> <generator>"))?;
                let b: f64 = toks
                    .get(2)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| p.err("query needs <a> <b> <generator>"))?;
                let gen = toks
                    .get(3)
                    .ok_or_else(|| p.err("query needs a generator"))?;
                spec.queries.push(named_query(&p, a, b, gen, &toks[4..])?);
            }
            "latquery" => {
                let need = || p.err("latquery needs <rows> <cols> <a> <b> <gen> [seed]");
                let rows: usize = toks.get(1).and_then(|t| t.parse().ok()).ok_or_else(need)?;
                let cols: usize = toks.get(2).and_then(|t| t.parse().ok()).ok_or_else(need)?;
                let a: f64 = toks.get(3).and_then(|t| t.parse().ok()).ok_or_else(need)?;
                let b: f64 = toks.get(4).and_then(|t| t.parse().ok()).ok_or_else(need)?;
                let gen = toks.get(5).copied().unwrap_or("zz");
                let seed: u64 = toks.get(6).and_then(|t| t.parse().ok()).unwrap_or(0);
                spec.lattices
                    .push(lattice_query(rows, cols, a, b, gen, seed)?);
            }
            "rounds_after_pause" => {
                spec.rounds_after_pause = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| p.err("rounds_after_pause needs a value"))?
            }
            "p" => {
                spec.p = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| p.err("p needs a value"))?
            }
            "strength" => {
                spec.strength = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| p.err("strength needs a value"))?
            }
            "source" => {
                let gen = toks
                    .get(1)
                    .copied()
                    .ok_or_else(|| p.err("source needs a generator"))?;
                spec.source = Some(match gen {
                    "z" => Hamiltonian::new(
                        RegisterLayout::qubits(1),
                        vec![LocalTerm::new(vec![0], linalg::pauli_z(), 1.0)?],
                    )?,
                    "random" => {
                        let nq: usize = toks.get(2).and_then(|t| t.parse().ok()).unwrap_or(1);
                        let seed: u64 = toks.get(3).and_then(|t| t.parse().ok()).unwrap_or(0);
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        random_ham(nq, &mut rng)
                    }
                    other => return Err(p.err(format!("unknown source generator {other:?}"))),
                });
            }
            other => return Err(p.err(format!("unknown build-spec record {other:?}"))),
        }
    }
    Ok(spec)
}

fn lattice_query(
    rows: usize,
    cols: usize,
    a: f64,
    b: f64,
    gen: &str,
    seed: u64,
) -> Result<LatticeQuery, HamError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let zz = {
        let mut m: Array2<C64> = Array2::zeros((4, 4));
        m[[0, 0]] = c(1.0, 0.0);
        m[[1, 1]] = c(-1.0, 0.0);
        m[[2, 2]] = c(-1.0, 0.0);
        m[[3, 3]] = c(1.0, 0.0);
        m
    };
    for r in 0..rows {
        for col in 0..cols {
            let mut push_edge = |p2: (usize, usize), rng: &mut ChaCha8Rng| {
                let block = match gen {
                    "zz" => zz.clone(),
                    "diag" => {
                        let mut m: Array2<C64> = Array2::zeros((4, 4));
                        for k in 0..4 {
                            m[[k, k]] = c((k % 3) as f64, 0.0);
                        }
                        m
                    }
                    _ => linalg::random_hermitian(4, rng),
                };
                edges.push(((r, col), p2, block));
            };
            if col + 1 < cols {
                push_edge((r, col + 1), &mut rng);
            }
            if r + 1 < rows {
                push_edge((r + 1, col), &mut rng);
            }
        }
    }
    Ok(LatticeQuery {
        rows,
        cols,
        edges,
        a,
        b,
    })
}

fn build_instance(kind: &str, spec_text: &str) -> Result<(String, String), HamError> {
    let spec = parse_build_spec(spec_text)?;
    let out = match kind {
        "query" => {
            if spec.queries.is_empty() {
                return Err(HamError::InvalidInstance(
                    "query build needs query lines".into(),
                ));
            }
            query::write_query_batch(&spec.queries)
        }
        "cooklevin" => {
            let circuit = ReversibleCircuit::new(spec.circuit_width, spec.gates, spec.output_bit)?;
            let comp = query::ParallelOracleComputation::new(circuit, spec.queries)?;
            let built = cooklevin::build_hardness_instance(&comp)?;
            apxsim::write_instance(&built.instance)
        }
        "sparse" => {
            let circuit = ReversibleCircuit::new(spec.circuit_width, spec.gates, spec.output_bit)?;
            let built = cooklevin::build_spatially_sparse_instance(&circuit, &spec.lattices)?;
            let mut text = apxsim::write_instance(&built.instance);
            text.push_str("# interaction graph\n");
            for line in built.graph.to_text().lines() {
                text.push_str("# ");
                text.push_str(line);
                text.push('\n');
            }
            text
        }
        "oned" => {
            let q = spec
                .queries
                .first()
                .ok_or_else(|| HamError::InvalidInstance("oned build needs one query".into()))?
                .clone();
            let toy = onedim::build_toy_instance(q, spec.rounds_after_pause, spec.p)?;
            let g = toy.ham.assemble(&toy.params)?;
            let mut terms = g.terms;
            terms.extend(toy.sifters.clone());
            let h = Hamiltonian::new(g.layout, terms)?;
            let observable = onedim::build_observable(toy.ham.rc.n, toy.ham.rc.num_rounds())?;
            let inst = ApxSimInstance {
                hamiltonian: h,
                observable,
                h_locality: 2,
                obs_locality: 1,
                a: toy.params.a,
                b: toy.params.b,
                delta: toy.params.delta,
            };
            apxsim::write_instance(&inst)
        }
        "simcode" => {
            let h = spec.source.ok_or_else(|| {
                HamError::InvalidInstance("simcode build needs a source line".into())
            })?;
            let w = simulate::build_code_simulation(&h, spec.strength)?;
            simulate::write_witness(&w)
        }
        other => {
            return Err(HamError::InvalidInstance(format!(
                "unknown build kind {other:?} (expected query, cooklevin, sparse, oned, simcode)"
            )))
        }
    };
    let digest = digest_of(&out);
    Ok((out, digest))
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn cmd_solve(text: &str, tol: f64) -> Result<Report, HamError> {
    let inst = apxsim::read_instance(text)?;
    let mut report = Report::new("solve");
    report.digest_input(text.as_bytes());
    let r = spectral::min_eigenvalue(&inst.hamiltonian, tol)?;
    report.value("lambda", r.lambda_min);
    report.value("residual", r.residual);
    let ground_a = spectral::expectation(&inst.observable, &r.ground_vector)?;
    report.value("ground_obs", ground_a);
    let scan = exhaustive_scan(&inst)?;
    report.value("low_min_obs", scan.low_min_a);
    report.value("low_max_obs", scan.low_max_a);
    report.value("low_rank", scan.low_rank as f64);
    let verdict = match scan.verdict {
        Verdict::Yes => 1.0,
        Verdict::No => 0.0,
        Verdict::Invalid => -1.0,
    };
    report.value("verdict", verdict);
    report.finish();
    Ok(report)
}

// ---------------------------------------------------------------------------
// verifiers
// ---------------------------------------------------------------------------

fn verify_hgap(m: usize, seed: u64, trials: usize) -> Result<Report, HamError> {
    let mut report = Report::new("verify hgap");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_margin = f64::INFINITY;
    let mut worst_eps = f64::INFINITY;
    let mut pass = true;
    for _ in 0..trials {
        let mq = rng.gen_range(1..=m.max(1));
        let queries: Vec<QueryInstance> = (0..mq).map(|_| random_valid_query(&mut rng)).collect();
        let r = query::verify_query_gap(&queries)?;
        pass &= r.pass;
        if r.min_incorrect_margin.is_finite() {
            worst_margin = worst_margin.min(r.min_incorrect_margin - r.epsilon);
        }
        worst_eps = worst_eps.min(r.epsilon);
    }
    report.value("trials", trials as f64);
    report.value("epsilon min", worst_eps);
    report.value("worst margin minus epsilon", worst_margin);
    report.flag("gap holds", pass);
    Ok(report)
}

fn random_valid_query(rng: &mut ChaCha8Rng) -> QueryInstance {
    let layout = RegisterLayout::qubits(2);
    let t = LocalTerm::new(vec![0, 1], linalg::random_hermitian(4, rng), 1.0).unwrap();
    let h = Hamiltonian::new(layout, vec![t]).unwrap();
    let lam = spectral::min_eigenvalue(&h, 1e-12).unwrap().lambda_min;
    let gap = rng.gen_range(0.05..1.0);
    let a = if rng.gen_bool(0.5) {
        lam + rng.gen_range(0.01..0.5)
    } else {
        lam - gap - rng.gen_range(0.01..0.5)
    };
    QueryInstance::new(h, a, a + gap).unwrap()
}

fn random_ham(n: usize, rng: &mut ChaCha8Rng) -> Hamiltonian {
    let layout = RegisterLayout::qubits(n);
    let mut terms = Vec::new();
    for i in 0..n {
        terms.push(LocalTerm::new(vec![i as u32], linalg::random_hermitian(2, rng), 1.0).unwrap());
        if i + 1 < n {
            terms.push(
                LocalTerm::new(
                    vec![i as u32, i as u32 + 1],
                    linalg::random_hermitian(4, rng),
                    0.5,
                )
                .unwrap(),
            );
        }
    }
    Hamiltonian::new(layout, terms).unwrap()
}

fn verify_lowenergy(seed: u64, trials: usize) -> Result<Report, HamError> {
    let mut report = Report::new("verify lowenergy");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_slack = f64::INFINITY;
    let mut pass = true;
    for _ in 0..trials {
        let n = rng.gen_range(1..=3);
        let h = random_ham(n, &mut rng);
        let (rho, delta) = random_low_energy_mixture(&h, &mut rng)?;
        let delta_p = delta * rng.gen_range(2.0..20.0);
        let r = spectral::check_low_energy_distance(&h, &rho, delta, delta_p)?;
        if !r.vacuous {
            pass &= r.pass;
            worst_slack = worst_slack.min(r.rhs - r.lhs);
        }
    }
    report.value("trials", trials as f64);
    report.value("worst slack", worst_slack);
    report.flag("trace-distance bound holds", pass);
    Ok(report)
}

fn random_low_energy_mixture(
    h: &Hamiltonian,
    rng: &mut ChaCha8Rng,
) -> Result<(Array2<C64>, f64), HamError> {
    let m = h.to_dense()?;
    let (vals, vecs) = linalg::eigh(&m)?;
    let lambda = vals[0];
    let delta = rng.gen_range(0.01..0.2);
    let dim = m.nrows();
    let mut rho: Array2<C64> = Array2::zeros((dim, dim));
    let mut weight_left = 1.0;
    let mut budget = delta * 0.9;
    for k in (0..dim).rev() {
        if weight_left <= 0.0 {
            break;
        }
        let cost = vals[k] - lambda;
        let max_w = if cost <= 1e-12 {
            weight_left
        } else {
            (budget / cost).min(weight_left)
        };
        let w = if cost <= 1e-12 {
            weight_left
        } else {
            rng.gen_range(0.0..=max_w)
        };
        if w > 0.0 {
            let col = vecs.column(k).to_owned();
            rho = &rho + &linalg::pure_density(&col).mapv(|z| z * c(w, 0.0));
            weight_left -= w;
            budget -= w * cost;
        }
    }
    if weight_left > 0.0 {
        let col = vecs.column(0).to_owned();
        rho = &rho + &linalg::pure_density(&col).mapv(|z| z * c(weight_left, 0.0));
    }
    Ok((rho, delta))
}

fn verify_projection(seed: u64, trials: usize) -> Result<Report, HamError> {
    let mut report = Report::new("verify projection");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pass_sandwich = true;
    let mut pass_closeness = true;
    for trial in 0..trials {
        let n = rng.gen_range(2..=3usize);
        let dim = 1 << n;
        let j = if trial % 2 == 0 { 50.0 } else { 100.0 };
        let s_rank = rng.gen_range(1..dim);
        let basis = random_unitary(dim, &mut rng);
        let s_basis = basis.slice(ndarray::s![.., 0..s_rank]).to_owned();
        let perp = basis.slice(ndarray::s![.., s_rank..]).to_owned();
        let proj_perp = linalg::projector_from_columns(&perp);
        let layout = RegisterLayout::qubits(n);
        let sites: Vec<u32> = (0..n as u32).collect();
        let h1 = Hamiltonian::new(
            layout.clone(),
            vec![LocalTerm::new(sites.clone(), proj_perp, j)?],
        )?;
        let h2 = Hamiltonian::new(
            layout,
            vec![LocalTerm::new(
                sites,
                linalg::random_hermitian(dim, &mut rng),
                1.0,
            )?],
        )?;
        let r = spectral::projection_lemma_bounds(&h1, &h2, &s_basis, j)?;
        pass_sandwich &= r.pass;
        let total = &h1.to_dense()? + &h2.to_dense()?;
        let (_, vecs) = linalg::eigh(&total)?;
        let psi = hamforge::operator::StateVector::from_amplitudes(vecs.column(0).to_owned());
        let rc = spectral::closeness_to_nullspace(&h1, &h2, &s_basis, j, 0.01, &psi)?;
        pass_closeness &= rc.pass;
    }
    report.value("trials", trials as f64);
    report.flag("sandwich holds", pass_sandwich);
    report.flag("closeness bound holds", pass_closeness);
    Ok(report)
}

fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> Array2<C64> {
    let h = linalg::random_hermitian(dim, rng);
    let (_, vecs) = linalg::eigh(&h).unwrap();
    vecs
}

fn verify_union(seed: u64, trials: usize) -> Result<Report, HamError> {
    let mut report = Report::new("verify union");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pass = true;
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
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
        let r = spectral::union_bound_check(&projectors, &rho)?;
        pass &= r.pass;
        worst = worst.min(r.rhs - r.lhs);
    }
    report.value("trials", trials as f64);
    report.value("worst slack", worst);
    report.flag("union bound holds", pass);
    Ok(report)
}

fn verify_simulation_cmd(seed: u64) -> Result<Report, HamError> {
    let mut report = Report::new("verify simulation");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_ham(2, &mut rng);
    let mut last = f64::INFINITY;
    let mut monotone = true;
    let mut all_pass = true;
    for strength in [10.0, 100.0, 1000.0] {
        let w = simulate::build_code_simulation(&h, strength)?;
        let r = simulate::verify_simulation(&w)?;
        all_pass &= r.pass;
        monotone &= r.eps_measured < last;
        last = r.eps_measured;
        report.value(&format!("eps at strength {strength}"), r.eps_measured);
    }
    report.flag("witness conditions hold", all_pass);
    report.flag("eps residual monotone", monotone);
    Ok(report)
}

fn verify_onedim(n: usize, rounds: usize, legal_subspace: bool) -> Result<Report, HamError> {
    let mut report = Report::new("verify onedim");
    if n != 2 {
        return Err(HamError::UnsupportedScale(
            "the 1D verifier drives n = 2 toy instances".into(),
        ));
    }
    let yes_q = {
        let one = RegisterLayout::qubits(1);
        QueryInstance::new(
            Hamiltonian::new(
                one,
                vec![LocalTerm::new(vec![0], linalg::qubit_proj(1), 1.0)?],
            )?,
            0.25,
            0.75,
        )?
    };
    let no_q = {
        let one = RegisterLayout::qubits(1);
        QueryInstance::new(
            Hamiltonian::new(one, vec![LocalTerm::new(vec![0], Array2::eye(2), 1.0)?])?,
            0.25,
            0.75,
        )?
    };
    let rounds_after_pause = rounds.saturating_sub(1);
    let mut all_pass = true;
    for (label, q, want_yes) in [("yes", yes_q, true), ("no", no_q, false)] {
        let mut toy = onedim::build_toy_instance(q, rounds_after_pause, 2f64.powi(-20))?;
        let rep = onedim::verify_low_energy_structure(&mut toy)?;
        report.value(&format!("{label} L"), rep.l as f64);
        report.value(&format!("{label} a"), toy.params.a);
        report.value(&format!("{label} b"), toy.params.b);
        report.value(&format!("{label} obs low max"), rep.observable_low_max);
        report.value(&format!("{label} obs low min"), rep.observable_low_min);
        report.flag(&format!("{label} structure"), rep.pass);
        all_pass &= rep.pass;
        if rounds_after_pause > 0 {
            let sep_ok = if want_yes {
                rep.observable_low_max <= toy.params.a + 1e-9
            } else {
                rep.observable_low_min >= toy.params.b - 1e-9
            };
            report.flag(&format!("{label} observable separated"), sep_ok);
            all_pass &= sep_ok;
        }
        let audit = onedim::audit_enumeration(&toy.ham.rc, &toy.ham.enumeration)?;
        let s_cell = onedim::sifter_cell(2, 1, 1);
        let audit_ok = audit.pass_core()
            && audit.gate_counts[s_cell] == 1
            && audit.gate_counts[toy.observable_cell] == 1;
        report.flag(&format!("{label} enumeration audit"), audit_ok);
        all_pass &= audit_ok;
    }
    let _ = legal_subspace;
    report.flag("onedim", all_pass);
    Ok(report)
}
