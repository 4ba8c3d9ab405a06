//! The parallel-query Hamiltonian, oracle-machine simulation with exact
//! diagonalization standing in for the oracle, and the adaptive binary-search
//! decision algorithm with its threshold identities.

use crate::apxsim::ApxSimInstance;
use crate::circuit::ReversibleCircuit;
use crate::error::{HamError, Result};
use crate::layout::{RegisterLayout, SiteId};
use crate::linalg::{self, qubit_proj};
use crate::operator::{Hamiltonian, LocalTerm};
use crate::spectral;
use crate::textio::{self, LineParser};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

/// One k-LH oracle query: a Hamiltonian on its own register with promise
/// thresholds a < b.
#[derive(Debug, Clone)]
pub struct QueryInstance {
    pub hamiltonian: Hamiltonian,
    pub a: f64,
    pub b: f64,
}

impl QueryInstance {
    pub fn new(hamiltonian: Hamiltonian, a: f64, b: f64) -> Result<Self> {
        if b <= a {
            return Err(HamError::InvalidInstance(format!(
                "query thresholds need a < b, got a={a}, b={b}"
            )));
        }
        Ok(Self { hamiltonian, a, b })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryStatus {
    Yes,
    No,
    Invalid,
}

#[derive(Debug, Clone, Copy)]
pub struct QueryVerdict {
    pub status: QueryStatus,
    pub lambda: f64,
}

/// Classify a query with exact diagonalization as the oracle.
pub fn classify_query(q: &QueryInstance) -> Result<QueryVerdict> {
    let r = spectral::min_eigenvalue(&q.hamiltonian, 1e-10)?;
    let status = if r.lambda_min <= q.a {
        QueryStatus::Yes
    } else if r.lambda_min >= q.b {
        QueryStatus::No
    } else {
        QueryStatus::Invalid
    };
    Ok(QueryVerdict {
        status,
        lambda: r.lambda_min,
    })
}

/// The answers considered correct for a query under promise-problem semantics.
pub fn correct_answers(status: QueryStatus) -> &'static [bool] {
    match status {
        QueryStatus::Yes => &[true],
        QueryStatus::No => &[false],
        QueryStatus::Invalid => &[false, true],
    }
}

/// The combined layout of the query Hamiltonian, with registers X1 Y1 X2 Y2...
#[derive(Debug, Clone)]
pub struct QueryHamiltonian {
    pub hamiltonian: Hamiltonian,
    /// answer-qubit site of each query
    pub x_sites: Vec<SiteId>,
    /// sites of each query's Y register (renamed into the combined layout)
    pub y_sites: Vec<Vec<SiteId>>,
}

/// Build H = sum_i ((a_i+b_i)/2) |0><0|_{X_i} (x) I_{Y_i} + |1><1|_{X_i} (x) H_{Y_i}.
///
/// Each |1><1|_{X_i} (x) h term keeps the query's own local terms, extended by
/// the control qubit, so 2-local queries give a 3-local Hamiltonian.
pub fn build_query_hamiltonian(queries: &[QueryInstance]) -> Result<QueryHamiltonian> {
    if queries.is_empty() {
        return Err(HamError::InvalidInstance("empty query list".into()));
    }
    let mut sites: Vec<(SiteId, usize)> = Vec::new();
    let mut next_id: SiteId = 0;
    let mut x_sites = Vec::new();
    let mut y_sites = Vec::new();
    let mut site_maps = Vec::new();
    for q in queries {
        let x = next_id;
        next_id += 1;
        sites.push((x, 2));
        x_sites.push(x);
        let mut map = std::collections::BTreeMap::new();
        let mut ys = Vec::new();
        for &(old, dim) in q.hamiltonian.layout.sites() {
            let id = next_id;
            next_id += 1;
            sites.push((id, dim));
            map.insert(old, id);
            ys.push(id);
        }
        site_maps.push(map);
        y_sites.push(ys);
    }
    let mut layout = RegisterLayout::new(sites)?;
    for (i, (&x, ys)) in x_sites.iter().zip(y_sites.iter()).enumerate() {
        layout.add_register(&format!("X{}", i + 1), vec![x])?;
        layout.add_register(&format!("Y{}", i + 1), ys.clone())?;
    }

    let mut terms = Vec::new();
    for (i, q) in queries.iter().enumerate() {
        let mid = (q.a + q.b) / 2.0;
        // ((a+b)/2) |0><0|_{X_i}
        terms.push(LocalTerm::new(vec![x_sites[i]], qubit_proj(0), mid)?);
        // |1><1|_{X_i} (x) h for each local term h of the query
        for t in &q.hamiltonian.terms {
            let mut support = vec![x_sites[i]];
            support.extend(t.support.iter().map(|s| site_maps[i][s]));
            let block = linalg::kron(&qubit_proj(1), &t.block);
            terms.push(LocalTerm::new(support, block, t.weight)?);
        }
    }
    let hamiltonian = Hamiltonian::new(layout, terms)?;
    Ok(QueryHamiltonian {
        hamiltonian,
        x_sites,
        y_sites,
    })
}

#[derive(Debug, Clone)]
pub struct GapStringEntry {
    pub string: Vec<bool>,
    /// restricted minimum energy, by direct formula
    pub lambda_formula: f64,
    /// restricted minimum energy, by diagonalizing the restricted operator
    pub lambda_numeric: f64,
    pub correct: bool,
}

#[derive(Debug, Clone)]
pub struct QueryGapReport {
    pub epsilon: f64,
    pub lambda: f64,
    pub entries: Vec<GapStringEntry>,
    /// smallest (lambda_y - lambda) over incorrect strings, +inf when none exist
    pub min_incorrect_margin: f64,
    pub global_min_on_correct: bool,
    pub pass: bool,
}

/// Enumerate all 2^m query strings, compute the minimum energy of the query
/// Hamiltonian restricted to each |y>-sector by two independent routes, and
/// check that (i) the global minimum lies on a correct string and (ii) every
/// incorrect string pays at least epsilon = min_i (b_i - a_i)/2.
pub fn verify_query_gap(queries: &[QueryInstance]) -> Result<QueryGapReport> {
    if queries.is_empty() {
        return Err(HamError::InvalidInstance("empty query list".into()));
    }
    let m = queries.len();
    let statuses: Vec<QueryStatus> = queries
        .iter()
        .map(|q| classify_query(q).map(|v| v.status))
        .collect::<Result<_>>()?;
    let lambdas: Vec<f64> = queries
        .iter()
        .map(|q| spectral::min_eigenvalue(&q.hamiltonian, 1e-10).map(|r| r.lambda_min))
        .collect::<Result<_>>()?;
    let epsilon = queries
        .iter()
        .map(|q| (q.b - q.a) / 2.0)
        .fold(f64::INFINITY, f64::min);

    let mut entries = Vec::new();
    for bits in 0..(1usize << m) {
        let string: Vec<bool> = (0..m).map(|i| (bits >> (m - 1 - i)) & 1 == 1).collect();
        // formula route: independent sum over queries
        let mut lam_f = 0.0;
        for (i, q) in queries.iter().enumerate() {
            lam_f += if string[i] {
                lambdas[i]
            } else {
                (q.a + q.b) / 2.0
            };
        }
        // numeric route: diagonalize sum_i (y_i=0: c_i I, else H_Yi) on (x)Y_i
        let lam_n = restricted_min_energy(queries, &string)?;
        let correct = string
            .iter()
            .zip(statuses.iter())
            .all(|(&y, &s)| correct_answers(s).contains(&y));
        entries.push(GapStringEntry {
            string,
            lambda_formula: lam_f,
            lambda_numeric: lam_n,
            correct,
        });
    }
    for e in &entries {
        if (e.lambda_formula - e.lambda_numeric).abs() > 1e-9 {
            return Err(HamError::InvalidInstance(format!(
                "restricted-energy routes disagree on string {:?}: {} vs {}",
                e.string, e.lambda_formula, e.lambda_numeric
            )));
        }
    }
    let lambda = entries
        .iter()
        .map(|e| e.lambda_numeric)
        .fold(f64::INFINITY, f64::min);
    let best = entries
        .iter()
        .min_by(|a, b| a.lambda_numeric.total_cmp(&b.lambda_numeric))
        .unwrap();
    let global_min_on_correct = best.correct
        || entries
            .iter()
            .any(|e| e.correct && (e.lambda_numeric - lambda).abs() <= 1e-9);
    let min_incorrect_margin = entries
        .iter()
        .filter(|e| !e.correct)
        .map(|e| e.lambda_numeric - lambda)
        .fold(f64::INFINITY, f64::min);
    let pass = global_min_on_correct && min_incorrect_margin >= epsilon - 1e-9;
    Ok(QueryGapReport {
        epsilon,
        lambda,
        entries,
        min_incorrect_margin,
        global_min_on_correct,
        pass,
    })
}

/// Minimum energy of the query Hamiltonian restricted to the sector with the
/// X register fixed to `string`: diagonalize sum_i (contribution on Y_i).
fn restricted_min_energy(queries: &[QueryInstance], string: &[bool]) -> Result<f64> {
    // assemble the restricted operator on the tensor product of the Y spaces
    let mut sites: Vec<(SiteId, usize)> = Vec::new();
    let mut next: SiteId = 0;
    let mut maps = Vec::new();
    for q in queries {
        let mut map = std::collections::BTreeMap::new();
        for &(old, dim) in q.hamiltonian.layout.sites() {
            sites.push((next, dim));
            map.insert(old, next);
            next += 1;
        }
        maps.push(map);
    }
    let layout = RegisterLayout::new(sites)?;
    let mut constant = 0.0;
    let mut terms = Vec::new();
    for (i, q) in queries.iter().enumerate() {
        if string[i] {
            for t in &q.hamiltonian.terms {
                let support = t.support.iter().map(|s| maps[i][s]).collect();
                terms.push(LocalTerm::new(support, t.block.clone(), t.weight)?);
            }
        } else {
            constant += (q.a + q.b) / 2.0;
        }
    }
    let h = Hamiltonian::new(layout, terms)?;
    let lam = if h.terms.is_empty() {
        0.0
    } else {
        spectral::min_eigenvalue(&h, 1e-10)?.lambda_min
    };
    Ok(lam + constant)
}

/// A P machine making m parallel queries: a reversible circuit consuming the
/// m answer bits (wires 0..m-1) plus zeroed ancillas.
#[derive(Debug, Clone)]
pub struct ParallelOracleComputation {
    pub circuit: ReversibleCircuit,
    pub queries: Vec<QueryInstance>,
}

impl ParallelOracleComputation {
    pub fn new(circuit: ReversibleCircuit, queries: Vec<QueryInstance>) -> Result<Self> {
        if circuit.width < queries.len() {
            return Err(HamError::InvalidInstance(format!(
                "circuit width {} cannot consume {} query answers",
                circuit.width,
                queries.len()
            )));
        }
        Ok(Self { circuit, queries })
    }

    pub fn num_queries(&self) -> usize {
        self.queries.len()
    }
}

#[derive(Debug, Clone)]
pub struct MachineRun {
    pub accept: bool,
    pub correct_strings: Vec<Vec<bool>>,
    pub statuses: Vec<QueryStatus>,
}

/// Evaluate the circuit on every correct query string; the P machine must
/// output the same answer on all of them, otherwise the instance is ill-formed.
pub fn run_parallel_oracle_machine(comp: &ParallelOracleComputation) -> Result<MachineRun> {
    let m = comp.num_queries();
    let statuses: Vec<QueryStatus> = comp
        .queries
        .iter()
        .map(|q| classify_query(q).map(|v| v.status))
        .collect::<Result<_>>()?;
    let mut correct_strings = vec![Vec::new()];
    for &s in &statuses {
        let opts = correct_answers(s);
        let mut next = Vec::with_capacity(correct_strings.len() * opts.len());
        for prefix in &correct_strings {
            for &bit in opts {
                let mut s2 = prefix.clone();
                s2.push(bit);
                next.push(s2);
            }
        }
        correct_strings = next;
    }
    let mut out: Option<bool> = None;
    for s in &correct_strings {
        let mut input = vec![false; comp.circuit.width];
        input[..m].copy_from_slice(s);
        let o = comp.circuit.output(&input);
        match out {
            None => out = Some(o),
            Some(prev) if prev != o => return Err(HamError::OutputDisagreement),
            _ => {}
        }
    }
    Ok(MachineRun {
        accept: out.expect("at least one correct string exists"),
        correct_strings,
        statuses,
    })
}

/// How the stand-in oracle answers promise-violating queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryPolicy {
    AlwaysYes,
    AlwaysNo,
    /// adversarial per-call coin from the seeded generator
    Coin,
}

impl std::str::FromStr for AdversaryPolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "yes" => Ok(Self::AlwaysYes),
            "no" => Ok(Self::AlwaysNo),
            "coin" => Ok(Self::Coin),
            other => Err(format!("unknown adversary policy {other:?}")),
        }
    }
}

/// Exact-diagonalization oracle with an adversary policy for invalid queries.
pub struct StandInOracle {
    pub policy: AdversaryPolicy,
    rng: ChaCha8Rng,
    pub calls: usize,
}

impl StandInOracle {
    pub fn new(policy: AdversaryPolicy, seed: u64) -> Self {
        Self {
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            calls: 0,
        }
    }

    pub fn answer(&mut self, q: &QueryInstance) -> Result<(bool, QueryStatus, f64)> {
        self.calls += 1;
        let v = classify_query(q)?;
        let ans = match v.status {
            QueryStatus::Yes => true,
            QueryStatus::No => false,
            QueryStatus::Invalid => match self.policy {
                AdversaryPolicy::AlwaysYes => true,
                AdversaryPolicy::AlwaysNo => false,
                AdversaryPolicy::Coin => self.rng.gen_bool(0.5),
            },
        };
        Ok((ans, v.status, v.lambda))
    }
}

#[derive(Debug, Clone)]
pub struct TranscriptEntry {
    pub a: f64,
    pub b: f64,
    pub answer: bool,
    pub invalid: bool,
}

#[derive(Debug, Clone)]
pub struct AdaptiveOutcome {
    pub accept: bool,
    pub transcript: Vec<TranscriptEntry>,
    pub mu: f64,
    pub epsilon: f64,
    pub lambda_star: f64,
    /// |(b' - a') - delta (b - a)/2|, which the threshold identity pins to 0
    pub threshold_identity_defect: f64,
    /// binary-search query count (excludes the final query)
    pub search_queries: usize,
    /// transcript-length bound ceil(log2(2 * normbound / epsilon)) + 2,
    /// covering the search plus the final query
    pub transcript_bound: usize,
}

/// Decide an APX-SIM instance with a logarithmic number of adaptive threshold
/// queries: compute a lower bound mu on lambda(A), binary-search lambda(H) to
/// within epsilon = delta (b - a) / (2 (b - mu)), then issue the single final
/// query H' = (b - mu) H + delta A with thresholds
/// a' = (lambda* + epsilon)(b - mu) + delta a, b' = lambda* (b - mu) + delta b.
pub fn decide_apxsim_adaptive(
    inst: &ApxSimInstance,
    oracle: &mut StandInOracle,
) -> Result<AdaptiveOutcome> {
    if inst.b <= inst.a || inst.delta <= 0.0 {
        return Err(HamError::InvalidInstance(
            "adaptive decision needs b > a and delta > 0".into(),
        ));
    }
    let mut transcript = Vec::new();

    // mu: brute force when the observable acts on few qubits, else by binary
    // search against the oracle
    let obs_sites: std::collections::BTreeSet<SiteId> = inst
        .observable
        .terms
        .iter()
        .flat_map(|t| t.support.iter().cloned())
        .collect();
    let mu = if obs_sites.len() <= 8 {
        spectral::min_eigenvalue(&inst.observable, 1e-10)?.lambda_min - 1e-9
    } else {
        binary_search_lambda(&inst.observable, 1e-6, oracle, &mut transcript)?.0
    };
    if inst.b < mu {
        // lambda(A) >= mu > b: no state can have <A> <= a; reject outright
        return Ok(AdaptiveOutcome {
            accept: false,
            transcript,
            mu,
            epsilon: f64::NAN,
            lambda_star: f64::NAN,
            threshold_identity_defect: 0.0,
            search_queries: 0,
            transcript_bound: 0,
        });
    }
    let epsilon = inst.delta * (inst.b - inst.a) / (2.0 * (inst.b - mu));

    let before = transcript.len();
    let (lambda_star, search_bound) =
        binary_search_lambda(&inst.hamiltonian, epsilon, oracle, &mut transcript)?;
    let search_queries = transcript.len() - before;

    // final query: H' = (b - mu) H + delta A
    let h_part = inst.hamiltonian.scaled(inst.b - mu);
    let a_part = inst.observable.scaled(inst.delta);
    let h_prime = combine_on_disjoint_check(&h_part, &a_part)?;
    let a_prime = (lambda_star + epsilon) * (inst.b - mu) + inst.delta * inst.a;
    let b_prime = lambda_star * (inst.b - mu) + inst.delta * inst.b;
    let identity_defect =
        ((b_prime - a_prime) - inst.delta * (inst.b - inst.a) / 2.0).abs();

    let final_q = QueryInstance::new(h_prime, a_prime, b_prime)?;
    let (ans, status, _lam) = oracle.answer(&final_q)?;
    transcript.push(TranscriptEntry {
        a: a_prime,
        b: b_prime,
        answer: ans,
        invalid: status == QueryStatus::Invalid,
    });

    Ok(AdaptiveOutcome {
        accept: ans,
        transcript,
        mu,
        epsilon,
        lambda_star,
        threshold_identity_defect: identity_defect,
        search_queries,
        transcript_bound: search_bound + 1,
    })
}

fn combine_on_disjoint_check(h: &Hamiltonian, a: &Hamiltonian) -> Result<Hamiltonian> {
    if h.layout != a.layout {
        return Err(HamError::InvalidInstance(
            "H and A must share a layout".into(),
        ));
    }
    h.add(a)
}

/// Binary search for lambda* with lambda(H) in [lambda*, lambda* + eps], using
/// promise queries (H, mid - eps/4, mid + eps/4): a YES answer certifies
/// lambda < mid + eps/4, a NO answer certifies lambda > mid - eps/4. The
/// bracket starts at the triangle-inequality norm bound. Each step multiplies
/// the bracket width by 1/2 and adds eps/4, so the search finishes within
/// ceil(log2(2 normbound / eps)) + 1 queries; that budget is returned.
fn binary_search_lambda(
    h: &Hamiltonian,
    eps: f64,
    oracle: &mut StandInOracle,
    transcript: &mut Vec<TranscriptEntry>,
) -> Result<(f64, usize)> {
    let bound = h.norm_bound()?.max(eps);
    let mut lo = -bound;
    let mut hi = bound;
    let budget = ((2.0 * bound / eps).log2().ceil() as usize) + 1;
    let mut used = 0usize;
    while hi - lo > eps {
        if used >= budget {
            return Err(HamError::NoConvergence(used));
        }
        let mid = 0.5 * (lo + hi);
        let q = QueryInstance::new(h.clone(), mid - eps / 4.0, mid + eps / 4.0)?;
        let (ans, status, _) = oracle.answer(&q)?;
        transcript.push(TranscriptEntry {
            a: mid - eps / 4.0,
            b: mid + eps / 4.0,
            answer: ans,
            invalid: status == QueryStatus::Invalid,
        });
        used += 1;
        if ans {
            hi = mid + eps / 4.0;
        } else {
            lo = mid - eps / 4.0;
        }
    }
    Ok((lo, budget))
}

/// One step of an adaptive oracle machine.
pub enum AdaptiveStep {
    Query(QueryInstance),
    Output(bool),
}

/// An adaptive machine: given the answers received so far, produce the next
/// query or the final output.
pub trait AdaptiveMachine {
    fn step(&self, answers: &[bool]) -> AdaptiveStep;
}

pub const DEFAULT_DEPTH_CAP: usize = 12;

#[derive(Debug, Clone)]
pub struct ParallelExpansion {
    /// deduplicated queries, in first-encounter order
    pub queries: Vec<QueryInstance>,
    /// per answer path: (path bits, indices of the queries asked, final output)
    pub decision_map: Vec<(Vec<bool>, Vec<usize>, bool)>,
}

impl ParallelExpansion {
    /// Replay a full parallel answer vector through the decision map.
    pub fn decide(&self, parallel_answers: &[bool]) -> Result<bool> {
        'path: for (path, qidx, out) in &self.decision_map {
            for (k, &qi) in qidx.iter().enumerate() {
                if parallel_answers[qi] != path[k] {
                    continue 'path;
                }
            }
            return Ok(*out);
        }
        Err(HamError::InvalidInstance(
            "no decision path matches the parallel answers".into(),
        ))
    }
}

/// Expand an adaptive machine of depth <= q into the parallel list of every
/// query reachable over any answer path, plus a decision map.
pub fn adaptive_to_parallel_expansion(
    machine: &dyn AdaptiveMachine,
    depth_cap: usize,
) -> Result<ParallelExpansion> {
    let mut queries: Vec<QueryInstance> = Vec::new();
    let mut keys: Vec<String> = Vec::new();
    let mut decision_map = Vec::new();

    let mut stack: Vec<(Vec<bool>, Vec<usize>)> = vec![(Vec::new(), Vec::new())];
    while let Some((path, qidx)) = stack.pop() {
        match machine.step(&path) {
            AdaptiveStep::Output(out) => {
                decision_map.push((path, qidx, out));
            }
            AdaptiveStep::Query(q) => {
                if path.len() >= depth_cap {
                    return Err(HamError::DepthCap(path.len() + 1, depth_cap));
                }
                let key = query_key(&q);
                let idx = match keys.iter().position(|k| k == &key) {
                    Some(i) => i,
                    None => {
                        keys.push(key);
                        queries.push(q);
                        queries.len() - 1
                    }
                };
                for ans in [false, true] {
                    let mut p = path.clone();
                    p.push(ans);
                    let mut qi = qidx.clone();
                    qi.push(idx);
                    stack.push((p, qi));
                }
            }
        }
    }
    decision_map.sort();
    Ok(ParallelExpansion {
        queries,
        decision_map,
    })
}

fn query_key(q: &QueryInstance) -> String {
    let mut s = String::new();
    let _ = write!(s, "QUERY {} {}\n", q.a, q.b);
    textio::write_hamiltonian_into(&q.hamiltonian, &mut s);
    s
}

/// Serialize a query batch: QUERY headers followed by each query's Hamiltonian.
pub fn write_query_batch(queries: &[QueryInstance]) -> String {
    let mut out = String::new();
    for q in queries {
        let _ = writeln!(out, "QUERY {} {}", q.a, q.b);
        textio::write_hamiltonian_into(&q.hamiltonian, &mut out);
    }
    out
}

pub fn read_query_batch(text: &str) -> Result<Vec<QueryInstance>> {
    let mut p = LineParser::new(text);
    let mut out = Vec::new();
    while let Some(line) = p.peek() {
        if !line.starts_with("QUERY") {
            return Err(p.err(format!("expected QUERY record, got {line:?}")));
        }
        let vals = textio::parse_keyword_floats(&mut p, "QUERY", 2)?;
        let h = textio::parse_hamiltonian(&mut p)?;
        out.push(QueryInstance::new(h, vals[0], vals[1])?);
    }
    if out.is_empty() {
        return Err(p.err("query batch holds no queries"));
    }
    Ok(out)
}

#[cfg(test)]
pub mod fixtures {
    use super::*;

    /// One-qubit query with H_Y = |1><1|: lambda = 0 (YES at a = 1/4).
    pub fn yes_query() -> QueryInstance {
        let h = Hamiltonian::new(
            RegisterLayout::qubits(1),
            vec![LocalTerm::new(vec![0], qubit_proj(1), 1.0).unwrap()],
        )
        .unwrap();
        QueryInstance::new(h, 0.25, 0.75).unwrap()
    }

    /// One-qubit query with H_Y = I: lambda = 1 (NO at b = 3/4).
    pub fn no_query() -> QueryInstance {
        let h = Hamiltonian::new(
            RegisterLayout::qubits(1),
            vec![LocalTerm::new(vec![0], ndarray::Array2::eye(2), 1.0).unwrap()],
        )
        .unwrap();
        QueryInstance::new(h, 0.25, 0.75).unwrap()
    }

    /// One-qubit query with H_Y = I/2: lambda = 1/2 strictly inside (a, b).
    pub fn invalid_query() -> QueryInstance {
        let h = Hamiltonian::new(
            RegisterLayout::qubits(1),
            vec![LocalTerm::new(vec![0], ndarray::Array2::eye(2), 0.5).unwrap()],
        )
        .unwrap();
        QueryInstance::new(h, 0.25, 0.75).unwrap()
    }

    /// Random 2-qubit query avoiding the invalid window, with the promise gap
    /// at least `min_gap`.
    pub fn random_valid_query(rng: &mut ChaCha8Rng, min_gap: f64) -> QueryInstance {
        let layout = RegisterLayout::qubits(2);
        let t = LocalTerm::new(vec![0, 1], linalg::random_hermitian(4, rng), 1.0).unwrap();
        let h = Hamiltonian::new(layout, vec![t]).unwrap();
        let lam = spectral::min_eigenvalue(&h, 1e-12).unwrap().lambda_min;
        let gap = rng.gen_range(min_gap..1.0);
        // place (a, b) so the query is YES or NO but never INVALID
        let a = if rng.gen_bool(0.5) {
            lam + rng.gen_range(0.01..0.5) // YES: lambda <= a
        } else {
            lam - gap - rng.gen_range(0.01..0.5) // NO: lambda >= a + gap
        };
        QueryInstance::new(h, a, a + gap).unwrap()
    }
}
