//! Cook-Levin circuit-to-Hamiltonian construction: the diagonal propagation
//! Hamiltonian over a time-by-wire grid of qubits, the full hardness instance
//! H = H1 + H2 with observable Z on the output qubit, and the spatially
//! sparse variant with multi-qubit control registers and ferromagnetic
//! agreement chains.

use crate::apxsim::ApxSimInstance;
use crate::circuit::ReversibleCircuit;
use crate::error::{HamError, Result};
use crate::layout::{RegisterLayout, SiteId};
use crate::linalg::{self, c, pauli_z, qubit_proj};
use crate::operator::{Hamiltonian, LocalTerm};
use crate::query::{self, QueryInstance};
use crate::spectral;
use ndarray::Array2;
use num_complex::Complex64 as C64;

/// (rows) x (cols) grid of qubit sites; row t holds the circuit state after
/// the first t gates, so rows = gate count + 1 and row 0 is the input row.
#[derive(Debug, Clone)]
pub struct GridLayout {
    pub rows: usize,
    pub cols: usize,
    /// site ids indexed by [row][col]
    pub sites: Vec<Vec<SiteId>>,
}

impl GridLayout {
    pub fn new(rows: usize, cols: usize, first_id: SiteId) -> Self {
        let mut sites = Vec::with_capacity(rows);
        let mut id = first_id;
        for _ in 0..rows {
            let mut row = Vec::with_capacity(cols);
            for _ in 0..cols {
                row.push(id);
                id += 1;
            }
            sites.push(row);
        }
        Self { rows, cols, sites }
    }

    pub fn site(&self, t: usize, i: usize) -> SiteId {
        self.sites[t][i]
    }

    pub fn all_sites(&self) -> Vec<(SiteId, usize)> {
        self.sites
            .iter()
            .flat_map(|row| row.iter().map(|&s| (s, 2)))
            .collect()
    }
}

/// |01><01| + |10><10| on an ordered qubit pair: the disagreement penalty.
pub fn disagreement_block() -> Array2<C64> {
    let mut m = Array2::zeros((4, 4));
    m[[1, 1]] = c(1.0, 0.0);
    m[[2, 2]] = c(1.0, 0.0);
    m
}

/// h_U = I - sum_x |x><x|_t (x) |U(x)><U(x)|_{t+1} for a reversible gate.
fn gate_block(table: &[usize]) -> Array2<C64> {
    let k = table.len();
    let dim = k * k;
    let mut m: Array2<C64> = Array2::eye(dim);
    for (x, &y) in table.iter().enumerate() {
        let idx = x * k + y; // row-t digits most significant
        m[[idx, idx]] -= c(1.0, 0.0);
    }
    m
}

/// Build H_prop for a circuit on its grid (Eq. of the propagation Hamiltonian):
/// per time step, the gate term h_{U_t} plus no-change penalties on every wire
/// the gate does not touch. The result is a sum of 0/1 diagonal projectors.
pub fn build_prop_hamiltonian(circuit: &ReversibleCircuit, grid: &GridLayout) -> Result<Hamiltonian> {
    if grid.rows != circuit.gates.len() + 1 {
        return Err(HamError::InvalidInstance(format!(
            "grid has {} rows but the circuit has {} gates",
            grid.rows,
            circuit.gates.len()
        )));
    }
    if grid.cols != circuit.width {
        return Err(HamError::InvalidInstance(format!(
            "grid has {} columns but the circuit width is {}",
            grid.cols, circuit.width
        )));
    }
    let mut layout = RegisterLayout::new(grid.all_sites())?;
    layout.add_register(
        "W",
        grid.sites.iter().flatten().cloned().collect(),
    )?;
    let mut terms = Vec::new();
    for (t, gate) in circuit.gates.iter().enumerate() {
        // gate term on (row t support, row t+1 support)
        let mut support: Vec<SiteId> = gate.support.iter().map(|&i| grid.site(t, i)).collect();
        support.extend(gate.support.iter().map(|&i| grid.site(t + 1, i)));
        terms.push(LocalTerm::new(support, gate_block(&gate.table), 1.0)?);
        // no-change penalties on untouched wires
        for i in 0..circuit.width {
            if !gate.support.contains(&i) {
                terms.push(LocalTerm::new(
                    vec![grid.site(t, i), grid.site(t + 1, i)],
                    disagreement_block(),
                    1.0,
                )?);
            }
        }
    }
    Hamiltonian::new(layout, terms)
}

/// The history of a circuit on input x: row t = U_t ... U_1 (x).
pub fn history_string(circuit: &ReversibleCircuit, x: &[bool]) -> Result<Vec<Vec<bool>>> {
    if x.len() != circuit.width {
        return Err(HamError::DimensionMismatch {
            expected: circuit.width,
            got: x.len(),
        });
    }
    let mut rows = vec![x.to_vec()];
    let mut bits = x.to_vec();
    for g in &circuit.gates {
        g.apply(&mut bits);
        rows.push(bits.clone());
    }
    Ok(rows)
}

/// The basis index of a history string in the grid layout (row-major, site 0
/// most significant).
pub fn history_index(_grid: &GridLayout, rows: &[Vec<bool>]) -> usize {
    let mut idx = 0usize;
    for row in rows {
        for &b in row {
            idx = (idx << 1) | usize::from(b);
        }
    }
    idx
}

/// Layout bookkeeping for the hardness instance.
#[derive(Debug, Clone)]
pub struct HardnessInstance {
    pub instance: ApxSimInstance,
    pub grid: GridLayout,
    pub x_sites: Vec<SiteId>,
    pub output_site: SiteId,
    pub epsilon: f64,
    pub h1_scale: f64,
}

/// Build the full hardness instance for a parallel oracle computation:
/// H = H1 + H2 on W (x) X (x) Y, where H2 is the query Hamiltonian, H1 is the
/// Cook-Levin Hamiltonian with the input row copied from the X register, the
/// observable is Z on the output qubit, and (a, b, delta) = (-1/2, 1/2, eps/16).
/// H1 is pre-scaled by ceil(lambda(H2) + eps + 1) so that the low-energy
/// sector is governed by H2.
pub fn build_hardness_instance(comp: &query::ParallelOracleComputation) -> Result<HardnessInstance> {
    let m = comp.num_queries();
    let qh = query::build_query_hamiltonian(&comp.queries)?;
    let epsilon = comp
        .queries
        .iter()
        .map(|q| (q.b - q.a) / 2.0)
        .fold(f64::INFINITY, f64::min);

    // combined layout: all X/Y sites first (ids preserved), then the W grid
    let query_sites: Vec<(SiteId, usize)> = qh.hamiltonian.layout.sites().to_vec();
    let first_w_id = query_sites.iter().map(|&(id, _)| id).max().unwrap() + 1;
    let grid = GridLayout::new(comp.circuit.gates.len() + 1, comp.circuit.width, first_w_id);
    let mut sites = query_sites;
    sites.extend(grid.all_sites());
    let mut layout = RegisterLayout::new(sites)?;
    for (name, ids) in qh.hamiltonian.layout.registers() {
        layout.add_register(name, ids.clone())?;
    }
    layout.add_register("W", grid.sites.iter().flatten().cloned().collect())?;

    // H2: the query Hamiltonian, re-hosted on the combined layout
    let mut h2_terms = Vec::new();
    for t in &qh.hamiltonian.terms {
        h2_terms.push(t.clone());
    }
    let h2 = Hamiltonian::new(layout.clone(), h2_terms)?;

    // H1 = H_prop + H_in on the same combined layout
    let prop = build_prop_hamiltonian(&comp.circuit, &grid)?;
    let mut h1_terms: Vec<LocalTerm> = prop.terms;
    // H_in: copy X_i onto row-0 column i, pin the other row-0 qubits to |0>
    for i in 0..comp.circuit.width {
        let w_site = grid.site(0, i);
        if i < m {
            let x_site = qh.x_sites[i];
            h1_terms.push(LocalTerm::new(
                vec![x_site, w_site],
                disagreement_block(),
                1.0,
            )?);
        } else {
            h1_terms.push(LocalTerm::new(vec![w_site], qubit_proj(1), 1.0)?);
        }
    }
    let h1 = Hamiltonian::new(layout.clone(), h1_terms)?;

    // scale H1 so that lambda(H2) + eps sits inverse-polynomially below the H1 gap
    let lambda_h2 = spectral::min_eigenvalue(&h2, 1e-10)?.lambda_min;
    let h1_scale = (lambda_h2 + epsilon + 1.0).ceil().max(1.0);
    let h = h1.scaled(h1_scale).add(&h2)?;

    let output_site = grid.site(grid.rows - 1, comp.circuit.output_bit);
    let observable = Hamiltonian::new(
        layout,
        vec![LocalTerm::new(vec![output_site], pauli_z(), 1.0)?],
    )?;

    Ok(HardnessInstance {
        instance: ApxSimInstance {
            hamiltonian: h,
            observable,
            h_locality: 4,
            obs_locality: 1,
            a: -0.5,
            b: 0.5,
            delta: epsilon / 16.0,
        },
        grid,
        x_sites: qh.x_sites,
        output_site,
        epsilon,
        h1_scale,
    })
}

// ---------------------------------------------------------------------------
// Spatially sparse variant
// ---------------------------------------------------------------------------

/// A query presented on a 2D lattice: the Hamiltonian is a sum of 2-qubit
/// terms on the edges of a rows x cols grid.
#[derive(Debug, Clone)]
pub struct LatticeQuery {
    pub rows: usize,
    pub cols: usize,
    /// ((r1,c1),(r2,c2), block) for nearest-neighbor edges
    pub edges: Vec<((usize, usize), (usize, usize), Array2<C64>)>,
    pub a: f64,
    pub b: f64,
}

impl LatticeQuery {
    pub fn num_qubits(&self) -> usize {
        self.rows * self.cols
    }

    pub fn qubit_index(&self, r: usize, col: usize) -> usize {
        r * self.cols + col
    }

    /// The plain Hamiltonian on rows*cols qubits (site ids = qubit indices).
    pub fn hamiltonian(&self) -> Result<Hamiltonian> {
        let layout = RegisterLayout::qubits(self.num_qubits());
        let mut terms = Vec::new();
        for (p1, p2, block) in &self.edges {
            let s1 = self.qubit_index(p1.0, p1.1) as SiteId;
            let s2 = self.qubit_index(p2.0, p2.1) as SiteId;
            terms.push(LocalTerm::new(vec![s1, s2], block.clone(), 1.0)?);
        }
        Hamiltonian::new(layout, terms)
    }

    pub fn to_query_instance(&self) -> Result<QueryInstance> {
        QueryInstance::new(self.hamiltonian()?, self.a, self.b)
    }
}

/// Interaction hypergraph with planar coordinates for sparsity checks.
#[derive(Debug, Clone)]
pub struct InteractionGraph {
    /// coordinates per site
    pub coords: Vec<(SiteId, f64, f64)>,
    /// hyperedges as site lists
    pub hyperedges: Vec<Vec<SiteId>>,
    pub max_arity: usize,
}

#[derive(Debug, Clone)]
pub struct SparsityReport {
    pub max_degree: usize,
    pub max_overlap: usize,
    pub max_area: f64,
    pub degree_cap: usize,
    pub overlap_cap: usize,
    pub pass: bool,
}

impl InteractionGraph {
    pub fn coord_of(&self, site: SiteId) -> Option<(f64, f64)> {
        self.coords
            .iter()
            .find(|&&(s, _, _)| s == site)
            .map(|&(_, x, y)| (x, y))
    }

    /// Plain-text export: COORD lines then EDGE lines.
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        for &(s, x, y) in &self.coords {
            let _ = writeln!(out, "COORD {s} {x} {y}");
        }
        for e in &self.hyperedges {
            let _ = write!(out, "EDGE");
            for s in e {
                let _ = write!(out, " {s}");
            }
            let _ = writeln!(out);
        }
        out
    }
}

/// Degree, pairwise straight-line-drawing overlap and hyperedge area of the
/// graph, checked against caps. A hyperedge is drawn as the convex hull of its
/// vertex coordinates; two hyperedges overlap when their hulls intersect at a
/// point that is not a shared declared vertex.
pub fn check_spatial_sparsity(
    graph: &InteractionGraph,
    degree_cap: usize,
    overlap_cap: usize,
) -> SparsityReport {
    let mut degree = std::collections::BTreeMap::new();
    for e in &graph.hyperedges {
        for &s in e {
            *degree.entry(s).or_insert(0usize) += 1;
        }
    }
    let max_degree = degree.values().cloned().max().unwrap_or(0);

    let hulls: Vec<Vec<(f64, f64)>> = graph
        .hyperedges
        .iter()
        .map(|e| {
            convex_hull(
                &e.iter()
                    .map(|&s| graph.coord_of(s).expect("coordinate for every site"))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let mut overlap_counts = vec![0usize; hulls.len()];
    for i in 0..hulls.len() {
        for j in (i + 1)..hulls.len() {
            let shared: Vec<(f64, f64)> = graph.hyperedges[i]
                .iter()
                .filter(|s| graph.hyperedges[j].contains(s))
                .map(|&s| graph.coord_of(s).unwrap())
                .collect();
            if hulls_overlap(&hulls[i], &hulls[j], &shared) {
                overlap_counts[i] += 1;
                overlap_counts[j] += 1;
            }
        }
    }
    let max_overlap = overlap_counts.into_iter().max().unwrap_or(0);
    let max_area = hulls.iter().map(|h| hull_area(h)).fold(0.0f64, f64::max);

    SparsityReport {
        max_degree,
        max_overlap,
        max_area,
        degree_cap,
        overlap_cap,
        pass: max_degree <= degree_cap && max_overlap <= overlap_cap,
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().chain(pts.iter().rev().skip(1)) {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 1e-12 {
            let was_lower = hull.len() < pts.len(); // keep collinear simple
            hull.pop();
            if !was_lower && hull.is_empty() {
                break;
            }
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 3 {
        // collinear set: keep the two extremes
        let mut v = vec![pts[0], pts[pts.len() - 1]];
        v.dedup();
        return v;
    }
    hull
}

fn hull_area(hull: &[(f64, f64)]) -> f64 {
    if hull.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..hull.len() {
        let (x1, y1) = hull[i];
        let (x2, y2) = hull[(i + 1) % hull.len()];
        s += x1 * y2 - x2 * y1;
    }
    s.abs() / 2.0
}

fn seg_intersect(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0)) {
        return true;
    }
    let on = |a: (f64, f64), b: (f64, f64), p: (f64, f64)| -> bool {
        cross(a, b, p).abs() < 1e-9
            && p.0 >= a.0.min(b.0) - 1e-9
            && p.0 <= a.0.max(b.0) + 1e-9
            && p.1 >= a.1.min(b.1) - 1e-9
            && p.1 <= a.1.max(b.1) + 1e-9
    };
    (d1.abs() < 1e-9 && on(q1, q2, p1))
        || (d2.abs() < 1e-9 && on(q1, q2, p2))
        || (d3.abs() < 1e-9 && on(p1, p2, q1))
        || (d4.abs() < 1e-9 && on(p1, p2, q2))
}

fn point_in_hull(p: (f64, f64), hull: &[(f64, f64)]) -> bool {
    if hull.len() < 3 {
        if hull.len() == 2 {
            return seg_intersect(hull[0], hull[1], p, p);
        }
        return hull.len() == 1 && (hull[0].0 - p.0).abs() < 1e-9 && (hull[0].1 - p.1).abs() < 1e-9;
    }
    let mut sign = 0i8;
    for i in 0..hull.len() {
        let c = cross(hull[i], hull[(i + 1) % hull.len()], p);
        if c.abs() < 1e-9 {
            continue;
        }
        let s = if c > 0.0 { 1 } else { -1 };
        if sign == 0 {
            sign = s;
        } else if sign != s {
            return false;
        }
    }
    true
}

/// Do two convex hulls intersect beyond their shared declared vertices?
fn hulls_overlap(a: &[(f64, f64)], b: &[(f64, f64)], shared: &[(f64, f64)]) -> bool {
    let near_shared = |p: (f64, f64)| {
        shared
            .iter()
            .any(|&(x, y)| (x - p.0).abs() < 1e-9 && (y - p.1).abs() < 1e-9)
    };
    let edges = |h: &[(f64, f64)]| -> Vec<((f64, f64), (f64, f64))> {
        match h.len() {
            0 | 1 => vec![],
            2 => vec![(h[0], h[1])],
            n => (0..n).map(|i| (h[i], h[(i + 1) % n])).collect(),
        }
    };
    // vertex containment
    for &p in a {
        if point_in_hull(p, b) && !near_shared(p) {
            return true;
        }
    }
    for &p in b {
        if point_in_hull(p, a) && !near_shared(p) {
            return true;
        }
    }
    // edge crossings away from shared vertices
    for (p1, p2) in edges(a) {
        for (q1, q2) in edges(b) {
            if seg_intersect(p1, p2, q1, q2) {
                // tolerate touching exactly at a shared vertex
                let touch_points = [p1, p2, q1, q2];
                let all_touch_shared = touch_points
                    .iter()
                    .filter(|&&p| {
                        seg_intersect(q1, q2, p, p) || seg_intersect(p1, p2, p, p)
                    })
                    .all(|&p| near_shared(p));
                if !all_touch_shared {
                    return true;
                }
            }
        }
    }
    false
}

#[derive(Debug, Clone)]
pub struct SparseHardnessInstance {
    pub instance: ApxSimInstance,
    pub graph: InteractionGraph,
    pub grid: GridLayout,
    /// X_i(j) site ids per query: index 0 is the W-adjacent end of the chain
    pub x_chains: Vec<Vec<SiteId>>,
    pub output_site: SiteId,
    pub epsilon: f64,
    pub delta_i: Vec<f64>,
    pub h1_scale: f64,
}

/// Spatially sparse hardness instance: each query Hamiltonian lives on a 2D
/// lattice, its single control qubit is replaced by a register X_i with one
/// qubit per lattice qubit plus a wire of qubits up to the W grid, every edge
/// term is controlled on the X_i qubit mirroring its first endpoint
/// (g(j,k) = j), and ferromagnetic chains H_3 at strength
/// Delta_i = delta + sum of edge norms + 1 force each X_i register into the
/// all-0/all-1 sector.
pub fn build_spatially_sparse_instance(
    circuit: &ReversibleCircuit,
    lattices: &[LatticeQuery],
) -> Result<SparseHardnessInstance> {
    if lattices.is_empty() {
        return Err(HamError::InvalidInstance("no queries supplied".into()));
    }
    let m = lattices.len();
    if circuit.width < m {
        return Err(HamError::InvalidInstance(
            "circuit narrower than the query count".into(),
        ));
    }
    let epsilon = lattices
        .iter()
        .map(|q| (q.b - q.a) / 2.0)
        .fold(f64::INFINITY, f64::min);
    let delta = epsilon / 16.0;

    // --- site allocation and coordinates (Fig.-3 style layout) ---
    // W grid on top; below it one slot per query holding the Y lattice with
    // the mirrored X lattice offset by (0.4, -0.4), plus a vertical wire of X
    // qubits from the lattice up to W's input row.
    let mut next_id: SiteId = 0;
    let mut sites: Vec<(SiteId, usize)> = Vec::new();
    let mut coords: Vec<(SiteId, f64, f64)> = Vec::new();

    let grid = GridLayout::new(circuit.gates.len() + 1, circuit.width, 0);
    next_id += (grid.rows * grid.cols) as SiteId;
    for t in 0..grid.rows {
        for i in 0..grid.cols {
            sites.push((grid.site(t, i), 2));
            coords.push((grid.site(t, i), i as f64 * 2.0, (t + 1) as f64 * 2.0));
        }
    }

    let wire_len = 3usize; // X-wire qubits between the lattice block and W
    let mut y_sites: Vec<Vec<SiteId>> = Vec::new(); // per query, per lattice qubit
    let mut x_mirror: Vec<Vec<SiteId>> = Vec::new(); // per query, per lattice qubit
    let mut x_chains: Vec<Vec<SiteId>> = Vec::new(); // wire first (W end), then mirrors
    for (qi, lq) in lattices.iter().enumerate() {
        let x_off = qi as f64 * (lq.cols as f64 + 4.0) * 2.0;
        let mut ys = Vec::new();
        let mut xs = Vec::new();
        for r in 0..lq.rows {
            for col in 0..lq.cols {
                let y_id = next_id;
                next_id += 1;
                sites.push((y_id, 2));
                coords.push((
                    y_id,
                    x_off + col as f64 * 2.0 + 0.8,
                    -((r + 2) as f64) * 2.0 - 0.8,
                ));
                ys.push(y_id);
                let x_id = next_id;
                next_id += 1;
                sites.push((x_id, 2));
                coords.push((x_id, x_off + col as f64 * 2.0, -((r + 2) as f64) * 2.0));
                xs.push(x_id);
            }
        }
        // wire from W down to the lattice (index 0 nearest W)
        let mut chain = Vec::new();
        for w in 0..wire_len {
            let id = next_id;
            next_id += 1;
            sites.push((id, 2));
            coords.push((id, x_off, (w as f64) * -1.0 - 1.0));
            chain.push(id);
        }
        chain.extend(xs.iter().cloned());
        y_sites.push(ys);
        x_mirror.push(xs);
        x_chains.push(chain);
    }

    let mut layout = RegisterLayout::new(sites)?;
    layout.add_register("W", grid.sites.iter().flatten().cloned().collect())?;
    for (qi, (ys, chain)) in y_sites.iter().zip(x_chains.iter()).enumerate() {
        layout.add_register(&format!("Y{}", qi + 1), ys.clone())?;
        layout.add_register(&format!("X{}", qi + 1), chain.clone())?;
    }

    let mut hyperedges: Vec<Vec<SiteId>> = Vec::new();
    let mut terms: Vec<LocalTerm> = Vec::new();
    let mut h3_h_in_prop_terms: Vec<LocalTerm> = Vec::new();

    // --- H2: controlled lattice terms + the (a+b)/2 control term ---
    let mut delta_i = Vec::new();
    for (qi, lq) in lattices.iter().enumerate() {
        let mid = (lq.a + lq.b) / 2.0;
        let x1 = x_chains[qi][0];
        terms.push(LocalTerm::new(vec![x1], qubit_proj(0), mid)?);
        hyperedges.push(vec![x1]);
        let mut norm_sum = 0.0;
        for (p1, p2, block) in &lq.edges {
            let j = lq.qubit_index(p1.0, p1.1);
            let k = lq.qubit_index(p2.0, p2.1);
            let control = x_mirror[qi][j]; // g(j,k) = j
            let support = vec![control, y_sites[qi][j], y_sites[qi][k]];
            let ctrl_block = linalg::kron(&qubit_proj(1), block);
            terms.push(LocalTerm::new(support.clone(), ctrl_block, 1.0)?);
            hyperedges.push(support);
            norm_sum += linalg::hermitian_norm(block)?;
        }
        // --- H3: agreement chains across the X_i register ---
        let strength = delta + norm_sum + 1.0;
        delta_i.push(strength);
        // lattice-adjacent mirror pairs
        for r in 0..lq.rows {
            for col in 0..lq.cols {
                let here = x_mirror[qi][lq.qubit_index(r, col)];
                if col + 1 < lq.cols {
                    let right = x_mirror[qi][lq.qubit_index(r, col + 1)];
                    h3_h_in_prop_terms.push(LocalTerm::new(
                        vec![here, right],
                        disagreement_block(),
                        strength,
                    )?);
                    hyperedges.push(vec![here, right]);
                }
                if r + 1 < lq.rows {
                    let down = x_mirror[qi][lq.qubit_index(r + 1, col)];
                    h3_h_in_prop_terms.push(LocalTerm::new(
                        vec![here, down],
                        disagreement_block(),
                        strength,
                    )?);
                    hyperedges.push(vec![here, down]);
                }
            }
        }
        // wire pairs, connecting the wire end to the first mirror qubit
        let chain = &x_chains[qi];
        for w in 0..wire_len {
            let a = chain[w];
            let b = if w + 1 < wire_len {
                chain[w + 1]
            } else {
                x_mirror[qi][0]
            };
            h3_h_in_prop_terms.push(LocalTerm::new(vec![a, b], disagreement_block(), strength)?);
            hyperedges.push(vec![a, b]);
        }
    }

    // --- H1 = H_prop + H_in on the W grid ---
    let prop = build_prop_hamiltonian(circuit, &grid)?;
    for t in &prop.terms {
        h3_h_in_prop_terms.push(t.clone());
        hyperedges.push(t.support.clone());
    }
    for i in 0..circuit.width {
        let w_site = grid.site(0, i);
        if i < m {
            let x1 = x_chains[i][0];
            h3_h_in_prop_terms.push(LocalTerm::new(
                vec![x1, w_site],
                disagreement_block(),
                1.0,
            )?);
            hyperedges.push(vec![x1, w_site]);
        } else {
            h3_h_in_prop_terms.push(LocalTerm::new(vec![w_site], qubit_proj(1), 1.0)?);
            hyperedges.push(vec![w_site]);
        }
    }

    // scale H1 (prop + in) like the plain construction; H3 stays unscaled since
    // its strengths already dominate
    let h2 = Hamiltonian::new(layout.clone(), terms)?;
    let lambda_h2_bound = h2.norm_bound()?;
    let h1_scale = (lambda_h2_bound + epsilon + 1.0).ceil().max(1.0);
    let mut all_terms = Vec::new();
    for t in &h2.terms {
        all_terms.push(t.clone());
    }
    for t in &h3_h_in_prop_terms {
        let mut t2 = t.clone();
        // only the Cook-Levin part gets the scale; agreement chains keep theirs
        let touches_grid = t2.support.iter().any(|&s| (s as usize) < grid.rows * grid.cols);
        if touches_grid {
            t2.weight *= h1_scale;
        }
        all_terms.push(t2);
    }
    let h = Hamiltonian::new(layout.clone(), all_terms)?;

    let output_site = grid.site(grid.rows - 1, circuit.output_bit);
    let observable = Hamiltonian::new(
        layout,
        vec![LocalTerm::new(vec![output_site], pauli_z(), 1.0)?],
    )?;

    let graph = InteractionGraph {
        coords,
        hyperedges,
        max_arity: 4,
    };

    Ok(SparseHardnessInstance {
        instance: ApxSimInstance {
            hamiltonian: h,
            observable,
            h_locality: 4,
            obs_locality: 1,
            a: -0.5,
            b: 0.5,
            delta,
        },
        graph,
        grid,
        x_chains,
        output_site,
        epsilon,
        delta_i,
        h1_scale,
    })
}

/// Check [H1, H2] = 0 numerically for a built hardness instance, splitting the
/// terms by whether they touch any Y site.
pub fn commutator_norm(h1: &Hamiltonian, h2: &Hamiltonian) -> Result<f64> {
    let a = h1.to_dense()?;
    let b = h2.to_dense()?;
    let comm = &a.dot(&b) - &b.dot(&a);
    Ok(comm.iter().map(|z| z.norm()).fold(0.0f64, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::operator::StateVector;
    use crate::query::fixtures::{no_query, yes_query};
    use crate::query::ParallelOracleComputation;

    #[test]
    fn single_not_gate_nullspace() {
        // one NOT on one bit: null space of H_prop = span{|01>, |10>}
        let circuit = ReversibleCircuit::new(1, vec![Gate::not(0)], 0).unwrap();
        let grid = GridLayout::new(2, 1, 0);
        let h = build_prop_hamiltonian(&circuit, &grid).unwrap();
        let d = h.to_dense().unwrap();
        // diag entries 1 on |00>, |11>; 0 on |01>, |10>
        let expect = [1.0, 0.0, 0.0, 1.0];
        for i in 0..4 {
            assert!((d[[i, i]].re - expect[i]).abs() < 1e-12);
        }
        let vals = linalg::eigvalsh(&d).unwrap();
        assert!(vals[0].abs() < 1e-12 && vals[1].abs() < 1e-12);
        assert!((vals[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_circuit_two_bits_nullspace_dim4() {
        let circuit =
            ReversibleCircuit::new(2, vec![Gate::identity(vec![0, 1])], 0).unwrap();
        let grid = GridLayout::new(2, 2, 0);
        let h = build_prop_hamiltonian(&circuit, &grid).unwrap();
        let vals = linalg::eigvalsh(&h.to_dense().unwrap()).unwrap();
        let zeros = vals.iter().filter(|v| v.abs() < 1e-10).count();
        assert_eq!(zeros, 4); // |xx> for the four x
    }

    #[test]
    fn eigenvalues_are_nonnegative_integers() {
        let circuit = ReversibleCircuit::new(
            2,
            vec![Gate::cnot(0, 1), Gate::not(0)],
            1,
        )
        .unwrap();
        let grid = GridLayout::new(3, 2, 0);
        let h = build_prop_hamiltonian(&circuit, &grid).unwrap();
        let vals = linalg::eigvalsh(&h.to_dense().unwrap()).unwrap();
        for v in vals {
            assert!(v > -1e-10);
            assert!((v - v.round()).abs() < 1e-9, "non-integer eigenvalue {v}");
        }
    }

    #[test]
    fn history_rows_and_annihilation() {
        // CNOT(0->1) then NOT(0), x = 10: rows 10, 11, 01
        let circuit =
            ReversibleCircuit::new(2, vec![Gate::cnot(0, 1), Gate::not(0)], 1).unwrap();
        let rows = history_string(&circuit, &[true, false]).unwrap();
        assert_eq!(
            rows,
            vec![vec![true, false], vec![true, true], vec![false, true]]
        );
        let grid = GridLayout::new(3, 2, 0);
        let h = build_prop_hamiltonian(&circuit, &grid).unwrap();
        for x in [[false, false], [false, true], [true, false], [true, true]] {
            let rows = history_string(&circuit, &x).unwrap();
            let idx = history_index(&grid, &rows);
            let v = StateVector::basis_state(h.dim(), idx);
            let out = h.matvec(&v.amplitudes).unwrap();
            assert!(out.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn prop_plus_pinned_in_unique_ground_and_gap() {
        // all circuits with n <= 2 wires, <= 2 gates drawn from a fixed pool:
        // with all inputs pinned, unique ground state at 0 with gap >= 1
        let pool: Vec<Vec<Gate>> = vec![
            vec![Gate::not(0)],
            vec![Gate::cnot(0, 1)],
            vec![Gate::cnot(1, 0), Gate::not(1)],
            vec![Gate::swap(0, 1), Gate::cnot(0, 1)],
        ];
        for gates in pool {
            let width = 2;
            let circuit = ReversibleCircuit::new(width, gates, 0).unwrap();
            let grid = GridLayout::new(circuit.gates.len() + 1, width, 0);
            let prop = build_prop_hamiltonian(&circuit, &grid).unwrap();
            let mut terms = prop.terms.clone();
            for i in 0..width {
                terms
                    .push(LocalTerm::new(vec![grid.site(0, i)], qubit_proj(1), 1.0).unwrap());
            }
            let h = Hamiltonian::new(prop.layout.clone(), terms).unwrap();
            let vals = linalg::eigvalsh(&h.to_dense().unwrap()).unwrap();
            assert!(vals[0].abs() < 1e-12);
            assert!(vals[1] >= 1.0 - 1e-9, "gap {}", vals[1]);
            // the unique ground state is the history of 0^n
            let rows = history_string(&circuit, &vec![false; width]).unwrap();
            let idx = history_index(&grid, &rows);
            let v = StateVector::basis_state(h.dim(), idx);
            let out = h.matvec(&v.amplitudes).unwrap();
            assert!(out.iter().all(|z| z.norm() < 1e-12));
        }
    }

    fn copy_machine(q: QueryInstance) -> ParallelOracleComputation {
        // width 1, no gates: the answer bit is the output
        let circuit = ReversibleCircuit::new(1, vec![Gate::identity(vec![0])], 0).unwrap();
        ParallelOracleComputation::new(circuit, vec![q]).unwrap()
    }

    #[test]
    fn hardness_delta_relation() {
        let inst = build_hardness_instance(&copy_machine(yes_query())).unwrap();
        assert!((inst.instance.delta - inst.epsilon / 16.0).abs() < 1e-15);
    }

    #[test]
    fn hardness_yes_low_energy_scan() {
        let inst = build_hardness_instance(&copy_machine(yes_query())).unwrap();
        let scan = crate::apxsim::exhaustive_scan(&inst.instance).unwrap();
        // every low-energy eigenvector has <Z_out> <= -1/2
        assert!(scan.low_max_a <= -0.5 + 1e-6, "low_max_a = {}", scan.low_max_a);
        assert_eq!(scan.forall_verdict, crate::apxsim::Verdict::Yes);
    }

    #[test]
    fn hardness_no_low_energy_scan() {
        let inst = build_hardness_instance(&copy_machine(no_query())).unwrap();
        let scan = crate::apxsim::exhaustive_scan(&inst.instance).unwrap();
        assert!(scan.low_min_a >= 0.5 - 1e-6, "low_min_a = {}", scan.low_min_a);
        assert_eq!(scan.forall_verdict, crate::apxsim::Verdict::No);
    }

    #[test]
    fn h1_h2_commute() {
        // H1 holds every term touching the W grid; H2 is the query Hamiltonian
        let comp = copy_machine(yes_query());
        let inst = build_hardness_instance(&comp).unwrap();
        let first_w = inst.grid.site(0, 0);
        let layout = inst.instance.hamiltonian.layout.clone();
        let mut h1t = Vec::new();
        let mut h2t = Vec::new();
        for t in &inst.instance.hamiltonian.terms {
            if t.support.iter().any(|&s| s >= first_w) {
                h1t.push(t.clone());
            } else {
                h2t.push(t.clone());
            }
        }
        let h1 = Hamiltonian::new(layout.clone(), h1t).unwrap();
        let h2 = Hamiltonian::new(layout, h2t).unwrap();
        assert!(commutator_norm(&h1, &h2).unwrap() <= 1e-12);
    }

    fn tiny_lattice_query(yes: bool) -> LatticeQuery {
        // 1x2 lattice with a single diagonal edge term
        let mut block: Array2<C64> = Array2::zeros((4, 4));
        // diag(0,1,1,2) measures disagreement count, ground 0 (YES) or shifted (NO)
        block[[1, 1]] = c(1.0, 0.0);
        block[[2, 2]] = c(1.0, 0.0);
        block[[3, 3]] = c(2.0, 0.0);
        if !yes {
            let eye: Array2<C64> = Array2::eye(4);
            block = &block + &eye;
        }
        LatticeQuery {
            rows: 1,
            cols: 2,
            edges: vec![((0, 0), (0, 1), block)],
            a: 0.25,
            b: 0.75,
        }
    }

    #[test]
    fn sparse_delta_strengths_exceed_budget() {
        let circuit = ReversibleCircuit::new(1, vec![Gate::identity(vec![0])], 0).unwrap();
        let inst =
            build_spatially_sparse_instance(&circuit, &[tiny_lattice_query(true)]).unwrap();
        for (i, &d) in inst.delta_i.iter().enumerate() {
            // Delta_i > delta + sum of edge norms, strictly
            assert!(d > inst.instance.delta, "Delta_{i} too small");
        }
    }

    #[test]
    fn sparse_h3_ground_space_is_agreement_sector() {
        let circuit = ReversibleCircuit::new(1, vec![Gate::identity(vec![0])], 0).unwrap();
        let inst =
            build_spatially_sparse_instance(&circuit, &[tiny_lattice_query(true)]).unwrap();
        // isolate the H3 terms: disagreement penalties among X-chain sites
        let chain = &inst.x_chains[0];
        let layout = RegisterLayout::qubits(chain.len());
        let mut terms = Vec::new();
        for t in &inst.instance.hamiltonian.terms {
            if t.support.len() == 2
                && t.support.iter().all(|s| chain.contains(s))
            {
                let support = t
                    .support
                    .iter()
                    .map(|s| chain.iter().position(|c| c == s).unwrap() as SiteId)
                    .collect();
                terms.push(LocalTerm::new(support, t.block.clone(), t.weight).unwrap());
            }
        }
        assert!(!terms.is_empty());
        let h3 = Hamiltonian::new(layout, terms).unwrap();
        let d = h3.to_dense().unwrap();
        let vals = linalg::eigvalsh(&d).unwrap();
        // exactly two zero modes: all-0 and all-1
        let zeros = vals.iter().filter(|v| v.abs() < 1e-10).count();
        assert_eq!(zeros, 2);
        let dim = d.nrows();
        assert!(d[[0, 0]].re.abs() < 1e-12);
        assert!(d[[dim - 1, dim - 1]].re.abs() < 1e-12);
    }

    #[test]
    fn sparse_graph_passes_caps() {
        let circuit = ReversibleCircuit::new(
            2,
            vec![Gate::toffoli(0, 1, 1)],
            1,
        );
        // toffoli needs 3 distinct bits; use cnot instead for width 2
        let circuit = match circuit {
            Ok(c) => c,
            Err(_) => ReversibleCircuit::new(2, vec![Gate::cnot(0, 1)], 1).unwrap(),
        };
        let inst = build_spatially_sparse_instance(
            &circuit,
            &[tiny_lattice_query(true), tiny_lattice_query(false)],
        )
        .unwrap();
        let report = check_spatial_sparsity(&inst.graph, 6, 8);
        assert!(
            report.pass,
            "degree {} overlap {} area {}",
            report.max_degree, report.max_overlap, report.max_area
        );
    }

    #[test]
    fn star_graph_fails_degree_cap() {
        let mut coords = vec![(0u32, 0.0, 0.0)];
        let mut hyperedges = Vec::new();
        for i in 1..=50u32 {
            let angle = i as f64;
            coords.push((i, angle.cos() * 5.0, angle.sin() * 5.0));
            hyperedges.push(vec![0, i]);
        }
        let g = InteractionGraph {
            coords,
            hyperedges,
            max_arity: 2,
        };
        let r = check_spatial_sparsity(&g, 10, 10);
        assert!(!r.pass);
        assert_eq!(r.max_degree, 50);
    }

    #[test]
    fn single_edge_passes() {
        let g = InteractionGraph {
            coords: vec![(0, 0.0, 0.0), (1, 1.0, 0.0)],
            hyperedges: vec![vec![0, 1]],
            max_arity: 2,
        };
        let r = check_spatial_sparsity(&g, 1, 0);
        assert!(r.pass);
        assert_eq!(r.max_degree, 1);
        assert_eq!(r.max_overlap, 0);
    }
}
