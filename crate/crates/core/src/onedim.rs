//! The 1D construction: circuit linearization into nearest-neighbor rounds,
//! the 8-symbol-per-qudit clock automaton, G = D_in H_in + D_prop H_prop +
//! D_pen H_pen, sifter penalties, the single-qudit observable, the parameter
//! settings, and verification of the low-energy structure.
//!
//! Geometry: 2nR qudits of dimension 8 on a line, R blocks of 2n cells, one
//! block per round. A round starts with the gate label on the first cell of
//! its block and the logical qubits on the odd offsets; the sweep walks the
//! gate label right, applying the round's gates as it crosses logical-qubit
//! boundaries; between rounds the move-left label ferries the block one block
//! rightward (dead labels accumulate on the left, blanks are consumed on the
//! right). The enumeration below realizes that cycle as an explicit line of
//! legal configurations, with every transition changing one adjacent cell
//! pair; an independent rule-driven stepper replays the automaton and the
//! audit cross-checks the two.
//!
//! Conventions the audit records: non-final rounds leave blanks (not fillers)
//! behind the sweep, the shift compacts the block before re-spreading it, and
//! the shift's return trips reuse the gate labels as carriers. The compact
//! shift is implemented for n <= 3, which covers the verification scale.

use crate::error::{HamError, Result};
use crate::layout::RegisterLayout;
use crate::linalg::{self, c, C_ONE, C_ZERO};
use crate::operator::{Hamiltonian, LocalTerm};
use crate::query::{classify_query, QueryInstance, QueryStatus};
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

pub const LOCAL_DIM: usize = 8;

/// The eight basis labels of one qudit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Blank = 0,
    LMove = 1,
    Filler = 2,
    Dead = 3,
    Gate0 = 4,
    Gate1 = 5,
    Qubit0 = 6,
    Qubit1 = 7,
}

impl Label {
    pub fn ascii(self) -> &'static str {
        match self {
            Label::Blank => "_",
            Label::LMove => "<",
            Label::Filler => ".",
            Label::Dead => "x",
            Label::Gate0 => "G0",
            Label::Gate1 => "G1",
            Label::Qubit0 => "Q0",
            Label::Qubit1 => "Q1",
        }
    }
}

/// Label class of a cell, with the data bit abstracted out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pat {
    Blank,
    LMove,
    Filler,
    Dead,
    Gate,
    Qubit,
}

impl Pat {
    /// basis indices of this class
    pub fn indices(self) -> &'static [usize] {
        match self {
            Pat::Blank => &[0],
            Pat::LMove => &[1],
            Pat::Filler => &[2],
            Pat::Dead => &[3],
            Pat::Gate => &[4, 5],
            Pat::Qubit => &[6, 7],
        }
    }

    pub fn is_data(self) -> bool {
        matches!(self, Pat::Gate | Pat::Qubit)
    }

    pub fn ascii(self) -> &'static str {
        match self {
            Pat::Blank => "_",
            Pat::LMove => "<",
            Pat::Filler => ".",
            Pat::Dead => "x",
            Pat::Gate => "G",
            Pat::Qubit => "Q",
        }
    }
}

/// One cell of a configuration template.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Pure(Pat),
    /// a data cell: which logical qubit sits here, and whether it carries the
    /// gate label (the active marker) or the resting qubit label
    Data { logical: usize, gate: bool },
}

impl Cell {
    pub fn pat(self) -> Pat {
        match self {
            Cell::Pure(p) => p,
            Cell::Data { gate: true, .. } => Pat::Gate,
            Cell::Data { gate: false, .. } => Pat::Qubit,
        }
    }
}

/// A legal configuration: label string with data positions resolved.
pub type Config = Vec<Cell>;

pub fn config_ascii(cfg: &Config) -> String {
    cfg.iter()
        .map(|c| c.pat().ascii())
        .collect::<Vec<_>>()
        .join(" ")
}

/// n logical qubits; R rounds of n-1 two-qubit nearest-neighbor gates, gate j
/// of a round acting on logical qubits (j, j+1); round `r_star` (1-indexed)
/// applies only identities, holding the query answers in place.
#[derive(Debug, Clone)]
pub struct RoundCircuit {
    pub n: usize,
    pub rounds: Vec<Vec<Array2<C64>>>,
    pub r_star: usize,
}

impl RoundCircuit {
    pub fn new(n: usize, rounds: Vec<Vec<Array2<C64>>>, r_star: usize) -> Result<Self> {
        if n < 2 {
            return Err(HamError::InvalidInstance("need n >= 2 logical qubits".into()));
        }
        if rounds.is_empty() {
            return Err(HamError::InvalidInstance("need at least one round".into()));
        }
        if r_star == 0 || r_star > rounds.len() {
            return Err(HamError::InvalidInstance(format!(
                "pause round {r_star} outside 1..={}",
                rounds.len()
            )));
        }
        for (r, round) in rounds.iter().enumerate() {
            if round.len() != n - 1 {
                return Err(HamError::InvalidInstance(format!(
                    "round {} has {} gates, expected {}",
                    r + 1,
                    round.len(),
                    n - 1
                )));
            }
            for (j, g) in round.iter().enumerate() {
                if g.dim() != (4, 4) {
                    return Err(HamError::DimensionMismatch {
                        expected: 4,
                        got: g.nrows(),
                    });
                }
                let gd = linalg::dagger(g).dot(g);
                let eye: Array2<C64> = Array2::eye(4);
                let dev = (&gd - &eye).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
                if dev > 1e-10 {
                    return Err(HamError::NotUnitary(dev));
                }
                if r + 1 == r_star && !is_identity(g) {
                    return Err(HamError::InvalidInstance(format!(
                        "pause round {r_star} holds a non-identity gate at position {}",
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { n, rounds, r_star })
    }

    pub fn num_rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn chain_len(&self) -> usize {
        2 * self.n * self.num_rounds()
    }

    /// The composed unitary of the whole round sequence on 2^n dimensions,
    /// gates applied left to right within each round.
    pub fn total_unitary(&self) -> Array2<C64> {
        let dim = 1usize << self.n;
        let mut u: Array2<C64> = Array2::eye(dim);
        for round in &self.rounds {
            for (j, g) in round.iter().enumerate() {
                u = embed_two_qubit(g, j, self.n).dot(&u);
            }
        }
        u
    }
}

fn is_identity(g: &Array2<C64>) -> bool {
    let eye: Array2<C64> = Array2::eye(g.nrows());
    (g - &eye).iter().map(|z| z.norm()).fold(0.0f64, f64::max) < 1e-12
}

pub fn identity_gate() -> Array2<C64> {
    Array2::eye(4)
}

pub fn swap_gate() -> Array2<C64> {
    let mut m: Array2<C64> = Array2::zeros((4, 4));
    m[[0, 0]] = C_ONE;
    m[[1, 2]] = C_ONE;
    m[[2, 1]] = C_ONE;
    m[[3, 3]] = C_ONE;
    m
}

pub fn cnot_gate() -> Array2<C64> {
    let mut m: Array2<C64> = Array2::zeros((4, 4));
    m[[0, 0]] = C_ONE;
    m[[1, 1]] = C_ONE;
    m[[2, 3]] = C_ONE;
    m[[3, 2]] = C_ONE;
    m
}

/// Embed a 4x4 two-qubit gate on logical qubits (j, j+1), 0-indexed j, into
/// the 2^n-dimensional data space (logical qubit 1 most significant).
pub fn embed_two_qubit(g: &Array2<C64>, j: usize, n: usize) -> Array2<C64> {
    let left: Array2<C64> = Array2::eye(1 << j);
    let right: Array2<C64> = Array2::eye(1 << (n - 2 - j));
    linalg::kron(&linalg::kron(&left, g), &right)
}

/// Linearize an arbitrary 2-local circuit (gates on possibly non-adjacent
/// qubit pairs) into nearest-neighbor rounds: swap-conjugation brings distant
/// pairs together, one gate per round.
pub fn linearize_circuit(
    n: usize,
    gates: &[(Array2<C64>, (usize, usize))],
) -> Result<Vec<Vec<Array2<C64>>>> {
    let mut rounds: Vec<Vec<Array2<C64>>> = Vec::new();
    let round_with = |pos: usize, g: Array2<C64>, rounds: &mut Vec<Vec<Array2<C64>>>| {
        let mut round = vec![identity_gate(); n - 1];
        round[pos] = g;
        rounds.push(round);
    };
    for (g, (a, b)) in gates {
        let (lo, hi, g) = if a < b {
            (*a, *b, g.clone())
        } else if b < a {
            // reorder the gate's qubits: conjugate by SWAP
            (*b, *a, swap_gate().dot(g).dot(&swap_gate()))
        } else {
            return Err(HamError::InvalidInstance(
                "two-qubit gate needs distinct qubits".into(),
            ));
        };
        if hi >= n {
            return Err(HamError::InvalidInstance(format!(
                "gate touches qubit {hi} outside 0..{n}"
            )));
        }
        // bring qubit hi down to lo+1 with adjacent swaps
        for k in ((lo + 1)..hi).rev() {
            round_with(k, swap_gate(), &mut rounds);
        }
        round_with(lo, g, &mut rounds);
        for k in (lo + 1)..hi {
            round_with(k, swap_gate(), &mut rounds);
        }
    }
    if rounds.is_empty() {
        rounds.push(vec![identity_gate(); n - 1]);
    }
    Ok(rounds)
}

/// One transition of the automaton: cells (p, p+1) change from `pre` to
/// `post`; when `gate` is set, the data of logical qubits (j, j+1) transforms
/// by the 4x4 unitary (j is 1-indexed here, matching the round structure).
#[derive(Debug, Clone)]
pub struct Transition {
    /// 0-indexed left cell of the changed pair
    pub p: usize,
    pub pre: (Pat, Pat),
    pub post: (Pat, Pat),
    pub gate: Option<(Array2<C64>, usize)>,
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub n: usize,
    pub num_rounds: usize,
    pub configs: Vec<Config>,
    pub transitions: Vec<Transition>,
}

impl Enumeration {
    /// L: the largest configuration index (configs are t = 0..=L).
    pub fn l(&self) -> usize {
        self.configs.len() - 1
    }

    /// Which logical qubit a data cell holds at config t, if any.
    pub fn data_at(&self, t: usize, cell: usize) -> Option<(usize, bool)> {
        match self.configs[t][cell] {
            Cell::Data { logical, gate } => Some((logical, gate)),
            Cell::Pure(_) => None,
        }
    }

    /// Configs in which `cell` carries the gate label.
    pub fn gate_configs_of_cell(&self, cell: usize) -> Vec<usize> {
        (0..self.configs.len())
            .filter(|&t| matches!(self.configs[t][cell], Cell::Data { gate: true, .. }))
            .collect()
    }
}

/// Enumerate the legal configurations of the automaton as an explicit line.
/// Supported at desk scale for n in {2, 3}; the compact-shift conventions do
/// not extend past that without further relay passes.
pub fn enumerate_legal_configurations(rc: &RoundCircuit) -> Result<Enumeration> {
    if rc.n > 3 {
        return Err(HamError::UnsupportedScale(format!(
            "the shift conventions are implemented for n <= 3 (got n = {})",
            rc.n
        )));
    }
    let n = rc.n;
    let r_total = rc.num_rounds();
    let len = rc.chain_len();

    let mut configs: Vec<Config> = Vec::new();
    let mut transitions: Vec<Transition> = Vec::new();

    // initial configuration: gate on cell 0, logical qubits on odd offsets,
    // fillers between, blank at the block end, blanks to the right
    let mut cfg: Config = vec![Cell::Pure(Pat::Blank); len];
    cfg[0] = Cell::Data {
        logical: 1,
        gate: true,
    };
    for j in 2..=n {
        cfg[2 * j - 2] = Cell::Data {
            logical: j,
            gate: false,
        };
        cfg[2 * j - 3] = Cell::Pure(Pat::Filler);
    }
    configs.push(cfg.clone());

    let push = |cfg: &mut Config,
                    configs: &mut Vec<Config>,
                    transitions: &mut Vec<Transition>,
                    p: usize,
                    new_left: Cell,
                    new_right: Cell,
                    gate: Option<(Array2<C64>, usize)>| {
        let pre = (cfg[p].pat(), cfg[p + 1].pat());
        cfg[p] = new_left;
        cfg[p + 1] = new_right;
        let post = (cfg[p].pat(), cfg[p + 1].pat());
        transitions.push(Transition { p, pre, post, gate });
        configs.push(cfg.clone());
    };

    for r in 1..=r_total {
        let base = 2 * n * (r - 1); // 0-indexed block start
        let is_final = r == r_total;
        // --- sweep: the gate label walks the block, applying gates ---
        for j in 1..=n {
            // A-step: odd offset 2j-1 -> even offset 2j (1-indexed), i.e.
            // cells base+2j-2 -> base+2j-1
            let p = base + 2 * j - 2;
            let carried = match cfg[p] {
                Cell::Data { logical, gate: true } => logical,
                _ => unreachable!("sweep expects the gate label at the odd offset"),
            };
            let residue = if j == 1 {
                Cell::Pure(Pat::Dead)
            } else if is_final {
                Cell::Pure(Pat::Filler)
            } else {
                Cell::Pure(Pat::Blank)
            };
            push(
                &mut cfg,
                &mut configs,
                &mut transitions,
                p,
                residue,
                Cell::Data {
                    logical: carried,
                    gate: true,
                },
                None,
            );
            // B-step: apply gate j on (j, j+1), moving the label to the next
            // odd offset
            if j < n {
                let p = base + 2 * j - 1;
                push(
                    &mut cfg,
                    &mut configs,
                    &mut transitions,
                    p,
                    Cell::Data {
                        logical: j,
                        gate: false,
                    },
                    Cell::Data {
                        logical: j + 1,
                        gate: true,
                    },
                    Some((rc.rounds[r - 1][j - 1].clone(), j)),
                );
            }
        }
        if is_final {
            break;
        }
        // --- shift: compact passes (kills at the left edge, returns via the
        // carried gate label), then one stretch pass ---
        // B-phase: n passes
        for pass in 1..=n {
            // spawn: the gate label at the cargo's right end rests onto the
            // blank and leaves the move-left label
            let g_cell = (0..len)
                .find(|&i| matches!(cfg[i], Cell::Data { gate: true, .. }))
                .expect("active gate label");
            let carried = match cfg[g_cell] {
                Cell::Data { logical, .. } => logical,
                _ => unreachable!(),
            };
            push(
                &mut cfg,
                &mut configs,
                &mut transitions,
                g_cell,
                Cell::Data {
                    logical: carried,
                    gate: false,
                },
                Cell::Pure(Pat::LMove),
                None,
            );
            // left-pass: cross everything down to the left edge
            let mut lpos = g_cell + 1;
            loop {
                let left = cfg[lpos - 1];
                match left {
                    Cell::Data { logical, gate: false } => {
                        push(
                            &mut cfg,
                            &mut configs,
                            &mut transitions,
                            lpos - 1,
                            Cell::Pure(Pat::LMove),
                            Cell::Data {
                                logical,
                                gate: false,
                            },
                            None,
                        );
                    }
                    Cell::Pure(Pat::Blank) => {
                        push(
                            &mut cfg,
                            &mut configs,
                            &mut transitions,
                            lpos - 1,
                            Cell::Pure(Pat::LMove),
                            Cell::Pure(Pat::Blank),
                            None,
                        );
                    }
                    Cell::Pure(Pat::Dead) => break,
                    other => unreachable!("left-pass over {other:?}"),
                }
                lpos -= 1;
            }
            // kills at the left edge: consume blanks, then absorb the
            // leftmost qubit as the returning gate label
            loop {
                match cfg[lpos + 1] {
                    Cell::Pure(Pat::Blank) => {
                        push(
                            &mut cfg,
                            &mut configs,
                            &mut transitions,
                            lpos,
                            Cell::Pure(Pat::Dead),
                            Cell::Pure(Pat::LMove),
                            None,
                        );
                        lpos += 1;
                    }
                    Cell::Data { logical, gate: false } => {
                        push(
                            &mut cfg,
                            &mut configs,
                            &mut transitions,
                            lpos,
                            Cell::Pure(Pat::Dead),
                            Cell::Data {
                                logical,
                                gate: true,
                            },
                            None,
                        );
                        break;
                    }
                    other => unreachable!("kill phase expects blank or qubit, got {other:?}"),
                }
            }
            // return: slide over blanks, conveyor over data, until the token
            // reaches the cargo's right end (then the next pass spawns); the
            // final pass leaves the token parked on the leftmost qubit
            if pass < n {
                let mut gpos = lpos + 1;
                loop {
                    let next = if gpos + 1 < len { cfg[gpos + 1] } else { Cell::Pure(Pat::Dead) };
                    match next {
                        Cell::Pure(Pat::Blank) => {
                            // any data further right?
                            let more = (gpos + 1..len)
                                .any(|i| matches!(cfg[i], Cell::Data { .. }));
                            if !more {
                                break; // parked at the right end
                            }
                            let carried = match cfg[gpos] {
                                Cell::Data { logical, .. } => logical,
                                _ => unreachable!(),
                            };
                            push(
                                &mut cfg,
                                &mut configs,
                                &mut transitions,
                                gpos,
                                Cell::Pure(Pat::Blank),
                                Cell::Data {
                                    logical: carried,
                                    gate: true,
                                },
                                None,
                            );
                            gpos += 1;
                        }
                        Cell::Data { logical, gate: false } => {
                            let carried = match cfg[gpos] {
                                Cell::Data { logical: l, .. } => l,
                                _ => unreachable!(),
                            };
                            push(
                                &mut cfg,
                                &mut configs,
                                &mut transitions,
                                gpos,
                                Cell::Data {
                                    logical: carried,
                                    gate: false,
                                },
                                Cell::Data {
                                    logical,
                                    gate: true,
                                },
                                None,
                            );
                            gpos += 1;
                        }
                        _ => break,
                    }
                }
            }
        }
        // C-phase: one stretch pass. The token sits on the leftmost qubit of
        // the compact block at cells base+2n .. base+2n+n-1.
        let new_base = base + 2 * n;
        // conveyor to the rightmost qubit
        for k in 0..(n - 1) {
            let p = new_base + k;
            let (here, right) = match (cfg[p], cfg[p + 1]) {
                (Cell::Data { logical: a, .. }, Cell::Data { logical: b, .. }) => (a, b),
                other => unreachable!("stretch conveyor expects compact data, got {other:?}"),
            };
            push(
                &mut cfg,
                &mut configs,
                &mut transitions,
                p,
                Cell::Data {
                    logical: here,
                    gate: false,
                },
                Cell::Data {
                    logical: right,
                    gate: true,
                },
                None,
            );
        }
        // carry the last qubit to the block's last odd offset
        let target = new_base + 2 * n - 2; // 0-indexed odd offset 2n-1
        let mut gpos = new_base + n - 1;
        while gpos < target {
            let carried = match cfg[gpos] {
                Cell::Data { logical, .. } => logical,
                _ => unreachable!(),
            };
            push(
                &mut cfg,
                &mut configs,
                &mut transitions,
                gpos,
                Cell::Pure(Pat::Blank),
                Cell::Data {
                    logical: carried,
                    gate: true,
                },
                None,
            );
            gpos += 1;
        }
        // rest-reflect: the carried qubit rests at its target, the move-left
        // label appears on its left
        let carried = match cfg[gpos] {
            Cell::Data { logical, .. } => logical,
            _ => unreachable!(),
        };
        push(
            &mut cfg,
            &mut configs,
            &mut transitions,
            gpos - 1,
            Cell::Pure(Pat::LMove),
            Cell::Data {
                logical: carried,
                gate: false,
            },
            None,
        );
        // walk left: cross blanks; cross each interior qubit once (placing
        // it); hand the token to the leftmost qubit at the block start
        let mut lpos = gpos - 1;
        loop {
            let left = cfg[lpos - 1];
            match left {
                Cell::Pure(Pat::Blank) => {
                    push(
                        &mut cfg,
                        &mut configs,
                        &mut transitions,
                        lpos - 1,
                        Cell::Pure(Pat::LMove),
                        Cell::Pure(Pat::Blank),
                        None,
                    );
                    lpos -= 1;
                }
                Cell::Data { logical, gate: false } => {
                    if lpos - 1 == new_base {
                        // final turn: the leftmost qubit becomes the round's
                        // gate label and the move label dissolves into a blank
                        push(
                            &mut cfg,
                            &mut configs,
                            &mut transitions,
                            lpos - 1,
                            Cell::Data {
                                logical,
                                gate: true,
                            },
                            Cell::Pure(Pat::Blank),
                            None,
                        );
                        break;
                    }
                    push(
                        &mut cfg,
                        &mut configs,
                        &mut transitions,
                        lpos - 1,
                        Cell::Pure(Pat::LMove),
                        Cell::Data {
                            logical,
                            gate: false,
                        },
                        None,
                    );
                    lpos -= 1;
                }
                other => unreachable!("stretch walk over {other:?}"),
            }
        }
    }

    Ok(Enumeration {
        n,
        num_rounds: r_total,
        configs,
        transitions,
    })
}

/// Independent forward simulation of the label automaton: starting from the
/// initial configuration, repeatedly determine the unique applicable local
/// rule from the current string and apply it as a two-cell substitution.
/// Data-cell bookkeeping rides along so the result is comparable with the
/// structured enumeration.
pub fn simulate_automaton(rc: &RoundCircuit) -> Result<Vec<Config>> {
    let n = rc.n;
    let len = rc.chain_len();
    let two_n = 2 * n;
    let r_total = rc.num_rounds();

    let mut cfg: Config = vec![Cell::Pure(Pat::Blank); len];
    cfg[0] = Cell::Data {
        logical: 1,
        gate: true,
    };
    for j in 2..=n {
        cfg[2 * j - 2] = Cell::Data {
            logical: j,
            gate: false,
        };
        cfg[2 * j - 3] = Cell::Pure(Pat::Filler);
    }
    let mut out = vec![cfg.clone()];

    loop {
        let dead = cfg.iter().take_while(|c| c.pat() == Pat::Dead).count();
        let dmod = dead % two_n;
        // locate the active label
        let gate_pos = (0..len).find(|&i| matches!(cfg[i], Cell::Data { gate: true, .. }));
        let lmove_pos = (0..len).find(|&i| cfg[i].pat() == Pat::LMove);

        if let Some(p) = gate_pos {
            let carried = match cfg[p] {
                Cell::Data { logical, .. } => logical,
                _ => unreachable!(),
            };
            // terminal: final sweep finished with the label on the last cell
            if p == len - 1 && dmod == 1 {
                break;
            }
            let right = if p + 1 < len { cfg[p + 1].pat() } else { Pat::Dead };
            match right {
                Pat::Qubit => {
                    let resting = match cfg[p + 1] {
                        Cell::Data { logical, .. } => logical,
                        _ => unreachable!(),
                    };
                    if dmod == 1 {
                        // sweep gate step: round from the dead count, gate
                        // index from the position
                        let r = dead / two_n + 1;
                        let j = (p + 1 - two_n * (r - 1)) / 2; // 1-indexed gate
                        debug_assert_eq!(carried, j);
                        let _ = rc.rounds[r - 1][j - 1].clone();
                        cfg[p] = Cell::Data {
                            logical: carried,
                            gate: false,
                        };
                        cfg[p + 1] = Cell::Data {
                            logical: resting,
                            gate: true,
                        };
                    } else {
                        // conveyor
                        cfg[p] = Cell::Data {
                            logical: carried,
                            gate: false,
                        };
                        cfg[p + 1] = Cell::Data {
                            logical: resting,
                            gate: true,
                        };
                    }
                }
                Pat::Filler | Pat::Blank => {
                    let is_round_start = p == dead && dmod == 0;
                    let in_sweep = dmod == 1 && p % 2 == 0 && p >= dead && p < dead - 1 + two_n;
                    let is_final_round = dead / two_n + 1 == r_total;
                    if is_round_start {
                        // first sweep step kills the departed cell
                        cfg[p] = Cell::Pure(Pat::Dead);
                        cfg[p + 1] = Cell::Data {
                            logical: carried,
                            gate: true,
                        };
                    } else if in_sweep {
                        // interior sweep step
                        cfg[p] = Cell::Pure(if is_final_round { Pat::Filler } else { Pat::Blank });
                        cfg[p + 1] = Cell::Data {
                            logical: carried,
                            gate: true,
                        };
                    } else if dmod == 0 {
                        // stretch carry: slide right until the target odd
                        // offset, then rest-reflect
                        let target = dead + two_n - 2;
                        if p < target {
                            cfg[p] = Cell::Pure(Pat::Blank);
                            cfg[p + 1] = Cell::Data {
                                logical: carried,
                                gate: true,
                            };
                        } else {
                            unreachable!("carry past its target");
                        }
                    } else {
                        // shift-return mode: slide toward the cargo, or spawn
                        // the move label when no data remains to the right
                        let more = (p + 1..len).any(|i| matches!(cfg[i], Cell::Data { .. }));
                        if more {
                            cfg[p] = Cell::Pure(Pat::Blank);
                            cfg[p + 1] = Cell::Data {
                                logical: carried,
                                gate: true,
                            };
                        } else {
                            cfg[p] = Cell::Data {
                                logical: carried,
                                gate: false,
                            };
                            cfg[p + 1] = Cell::Pure(Pat::LMove);
                        }
                    }
                }
                other => {
                    return Err(HamError::InvalidInstance(format!(
                        "stepper stuck: gate label faces {other:?}"
                    )))
                }
            }
            // rest-reflect special case: the carry reached its target; it is
            // expressed as a substitution on (p-1, p)
            if let Some(q) = (0..len).find(|&i| matches!(cfg[i], Cell::Data { gate: true, .. })) {
                let dead_now = cfg.iter().take_while(|cc| cc.pat() == Pat::Dead).count();
                if dead_now % two_n == 0 && q == dead_now + two_n - 2 && q >= 1 {
                    // only when the previous action was the final carry slide:
                    // the cell to the left is a blank trail
                    if cfg[q - 1].pat() == Pat::Blank {
                        out.push(cfg.clone());
                        let carried = match cfg[q] {
                            Cell::Data { logical, .. } => logical,
                            _ => unreachable!(),
                        };
                        cfg[q - 1] = Cell::Pure(Pat::LMove);
                        cfg[q] = Cell::Data {
                            logical: carried,
                            gate: false,
                        };
                    }
                }
            }
        } else if let Some(p) = lmove_pos {
            let at_edge = p == 0 || cfg[p - 1].pat() == Pat::Dead;
            if at_edge {
                match cfg[p + 1] {
                    Cell::Pure(Pat::Blank) => {
                        cfg[p] = Cell::Pure(Pat::Dead);
                        cfg[p + 1] = Cell::Pure(Pat::LMove);
                    }
                    Cell::Data { logical, gate: false } => {
                        cfg[p] = Cell::Pure(Pat::Dead);
                        cfg[p + 1] = Cell::Data {
                            logical,
                            gate: true,
                        };
                    }
                    other => {
                        return Err(HamError::InvalidInstance(format!(
                            "stepper stuck: edge move label faces {other:?}"
                        )))
                    }
                }
            } else {
                match cfg[p - 1] {
                    Cell::Pure(Pat::Blank) => {
                        cfg[p - 1] = Cell::Pure(Pat::LMove);
                        cfg[p] = Cell::Pure(Pat::Blank);
                    }
                    Cell::Data { logical, gate: false } => {
                        if dmod == 0 && p - 1 == dead {
                            // stretch final turn: hand the token to the
                            // leftmost qubit, dissolve into a blank
                            cfg[p - 1] = Cell::Data {
                                logical,
                                gate: true,
                            };
                            cfg[p] = Cell::Pure(Pat::Blank);
                        } else {
                            cfg[p - 1] = Cell::Pure(Pat::LMove);
                            cfg[p] = Cell::Data {
                                logical,
                                gate: false,
                            };
                        }
                    }
                    Cell::Pure(Pat::Filler) => {
                        // only in round 1 shifts would a filler be crossed;
                        // the sweep consumed them, so this cannot happen
                        return Err(HamError::InvalidInstance(
                            "stepper stuck: move label faces a filler".into(),
                        ));
                    }
                    other => {
                        return Err(HamError::InvalidInstance(format!(
                            "stepper stuck: move label faces {other:?}"
                        )))
                    }
                }
            }
        } else {
            return Err(HamError::InvalidInstance(
                "stepper stuck: no active label".into(),
            ));
        }
        out.push(cfg.clone());
        if out.len() > 100_000 {
            return Err(HamError::InvalidInstance(
                "stepper did not terminate".into(),
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct EnumAudit {
    pub l: usize,
    pub anchors_ok: bool,
    pub one_active_ok: bool,
    pub injective_ok: bool,
    pub adjacent_diff_ok: bool,
    pub stepper_agrees: bool,
    /// per cell, the number of legal configurations labeling it with gate
    pub gate_counts: Vec<usize>,
    /// cells labeled gate in exactly one configuration
    pub unique_gate_cells: Vec<usize>,
    /// (pair, window) classes whose matches are not exactly the transitions'
    /// intended endpoints; nonempty entries are the residual conventions the
    /// restricted walk operator resolves
    pub window_collisions: Vec<String>,
}

impl EnumAudit {
    pub fn pass_core(&self) -> bool {
        self.anchors_ok
            && self.one_active_ok
            && self.injective_ok
            && self.adjacent_diff_ok
            && self.stepper_agrees
    }
}

/// Audit the enumeration: anchor configurations, activity, injectivity,
/// 2-local adjacency of the diffs, agreement with the independent stepper,
/// the gate-label multiplicity per cell, and pattern-window collisions.
pub fn audit_enumeration(rc: &RoundCircuit, e: &Enumeration) -> Result<EnumAudit> {
    let n = e.n;
    let len = rc.chain_len();
    let l = e.l();

    // anchors: first config per Eq. (5) block form, final per Eq. (7)
    let first = &e.configs[0];
    let mut anchors_ok = first[0].pat() == Pat::Gate;
    for j in 2..=n {
        anchors_ok &= first[2 * j - 2].pat() == Pat::Qubit;
        anchors_ok &= first[2 * j - 3].pat() == Pat::Filler;
    }
    anchors_ok &= first[2 * n - 1].pat() == Pat::Blank;
    for cell in 2 * n..len {
        anchors_ok &= first[cell].pat() == Pat::Blank;
    }
    let last = &e.configs[l];
    anchors_ok &= last[len - 1].pat() == Pat::Gate;
    for cell in 0..(len - 2 * n) {
        anchors_ok &= last[cell].pat() == Pat::Dead;
    }
    let base = len - 2 * n;
    anchors_ok &= last[base].pat() == Pat::Dead;
    for j in 2..=n {
        anchors_ok &= last[base + 2 * j - 3].pat() == Pat::Qubit;
        anchors_ok &= last[base + 2 * j - 2].pat() == Pat::Filler;
    }

    // exactly one active label per non-terminal configuration (the terminal
    // configuration carries the gate label too)
    let mut one_active_ok = true;
    for cfg in &e.configs {
        let actives = cfg
            .iter()
            .filter(|c| matches!(c.pat(), Pat::Gate | Pat::LMove))
            .count();
        one_active_ok &= actives == 1;
    }

    // injectivity at the label level
    let mut strings: Vec<String> = e.configs.iter().map(config_ascii).collect();
    strings.sort();
    let before = strings.len();
    strings.dedup();
    let injective_ok = strings.len() == before;

    // consecutive configs differ on exactly one adjacent pair
    let mut adjacent_diff_ok = e.transitions.len() == l;
    for (t, tr) in e.transitions.iter().enumerate() {
        let a = &e.configs[t];
        let b = &e.configs[t + 1];
        for cell in 0..len {
            let differs = a[cell] != b[cell];
            let in_pair = cell == tr.p || cell == tr.p + 1;
            if differs && !in_pair {
                adjacent_diff_ok = false;
            }
        }
        if tr.pre != (a[tr.p].pat(), a[tr.p + 1].pat()) {
            adjacent_diff_ok = false;
        }
        if tr.post != (b[tr.p].pat(), b[tr.p + 1].pat()) {
            adjacent_diff_ok = false;
        }
    }

    // independent stepper agreement
    let stepped = simulate_automaton(rc)?;
    let stepper_agrees = stepped.len() == e.configs.len()
        && stepped
            .iter()
            .zip(e.configs.iter())
            .all(|(a, b)| a == b);

    // gate multiplicity per cell
    let gate_counts: Vec<usize> = (0..len)
        .map(|cell| e.gate_configs_of_cell(cell).len())
        .collect();
    let unique_gate_cells: Vec<usize> = (0..len).filter(|&cl| gate_counts[cl] == 1).collect();

    // window-collision scan: for every transition term, the configs matching
    // its pre/post window at its pair must be exactly the transition's own
    // endpoints (shared identical rules are merged first)
    let mut window_collisions = Vec::new();
    let mut seen: Vec<(usize, (Pat, Pat), (Pat, Pat))> = Vec::new();
    for tr in &e.transitions {
        let key = (tr.p, tr.pre, tr.post);
        if !seen.contains(&key) {
            seen.push(key);
        }
    }
    for &(p, pre, post) in &seen {
        // intended endpoints of every transition sharing this rule
        let mut intended_pre = Vec::new();
        let mut intended_post = Vec::new();
        for (t, tr) in e.transitions.iter().enumerate() {
            if tr.p == p && tr.pre == pre && tr.post == post {
                intended_pre.push(t);
                intended_post.push(t + 1);
            }
        }
        for (t, cfg) in e.configs.iter().enumerate() {
            let w = (cfg[p].pat(), cfg[p + 1].pat());
            if w == pre && !intended_pre.contains(&t) {
                window_collisions.push(format!(
                    "pre ({},{}) at pair {} also matches config {}",
                    pre.0.ascii(),
                    pre.1.ascii(),
                    p,
                    t
                ));
            }
            if w == post && !intended_post.contains(&t) {
                window_collisions.push(format!(
                    "post ({},{}) at pair {} also matches config {}",
                    post.0.ascii(),
                    post.1.ascii(),
                    p,
                    t
                ));
            }
        }
    }

    Ok(EnumAudit {
        l,
        anchors_ok,
        one_active_ok,
        injective_ok,
        adjacent_diff_ok,
        stepper_agrees,
        gate_counts,
        unique_gate_cells,
        window_collisions,
    })
}

/// The construction's term families before the coupling strengths are chosen.
#[derive(Debug, Clone)]
pub struct OneDHamiltonian {
    pub rc: RoundCircuit,
    pub enumeration: Enumeration,
    /// logical qubits pinned to 0 at the start (1-indexed)
    pub pins: Vec<usize>,
    pub h_in_terms: Vec<LocalTerm>,
    pub h_prop_terms: Vec<LocalTerm>,
    pub h_pen_terms: Vec<LocalTerm>,
}

pub fn chain_layout(len: usize) -> RegisterLayout {
    RegisterLayout::uniform(len, LOCAL_DIM)
}

/// Projector onto a label class on one cell.
fn class_projector(p: Pat) -> Array2<C64> {
    let mut m = Array2::zeros((LOCAL_DIM, LOCAL_DIM));
    for &i in p.indices() {
        m[[i, i]] = C_ONE;
    }
    m
}

/// Basis states of a 2-cell window pattern, with the data bits (if any)
/// enumerated in cell order. Returns (indices into 64, data dimension).
fn window_states(w: (Pat, Pat)) -> (Vec<usize>, usize) {
    let mut out = Vec::new();
    for &i in w.0.indices() {
        for &j in w.1.indices() {
            out.push(i * LOCAL_DIM + j);
        }
    }
    let dim = out.len();
    (out, dim)
}

/// The 2-local propagation term of one transition rule:
/// (1/2)(P_pre + P_post - T - T^dag) with T carrying the data action.
fn transition_block(pre: (Pat, Pat), post: (Pat, Pat), gate: &Option<(Array2<C64>, usize)>) -> Array2<C64> {
    let (pre_states, dpre) = window_states(pre);
    let (post_states, dpost) = window_states(post);
    assert_eq!(dpre, dpost, "transition must conserve data");
    let m: Array2<C64> = match gate {
        Some((u, _)) => u.clone(),
        None => Array2::eye(dpre),
    };
    let dim = LOCAL_DIM * LOCAL_DIM;
    let mut block: Array2<C64> = Array2::zeros((dim, dim));
    for &sa in pre_states.iter() {
        block[[sa, sa]] += c(0.5, 0.0);
    }
    for (b, &sb) in post_states.iter().enumerate() {
        block[[sb, sb]] += c(0.5, 0.0);
        for (a, &sa) in pre_states.iter().enumerate() {
            let amp = m[[b, a]] * c(0.5, 0.0);
            block[[sb, sa]] -= amp;
            block[[sa, sb]] -= amp.conj();
        }
    }
    block
}

/// Build the three term families of G for a round circuit, with the listed
/// logical qubits pinned to 0 by H_in.
pub fn build_1d_hamiltonian(rc: &RoundCircuit, pins: &[usize]) -> Result<OneDHamiltonian> {
    let e = enumerate_legal_configurations(rc)?;
    let len = rc.chain_len();

    // H_prop: one deduplicated 2-local term per (pair, window rule)
    let mut h_prop_terms: Vec<LocalTerm> = Vec::new();
    let mut seen: Vec<(usize, (Pat, Pat), (Pat, Pat))> = Vec::new();
    for tr in &e.transitions {
        let key = (tr.p, tr.pre, tr.post);
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let block = transition_block(tr.pre, tr.post, &tr.gate);
        h_prop_terms.push(LocalTerm::new(
            vec![tr.p as u32, tr.p as u32 + 1],
            block,
            1.0,
        )?);
    }

    // H_in: pin terms tied to the initial configuration's local signature
    let mut h_in_terms = Vec::new();
    for &j in pins {
        if j == 0 || j > rc.n {
            return Err(HamError::InvalidInstance(format!(
                "pinned logical qubit {j} outside 1..={}",
                rc.n
            )));
        }
        if j == 1 {
            // the gate label sits on cell 0 only in the initial configuration
            let mut block = Array2::zeros((LOCAL_DIM, LOCAL_DIM));
            block[[Label::Gate1 as usize, Label::Gate1 as usize]] = C_ONE;
            h_in_terms.push(LocalTerm::new(vec![0], block, 1.0)?);
        } else {
            // (filler, qubit_1) on cells (2j-3, 2j-2): the filler survives
            // exactly until the sweep reaches it, and the data bit is still
            // the initial one in every matching configuration
            let cell = (2 * j - 3) as u32;
            let mut block: Array2<C64> = Array2::zeros((64, 64));
            let idx = (Label::Filler as usize) * LOCAL_DIM + Label::Qubit1 as usize;
            block[[idx, idx]] = C_ONE;
            h_in_terms.push(LocalTerm::new(vec![cell, cell + 1], block, 1.0)?);
        }
    }

    // H_pen: per pair, penalize windows never seen in a legal configuration
    let mut h_pen_terms = Vec::new();
    for p in 0..(len - 1) {
        let mut allowed: Vec<(Pat, Pat)> = Vec::new();
        for cfg in &e.configs {
            let w = (cfg[p].pat(), cfg[p + 1].pat());
            if !allowed.contains(&w) {
                allowed.push(w);
            }
        }
        let mut block: Array2<C64> = Array2::eye(64);
        for w in allowed {
            let pa = class_projector(w.0);
            let pb = class_projector(w.1);
            block = &block - &linalg::kron(&pa, &pb);
        }
        h_pen_terms.push(LocalTerm::new(vec![p as u32, p as u32 + 1], block, 1.0)?);
    }

    Ok(OneDHamiltonian {
        rc: rc.clone(),
        enumeration: e,
        pins: pins.to_vec(),
        h_in_terms,
        h_prop_terms,
        h_pen_terms,
    })
}

/// Paper parameter choices for m queries and L legal configurations.
#[derive(Debug, Clone)]
pub struct OneDParams {
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub gamma: f64,
    pub l: usize,
    pub m: usize,
    pub p: f64,
    pub delta_in: f64,
    pub delta_prop: f64,
    pub delta_pen: f64,
}

/// epsilon = 1/(8m), a = 1/(4L), b = 3/(4L), delta = gamma = 1/(256 m^2 L),
/// with the feasibility inequality delta + m epsilon gamma < (epsilon - p)
/// epsilon / L asserted for the configured verifier error p.
pub fn set_parameters(m: usize, l: usize, p: f64) -> Result<OneDParams> {
    if m == 0 || l == 0 {
        return Err(HamError::InvalidInstance("need m, L >= 1".into()));
    }
    let epsilon = 1.0 / (8.0 * m as f64);
    let a = 1.0 / (4.0 * l as f64);
    let b = 3.0 / (4.0 * l as f64);
    let delta = 1.0 / (256.0 * (m * m) as f64 * l as f64);
    let gamma = delta;
    if p >= epsilon {
        return Err(HamError::InvalidInstance(format!(
            "verifier error p = {p} not below epsilon = {epsilon}"
        )));
    }
    let lhs = delta + m as f64 * epsilon * gamma;
    let rhs = (epsilon - p) * epsilon / l as f64;
    if lhs >= rhs {
        return Err(HamError::InvalidInstance(format!(
            "parameter feasibility failed: delta + m eps gamma = {lhs} >= {rhs}"
        )));
    }
    Ok(OneDParams {
        epsilon,
        a,
        b,
        delta,
        gamma,
        l,
        m,
        p,
        delta_in: 1.0,
        delta_prop: 1.0,
        delta_pen: 1.0,
    })
}

/// Sifter cell q_i = (2n)(r*-1) + (2i-1) in 1-indexed cells; 0-indexed here.
pub fn sifter_cell(n: usize, r_star: usize, i: usize) -> usize {
    2 * n * (r_star - 1) + (2 * i - 1) - 1
}

impl OneDHamiltonian {
    pub fn chain_len(&self) -> usize {
        self.rc.chain_len()
    }

    pub fn layout(&self) -> RegisterLayout {
        chain_layout(self.chain_len())
    }

    /// Assemble G = D_in H_in + D_prop H_prop + D_pen H_pen as a full-space
    /// Hamiltonian of 2-local nearest-neighbor terms.
    pub fn assemble(&self, params: &OneDParams) -> Result<Hamiltonian> {
        let layout = self.layout();
        let mut terms = Vec::new();
        for t in &self.h_in_terms {
            let mut t2 = t.clone();
            t2.weight *= params.delta_in;
            terms.push(t2);
        }
        for t in &self.h_prop_terms {
            let mut t2 = t.clone();
            t2.weight *= params.delta_prop;
            terms.push(t2);
        }
        for t in &self.h_pen_terms {
            let mut t2 = t.clone();
            t2.weight *= params.delta_pen;
            terms.push(t2);
        }
        Hamiltonian::new(layout, terms)
    }

    /// Index of the restricted basis state (config t, data d).
    pub fn restricted_dim(&self) -> usize {
        (self.enumeration.l() + 1) * (1 << self.rc.n)
    }

    fn ridx(&self, t: usize, d: usize) -> usize {
        t * (1 << self.rc.n) + d
    }

    /// The full-space basis index of restricted state (t, d).
    pub fn full_index(&self, t: usize, d: usize) -> usize {
        let n = self.rc.n;
        let mut idx = 0usize;
        for cell in &self.enumeration.configs[t] {
            let label = match cell {
                Cell::Pure(p) => p.indices()[0],
                Cell::Data { logical, gate } => {
                    let bit = (d >> (n - logical)) & 1;
                    if *gate {
                        Label::Gate0 as usize + bit
                    } else {
                        Label::Qubit0 as usize + bit
                    }
                }
            };
            idx = idx * LOCAL_DIM + label;
        }
        idx
    }

    /// Embed a restricted vector into the full 8^(2nR) space.
    pub fn embed_restricted(&self, v: &Array1<C64>) -> Array1<C64> {
        let full_dim = LOCAL_DIM.pow(self.chain_len() as u32);
        let mut out = Array1::from_elem(full_dim, C_ZERO);
        let dn = 1 << self.rc.n;
        for t in 0..=self.enumeration.l() {
            for d in 0..dn {
                out[self.full_index(t, d)] = v[self.ridx(t, d)];
            }
        }
        out
    }

    /// Apply a round gate to the global data index.
    fn gate_on_data(&self, u: &Array2<C64>, j: usize, d: usize) -> Vec<(usize, C64)> {
        let n = self.rc.n;
        let a = (d >> (n - j)) & 1;
        let b = (d >> (n - j - 1)) & 1;
        let col = a * 2 + b;
        let mut out = Vec::new();
        for row in 0..4 {
            let amp = u[[row, col]];
            if amp != C_ZERO {
                let (a2, b2) = (row / 2, row % 2);
                let mut d2 = d;
                d2 = (d2 & !(1 << (n - j))) | (a2 << (n - j));
                d2 = (d2 & !(1 << (n - j - 1))) | (b2 << (n - j - 1));
                out.push((d2, amp));
            }
        }
        out
    }

    /// The propagation walk on the restricted basis: the exact edge operator
    /// of the enumerated evolution (equal to the restriction of the 2-local
    /// term family wherever the audit reports no window collisions, and in
    /// particular at R = 1).
    pub fn walk_restricted(&self) -> Array2<C64> {
        let dim = self.restricted_dim();
        let dn = 1 << self.rc.n;
        let mut w: Array2<C64> = Array2::zeros((dim, dim));
        for (t, tr) in self.enumeration.transitions.iter().enumerate() {
            for d in 0..dn {
                let images: Vec<(usize, C64)> = match &tr.gate {
                    Some((u, j)) => self.gate_on_data(u, *j, d),
                    None => vec![(d, C_ONE)],
                };
                let src = self.ridx(t, d);
                w[[src, src]] += c(0.5, 0.0);
                for &(d2, amp) in &images {
                    let dst = self.ridx(t + 1, d2);
                    w[[dst, src]] -= amp * c(0.5, 0.0);
                    w[[src, dst]] -= (amp * c(0.5, 0.0)).conj();
                }
            }
        }
        for t in 1..=self.enumeration.l() {
            for d in 0..dn {
                let i = self.ridx(t, d);
                w[[i, i]] += c(0.5, 0.0);
            }
        }
        w
    }

    /// H_in restricted: diagonal penalties on configs carrying the pin
    /// signature with the pinned data bit set.
    pub fn h_in_restricted(&self) -> Array2<C64> {
        let dim = self.restricted_dim();
        let dn = 1 << self.rc.n;
        let n = self.rc.n;
        let mut m: Array2<C64> = Array2::zeros((dim, dim));
        for &j in &self.pins {
            for (t, cfg) in self.enumeration.configs.iter().enumerate() {
                let hit = if j == 1 {
                    matches!(cfg[0], Cell::Data { logical: 1, gate: true })
                } else {
                    let cell = 2 * j - 3;
                    cfg[cell].pat() == Pat::Filler
                        && matches!(cfg[cell + 1], Cell::Data { gate: false, logical } if logical == j)
                };
                if hit {
                    for d in 0..dn {
                        if (d >> (n - j)) & 1 == 1 {
                            let i = self.ridx(t, d);
                            m[[i, i]] += C_ONE;
                        }
                    }
                }
            }
        }
        m
    }

    /// A 1-local |gate_0><gate_0| observable on a cell, restricted.
    pub fn gate0_restricted(&self, cell: usize) -> Array2<C64> {
        let dim = self.restricted_dim();
        let dn = 1 << self.rc.n;
        let n = self.rc.n;
        let mut m: Array2<C64> = Array2::zeros((dim, dim));
        for (t, cfg) in self.enumeration.configs.iter().enumerate() {
            if let Cell::Data { logical, gate: true } = cfg[cell] {
                for d in 0..dn {
                    if (d >> (n - logical)) & 1 == 0 {
                        let i = self.ridx(t, d);
                        m[[i, i]] += C_ONE;
                    }
                }
            }
        }
        m
    }

    /// G restricted to the legal-configuration subspace.
    pub fn g_restricted(&self, params: &OneDParams) -> Array2<C64> {
        let w = self.walk_restricted().mapv(|z| z * c(params.delta_prop, 0.0));
        let hin = self.h_in_restricted().mapv(|z| z * c(params.delta_in, 0.0));
        // H_pen vanishes on the legal subspace by construction
        &w + &hin
    }

    /// History state for an initial data vector (dimension 2^n): the uniform
    /// superposition over all configs with the data evolved along the line.
    pub fn history_state(&self, initial: &Array1<C64>) -> Result<Array1<C64>> {
        let dn = 1 << self.rc.n;
        if initial.len() != dn {
            return Err(HamError::DimensionMismatch {
                expected: dn,
                got: initial.len(),
            });
        }
        let lp1 = self.enumeration.l() + 1;
        let dim = self.restricted_dim();
        let mut out = Array1::from_elem(dim, C_ZERO);
        let mut data = initial.clone();
        let norm = (lp1 as f64).sqrt();
        for t in 0..lp1 {
            for d in 0..dn {
                out[self.ridx(t, d)] = data[d] / c(norm, 0.0);
            }
            if t < self.enumeration.l() {
                let tr = &self.enumeration.transitions[t];
                if let Some((u, j)) = &tr.gate {
                    let mut next = Array1::from_elem(dn, C_ZERO);
                    for d in 0..dn {
                        if data[d] != C_ZERO {
                            for (d2, amp) in self.gate_on_data(u, *j, d) {
                                next[d2] += amp * data[d];
                            }
                        }
                    }
                    data = next;
                }
            }
        }
        Ok(out)
    }
}

/// A sifter penalty eps |gate_0><gate_0| on each answer cell q_i.
pub fn sifter_terms(
    h: &OneDHamiltonian,
    m: usize,
    params: &OneDParams,
) -> Result<Vec<LocalTerm>> {
    if m > h.rc.n {
        return Err(HamError::InvalidInstance(format!(
            "m = {m} queries exceed n = {}",
            h.rc.n
        )));
    }
    let mut terms = Vec::new();
    for i in 1..=m {
        let cell = sifter_cell(h.rc.n, h.rc.r_star, i);
        if cell >= h.chain_len() {
            return Err(HamError::InvalidInstance(format!(
                "sifter cell {cell} outside the chain"
            )));
        }
        let mut block = Array2::zeros((LOCAL_DIM, LOCAL_DIM));
        block[[Label::Gate0 as usize, Label::Gate0 as usize]] = C_ONE;
        terms.push(LocalTerm::new(vec![cell as u32], block, params.epsilon)?);
    }
    Ok(terms)
}

/// The single-qudit observable A = |gate_0><gate_0| on the last cell.
pub fn build_observable(n: usize, r: usize) -> Result<Hamiltonian> {
    let len = 2 * n * r;
    let layout = chain_layout(len);
    let mut block = Array2::zeros((LOCAL_DIM, LOCAL_DIM));
    block[[Label::Gate0 as usize, Label::Gate0 as usize]] = C_ONE;
    Hamiltonian::new(
        layout,
        vec![LocalTerm::new(vec![len as u32 - 1], block, 1.0)?],
    )
}

/// A complete toy instance: one query wired into a 1D chain with n = 2. The
/// pause round r* = 1 holds the answer in logical qubit 1 (free for a YES
/// query, pinned to zero for NO, which realizes a zero-error verifier); the
/// later rounds move the answer to the output qubit read by the observable.
#[derive(Debug, Clone)]
pub struct ToyOneD {
    pub query: QueryInstance,
    pub status: QueryStatus,
    pub ham: OneDHamiltonian,
    pub params: OneDParams,
    pub sifters: Vec<LocalTerm>,
    pub observable_cell: usize,
}

pub fn build_toy_instance(query: QueryInstance, rounds_after_pause: usize, p: f64) -> Result<ToyOneD> {
    let n = 2;
    let status = classify_query(&query)?.status;
    let mut rounds = vec![vec![identity_gate()]];
    for k in 0..rounds_after_pause {
        // the last round routes the answer to the rightmost logical qubit
        if k + 1 == rounds_after_pause {
            rounds.push(vec![swap_gate()]);
        } else {
            rounds.push(vec![identity_gate()]);
        }
    }
    let rc = RoundCircuit::new(n, rounds, 1)?;
    let pins: Vec<usize> = match status {
        QueryStatus::Yes => vec![2],
        QueryStatus::No | QueryStatus::Invalid => vec![1, 2],
    };
    let ham = build_1d_hamiltonian(&rc, &pins)?;
    let l = ham.enumeration.l();
    let mut params = set_parameters(1, l, p)?;
    params.delta_in = 1.0;
    params.delta_prop = 1.0;
    params.delta_pen = 1.0;
    let sifters = sifter_terms(&ham, 1, &params)?;
    let observable_cell = rc.chain_len() - 1;
    Ok(ToyOneD {
        query,
        status,
        ham,
        params,
        sifters,
        observable_cell,
    })
}

impl ToyOneD {
    /// H = G + H_out on the restricted basis.
    pub fn h_restricted(&self) -> Array2<C64> {
        let mut h = self.ham.g_restricted(&self.params);
        for t in &self.sifters {
            let cell = t.support[0] as usize;
            let s = self
                .ham
                .gate0_restricted(cell)
                .mapv(|z| z * c(t.weight, 0.0));
            h = &h + &s;
        }
        h
    }

    pub fn observable_restricted(&self) -> Array2<C64> {
        self.ham.gate0_restricted(self.observable_cell)
    }
}

#[derive(Debug, Clone)]
pub struct OneDReport {
    pub l: usize,
    pub null_dim_expected: usize,
    pub null_dim_found: usize,
    pub null_space_ok: bool,
    pub history_residual: f64,
    /// largest trace distance from a low-energy eigenvector to the history span
    pub worst_low_energy_distance: f64,
    pub gamma_target: f64,
    pub low_energy_ok: bool,
    /// Eq. (8): per valid query, the measured gate-label overlap and bound
    pub answer_overlaps: Vec<(f64, f64)>,
    pub answer_overlaps_ok: bool,
    /// Eq. (9): the product-projector bound on psi_{t*}
    pub gamma_product: f64,
    pub gamma_product_bound: f64,
    pub gamma_product_ok: bool,
    pub delta_in: f64,
    pub delta_prop: f64,
    pub delta_pen: f64,
    pub observable_low_min: f64,
    pub observable_low_max: f64,
    pub pass: bool,
}

pub const DELTA_SEARCH_CAP: f64 = (1 << 20) as f64;

/// Verify the low-energy structure of a toy instance on the legal subspace:
/// the null space of G is the history span, every low-energy eigenvector of
/// H = G + H_out is close to the span, the answer-overlap bound of the pause
/// round holds, and so does the product bound. The coupling strengths double
/// from 1 until the null-space and distance targets hold.
pub fn verify_low_energy_structure(toy: &mut ToyOneD) -> Result<OneDReport> {
    let n = toy.ham.rc.n;
    let dn = 1usize << n;
    let free_bits = n - toy.ham.pins.len();
    let null_dim_expected = 1usize << free_bits;
    let l = toy.ham.enumeration.l();
    let lp1 = (l + 1) as f64;

    // history span: one history state per pinned-consistent initial basis state
    let mut span: Vec<Array1<C64>> = Vec::new();
    for d in 0..dn {
        let consistent = toy
            .ham
            .pins
            .iter()
            .all(|&j| (d >> (n - j)) & 1 == 0);
        if consistent {
            let mut init = Array1::from_elem(dn, C_ZERO);
            init[d] = C_ONE;
            span.push(toy.ham.history_state(&init)?);
        }
    }
    let dim = toy.ham.restricted_dim();
    let mut span_mat: Array2<C64> = Array2::zeros((dim, span.len()));
    for (k, v) in span.iter().enumerate() {
        for i in 0..dim {
            span_mat[[i, k]] = v[i];
        }
    }
    let span_proj = linalg::projector_from_columns(&span_mat);

    let mut report = None;
    let mut strength = 1.0f64;
    while strength <= DELTA_SEARCH_CAP {
        toy.params.delta_in = strength;
        toy.params.delta_prop = strength;
        toy.params.delta_pen = strength;

        let g = toy.ham.g_restricted(&toy.params);
        let (gvals, _) = linalg::eigh(&g)?;
        let null_dim_found = gvals.iter().filter(|v| v.abs() < 1e-10).count();
        let history_residual = span
            .iter()
            .map(|v| linalg::norm2(&g.dot(v)))
            .fold(0.0f64, f64::max);
        let null_space_ok = null_dim_found == null_dim_expected && history_residual < 1e-10;

        let h = toy.h_restricted();
        let (hvals, hvecs) = linalg::eigh(&h)?;
        let lambda = hvals[0];
        let mut worst = 0.0f64;
        let mut obs_low_min = f64::INFINITY;
        let mut obs_low_max = f64::NEG_INFINITY;
        let a_res = toy.observable_restricted();
        for k in 0..hvals.len() {
            if hvals[k] > lambda + toy.params.delta + 1e-12 {
                break;
            }
            let v = hvecs.column(k).to_owned();
            let pv = span_proj.dot(&v);
            let overlap2 = linalg::norm2(&pv).powi(2);
            let td = 2.0 * (1.0 - overlap2).max(0.0).sqrt();
            worst = worst.max(td);
            let exp = linalg::quadratic_form(&a_res, &v).re;
            obs_low_min = obs_low_min.min(exp);
            obs_low_max = obs_low_max.max(exp);
        }
        let low_energy_ok = worst <= toy.params.gamma;

        if null_space_ok && low_energy_ok {
            report = Some((
                null_dim_found,
                history_residual,
                worst,
                obs_low_min,
                obs_low_max,
                hvals,
                hvecs,
            ));
            break;
        }
        strength *= 2.0;
    }
    let (null_dim_found, history_residual, worst, obs_low_min, obs_low_max, hvals, hvecs) =
        report.ok_or_else(|| {
            HamError::InvalidInstance(format!(
                "coupling search exhausted at {DELTA_SEARCH_CAP}"
            ))
        })?;

    // Eq. (8): for the ground state of H (a near-history state), the overlap
    // with |gate_{x}> on the sifter cell is at least (1 - eps)/L
    let ground = hvecs.column(0).to_owned();
    let x1 = toy.status == QueryStatus::Yes;
    let cell = sifter_cell(n, toy.ham.rc.r_star, 1);
    let mut answer_overlaps = Vec::new();
    if toy.status != QueryStatus::Invalid {
        // projector onto gate_{x1} at the cell, restricted
        let dn = 1usize << n;
        let mut proj: Array2<C64> = Array2::zeros((dim, dim));
        for (t, cfg) in toy.ham.enumeration.configs.iter().enumerate() {
            if let Cell::Data { logical, gate: true } = cfg[cell] {
                for d in 0..dn {
                    let bit = (d >> (n - logical)) & 1 == 1;
                    if bit == x1 {
                        let i = t * dn + d;
                        proj[[i, i]] += C_ONE;
                    }
                }
            }
        }
        let measured = linalg::quadratic_form(&proj, &ground).re;
        let bound = (1.0 - toy.params.epsilon) / lp1;
        answer_overlaps.push((measured, bound));
    }
    let answer_overlaps_ok = answer_overlaps.iter().all(|&(m, b)| m >= b - 1e-9);

    // Eq. (9): on the pause-round component psi_{t*}, the product of the
    // correct-answer projectors keeps weight >= 1 - |I| eps
    let t_star = toy
        .ham
        .enumeration
        .gate_configs_of_cell(sifter_cell(n, toy.ham.rc.r_star, 1))
        .into_iter()
        .next()
        .ok_or_else(|| HamError::InvalidInstance("no pause configuration".into()))?;
    let mut comp = Array1::from_elem(dn, C_ZERO);
    for d in 0..dn {
        comp[d] = ground[t_star * dn + d];
    }
    let cnorm = linalg::norm2(&comp);
    let mut gamma_product = 1.0;
    if cnorm > 1e-9 && toy.status != QueryStatus::Invalid {
        comp.mapv_inplace(|z| z / c(cnorm, 0.0));
        // answer bit = logical qubit at the sifter cell in config t_star
        if let Cell::Data { logical, .. } = toy.ham.enumeration.configs[t_star][cell] {
            let mut keep = 0.0;
            for d in 0..dn {
                let bit = (d >> (n - logical)) & 1 == 1;
                if bit == x1 {
                    keep += comp[d].norm_sqr();
                }
            }
            gamma_product = keep;
        }
    }
    let gamma_product_bound = 1.0 - toy.params.m as f64 * toy.params.epsilon;
    let gamma_product_ok = gamma_product >= gamma_product_bound - 1e-9;

    let lambda = hvals[0];
    let _ = lambda;
    let pass = null_dim_found == null_dim_expected
        && history_residual < 1e-10
        && worst <= toy.params.gamma
        && answer_overlaps_ok
        && gamma_product_ok;

    Ok(OneDReport {
        l,
        null_dim_expected,
        null_dim_found,
        null_space_ok: null_dim_found == null_dim_expected && history_residual < 1e-10,
        history_residual,
        worst_low_energy_distance: worst,
        gamma_target: toy.params.gamma,
        low_energy_ok: worst <= toy.params.gamma,
        answer_overlaps,
        answer_overlaps_ok,
        gamma_product,
        gamma_product_bound,
        gamma_product_ok,
        delta_in: toy.params.delta_in,
        delta_prop: toy.params.delta_prop,
        delta_pen: toy.params.delta_pen,
        observable_low_min: obs_low_min,
        observable_low_max: obs_low_max,
        pass,
    })
}
