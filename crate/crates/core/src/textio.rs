//! Line-oriented text serialization.
//!
//! Hamiltonian files:
//!   SITE <id> <dim>
//!   REG <name> <ids...>
//!   TERM <weight> <ids...>
//!   (re,im) (re,im) ...        one line per block row, row-major
//!
//! Extensions used by the instance kinds:
//!   QUERY <a> <b>              starts a query section (its own SITE/TERM lines)
//!   OBS                        separates H from the observable A
//!   THRESH <a> <b> <delta>     APX-SIM thresholds
//!   ISO <site> <rows> <cols>   per-site isometry block (simulation witnesses)
//!
//! Floats are printed with Rust's shortest round-trip formatting, so a write
//! followed by a read reproduces every f64 bit-exactly.

use crate::error::{HamError, Result};
use crate::layout::RegisterLayout;
use crate::operator::{Hamiltonian, LocalTerm};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use std::fmt::Write as _;

fn fmt_f64(x: f64) -> String {
    // Rust's float Display is shortest-round-trip; normalize -0 for stability.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x}")
}

fn fmt_c(z: C64) -> String {
    format!("({},{})", fmt_f64(z.re), fmt_f64(z.im))
}

pub fn write_hamiltonian(h: &Hamiltonian) -> String {
    let mut out = String::new();
    write_hamiltonian_into(h, &mut out);
    out
}

pub fn write_hamiltonian_into(h: &Hamiltonian, out: &mut String) {
    for &(id, dim) in h.layout.sites() {
        let _ = writeln!(out, "SITE {id} {dim}");
    }
    for (name, ids) in h.layout.registers() {
        let _ = write!(out, "REG {name}");
        for id in ids {
            let _ = write!(out, " {id}");
        }
        let _ = writeln!(out);
    }
    for t in &h.terms {
        write_term_into(t, out);
    }
}

pub fn write_term_into(t: &LocalTerm, out: &mut String) {
    let _ = write!(out, "TERM {}", fmt_f64(t.weight));
    for s in &t.support {
        let _ = write!(out, " {s}");
    }
    let _ = writeln!(out);
    let n = t.block.nrows();
    for r in 0..n {
        let row: Vec<String> = (0..n).map(|c| fmt_c(t.block[[r, c]])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

pub struct LineParser<'a> {
    lines: Vec<&'a str>,
    pub pos: usize,
}

impl<'a> LineParser<'a> {
    pub fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().collect(),
            pos: 0,
        }
    }

    pub fn peek(&self) -> Option<&'a str> {
        self.lines[self.pos..]
            .iter()
            .map(|l| l.trim())
            .position(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|off| self.lines[self.pos + off].trim())
    }

    pub fn next_line(&mut self) -> Option<(usize, &'a str)> {
        while self.pos < self.lines.len() {
            let line = self.lines[self.pos].trim();
            self.pos += 1;
            if !line.is_empty() && !line.starts_with('#') {
                return Some((self.pos, line));
            }
        }
        None
    }

    pub fn err(&self, msg: impl Into<String>) -> HamError {
        HamError::Parse {
            line: self.pos,
            msg: msg.into(),
        }
    }
}

fn parse_f64(p: &LineParser, tok: &str) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| p.err(format!("bad float {tok:?}")))
}

fn parse_complex(p: &LineParser, tok: &str) -> Result<C64> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| p.err(format!("bad complex {tok:?}")))?;
    let (re, im) = inner
        .split_once(',')
        .ok_or_else(|| p.err(format!("bad complex {tok:?}")))?;
    Ok(C64::new(parse_f64(p, re)?, parse_f64(p, im)?))
}

/// Parse one Hamiltonian: consumes SITE/REG/TERM records until a line that
/// starts a different section (or end of input).
pub fn parse_hamiltonian(p: &mut LineParser) -> Result<Hamiltonian> {
    let mut sites = Vec::new();
    let mut regs: Vec<(String, Vec<u32>)> = Vec::new();
    let mut raw_terms: Vec<(f64, Vec<u32>, Vec<Vec<C64>>)> = Vec::new();

    while let Some(line) = p.peek() {
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap();
        match head {
            "SITE" => {
                p.next_line();
                let id: u32 = toks
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| p.err("SITE needs <id> <dim>"))?;
                let dim: usize = toks
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| p.err("SITE needs <id> <dim>"))?;
                sites.push((id, dim));
            }
            "REG" => {
                p.next_line();
                let name = toks
                    .next()
                    .ok_or_else(|| p.err("REG needs <name> <ids...>"))?
                    .to_string();
                let ids: Vec<u32> = toks
                    .map(|t| t.parse().map_err(|_| p.err(format!("bad site id {t:?}"))))
                    .collect::<Result<_>>()?;
                regs.push((name, ids));
            }
            "TERM" => {
                p.next_line();
                let weight = parse_f64(p, toks.next().ok_or_else(|| p.err("TERM needs weight"))?)?;
                let support: Vec<u32> = toks
                    .map(|t| t.parse().map_err(|_| p.err(format!("bad site id {t:?}"))))
                    .collect::<Result<_>>()?;
                let mut block_dim = 1usize;
                for &s in &support {
                    let dim = sites
                        .iter()
                        .find(|&&(id, _)| id == s)
                        .map(|&(_, d)| d)
                        .ok_or(HamError::SiteNotFound(s))?;
                    block_dim *= dim;
                }
                let mut rows = Vec::with_capacity(block_dim);
                for _ in 0..block_dim {
                    let (_, row_line) = p
                        .next_line()
                        .ok_or_else(|| p.err("unexpected end of block"))?;
                    let row: Vec<C64> = row_line
                        .split_whitespace()
                        .map(|t| parse_complex(p, t))
                        .collect::<Result<_>>()?;
                    if row.len() != block_dim {
                        return Err(p.err(format!(
                            "block row has {} entries, expected {block_dim}",
                            row.len()
                        )));
                    }
                    rows.push(row);
                }
                raw_terms.push((weight, support, rows));
            }
            _ => break,
        }
    }

    let mut layout = RegisterLayout::new(sites)?;
    for (name, ids) in regs {
        layout.add_register(&name, ids)?;
    }
    let mut terms = Vec::new();
    for (weight, support, rows) in raw_terms {
        let n = rows.len();
        let mut block = Array2::zeros((n, n));
        for (r, row) in rows.iter().enumerate() {
            for (c, &z) in row.iter().enumerate() {
                block[[r, c]] = z;
            }
        }
        terms.push(LocalTerm::new(support, block, weight)?);
    }
    Hamiltonian::new(layout, terms)
}

pub fn read_hamiltonian(text: &str) -> Result<Hamiltonian> {
    let mut p = LineParser::new(text);
    let h = parse_hamiltonian(&mut p)?;
    if let Some(line) = p.peek() {
        return Err(p.err(format!("unexpected trailing record {line:?}")));
    }
    Ok(h)
}

/// Parse a run of TERM records against an existing layout (used for the
/// observable section of instance files).
pub fn parse_terms_for_layout(
    p: &mut LineParser,
    layout: &RegisterLayout,
) -> Result<Vec<LocalTerm>> {
    let mut terms = Vec::new();
    while let Some(line) = p.peek() {
        if !line.starts_with("TERM") {
            break;
        }
        let (_, head) = p.next_line().unwrap();
        let mut toks = head.split_whitespace();
        toks.next();
        let weight = parse_f64(p, toks.next().ok_or_else(|| p.err("TERM needs weight"))?)?;
        let support: Vec<u32> = toks
            .map(|t| t.parse().map_err(|_| p.err(format!("bad site id {t:?}"))))
            .collect::<Result<_>>()?;
        let mut block_dim = 1usize;
        for &s in &support {
            block_dim *= layout.dim_of(s)?;
        }
        let mut block = Array2::zeros((block_dim, block_dim));
        for r in 0..block_dim {
            let (_, row_line) = p
                .next_line()
                .ok_or_else(|| p.err("unexpected end of block"))?;
            let row: Vec<C64> = row_line
                .split_whitespace()
                .map(|t| parse_complex(p, t))
                .collect::<Result<_>>()?;
            if row.len() != block_dim {
                return Err(p.err("block row length mismatch"));
            }
            for (c, &z) in row.iter().enumerate() {
                block[[r, c]] = z;
            }
        }
        terms.push(LocalTerm::new(support, block, weight)?);
    }
    Ok(terms)
}

/// Write an isometry block for a simulation-witness file.
pub fn write_iso_into(site: u32, iso: &Array2<C64>, out: &mut String) {
    let _ = writeln!(out, "ISO {site} {} {}", iso.nrows(), iso.ncols());
    for r in 0..iso.nrows() {
        let row: Vec<String> = (0..iso.ncols()).map(|c| fmt_c(iso[[r, c]])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

pub fn parse_iso(p: &mut LineParser) -> Result<(u32, Array2<C64>)> {
    let (_, line) = p.next_line().ok_or_else(|| p.err("expected ISO"))?;
    let mut toks = line.split_whitespace();
    if toks.next() != Some("ISO") {
        return Err(p.err("expected ISO record"));
    }
    let site: u32 = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| p.err("ISO needs <site> <rows> <cols>"))?;
    let rows: usize = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| p.err("ISO needs <site> <rows> <cols>"))?;
    let cols: usize = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| p.err("ISO needs <site> <rows> <cols>"))?;
    let mut m = Array2::zeros((rows, cols));
    for r in 0..rows {
        let (_, row_line) = p.next_line().ok_or_else(|| p.err("unexpected end of ISO"))?;
        let row: Vec<C64> = row_line
            .split_whitespace()
            .map(|t| parse_complex(p, t))
            .collect::<Result<_>>()?;
        if row.len() != cols {
            return Err(p.err("ISO row length mismatch"));
        }
        for (c, &z) in row.iter().enumerate() {
            m[[r, c]] = z;
        }
    }
    Ok((site, m))
}

pub fn parse_keyword_floats(p: &mut LineParser, keyword: &str, n: usize) -> Result<Vec<f64>> {
    let (_, line) = p
        .next_line()
        .ok_or_else(|| p.err(format!("expected {keyword}")))?;
    let mut toks = line.split_whitespace();
    if toks.next() != Some(keyword) {
        return Err(p.err(format!("expected {keyword} record, got {line:?}")));
    }
    let vals: Vec<f64> = toks.map(|t| parse_f64(p, t)).collect::<Result<_>>()?;
    if vals.len() != n {
        return Err(p.err(format!("{keyword} needs {n} values")));
    }
    Ok(vals)
}
