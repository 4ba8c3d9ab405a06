//! Classical reversible circuits as ordered lists of permutation gates.

use crate::error::{HamError, Result};

/// A reversible gate: a permutation table over the computational basis of its
/// support bits. `table[x] = y` means input pattern x maps to output pattern y,
/// with the first support bit most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub support: Vec<usize>,
    pub table: Vec<usize>,
}

impl Gate {
    pub fn new(support: Vec<usize>, table: Vec<usize>) -> Result<Self> {
        let k = support.len();
        let size = 1usize << k;
        if table.len() != size {
            return Err(HamError::InvalidInstance(format!(
                "gate table has {} entries, expected {size}",
                table.len()
            )));
        }
        let mut seen = vec![false; size];
        for &y in &table {
            if y >= size || seen[y] {
                return Err(HamError::InvalidInstance(
                    "gate table is not a permutation".into(),
                ));
            }
            seen[y] = true;
        }
        Ok(Self { support, table })
    }

    pub fn identity(support: Vec<usize>) -> Self {
        let size = 1usize << support.len();
        Self {
            support,
            table: (0..size).collect(),
        }
    }

    pub fn not(bit: usize) -> Self {
        Self {
            support: vec![bit],
            table: vec![1, 0],
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        // basis order: control is the first support bit (most significant)
        Self {
            support: vec![control, target],
            table: vec![0b00, 0b01, 0b11, 0b10],
        }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self {
            support: vec![a, b],
            table: vec![0b00, 0b10, 0b01, 0b11],
        }
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Self {
        let mut table: Vec<usize> = (0..8).collect();
        table.swap(0b110, 0b111);
        Self {
            support: vec![c1, c2, target],
            table,
        }
    }

    pub fn apply(&self, bits: &mut [bool]) {
        let mut x = 0usize;
        for &b in &self.support {
            x = (x << 1) | usize::from(bits[b]);
        }
        let y = self.table[x];
        for (k, &b) in self.support.iter().enumerate() {
            bits[b] = (y >> (self.support.len() - 1 - k)) & 1 == 1;
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReversibleCircuit {
    pub width: usize,
    pub gates: Vec<Gate>,
    pub output_bit: usize,
}

impl ReversibleCircuit {
    pub fn new(width: usize, gates: Vec<Gate>, output_bit: usize) -> Result<Self> {
        if output_bit >= width {
            return Err(HamError::InvalidInstance(format!(
                "output bit {output_bit} outside width {width}"
            )));
        }
        for g in &gates {
            for &b in &g.support {
                if b >= width {
                    return Err(HamError::InvalidInstance(format!(
                        "gate touches bit {b} outside width {width}"
                    )));
                }
            }
            let mut sorted = g.support.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != g.support.len() {
                return Err(HamError::InvalidInstance(
                    "gate support has repeated bits".into(),
                ));
            }
        }
        Ok(Self {
            width,
            gates,
            output_bit,
        })
    }

    pub fn eval(&self, input: &[bool]) -> Vec<bool> {
        assert_eq!(input.len(), self.width);
        let mut bits = input.to_vec();
        for g in &self.gates {
            g.apply(&mut bits);
        }
        bits
    }

    pub fn output(&self, input: &[bool]) -> bool {
        self.eval(input)[self.output_bit]
    }

    /// The circuit as a permutation of {0,..,2^width-1}; first bit most significant.
    pub fn permutation(&self) -> Vec<usize> {
        let n = 1usize << self.width;
        (0..n)
            .map(|x| {
                let bits: Vec<bool> = (0..self.width)
                    .map(|b| (x >> (self.width - 1 - b)) & 1 == 1)
                    .collect();
                let out = self.eval(&bits);
                out.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
            })
            .collect()
    }
}
