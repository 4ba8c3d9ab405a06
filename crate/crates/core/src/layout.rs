//! Register layouts: ordered qudit sites with named register groupings.
//!
//! Basis convention, used everywhere including the file formats: site 0 (the
//! first site in the ordered list) is the most significant digit of the
//! mixed-radix basis index.

use crate::error::{HamError, Result};
use std::collections::BTreeMap;

pub type SiteId = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct RegisterLayout {
    /// Ordered (site id, local dimension) pairs. Order defines significance.
    sites: Vec<(SiteId, usize)>,
    /// Named registers: name -> ordered site ids.
    registers: BTreeMap<String, Vec<SiteId>>,
    /// site id -> position in `sites`
    index: BTreeMap<SiteId, usize>,
}

impl RegisterLayout {
    pub fn new(sites: Vec<(SiteId, usize)>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (pos, &(id, dim)) in sites.iter().enumerate() {
            if dim < 2 {
                return Err(HamError::InvalidInstance(format!(
                    "site {id} has dimension {dim} < 2"
                )));
            }
            if index.insert(id, pos).is_some() {
                return Err(HamError::DuplicateSite(id));
            }
        }
        let layout = Self {
            sites,
            registers: BTreeMap::new(),
            index,
        };
        layout.total_dim()?; // must fit in 64 bits
        Ok(layout)
    }

    /// n qudits of equal dimension, ids 0..n.
    pub fn uniform(n: usize, dim: usize) -> Self {
        Self::new((0..n as u32).map(|i| (i, dim)).collect()).expect("uniform layout")
    }

    pub fn qubits(n: usize) -> Self {
        Self::uniform(n, 2)
    }

    pub fn add_register(&mut self, name: &str, ids: Vec<SiteId>) -> Result<()> {
        for &id in &ids {
            if !self.index.contains_key(&id) {
                return Err(HamError::SiteNotFound(id));
            }
        }
        self.registers.insert(name.to_string(), ids);
        Ok(())
    }

    pub fn registers(&self) -> &BTreeMap<String, Vec<SiteId>> {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Option<&[SiteId]> {
        self.registers.get(name).map(|v| v.as_slice())
    }

    pub fn sites(&self) -> &[(SiteId, usize)] {
        &self.sites
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn position(&self, id: SiteId) -> Result<usize> {
        self.index
            .get(&id)
            .copied()
            .ok_or(HamError::SiteNotFound(id))
    }

    pub fn dim_of(&self, id: SiteId) -> Result<usize> {
        Ok(self.sites[self.position(id)?].1)
    }

    /// Total Hilbert-space dimension; errors if it does not fit in u64.
    pub fn total_dim(&self) -> Result<usize> {
        let mut d: u64 = 1;
        for &(_, dim) in &self.sites {
            d = d
                .checked_mul(dim as u64)
                .ok_or(HamError::DimOverflow)?;
        }
        usize::try_from(d).map_err(|_| HamError::DimOverflow)
    }

    /// Stride of the site at `pos`: index contribution of one unit of its digit.
    /// With site 0 most significant, stride(pos) = product of dims of later sites.
    pub fn stride(&self, pos: usize) -> usize {
        self.sites[pos + 1..].iter().map(|&(_, d)| d).product()
    }

    /// Decompose a basis index into per-site digits (site order).
    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.sites.len()];
        for pos in (0..self.sites.len()).rev() {
            let d = self.sites[pos].1;
            out[pos] = idx % d;
            idx /= d;
        }
        out
    }

    /// Compose a basis index from per-site digits.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        let mut idx = 0usize;
        for (pos, &dig) in digits.iter().enumerate() {
            idx = idx * self.sites[pos].1 + dig;
        }
        idx
    }

    /// Concatenate two layouts, offsetting the ids of `other` by `id_offset`.
    pub fn concat(&self, other: &RegisterLayout, id_offset: u32) -> Result<RegisterLayout> {
        let mut sites = self.sites.clone();
        sites.extend(other.sites.iter().map(|&(id, d)| (id + id_offset, d)));
        let mut out = RegisterLayout::new(sites)?;
        for (name, ids) in &self.registers {
            out.add_register(name, ids.clone())?;
        }
        for (name, ids) in &other.registers {
            out.add_register(name, ids.iter().map(|&i| i + id_offset).collect())?;
        }
        Ok(out)
    }
}
