//! Bernoulli bond configurations on the periodic box.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{Direction, LatticeSpec};
use crate::rng::{keyed_u64, mix64, unit_f64};

/// Bit-packed open/closed states for every undirected edge of the box.
///
/// Each undirected edge is stored once; `omega(x, y) = omega(y, x)` holds by
/// construction. Regenerating with the same `(spec, p, seed)` yields
/// bit-identical bonds.
#[derive(Clone, Debug, PartialEq)]
pub struct BondConfiguration {
    spec: LatticeSpec,
    p: f64,
    seed: u64,
    blocks: Vec<u64>,
}

/// Sample each edge open independently with probability `p`.
///
/// The decision for edge `i` depends only on `(seed, i)` through a
/// counter-based generator, so sampling is order-independent and could be
/// split over edge-index ranges without changing the result.
pub fn sample_bonds(spec: &LatticeSpec, p: f64, seed: u64) -> Result<BondConfiguration> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let edges = spec.edge_count();
    let mut blocks = vec![0u64; edges.div_ceil(64)];
    let key = mix64(seed);
    for edge in 0..edges {
        if unit_f64(keyed_u64(key, edge as u64)) < p {
            blocks[edge / 64] |= 1u64 << (edge % 64);
        }
    }
    Ok(BondConfiguration {
        spec: spec.clone(),
        p,
        seed,
        blocks,
    })
}

impl BondConfiguration {
    #[inline]
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// State of the undirected edge with the given index.
    #[inline]
    pub fn is_open_edge(&self, edge: usize) -> bool {
        self.blocks[edge / 64] >> (edge % 64) & 1 == 1
    }

    /// State of the directed edge `(x, x + e)`, with periodic wrap.
    ///
    /// Satisfies `translated_bond(x, e) == translated_bond(x + e, -e)`.
    #[inline]
    pub fn translated_bond(&self, x: usize, e: Direction) -> bool {
        let (edge, _) = self.spec.oriented_edge(x, e);
        self.is_open_edge(edge)
    }

    /// Number of open edges incident to `x`.
    pub fn degree(&self, x: usize) -> usize {
        Direction::all(self.spec.dimension())
            .filter(|&e| self.translated_bond(x, e))
            .count()
    }

    /// Open periodic neighbors of `x` in `(+e_1, -e_1, ..., +e_d, -e_d)`
    /// order.
    pub fn open_neighbors(&self, x: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * self.spec.dimension());
        for e in Direction::all(self.spec.dimension()) {
            if self.translated_bond(x, e) {
                out.push(self.spec.neighbor(x, e));
            }
        }
        out
    }

    /// The `k`-th open direction at `x` (in canonical order), if any.
    #[inline]
    pub(crate) fn nth_open_direction(&self, x: usize, k: usize) -> Option<Direction> {
        let mut seen = 0;
        for e in Direction::all(self.spec.dimension()) {
            if self.translated_bond(x, e) {
                if seen == k {
                    return Some(e);
                }
                seen += 1;
            }
        }
        None
    }

    pub fn open_edge_count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Raw bond bits, LSB-first, `ceil(edge_count / 8)` bytes.
    pub fn bond_bytes(&self) -> Vec<u8> {
        let n = self.spec.edge_count().div_ceil(8);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push((self.blocks[i / 8] >> (8 * (i % 8))) as u8);
        }
        out
    }

    /// Rebuild a configuration from its serialized parts. Bits beyond the
    /// edge count must be zero.
    pub fn from_parts(spec: LatticeSpec, p: f64, seed: u64, bytes: &[u8]) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        let edges = spec.edge_count();
        if bytes.len() != edges.div_ceil(8) {
            return Err(Error::Internal("bond byte length mismatch"));
        }
        let mut blocks = vec![0u64; edges.div_ceil(64)];
        for (i, &b) in bytes.iter().enumerate() {
            blocks[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        if !edges.is_multiple_of(64) {
            let tail = blocks[edges / 64] >> (edges % 64);
            if tail != 0 {
                return Err(Error::Internal("nonzero padding bits in bond data"));
            }
        }
        Ok(BondConfiguration {
            spec,
            p,
            seed,
            blocks,
        })
    }
}
