//! Finite periodic boxes of `Z^d`: vertex/edge indexing and directions.
//!
//! Vertices are flat indices into `[0, L^d)` with axis 0 fastest
//! (`flat(x) = sum_k x_k L^k`). Undirected edges are indexed
//! dimension-major: the edge `(x, x + e_k)` has index `k * L^d + flat(x)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One of the `2d` lattice directions, encoded as `2 * axis + negative`.
///
/// The enumeration order is `(+e_1, -e_1, +e_2, -e_2, ...)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Direction(u8);

impl Direction {
    pub fn new(axis: usize, negative: bool) -> Self {
        debug_assert!(axis < 128);
        Direction((axis as u8) << 1 | negative as u8)
    }

    pub fn positive(axis: usize) -> Self {
        Direction::new(axis, false)
    }

    pub fn negative(axis: usize) -> Self {
        Direction::new(axis, true)
    }

    #[inline]
    pub fn axis(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn opposite(self) -> Self {
        Direction(self.0 ^ 1)
    }

    /// Position in the `(+e_1, -e_1, ..., +e_d, -e_d)` enumeration.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Scalar product of this unit direction with the basis vector `e_b`.
    #[inline]
    pub fn unit_dot(self, axis_b: usize) -> f64 {
        if self.axis() != axis_b {
            0.0
        } else if self.is_negative() {
            -1.0
        } else {
            1.0
        }
    }

    /// All `2d` directions in canonical order.
    pub fn all(dimension: usize) -> impl Iterator<Item = Direction> {
        (0..2 * dimension as u8).map(Direction)
    }
}

/// Geometry of a periodic box of side `L` in dimension `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    dimension: usize,
    side: usize,
    periodic: bool,
    strides: Vec<usize>,
    vertices: usize,
}

impl LatticeSpec {
    /// `d >= 2`, `L` even and `>= 4`; the index spaces must fit in `usize`.
    pub fn new(dimension: usize, side: usize) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidLattice("dimension must be at least 2"));
        }
        if side < 4 {
            return Err(Error::InvalidLattice("side must be at least 4"));
        }
        if !side.is_multiple_of(2) {
            return Err(Error::InvalidLattice("side must be even"));
        }
        let mut strides = Vec::with_capacity(dimension);
        let mut vertices = 1usize;
        for _ in 0..dimension {
            strides.push(vertices);
            vertices = vertices
                .checked_mul(side)
                .ok_or(Error::InvalidLattice("vertex count overflows usize"))?;
        }
        vertices
            .checked_mul(2 * dimension)
            .ok_or(Error::InvalidLattice("edge count overflows usize"))?;
        Ok(LatticeSpec {
            dimension,
            side,
            periodic: true,
            strides,
            vertices,
        })
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    /// Always true in this version; kept for a future open-boundary mode.
    #[inline]
    pub fn periodic(&self) -> bool {
        self.periodic
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    /// Number of undirected edges, `d * L^d`.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.dimension * self.vertices
    }

    #[inline]
    pub fn coord(&self, vertex: usize, axis: usize) -> usize {
        (vertex / self.strides[axis]) % self.side
    }

    pub fn vertex_from_coords(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.dimension);
        coords
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| (c % self.side) * s)
            .sum()
    }

    /// Periodic neighbor of `vertex` in direction `dir`.
    #[inline]
    pub fn neighbor(&self, vertex: usize, dir: Direction) -> usize {
        let stride = self.strides[dir.axis()];
        let coord = (vertex / stride) % self.side;
        if dir.is_negative() {
            if coord == 0 {
                vertex + (self.side - 1) * stride
            } else {
                vertex - stride
            }
        } else if coord == self.side - 1 {
            vertex - (self.side - 1) * stride
        } else {
            vertex + stride
        }
    }

    /// Index of the undirected edge `(vertex, vertex + e_axis)`.
    #[inline]
    pub fn undirected_edge(&self, vertex: usize, axis: usize) -> usize {
        axis * self.vertices + vertex
    }

    /// Canonical storage slot of the directed edge `(vertex, dir)`:
    /// the undirected index plus whether the direction runs against the
    /// stored (positive) orientation.
    #[inline]
    pub fn oriented_edge(&self, vertex: usize, dir: Direction) -> (usize, bool) {
        if dir.is_negative() {
            (
                self.undirected_edge(self.neighbor(vertex, dir), dir.axis()),
                true,
            )
        } else {
            (self.undirected_edge(vertex, dir.axis()), false)
        }
    }

    /// Signed offset of `vertex` from `origin` along `axis`, wrapped to
    /// `[-L/2, L/2)`.
    #[inline]
    pub fn centered_offset(&self, vertex: usize, origin: usize, axis: usize) -> i64 {
        let l = self.side as i64;
        let diff = self.coord(vertex, axis) as i64 - self.coord(origin, axis) as i64;
        (diff + l + l / 2) % l - l / 2
    }

    pub fn check_vertex(&self, vertex: usize) -> Result<()> {
        if vertex < self.vertices {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex,
                count: self.vertices,
            })
        }
    }
}
