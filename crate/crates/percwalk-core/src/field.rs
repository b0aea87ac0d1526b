//! Fields on directed open edges: gradients, divergence, coordinate fields.
//!
//! A value attached to the directed edge `(x, e)` lives on the pair
//! (vertex, direction); fields are only meaningful where the edge is open.
//! [`DirectionField`] stores antisymmetric fields (one value per undirected
//! edge), while [`DirectedEdgeValues`] holds arbitrary directed data for
//! identity checks.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{Direction, LatticeSpec};
use crate::percolation::BondConfiguration;

/// Anything that can be evaluated on a directed edge `(x, e)`.
pub trait EdgeField {
    fn value(&self, spec: &LatticeSpec, x: usize, e: Direction) -> f64;
}

/// Antisymmetric real field on directed edges, stored once per undirected
/// edge (positive orientation), so `value(x, e) = -value(x+e, -e)` holds by
/// construction.
#[derive(Clone, Debug)]
pub struct DirectionField {
    spec: LatticeSpec,
    /// Lattice direction `b` this field belongs to.
    axis: usize,
    values: Vec<f64>,
}

impl DirectionField {
    pub fn zeros(spec: &LatticeSpec, axis: usize) -> Self {
        DirectionField {
            spec: spec.clone(),
            axis,
            values: vec![0.0; spec.edge_count()],
        }
    }

    #[inline]
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    /// Axis of the direction `b` the field is associated with.
    #[inline]
    pub fn axis(&self) -> usize {
        self.axis
    }

    /// Oriented value on the directed edge `(x, e)`.
    #[inline]
    pub fn value(&self, x: usize, e: Direction) -> f64 {
        let (edge, reversed) = self.spec.oriented_edge(x, e);
        if reversed {
            -self.values[edge]
        } else {
            self.values[edge]
        }
    }

    /// Value on the undirected edge `(x, x + e_axis)` in its positive
    /// orientation.
    #[inline]
    pub fn stored(&self, edge: usize) -> f64 {
        self.values[edge]
    }

    /// Set the value of the undirected edge `(x, x + e_axis)` (positive
    /// orientation).
    #[inline]
    pub fn set(&mut self, x: usize, axis: usize, value: f64) {
        let edge = self.spec.undirected_edge(x, axis);
        self.values[edge] = value;
    }

    pub fn raw(&self) -> &[f64] {
        &self.values
    }

    pub fn raw_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

impl EdgeField for DirectionField {
    #[inline]
    fn value(&self, _spec: &LatticeSpec, x: usize, e: Direction) -> f64 {
        DirectionField::value(self, x, e)
    }
}

/// Arbitrary (not necessarily antisymmetric) values on directed edges.
#[derive(Clone, Debug)]
pub struct DirectedEdgeValues {
    values: Vec<f64>,
    vertices: usize,
}

impl DirectedEdgeValues {
    pub fn from_fn(spec: &LatticeSpec, mut f: impl FnMut(usize, Direction) -> f64) -> Self {
        let n = spec.vertex_count();
        let mut values = vec![0.0; 2 * spec.dimension() * n];
        for x in 0..n {
            for e in Direction::all(spec.dimension()) {
                values[e.index() * n + x] = f(x, e);
            }
        }
        DirectedEdgeValues {
            values,
            vertices: n,
        }
    }
}

impl EdgeField for DirectedEdgeValues {
    #[inline]
    fn value(&self, _spec: &LatticeSpec, x: usize, e: Direction) -> f64 {
        self.values[e.index() * self.vertices + x]
    }
}

/// The coordinate field of direction `b`: `(x, e) -> e . b`, i.e. `+1` on
/// `e = b`, `-1` on `e = -b` and `0` across the other axes.
#[derive(Clone, Copy, Debug)]
pub struct HatField {
    axis: usize,
}

impl HatField {
    #[inline]
    pub fn axis(&self) -> usize {
        self.axis
    }
}

impl EdgeField for HatField {
    #[inline]
    fn value(&self, _spec: &LatticeSpec, _x: usize, e: Direction) -> f64 {
        e.unit_dot(self.axis)
    }
}

/// The constant coordinate field for lattice direction `b` (given by its
/// axis).
pub fn hat_field(axis: usize) -> HatField {
    HatField { axis }
}

/// Gradient of a vertex function across the open edge `(x, x + e)`:
/// `u(x + e) - u(x)`. Closed edges are rejected; fields are only
/// determined on open edges.
pub fn gradient(
    config: &BondConfiguration,
    u: &[f64],
    x: usize,
    e: Direction,
) -> Result<f64> {
    if !config.translated_bond(x, e) {
        return Err(Error::ClosedEdge {
            vertex: x,
            direction: e.index() as u8,
        });
    }
    let y = config.spec().neighbor(x, e);
    Ok(u[y] - u[x])
}

/// Discrete divergence at `x`:
/// `(1 / n(x)) * sum over open e of (v(x, e) - v(x+e, -e))`.
///
/// For antisymmetric `v` this equals `(2 / n(x)) * sum over open e of
/// v(x, e)`. Isolated vertices are rejected.
pub fn divergence(
    config: &BondConfiguration,
    v: &impl EdgeField,
    x: usize,
) -> Result<f64> {
    let spec = config.spec();
    let mut degree = 0usize;
    let mut sum = 0.0;
    for e in Direction::all(spec.dimension()) {
        if config.translated_bond(x, e) {
            degree += 1;
            let y = spec.neighbor(x, e);
            sum += v.value(spec, x, e) - v.value(spec, y, e.opposite());
        }
    }
    if degree == 0 {
        return Err(Error::IsolatedVertex(x));
    }
    Ok(sum / degree as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::percolation::sample_bonds;
    use crate::rng::SplitMix64;

    fn lattice(d: usize, side: usize) -> LatticeSpec {
        LatticeSpec::new(d, side).unwrap()
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let spec = lattice(2, 6);
        let config = sample_bonds(&spec, 0.7, 3).unwrap();
        let u = vec![4.25; spec.vertex_count()];
        for x in 0..spec.vertex_count() {
            for e in Direction::all(2) {
                if config.translated_bond(x, e) {
                    assert_eq!(gradient(&config, &u, x, e).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn gradient_rejects_closed_edges() {
        let spec = lattice(2, 4);
        let config = sample_bonds(&spec, 0.0, 1).unwrap();
        let u = vec![0.0; spec.vertex_count()];
        assert!(matches!(
            gradient(&config, &u, 0, Direction::positive(0)),
            Err(Error::ClosedEdge { .. })
        ));
    }

    #[test]
    fn gradient_of_linear_function_interior() {
        // u(x) = x . b away from the wrap: the gradient along e equals
        // e . b.
        let spec = lattice(2, 8);
        let config = sample_bonds(&spec, 1.0, 1).unwrap();
        let axis_b = 0;
        let u: Vec<f64> = (0..spec.vertex_count())
            .map(|v| spec.coord(v, axis_b) as f64)
            .collect();
        for x in 0..u.len() {
            for e in Direction::all(2) {
                // skip edges that wrap around the torus
                let c = spec.coord(x, e.axis());
                if (c == spec.side() - 1 && !e.is_negative()) || (c == 0 && e.is_negative()) {
                    continue;
                }
                assert_eq!(gradient(&config, &u, x, e).unwrap(), e.unit_dot(axis_b));
            }
        }
    }

    #[test]
    fn gradient_matches_direct_subtraction_everywhere() {
        let spec = lattice(2, 4);
        let config = sample_bonds(&spec, 0.6, 9).unwrap();
        let mut rng = SplitMix64::new(5);
        let u: Vec<f64> = (0..spec.vertex_count()).map(|_| rng.next_f64()).collect();
        for x in 0..spec.vertex_count() {
            for e in Direction::all(2) {
                if config.translated_bond(x, e) {
                    let y = spec.neighbor(x, e);
                    assert_eq!(gradient(&config, &u, x, e).unwrap(), u[y] - u[x]);
                }
            }
        }
    }

    #[test]
    fn hat_field_values() {
        let spec = lattice(3, 4);
        let hat = hat_field(1);
        assert_eq!(hat.value(&spec, 0, Direction::positive(1)), 1.0);
        assert_eq!(hat.value(&spec, 0, Direction::negative(1)), -1.0);
        assert_eq!(hat.value(&spec, 0, Direction::positive(0)), 0.0);
        assert_eq!(hat.value(&spec, 0, Direction::negative(2)), 0.0);
    }

    #[test]
    fn hat_divergence_counts_signed_open_edges() {
        // divergence of b-hat at x is (2/n(x)) * sum over open e of e . b.
        let spec = lattice(2, 6);
        let config = sample_bonds(&spec, 0.55, 17).unwrap();
        let hat = hat_field(0);
        for x in 0..spec.vertex_count() {
            let n = config.degree(x);
            if n == 0 {
                assert!(divergence(&config, &hat, x).is_err());
                continue;
            }
            let signed: f64 = Direction::all(2)
                .filter(|&e| config.translated_bond(x, e))
                .map(|e| e.unit_dot(0))
                .sum();
            let expected = 2.0 * signed / n as f64;
            assert!((divergence(&config, &hat, x).unwrap() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn direction_field_is_antisymmetric_by_construction() {
        let spec = lattice(2, 6);
        let mut field = DirectionField::zeros(&spec, 0);
        let mut rng = SplitMix64::new(11);
        for x in 0..spec.vertex_count() {
            for axis in 0..2 {
                field.set(x, axis, rng.next_f64() - 0.5);
            }
        }
        for x in 0..spec.vertex_count() {
            for e in Direction::all(2) {
                let y = spec.neighbor(x, e);
                assert_eq!(field.value(x, e), -field.value(y, e.opposite()));
            }
        }
    }

    #[test]
    fn divergence_of_zero_field_is_zero() {
        let spec = lattice(2, 4);
        let config = sample_bonds(&spec, 1.0, 1).unwrap();
        let field = DirectionField::zeros(&spec, 0);
        for x in 0..spec.vertex_count() {
            assert_eq!(divergence(&config, &field, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_edge_divergence() {
        // Antisymmetric v with one nonzero undirected value c at (x, +e_1):
        // div(x) = 2c/n(x) and div(x + e_1) = -2c/n(x + e_1).
        let spec = lattice(2, 6);
        let config = sample_bonds(&spec, 1.0, 1).unwrap();
        let mut field = DirectionField::zeros(&spec, 0);
        let x = spec.vertex_from_coords(&[2, 3]);
        let y = spec.neighbor(x, Direction::positive(0));
        let c = 1.75;
        field.set(x, 0, c);
        assert_eq!(divergence(&config, &field, x).unwrap(), 2.0 * c / 4.0);
        assert_eq!(divergence(&config, &field, y).unwrap(), -2.0 * c / 4.0);
    }

    #[test]
    fn integration_by_parts_identity() {
        // sum_x n(x) u(x) div v(x) = -sum over directed open edges of
        // v(x, e) (u(x+e) - u(x)), for arbitrary directed v.
        for (d, side, seed) in [(2usize, 8usize, 1u64), (2, 8, 2), (3, 4, 3)] {
            let spec = lattice(d, side);
            let config = sample_bonds(&spec, 0.55, seed).unwrap();
            let mut rng = SplitMix64::new(seed ^ 0xabcdef);
            let u: Vec<f64> = (0..spec.vertex_count())
                .map(|_| rng.next_f64() - 0.5)
                .collect();
            let v = DirectedEdgeValues::from_fn(&spec, |_, _| rng.next_f64() - 0.5);
            let mut lhs = 0.0;
            for (x, &ux) in u.iter().enumerate() {
                let n = config.degree(x);
                if n > 0 {
                    lhs += n as f64 * ux * divergence(&config, &v, x).unwrap();
                }
            }
            let mut rhs = 0.0;
            for x in 0..spec.vertex_count() {
                for e in Direction::all(d) {
                    if config.translated_bond(x, e) {
                        rhs -= v.value(&spec, x, e) * gradient(&config, &u, x, e).unwrap();
                    }
                }
            }
            let scale = lhs.abs() + rhs.abs() + 1.0;
            assert!((lhs - rhs).abs() <= 1e-12 * scale, "lhs {lhs} rhs {rhs}");
        }
    }
}
