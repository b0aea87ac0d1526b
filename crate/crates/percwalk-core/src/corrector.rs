//! Corrector integration and its certificates.
//!
//! The corrector is the vector field `chi` on the largest cluster defined
//! edge-wise by `chi(x+e).b - chi(x).b = G_b(x, e)` and anchored at
//! `chi(root) = 0`. It is built by integrating the solved fields along a
//! spanning tree; path independence is exactly the cocycle property of the
//! fields, which [`verify_cocycle`] measures over the fundamental cycles.
//! [`verify_harmonic`] certifies the martingale identity at generator
//! level: `x + chi(x)` is harmonic for the walk.

#[allow(unused_imports)]
use crate::float::FloatExt;

use alloc::vec;
use alloc::vec::Vec;

use crate::cluster::ClusterDecomposition;
use crate::error::{Error, Result};
use crate::field::DirectionField;
use crate::lattice::{Direction, LatticeSpec};
use crate::percolation::BondConfiguration;

/// Traversal order used to build a spanning tree of the cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpanningTree {
    BreadthFirst,
    DepthFirst,
}

/// An `R^d` value per vertex of the largest cluster, anchored to zero at
/// the smallest-index cluster vertex.
#[derive(Clone, Debug)]
pub struct CorrectorField {
    spec: LatticeSpec,
    root: usize,
    members: Vec<usize>,
    /// Flattened `members.len() x d`, in member order.
    values: Vec<f64>,
}

impl CorrectorField {
    #[inline]
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.spec.dimension()
    }

    /// The anchor vertex with `chi(root) = 0`; doubles as the re-rooted
    /// origin for box statistics.
    #[inline]
    pub fn root(&self) -> usize {
        self.root
    }

    #[inline]
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Corrector of the `i`-th cluster member.
    #[inline]
    pub fn value(&self, member_index: usize) -> &[f64] {
        let d = self.spec.dimension();
        &self.values[member_index * d..(member_index + 1) * d]
    }

    pub fn raw(&self) -> &[f64] {
        &self.values
    }

    /// Rebuild from previously dumped parts.
    pub fn from_parts(
        spec: LatticeSpec,
        members: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if members.is_empty() || values.len() != members.len() * spec.dimension() {
            return Err(Error::Internal("corrector parts inconsistent"));
        }
        Ok(CorrectorField {
            root: members[0],
            spec,
            members,
            values,
        })
    }
}

/// Spanning tree of the largest cluster as parent links: `parents[i]` is
/// `(member index of parent, direction parent -> child)` and `None` at the
/// root. Members are visited in deterministic order.
fn spanning_tree(
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    kind: SpanningTree,
) -> Result<Vec<Option<(u32, Direction)>>> {
    let spec = config.spec();
    let members = clusters.members();
    let mut parents = vec![None; members.len()];
    let mut seen = vec![false; members.len()];
    let mut frontier = Vec::with_capacity(members.len());
    seen[0] = true;
    frontier.push(0u32);
    let mut head = 0;
    let mut visited = 1usize;
    while head < frontier.len() {
        let i = match kind {
            SpanningTree::BreadthFirst => {
                let i = frontier[head];
                head += 1;
                i
            }
            SpanningTree::DepthFirst => frontier.pop().unwrap(),
        };
        let v = members[i as usize];
        for e in Direction::all(spec.dimension()) {
            if config.translated_bond(v, e) {
                let w = spec.neighbor(v, e);
                let j = clusters
                    .largest_position(w)
                    .ok_or(Error::Internal("open edge leaves the largest cluster"))?
                    as u32;
                if !seen[j as usize] {
                    seen[j as usize] = true;
                    parents[j as usize] = Some((i, e));
                    frontier.push(j);
                    visited += 1;
                }
            }
        }
    }
    if visited != members.len() {
        return Err(Error::Internal("largest cluster is not connected"));
    }
    Ok(parents)
}

/// Member indices in an order where parents precede children.
fn topological_order(parents: &[Option<(u32, Direction)>]) -> Vec<u32> {
    // BFS generation works for both tree kinds: repeatedly emit nodes whose
    // parent was already emitted. Simpler: emit in discovery order, which
    // `spanning_tree` already guarantees for BFS but not for DFS, so do an
    // explicit pass.
    let n = parents.len();
    let mut children: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (j, p) in parents.iter().enumerate() {
        if let Some((i, _)) = p {
            children[*i as usize].push(j as u32);
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0u32];
    while let Some(i) = stack.pop() {
        order.push(i);
        stack.extend_from_slice(&children[i as usize]);
    }
    order
}

/// Integrate the solved fields `G_1 .. G_d` into the corrector along a
/// spanning tree from the root.
///
/// All `d` fields must be solved on the same cluster. The choice of tree
/// does not matter beyond solver error (that is the cocycle property); the
/// default traversal is breadth-first.
pub fn integrate_corrector(
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    fields: &[DirectionField],
    tree: SpanningTree,
) -> Result<CorrectorField> {
    let spec = config.spec();
    let d = spec.dimension();
    if fields.len() != d {
        return Err(Error::BadGeometry("need one solved field per dimension"));
    }
    for (axis, field) in fields.iter().enumerate() {
        if field.axis() != axis {
            return Err(Error::BadGeometry("fields must be ordered by axis"));
        }
    }
    let members = clusters.members();
    if members.is_empty() {
        return Err(Error::ClusterTooSmall { size: 0, need: 1 });
    }
    let parents = spanning_tree(config, clusters, tree)?;
    let order = topological_order(&parents);
    let mut values = vec![0.0; members.len() * d];
    for &j in &order {
        if let Some((i, e)) = parents[j as usize] {
            let parent_vertex = members[i as usize];
            for (axis, field) in fields.iter().enumerate() {
                let step = field.value(parent_vertex, e);
                values[j as usize * d + axis] = values[i as usize * d + axis] + step;
            }
        }
    }
    Ok(CorrectorField {
        spec: spec.clone(),
        root: members[0],
        members: members.to_vec(),
        values,
    })
}

/// Maximum fundamental-cycle sum of an antisymmetric field.
///
/// The field is integrated along a breadth-first spanning tree into a
/// vertex potential; every non-tree open cluster edge then closes one
/// fundamental cycle whose sum is `field(x, e) - (phi(x+e) - phi(x))`. For
/// a gradient field the residual vanishes up to rounding.
pub fn verify_cocycle(
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    field: &DirectionField,
) -> Result<f64> {
    let spec = config.spec();
    let members = clusters.members();
    if members.is_empty() {
        return Err(Error::ClusterTooSmall { size: 0, need: 1 });
    }
    let parents = spanning_tree(config, clusters, SpanningTree::BreadthFirst)?;
    let order = topological_order(&parents);
    let mut phi = vec![0.0; members.len()];
    let mut tree_edge = vec![usize::MAX; members.len()]; // undirected index of the parent edge
    for &j in &order {
        if let Some((i, e)) = parents[j as usize] {
            let v = members[i as usize];
            phi[j as usize] = phi[i as usize] + field.value(v, e);
            tree_edge[j as usize] = spec.oriented_edge(v, e).0;
        }
    }
    let mut worst = 0.0f64;
    for (i, &v) in members.iter().enumerate() {
        for axis in 0..spec.dimension() {
            let edge = spec.undirected_edge(v, axis);
            if !config.is_open_edge(edge) {
                continue;
            }
            let w = spec.neighbor(v, Direction::positive(axis));
            let j = clusters
                .largest_position(w)
                .ok_or(Error::Internal("open edge leaves the largest cluster"))?;
            if tree_edge[i] == edge || tree_edge[j] == edge {
                continue;
            }
            let residual = (field.value(v, Direction::positive(axis)) - (phi[j] - phi[i])).abs();
            worst = worst.max(residual);
        }
    }
    Ok(worst)
}

/// Maximum of `|L (id + chi)(x) . b|` over cluster vertices and directions:
/// the generator-level certificate that `X(t) + chi(X(t))` is a martingale.
///
/// `L f(x) = (1/n(x)) sum over open e of (f(x+e) - f(x))`, so the residual
/// per `(x, b)` is `(1/n(x)) sum over open e of (e.b + chi_b(x+e) -
/// chi_b(x))`.
pub fn verify_harmonic(
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    chi: &CorrectorField,
) -> Result<f64> {
    let spec = config.spec();
    let d = spec.dimension();
    let members = clusters.members();
    if members.is_empty() {
        return Err(Error::ClusterTooSmall { size: 0, need: 1 });
    }
    let mut worst = 0.0f64;
    let mut sums = vec![0.0; d];
    for (i, &v) in members.iter().enumerate() {
        sums.fill(0.0);
        let mut degree = 0usize;
        for e in Direction::all(d) {
            if !config.translated_bond(v, e) {
                continue;
            }
            degree += 1;
            let w = spec.neighbor(v, e);
            let j = clusters
                .largest_position(w)
                .ok_or(Error::Internal("open edge leaves the largest cluster"))?;
            let chi_w = chi.value(j);
            let chi_v = chi.value(i);
            for axis in 0..d {
                sums[axis] += e.unit_dot(axis) + chi_w[axis] - chi_v[axis];
            }
        }
        if degree == 0 {
            continue;
        }
        for &s in &sums {
            worst = worst.max((s / degree as f64).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::decompose_clusters;
    use crate::lattice::LatticeSpec;
    use crate::percolation::sample_bonds;
    use crate::rng::SplitMix64;
    use crate::solver::{solve_cell_problem, SolverOptions};

    fn pipeline(
        d: usize,
        side: usize,
        p: f64,
        seed: u64,
    ) -> (
        BondConfiguration,
        ClusterDecomposition,
        Vec<DirectionField>,
    ) {
        let spec = LatticeSpec::new(d, side).unwrap();
        let config = sample_bonds(&spec, p, seed).unwrap();
        let clusters = decompose_clusters(&config);
        let fields = (0..d)
            .map(|axis| {
                solve_cell_problem(&config, &clusters, axis, &SolverOptions::default())
                    .unwrap()
                    .field
            })
            .collect();
        (config, clusters, fields)
    }

    #[test]
    fn full_lattice_corrector_is_zero() {
        let (config, clusters, fields) = pipeline(2, 8, 1.0, 1);
        let chi = integrate_corrector(&config, &clusters, &fields, SpanningTree::BreadthFirst)
            .unwrap();
        assert!(chi.raw().iter().all(|&v| v == 0.0));
        assert_eq!(verify_harmonic(&config, &clusters, &chi).unwrap(), 0.0);
    }

    #[test]
    fn anchored_at_root() {
        let (config, clusters, fields) = pipeline(2, 8, 0.6, 7);
        let chi = integrate_corrector(&config, &clusters, &fields, SpanningTree::BreadthFirst)
            .unwrap();
        assert_eq!(chi.root(), clusters.root());
        assert_eq!(chi.value(0), &[0.0, 0.0]);
    }

    #[test]
    fn edge_relation_holds_on_every_open_edge() {
        // chi(x+e).b - chi(x).b = G_b(x, e) for all open cluster edges.
        let (config, clusters, fields) = pipeline(2, 8, 0.6, 19);
        let chi = integrate_corrector(&config, &clusters, &fields, SpanningTree::BreadthFirst)
            .unwrap();
        let spec = config.spec();
        for (i, &v) in clusters.members().iter().enumerate() {
            for e in Direction::all(2) {
                if !config.translated_bond(v, e) {
                    continue;
                }
                let j = clusters
                    .largest_position(spec.neighbor(v, e))
                    .unwrap();
                for (axis, field) in fields.iter().enumerate() {
                    let diff = chi.value(j)[axis] - chi.value(i)[axis];
                    assert!(
                        (diff - field.value(v, e)).abs() < 1e-9,
                        "edge relation broken: {diff} vs {}",
                        field.value(v, e)
                    );
                }
            }
        }
    }

    #[test]
    fn bfs_and_dfs_trees_agree() {
        // Path independence of the integral is the cocycle property.
        let (config, clusters, fields) = pipeline(2, 4, 0.6, 3);
        let bfs = integrate_corrector(&config, &clusters, &fields, SpanningTree::BreadthFirst)
            .unwrap();
        let dfs =
            integrate_corrector(&config, &clusters, &fields, SpanningTree::DepthFirst).unwrap();
        for i in 0..clusters.largest_size() {
            for axis in 0..2 {
                assert!(
                    (bfs.value(i)[axis] - dfs.value(i)[axis]).abs() < 1e-8,
                    "tree choice changed the corrector"
                );
            }
        }
    }

    #[test]
    fn single_edge_cluster_integration() {
        // Hand-built configuration: exactly one open edge. Its two-vertex
        // cluster is the largest; chi integrates that single step.
        let spec = LatticeSpec::new(2, 4).unwrap();
        let mut probe = None;
        // scan seeds until sampling at tiny p leaves exactly one open edge
        for seed in 0..200 {
            let config = sample_bonds(&spec, 0.04, seed).unwrap();
            if config.open_edge_count() == 1 {
                probe = Some(config);
                break;
            }
        }
        let config = probe.expect("no single-edge sample found");
        let clusters = decompose_clusters(&config);
        assert_eq!(clusters.largest_size(), 2);
        let fields: Vec<DirectionField> = (0..2)
            .map(|axis| {
                solve_cell_problem(&config, &clusters, axis, &SolverOptions::default())
                    .unwrap()
                    .field
            })
            .collect();
        let chi = integrate_corrector(&config, &clusters, &fields, SpanningTree::BreadthFirst)
            .unwrap();
        let root = clusters.root();
        let e = Direction::all(2)
            .find(|&e| config.translated_bond(root, e))
            .unwrap();
        let other = clusters
            .largest_position(config.spec().neighbor(root, e))
            .unwrap();
        for (axis, field) in fields.iter().enumerate() {
            assert_eq!(
                chi.value(other)[axis] - chi.value(0)[axis],
                field.value(root, e)
            );
        }
    }

    #[test]
    fn cocycle_of_explicit_gradient_vanishes() {
        let spec = LatticeSpec::new(2, 8).unwrap();
        let config = sample_bonds(&spec, 0.65, 23).unwrap();
        let clusters = decompose_clusters(&config);
        let mut rng = SplitMix64::new(1);
        let u: Vec<f64> = (0..spec.vertex_count()).map(|_| rng.next_f64()).collect();
        let mut field = DirectionField::zeros(&spec, 0);
        for x in 0..spec.vertex_count() {
            for axis in 0..2 {
                if config.is_open_edge(spec.undirected_edge(x, axis)) {
                    let y = spec.neighbor(x, Direction::positive(axis));
                    field.set(x, axis, u[y] - u[x]);
                }
            }
        }
        let residual = verify_cocycle(&config, &clusters, &field).unwrap();
        assert!(residual < 1e-13, "cocycle residual {residual}");
    }

    #[test]
    fn cocycle_of_hat_field_on_full_lattice() {
        // Around any plaquette the coordinate field sums to 0; b-hat as an
        // antisymmetric field is the gradient of the (wrapped) coordinate
        // only locally, but its fundamental cycles on the full torus are
        // plaquettes plus winding cycles. The winding cycle along b picks
        // up L, so this is a non-gradient field and the residual is large;
        // restricted to a plaquette the sum is 0. Check the local identity
        // directly.
        let spec = LatticeSpec::new(2, 4).unwrap();
        let config = sample_bonds(&spec, 1.0, 1).unwrap();
        let axis = 0;
        // plaquette corners starting at the origin
        let right = Direction::positive(0);
        let up = Direction::positive(1);
        let x0 = 0usize;
        let x1 = spec.neighbor(x0, right);
        let x2 = spec.neighbor(x1, up);
        let x3 = spec.neighbor(x2, right.opposite());
        let hat = |x: usize, e: Direction| {
            let _ = x;
            e.unit_dot(axis)
        };
        let cycle = hat(x0, right) + hat(x1, up) + hat(x2, right.opposite()) + hat(x3, up.opposite());
        assert_eq!(cycle, 0.0);
        let _ = config;
    }

    #[test]
    fn solved_field_cocycle_is_small() {
        let (config, clusters, fields) = pipeline(2, 16, 0.7, 40);
        for field in &fields {
            let residual = verify_cocycle(&config, &clusters, field).unwrap();
            assert!(residual <= 1e-8, "cocycle residual {residual}");
        }
    }

    #[test]
    fn harmonic_residual_small_after_solve() {
        let (config, clusters, fields) = pipeline(2, 16, 0.7, 8);
        let chi = integrate_corrector(&config, &clusters, &fields, SpanningTree::BreadthFirst)
            .unwrap();
        let residual = verify_harmonic(&config, &clusters, &chi).unwrap();
        assert!(residual <= 1e-8, "harmonic residual {residual}");
    }

    #[test]
    fn rejects_mismatched_fields() {
        let (config, clusters, mut fields) = pipeline(2, 4, 0.6, 3);
        fields.pop();
        assert!(integrate_corrector(
            &config,
            &clusters,
            &fields,
            SpanningTree::BreadthFirst
        )
        .is_err());
    }
}
