//! The discrete cell problem on the largest cluster.
//!
//! For a lattice direction `b` the solver minimizes the quadratic energy
//!
//! ```text
//! E(u) = sum over directed open cluster edges (x, e) of (e.b + u(x+e) - u(x))^2
//! ```
//!
//! whose minimizer `u_b` makes `b-hat + grad u_b` divergence-free; the
//! gradient `G_b(x, e) = u_b(x+e) - u_b(x)` is the finite-volume projection
//! of the constant coordinate field onto gradients. The normal equations
//! are the singular, consistent Laplacian system `L u = r` with
//! `r(x) = sum over open e at x of e.b`; the one-dimensional nullspace of
//! constants is handled by projecting iterates to mean zero instead of
//! pinning a vertex.

#[allow(unused_imports)]
use crate::float::FloatExt;

use alloc::vec;
use alloc::vec::Vec;

use crate::cluster::ClusterDecomposition;
use crate::error::{Error, Result};
use crate::field::DirectionField;
use crate::lattice::Direction;
use crate::percolation::BondConfiguration;

/// Conjugate-gradient controls for the cell problem.
#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Relative residual target, `||r - L u|| / ||r||`.
    pub tol: f64,
    /// Iteration cap; `None` selects `20 * L^(d/2) * d`.
    pub max_iterations: Option<usize>,
    pub preconditioner: Preconditioner,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    /// Jacobi scaling by vertex degree.
    Diagonal,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iterations: None,
            preconditioner: Preconditioner::Diagonal,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if self.tol <= 0.0 || self.tol >= 1.0 || self.tol.is_nan() {
            return Err(Error::InvalidSolverOptions("tolerance must lie in (0, 1)"));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidSolverOptions("max iterations must be >= 1"));
        }
        Ok(())
    }

    fn iteration_cap(&self, vertex_count: usize, dimension: usize) -> usize {
        self.max_iterations
            .unwrap_or_else(|| (20.0 * (vertex_count as f64).sqrt() * dimension as f64) as usize)
            .max(1)
    }
}

/// Solution of one cell problem.
#[derive(Clone, Debug)]
pub struct CellSolution {
    /// Potential per box vertex: mean zero over the cluster, zero outside.
    pub potential: Vec<f64>,
    /// `G_b(x, e) = u_b(x+e) - u_b(x)` on open cluster edges, zero
    /// elsewhere.
    pub field: DirectionField,
    pub iterations: usize,
    /// Final relative residual of the normal equations.
    pub residual: f64,
}

/// Compact adjacency of an open-edge subgraph, used by the cell problem and
/// the spectral-gap estimator.
pub(crate) struct ClusterGraph {
    pub offsets: Vec<u32>,
    pub neighbors: Vec<u32>,
    pub degree: Vec<f64>,
}

impl ClusterGraph {
    /// Subgraph induced by `members` (sorted vertex list): all open edges
    /// with both endpoints in the set.
    pub fn induced(config: &BondConfiguration, members: &[usize]) -> Self {
        let spec = config.spec();
        let mut pos = vec![u32::MAX; spec.vertex_count()];
        for (i, &v) in members.iter().enumerate() {
            pos[v] = i as u32;
        }
        let mut offsets = Vec::with_capacity(members.len() + 1);
        let mut neighbors = Vec::new();
        let mut degree = Vec::with_capacity(members.len());
        offsets.push(0u32);
        for &v in members {
            let mut n = 0;
            for e in Direction::all(spec.dimension()) {
                if config.translated_bond(v, e) {
                    let w = pos[spec.neighbor(v, e)];
                    if w != u32::MAX {
                        neighbors.push(w);
                        n += 1;
                    }
                }
            }
            degree.push(n as f64);
            offsets.push(neighbors.len() as u32);
        }
        ClusterGraph {
            offsets,
            neighbors,
            degree,
        }
    }

    pub fn len(&self) -> usize {
        self.degree.len()
    }

    /// Combinatorial Laplacian: `out = deg .* x - A x`.
    pub fn apply_laplacian(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.len() {
            let mut acc = self.degree[i] * x[i];
            for k in self.offsets[i]..self.offsets[i + 1] {
                acc -= x[self.neighbors[k as usize] as usize];
            }
            out[i] = acc;
        }
    }

    /// Dirichlet energy `sum over undirected edges of (x_i - x_j)^2`.
    pub fn energy(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.len() {
            for k in self.offsets[i]..self.offsets[i + 1] {
                let j = self.neighbors[k as usize] as usize;
                let diff = x[i] - x[j];
                acc += diff * diff;
            }
        }
        acc / 2.0
    }
}

fn subtract_mean(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    for v in x.iter_mut() {
        *v -= mean;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Preconditioned conjugate gradient for the singular consistent system
/// `L x = rhs` on the mean-zero subspace. Returns the mean-zero solution,
/// the iteration count and the final relative residual.
pub(crate) fn solve_laplacian_mean_zero(
    graph: &ClusterGraph,
    rhs: &[f64],
    tol: f64,
    max_iterations: usize,
    diagonal_precondition: bool,
) -> Result<(Vec<f64>, usize, f64)> {
    let n = graph.len();
    let rhs_norm = norm(rhs);
    let mut x = vec![0.0; n];
    if rhs_norm == 0.0 {
        return Ok((x, 0, 0.0));
    }
    let apply_precond = |r: &[f64], z: &mut [f64]| {
        if diagonal_precondition {
            for i in 0..r.len() {
                z[i] = r[i] / graph.degree[i].max(1.0);
            }
        } else {
            z.copy_from_slice(r);
        }
        // Deflate the constant nullspace.
        subtract_mean(z);
    };

    let mut r = rhs.to_vec();
    let mut z = vec![0.0; n];
    apply_precond(&r, &mut z);
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rho = dot(&r, &z);
    let mut iterations = 0;
    let mut residual = 1.0;
    while iterations < max_iterations {
        iterations += 1;
        graph.apply_laplacian(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 || pq.is_nan() {
            break;
        }
        let alpha = rho / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        // Guard against drift of the recursive residual: every so often,
        // and whenever convergence is declared, recompute it exactly.
        let mut check = norm(&r) / rhs_norm;
        if check <= tol || iterations.is_multiple_of(128) {
            graph.apply_laplacian(&x, &mut q);
            for i in 0..n {
                r[i] = rhs[i] - q[i];
            }
            check = norm(&r) / rhs_norm;
        }
        residual = check;
        if residual <= tol {
            subtract_mean(&mut x);
            return Ok((x, iterations, residual));
        }
        apply_precond(&r, &mut z);
        let rho_new = dot(&r, &z);
        let beta = rho_new / rho;
        rho = rho_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NonConvergence {
        iterations,
        residual,
    })
}

/// Solve the cell problem for lattice direction `b` (given by its axis) on
/// the largest cluster.
///
/// The potential is gauge-fixed to mean zero over the cluster; `G_b` is its
/// edge gradient. Fails with the final residual attached if the iteration
/// cap is hit.
pub fn solve_cell_problem(
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    axis_b: usize,
    opts: &SolverOptions,
) -> Result<CellSolution> {
    opts.validate()?;
    let spec = config.spec();
    let d = spec.dimension();
    if axis_b >= d {
        return Err(Error::InvalidSolverOptions("direction axis out of range"));
    }
    let members = clusters.members();
    if members.len() < 2 {
        return Err(Error::ClusterTooSmall {
            size: members.len(),
            need: 2,
        });
    }
    let graph = ClusterGraph::induced(config, members);

    // r(x) = sum over open e at x of e.b; exact +-1 integers.
    let mut rhs = vec![0.0; members.len()];
    for (i, &v) in members.iter().enumerate() {
        let mut r = 0.0;
        if config.translated_bond(v, Direction::positive(axis_b)) {
            r += 1.0;
        }
        if config.translated_bond(v, Direction::negative(axis_b)) {
            r -= 1.0;
        }
        rhs[i] = r;
    }

    let cap = opts.iteration_cap(spec.vertex_count(), d);
    let diag = opts.preconditioner == Preconditioner::Diagonal;
    let (u, iterations, residual) = solve_laplacian_mean_zero(&graph, &rhs, opts.tol, cap, diag)?;

    let mut potential = vec![0.0; spec.vertex_count()];
    for (i, &v) in members.iter().enumerate() {
        potential[v] = u[i];
    }
    let mut field = DirectionField::zeros(spec, axis_b);
    for &v in members {
        for axis in 0..d {
            if config.is_open_edge(spec.undirected_edge(v, axis)) {
                let w = spec.neighbor(v, Direction::positive(axis));
                field.set(v, axis, potential[w] - potential[v]);
            }
        }
    }
    Ok(CellSolution {
        potential,
        field,
        iterations,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::decompose_clusters;
    use crate::field::{divergence, gradient, hat_field};
    use crate::lattice::LatticeSpec;
    use crate::percolation::sample_bonds;
    use crate::rng::SplitMix64;

    fn solve(
        d: usize,
        side: usize,
        p: f64,
        seed: u64,
        axis: usize,
    ) -> (BondConfiguration, ClusterDecomposition, CellSolution) {
        let spec = LatticeSpec::new(d, side).unwrap();
        let config = sample_bonds(&spec, p, seed).unwrap();
        let clusters = decompose_clusters(&config);
        let sol = solve_cell_problem(&config, &clusters, axis, &SolverOptions::default()).unwrap();
        (config, clusters, sol)
    }

    /// Energy of `b-hat + G` over directed open cluster edges.
    fn energy(
        config: &BondConfiguration,
        clusters: &ClusterDecomposition,
        field: Option<&DirectionField>,
        axis_b: usize,
    ) -> f64 {
        let spec = config.spec();
        let mut acc = 0.0;
        for &x in clusters.members() {
            for e in Direction::all(spec.dimension()) {
                if config.translated_bond(x, e) {
                    let g = field.map_or(0.0, |f| f.value(x, e));
                    let v = e.unit_dot(axis_b) + g;
                    acc += v * v;
                }
            }
        }
        acc
    }

    #[test]
    fn full_lattice_solution_is_zero() {
        let (config, clusters, sol) = solve(2, 8, 1.0, 1, 0);
        assert_eq!(sol.iterations, 0);
        assert!(sol.potential.iter().all(|&u| u == 0.0));
        assert!(sol.field.raw().iter().all(|&g| g == 0.0));
        // E(0) counts (e.b)^2 = 1 twice per undirected b-edge.
        let e0 = energy(&config, &clusters, None, 0);
        assert_eq!(e0, 2.0 * 64.0);
    }

    #[test]
    fn projection_reduces_energy() {
        for seed in [3u64, 5, 9] {
            let (config, clusters, sol) = solve(2, 8, 0.6, seed, 0);
            let e0 = energy(&config, &clusters, None, 0);
            let e = energy(&config, &clusters, Some(&sol.field), 0);
            assert!(e <= e0, "E(u) {e} > E(0) {e0}");
        }
    }

    #[test]
    fn solution_makes_hat_plus_g_divergence_free() {
        let (config, clusters, sol) = solve(2, 8, 0.65, 12, 1);
        let hat = hat_field(1);
        let spec = config.spec();
        for &x in clusters.members() {
            let div_hat = divergence(&config, &hat, x).unwrap();
            let div_g = divergence(&config, &sol.field, x).unwrap();
            assert!(
                (div_hat + div_g).abs() < 1e-8,
                "divergence {} at {x}",
                div_hat + div_g
            );
            let _ = spec;
        }
    }

    #[test]
    fn normal_equation_orthogonality() {
        // The minimizer satisfies sum over directed open cluster edges of
        // (e.b + grad u_b) grad w = 0 for any test function w.
        let (config, clusters, sol) = solve(2, 8, 0.6, 21, 0);
        let spec = config.spec();
        let mut rng = SplitMix64::new(4);
        let w: alloc::vec::Vec<f64> = (0..spec.vertex_count())
            .map(|_| rng.next_f64() - 0.5)
            .collect();
        let mut acc = 0.0;
        let mut terms = 0.0;
        for &x in clusters.members() {
            for e in Direction::all(2) {
                if config.translated_bond(x, e) {
                    let lhs = e.unit_dot(0) + sol.field.value(x, e);
                    let gw = gradient(&config, &w, x, e).unwrap();
                    acc += lhs * gw;
                    terms += (lhs * gw).abs();
                }
            }
        }
        assert!(acc.abs() <= 1e-7 * (terms + 1.0), "orthogonality defect {acc}");
    }

    #[test]
    fn gradient_zero_sum_is_exact() {
        // The directed-edge sum telescopes: grouping each undirected edge
        // with its reverse cancels exactly in IEEE arithmetic, so the sum
        // is exactly 0 (summing the two orientations separately would only
        // be zero up to rounding).
        let (config, clusters, sol) = solve(2, 8, 0.55, 33, 0);
        let spec = config.spec();
        let mut acc = 0.0;
        for &x in clusters.members() {
            for axis in 0..2 {
                if config.is_open_edge(spec.undirected_edge(x, axis)) {
                    let e = Direction::positive(axis);
                    let y = spec.neighbor(x, e);
                    acc += sol.field.value(x, e) + sol.field.value(y, e.opposite());
                }
            }
        }
        assert_eq!(acc, 0.0);
    }

    #[test]
    fn field_is_gradient_of_potential() {
        let (config, clusters, sol) = solve(3, 4, 0.5, 8, 2);
        let spec = config.spec();
        for &x in clusters.members() {
            for e in Direction::all(3) {
                if config.translated_bond(x, e) {
                    let y = spec.neighbor(x, e);
                    assert_eq!(sol.field.value(x, e), sol.potential[y] - sol.potential[x]);
                }
            }
        }
    }

    #[test]
    fn potential_has_mean_zero_over_cluster() {
        let (_, clusters, sol) = solve(2, 8, 0.6, 5, 0);
        let mean: f64 = clusters.members().iter().map(|&v| sol.potential[v]).sum::<f64>()
            / clusters.largest_size() as f64;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn rejects_tiny_clusters_and_bad_options() {
        let spec = LatticeSpec::new(2, 4).unwrap();
        let config = sample_bonds(&spec, 0.0, 1).unwrap();
        let clusters = decompose_clusters(&config);
        assert!(matches!(
            solve_cell_problem(&config, &clusters, 0, &SolverOptions::default()),
            Err(Error::ClusterTooSmall { .. })
        ));
        let config = sample_bonds(&spec, 1.0, 1).unwrap();
        let clusters = decompose_clusters(&config);
        let bad = SolverOptions {
            tol: 0.0,
            ..Default::default()
        };
        assert!(solve_cell_problem(&config, &clusters, 0, &bad).is_err());
    }

    #[test]
    fn non_convergence_reports_residual() {
        let spec = LatticeSpec::new(2, 16).unwrap();
        let config = sample_bonds(&spec, 0.7, 2).unwrap();
        let clusters = decompose_clusters(&config);
        let opts = SolverOptions {
            max_iterations: Some(2),
            ..Default::default()
        };
        match solve_cell_problem(&config, &clusters, 0, &opts) {
            Err(Error::NonConvergence { iterations, residual }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 0.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn deterministic_solution() {
        let (_, _, a) = solve(2, 8, 0.62, 77, 0);
        let (_, _, b) = solve(2, 8, 0.62, 77, 0);
        assert_eq!(a.potential, b.potential);
        assert_eq!(a.iterations, b.iterations);
    }
}
