//! Poincare constant of the boxed cluster via the spectral gap.
//!
//! For the connected component `C_eps` of the largest cluster intersected
//! with the box `{|x| <= 1/eps}` (rooted at the cluster root), the best
//! constant in
//!
//! ```text
//! (1/#C) * sum over x, y in C of (u(x) - u(y))^2
//!     <= ratio * sum over open edges of C of (u(x) - u(y))^2
//! ```
//!
//! is `2 / lambda_1`, with `lambda_1` the smallest nonzero eigenvalue of
//! the component's combinatorial Laplacian (the left side equals
//! `2 ||u - mean||^2`). The inequality of interest bounds `ratio` by
//! `beta * eps^-2` with an existential constant, so callers compare
//! `ratio * eps^2` across scales.
//!
//! `lambda_1` is computed by inverse power iteration on the deflated
//! Laplacian, each step a conjugate-gradient solve; random centered test
//! functions give a certified lower bound on the ratio as a cross-check.

#[allow(unused_imports)]
use crate::float::FloatExt;

use alloc::vec;
use alloc::vec::Vec;

use crate::cluster::ClusterDecomposition;
use crate::error::{Error, Result};
use crate::lattice::Direction;
use crate::percolation::BondConfiguration;
use crate::rng::SplitMix64;
use crate::solver::{solve_laplacian_mean_zero, ClusterGraph};

#[derive(Clone, Copy, Debug)]
pub struct PoincareEstimate {
    pub eps: f64,
    /// Best constant `2 / lambda_1` of the boxed component.
    pub ratio: f64,
    /// Smallest nonzero Laplacian eigenvalue.
    pub lambda1: f64,
    pub component_size: usize,
    /// Largest Rayleigh-quotient ratio over the random trial functions;
    /// a lower bound for `ratio` by construction.
    pub sampled_ratio: f64,
}

/// Vertices of the connected component of `largest cluster intersected
/// with {|x - root| <= radius}` containing the root, sorted ascending.
fn boxed_component(
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    radius: f64,
) -> Vec<usize> {
    let spec = config.spec();
    let root = clusters.root();
    let in_box = |v: usize| -> bool {
        (0..spec.dimension())
            .all(|axis| (spec.centered_offset(v, root, axis) as f64).abs() <= radius)
    };
    let mut seen = vec![false; spec.vertex_count()];
    let mut stack = vec![root];
    let mut members = Vec::new();
    seen[root] = true;
    while let Some(v) = stack.pop() {
        members.push(v);
        for e in Direction::all(spec.dimension()) {
            if config.translated_bond(v, e) {
                let w = spec.neighbor(v, e);
                if !seen[w] && clusters.in_largest(w) && in_box(w) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    members.sort_unstable();
    members
}

/// Smallest nonzero eigenvalue of the component Laplacian by inverse power
/// iteration with constant-vector deflation.
fn smallest_nonzero_eigenvalue(graph: &ClusterGraph, seed: u64) -> Result<f64> {
    let n = graph.len();
    let mut rng = SplitMix64::new(seed ^ 0x5091_d00d);
    let mut v: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
    center_and_normalize(&mut v)?;
    let mut work = vec![0.0; n];
    let cap = 40.0 * (n as f64).sqrt().max(100.0);
    let mut lambda = 0.0;
    for _outer in 0..200 {
        let (y, _, _) = solve_laplacian_mean_zero(graph, &v, 1e-10, cap as usize, true)?;
        v = y;
        center_and_normalize(&mut v)?;
        graph.apply_laplacian(&v, &mut work);
        lambda = v.iter().zip(&work).map(|(a, b)| a * b).sum::<f64>();
        // eigen-residual ||L v - lambda v||
        let mut res = 0.0;
        for i in 0..n {
            let r = work[i] - lambda * v[i];
            res += r * r;
        }
        if res.sqrt() <= 1e-9 * lambda.max(1e-300) {
            return Ok(lambda);
        }
    }
    Err(Error::NonConvergence {
        iterations: 200,
        residual: lambda,
    })
}

fn center_and_normalize(v: &mut [f64]) -> Result<()> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    for x in v.iter_mut() {
        *x -= mean;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Internal("deflated iterate collapsed to zero"));
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    Ok(())
}

/// Estimate the Poincare ratio of the boxed component at scale `eps`,
/// cross-checked on `trials` random centered test functions.
pub fn poincare_ratio(
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<PoincareEstimate> {
    let spec = config.spec();
    if eps <= 0.0 || eps.is_nan() || 2.0 / eps > spec.side() as f64 {
        return Err(Error::BoxExceedsTorus {
            half_width: 1.0 / eps,
            side: spec.side(),
        });
    }
    if clusters.largest_size() < 2 {
        return Err(Error::ClusterTooSmall {
            size: clusters.largest_size(),
            need: 2,
        });
    }
    let members = boxed_component(config, clusters, 1.0 / eps);
    if members.len() < 2 {
        return Err(Error::ClusterTooSmall {
            size: members.len(),
            need: 2,
        });
    }
    let graph = ClusterGraph::induced(config, &members);
    let lambda1 = smallest_nonzero_eigenvalue(&graph, seed)?;
    let ratio = 2.0 / lambda1;

    let mut rng = SplitMix64::new(seed ^ 0x7e57_f00d);
    let mut sampled: f64 = 0.0;
    for _ in 0..trials {
        let mut u: Vec<f64> = (0..members.len()).map(|_| rng.next_f64() - 0.5).collect();
        let mean = u.iter().sum::<f64>() / u.len() as f64;
        for x in u.iter_mut() {
            *x -= mean;
        }
        let norm_sq: f64 = u.iter().map(|x| x * x).sum();
        let energy = graph.energy(&u);
        if energy > 0.0 {
            sampled = sampled.max(2.0 * norm_sq / energy);
        }
    }
    Ok(PoincareEstimate {
        eps,
        ratio,
        lambda1,
        component_size: members.len(),
        sampled_ratio: sampled,
    })
}
