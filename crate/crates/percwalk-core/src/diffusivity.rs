//! Effective diffusivity, two independent ways.
//!
//! The variational estimator averages the martingale bracket density over
//! the degree-weighted cluster measure:
//!
//! ```text
//! sigma2_b = sum over cluster x, open e of (e.b + G_b(x,e))^2
//!          / sum over cluster x of n(x)
//! ```
//!
//! The Monte-Carlo estimator is the per-direction sample variance of the
//! rescaled endpoints divided by the macroscopic time, with bootstrap
//! standard errors. The two must agree within combined errors; that
//! cross-check is the artifact's central quantitative test.

#[allow(unused_imports)]
use crate::float::FloatExt;

use alloc::vec;
use alloc::vec::Vec;

use crate::cluster::ClusterDecomposition;
use crate::error::{Error, Result};
use crate::field::DirectionField;
use crate::lattice::Direction;
use crate::percolation::BondConfiguration;
use crate::rng::SplitMix64;
use crate::stats;
use crate::walk::RescaledEndpoints;

/// Degree normalization of the cluster measure: `sum over cluster of n(x)`.
#[derive(Clone, Copy, Debug)]
pub struct TildeQWeights {
    pub total_degree: f64,
}

impl TildeQWeights {
    pub fn new(clusters: &ClusterDecomposition) -> Result<Self> {
        let total = clusters.largest_total_degree();
        if total == 0 {
            return Err(Error::ClusterTooSmall {
                size: clusters.largest_size(),
                need: 2,
            });
        }
        Ok(TildeQWeights {
            total_degree: total as f64,
        })
    }
}

/// Variational diffusivity per direction from the solved fields.
pub fn variational_sigma2(
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    fields: &[DirectionField],
) -> Result<Vec<f64>> {
    let spec = config.spec();
    let d = spec.dimension();
    if fields.len() != d {
        return Err(Error::BadGeometry("need one solved field per dimension"));
    }
    let weights = TildeQWeights::new(clusters)?;
    let mut out = Vec::with_capacity(d);
    for (axis, field) in fields.iter().enumerate() {
        if field.axis() != axis {
            return Err(Error::BadGeometry("fields must be ordered by axis"));
        }
        let mut numerator = 0.0;
        for &x in clusters.members() {
            for e in Direction::all(d) {
                if config.translated_bond(x, e) {
                    let v = e.unit_dot(axis) + field.value(x, e);
                    numerator += v * v;
                }
            }
        }
        out.push(numerator / weights.total_degree);
    }
    Ok(out)
}

/// Monte-Carlo diffusivity from rescaled endpoints.
#[derive(Clone, Debug)]
pub struct MsdEstimate {
    /// Per-direction `Var(X_eps(t) . b) / t`.
    pub sigma2: Vec<f64>,
    /// Bootstrap standard error per direction.
    pub stderr: Vec<f64>,
    /// Full empirical covariance matrix of the endpoints divided by `t`,
    /// row-major `d x d`.
    pub covariance: Vec<f64>,
    /// Bootstrap standard errors for the covariance entries.
    pub cov_stderr: Vec<f64>,
    /// All endpoints identical; the estimate carries no information.
    pub degenerate: bool,
    pub walks: usize,
    pub t: f64,
}

/// Sample variance of the endpoint components over `t`, with bootstrap
/// standard errors (`resamples` draws seeded by `bootstrap_seed`).
pub fn msd_sigma2(
    endpoints: &RescaledEndpoints,
    resamples: usize,
    bootstrap_seed: u64,
) -> Result<MsdEstimate> {
    let n = endpoints.count();
    if n < 100 {
        return Err(Error::SampleTooSmall { n, need: 100 });
    }
    let d = endpoints.dimension;
    let t = endpoints.t;
    let cov_full = stats::covariance_matrix(&endpoints.points, d);
    let sigma2: Vec<f64> = (0..d).map(|a| cov_full[a * d + a] / t).collect();
    let covariance: Vec<f64> = cov_full.iter().map(|c| c / t).collect();

    let degenerate = {
        let first = endpoints.point(0);
        (1..n).all(|i| endpoints.point(i) == first)
    };

    let mut stderr = vec![0.0; d];
    let mut cov_stderr = vec![0.0; d * d];
    if !degenerate && resamples >= 2 {
        let mut rng = SplitMix64::new(bootstrap_seed);
        let mut resampled = vec![0.0; n * d];
        let mut acc = vec![0.0; d * d];
        let mut acc_sq = vec![0.0; d * d];
        for _ in 0..resamples {
            for i in 0..n {
                let j = rng.below(n);
                resampled[i * d..(i + 1) * d].copy_from_slice(endpoints.point(j));
            }
            let cov = stats::covariance_matrix(&resampled, d);
            for (k, &c) in cov.iter().enumerate() {
                acc[k] += c;
                acc_sq[k] += c * c;
            }
        }
        let m = resamples as f64;
        for k in 0..d * d {
            let mean = acc[k] / m;
            let var = (acc_sq[k] / m - mean * mean).max(0.0) * m / (m - 1.0);
            cov_stderr[k] = var.sqrt() / t;
        }
        for a in 0..d {
            stderr[a] = cov_stderr[a * d + a];
        }
    }

    Ok(MsdEstimate {
        sigma2,
        stderr,
        covariance,
        cov_stderr,
        degenerate,
        walks: n,
        t,
    })
}

/// The two estimators side by side, with the parameters needed to
/// regenerate them.
#[derive(Clone, Debug)]
pub struct DiffusivityReport {
    pub variational: Vec<f64>,
    pub msd: MsdEstimate,
    pub dimension: usize,
    pub side: usize,
    pub p: f64,
    pub seed: u64,
    pub walk_seed: u64,
    pub eps: f64,
}
