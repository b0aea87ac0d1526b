//! Monte-Carlo return probabilities and their decay exponent.
//!
//! On the supercritical cluster the transition kernel obeys a Gaussian
//! upper bound with on-diagonal decay `t^(-d/2)`; the estimator fits the
//! log-log slope of the empirical return probability `P[X(t) = x0]` over
//! a time range. Returns are detected in unwrapped coordinates, so a
//! walker that laps the torus does not count as returned.

#[allow(unused_imports)]
use crate::float::FloatExt;

use alloc::vec;
use alloc::vec::Vec;

use crate::cluster::ClusterDecomposition;
use crate::error::{Error, Result};
use crate::percolation::BondConfiguration;
use crate::stats::{log_log_slope, wilson_interval};
use crate::walk::Stepper;

const WILSON_Z: f64 = 1.96;

#[derive(Clone, Copy, Debug)]
pub struct ReturnEstimate {
    pub t: f64,
    pub probability: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub hits: usize,
    pub walks: usize,
}

#[derive(Clone, Debug)]
pub struct HeatKernelReport {
    /// One estimate per requested time, in increasing time order.
    pub estimates: Vec<ReturnEstimate>,
    /// Log-log slope fitted over the positive estimates; `None` with
    /// fewer than two usable points.
    pub slope: Option<f64>,
}

/// Estimate `P_x0[X(t) = x0]` for every `t` in `t_list` from `walks`
/// independent walks seeded `seed + i`.
pub fn heat_kernel_return(
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    x0: usize,
    t_list: &[f64],
    walks: usize,
    seed: u64,
) -> Result<HeatKernelReport> {
    config.spec().check_vertex(x0)?;
    if !clusters.in_largest(x0) {
        return Err(Error::BadGeometry("start vertex not in the largest cluster"));
    }
    if walks < 1000 {
        return Err(Error::SampleTooSmall {
            n: walks,
            need: 1000,
        });
    }
    if t_list.is_empty() {
        return Err(Error::BadGeometry("need at least one evaluation time"));
    }
    let mut times = t_list.to_vec();
    for &t in &times {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::BadGeometry("evaluation times must be finite and >= 0"));
        }
    }
    times.sort_by(f64::total_cmp);
    let t_end = *times.last().unwrap();

    let d = config.spec().dimension();
    let mut hits = vec![0usize; times.len()];
    let mut disp = vec![0i64; d];
    for i in 0..walks {
        let mut stepper = Stepper::new(config, clusters, x0, seed.wrapping_add(i as u64));
        disp.fill(0);
        let mut idx = 0;
        while idx < times.len() {
            match stepper.next_jump(t_end) {
                Some(dir) => {
                    // record the pre-jump state for all times passed
                    while idx < times.len() && times[idx] < stepper.time {
                        if disp.iter().all(|&c| c == 0) {
                            hits[idx] += 1;
                        }
                        idx += 1;
                    }
                    disp[dir.axis()] += if dir.is_negative() { -1 } else { 1 };
                }
                None => break,
            }
        }
        while idx < times.len() {
            if disp.iter().all(|&c| c == 0) {
                hits[idx] += 1;
            }
            idx += 1;
        }
    }

    let estimates: Vec<ReturnEstimate> = times
        .iter()
        .zip(&hits)
        .map(|(&t, &h)| {
            let (lo, hi) = wilson_interval(h, walks, WILSON_Z);
            ReturnEstimate {
                t,
                probability: h as f64 / walks as f64,
                wilson_low: lo,
                wilson_high: hi,
                hits: h,
                walks,
            }
        })
        .collect();
    let ts: Vec<f64> = estimates.iter().map(|e| e.t).collect();
    let ps: Vec<f64> = estimates.iter().map(|e| e.probability).collect();
    let slope = log_log_slope(&ts, &ps);
    Ok(HeatKernelReport { estimates, slope })
}
