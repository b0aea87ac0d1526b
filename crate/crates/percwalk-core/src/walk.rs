//! Exact event-driven simulation of the constant-speed walk.
//!
//! The walk holds an `Exp(1)` time at its current vertex, then jumps to a
//! uniformly chosen open neighbor; there is no time discretization. On the
//! torus the true `Z^d` displacement is tracked through periodic wraps, so
//! endpoint laws and mean-square displacements are not distorted by
//! wrapping (fold-back only matters once walks travel order `L/4`, which
//! callers should avoid by keeping `t_max` of order `(L/4)^2` or below).

use alloc::vec;
use alloc::vec::Vec;

use crate::cluster::ClusterDecomposition;
use crate::error::{Error, Result};
use crate::lattice::Direction;
use crate::percolation::BondConfiguration;
use crate::rng::SplitMix64;

/// One realization of the walk: start vertex plus ordered jump events.
#[derive(Clone, Debug)]
pub struct Trajectory {
    dimension: usize,
    start: usize,
    t_max: f64,
    times: Vec<f64>,
    vertices: Vec<usize>,
    /// Unwrapped `Z^d` displacement after each event, `events x d`.
    displacements: Vec<i64>,
    zero: Vec<i64>,
}

impl Trajectory {
    #[inline]
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    #[inline]
    pub fn start(&self) -> usize {
        self.start
    }

    #[inline]
    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    #[inline]
    pub fn event_count(&self) -> usize {
        self.times.len()
    }

    /// Event `k` as `(time, vertex, unwrapped displacement)`.
    pub fn event(&self, k: usize) -> (f64, usize, &[i64]) {
        (
            self.times[k],
            self.vertices[k],
            &self.displacements[k * self.dimension..(k + 1) * self.dimension],
        )
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Right-continuous evaluation: the state after the last event with
    /// time `<= t`.
    pub fn position_at(&self, t: f64) -> Result<(usize, &[i64])> {
        if !(0.0..=self.t_max).contains(&t) {
            return Err(Error::TimeOutOfRange {
                t,
                t_max: self.t_max,
            });
        }
        let k = self.times.partition_point(|&s| s <= t);
        if k == 0 {
            Ok((self.start, &self.zero))
        } else {
            let (_, v, d) = self.event(k - 1);
            Ok((v, d))
        }
    }

    /// Displacement at `t_max`.
    pub fn final_displacement(&self) -> &[i64] {
        if self.times.is_empty() {
            &self.zero
        } else {
            let n = self.times.len();
            &self.displacements[(n - 1) * self.dimension..n * self.dimension]
        }
    }
}

/// Streaming walk state shared by the trajectory builder and the ensemble
/// estimators.
pub(crate) struct Stepper<'a> {
    config: &'a BondConfiguration,
    degrees: &'a [u8],
    rng: SplitMix64,
    pub vertex: usize,
    pub time: f64,
}

impl<'a> Stepper<'a> {
    pub fn new(
        config: &'a BondConfiguration,
        clusters: &'a ClusterDecomposition,
        x0: usize,
        seed: u64,
    ) -> Self {
        Stepper::with_rng(config, clusters, x0, SplitMix64::new(seed))
    }

    pub fn with_rng(
        config: &'a BondConfiguration,
        clusters: &'a ClusterDecomposition,
        x0: usize,
        rng: SplitMix64,
    ) -> Self {
        Stepper {
            config,
            degrees: clusters.degrees(),
            rng,
            vertex: x0,
            time: 0.0,
        }
    }

    /// Advance one jump, or return `None` when the vertex is isolated or
    /// the next event would land past `t_max` (the walk is then done; do
    /// not call again).
    #[inline]
    pub fn next_jump(&mut self, t_max: f64) -> Option<Direction> {
        let n = self.degrees[self.vertex] as usize;
        if n == 0 {
            return None;
        }
        let hold = self.rng.unit_exponential();
        let next = self.time + hold;
        if next > t_max {
            return None;
        }
        // Keep event times strictly increasing even if the holding time
        // underflows the float spacing at the current time.
        self.time = if next > self.time {
            next
        } else {
            f64::from_bits(self.time.to_bits() + 1)
        };
        let k = self.rng.below(n);
        let dir = self
            .config
            .nth_open_direction(self.vertex, k)
            .expect("degree and open-direction count out of sync");
        self.vertex = self.config.spec().neighbor(self.vertex, dir);
        Some(dir)
    }
}

/// Simulate the walk from `x0` up to `t_max` and record every event.
///
/// Holding times are i.i.d. `Exp(1)` and jump targets uniform over open
/// neighbors, exactly as the generator prescribes. An isolated start vertex
/// yields a trajectory with no events.
pub fn simulate_walk(
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    x0: usize,
    t_max: f64,
    seed: u64,
) -> Result<Trajectory> {
    config.spec().check_vertex(x0)?;
    if t_max <= 0.0 || !t_max.is_finite() {
        return Err(Error::NonPositiveHorizon(t_max));
    }
    let d = config.spec().dimension();
    let mut stepper = Stepper::new(config, clusters, x0, seed);
    let mut disp = vec![0i64; d];
    let mut times = Vec::new();
    let mut vertices = Vec::new();
    let mut displacements = Vec::new();
    while let Some(dir) = stepper.next_jump(t_max) {
        disp[dir.axis()] += if dir.is_negative() { -1 } else { 1 };
        times.push(stepper.time);
        vertices.push(stepper.vertex);
        displacements.extend_from_slice(&disp);
    }
    Ok(Trajectory {
        dimension: d,
        start: x0,
        t_max,
        times,
        vertices,
        displacements,
        zero: vec![0i64; d],
    })
}

/// How ensemble walks choose their start vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartPolicy {
    Fixed(usize),
    /// Uniform over the largest cluster, drawn from the walk's own stream.
    UniformLargest,
}

/// Ensemble parameters: `count` walks over a macroscopic horizon `t_max`,
/// with per-walk seeds `base_seed + i`.
#[derive(Clone, Copy, Debug)]
pub struct EnsembleSpec {
    pub count: usize,
    pub t_max: f64,
    pub base_seed: u64,
    pub start: StartPolicy,
}

/// Rescaled endpoints `eps * X(t_max / eps^2)` for an ensemble of walks.
#[derive(Clone, Debug)]
pub struct RescaledEndpoints {
    pub dimension: usize,
    pub eps: f64,
    /// Macroscopic time of the endpoints.
    pub t: f64,
    /// Microscopic simulation horizon `t / eps^2`.
    pub micro_t: f64,
    pub base_seed: u64,
    /// Flattened `count x dimension` coordinates.
    pub points: Vec<f64>,
}

impl RescaledEndpoints {
    #[inline]
    pub fn count(&self) -> usize {
        self.points.len() / self.dimension
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dimension..(i + 1) * self.dimension]
    }

    /// Seed of walk `i`, as derived by [`rescaled_endpoints`].
    #[inline]
    pub fn walk_seed(&self, i: usize) -> u64 {
        self.base_seed.wrapping_add(i as u64)
    }

    /// Component `axis` of every endpoint.
    pub fn component(&self, axis: usize) -> Vec<f64> {
        (0..self.count()).map(|i| self.point(i)[axis]).collect()
    }
}

pub(crate) fn draw_start(
    policy: StartPolicy,
    clusters: &ClusterDecomposition,
    rng: &mut SplitMix64,
) -> usize {
    match policy {
        StartPolicy::Fixed(v) => v,
        StartPolicy::UniformLargest => {
            let members = clusters.members();
            members[rng.below(members.len())]
        }
    }
}

fn validate_ensemble(
    config: &BondConfiguration,
    spec: &EnsembleSpec,
    eps: f64,
) -> Result<f64> {
    if spec.count == 0 {
        return Err(Error::SampleTooSmall { n: 0, need: 1 });
    }
    if spec.t_max <= 0.0 || !spec.t_max.is_finite() {
        return Err(Error::NonPositiveHorizon(spec.t_max));
    }
    if eps <= 0.0 || eps.is_nan() {
        return Err(Error::BadGeometry("eps must be positive"));
    }
    let micro_t = spec.t_max / (eps * eps);
    if !micro_t.is_finite() {
        return Err(Error::BadGeometry("rescaled horizon overflows"));
    }
    if let StartPolicy::Fixed(v) = spec.start {
        config.spec().check_vertex(v)?;
    }
    Ok(micro_t)
}

/// Endpoint of ensemble walk `walk`, written into `out` (`d` slots):
/// exactly the entry [`rescaled_endpoints`] would produce, so ensembles
/// can be generated walk by walk in any order (or in parallel).
pub fn rescaled_endpoint_for_walk(
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    spec: &EnsembleSpec,
    eps: f64,
    walk: usize,
    out: &mut [f64],
) -> Result<()> {
    let micro_t = validate_ensemble(config, spec, eps)?;
    let d = config.spec().dimension();
    if out.len() != d {
        return Err(Error::BadGeometry("output slice has wrong dimension"));
    }
    let seed = spec.base_seed.wrapping_add(walk as u64);
    let mut rng = SplitMix64::new(seed);
    let x0 = draw_start(spec.start, clusters, &mut rng);
    let mut disp = vec![0i64; d];
    let mut stepper = Stepper::with_rng(config, clusters, x0, rng);
    while let Some(dir) = stepper.next_jump(micro_t) {
        disp[dir.axis()] += if dir.is_negative() { -1 } else { 1 };
    }
    for (o, &c) in out.iter_mut().zip(&disp) {
        *o = eps * c as f64;
    }
    Ok(())
}

/// Simulate `spec.count` walks to microscopic time `spec.t_max / eps^2`
/// and return the rescaled endpoints `eps * X`.
///
/// Walk `i` uses seed `spec.base_seed + i`, so the ensemble can be
/// regenerated walk by walk in any order.
pub fn rescaled_endpoints(
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    spec: &EnsembleSpec,
    eps: f64,
) -> Result<RescaledEndpoints> {
    let micro_t = validate_ensemble(config, spec, eps)?;
    let d = config.spec().dimension();
    let mut points = vec![0.0; spec.count * d];
    for i in 0..spec.count {
        rescaled_endpoint_for_walk(config, clusters, spec, eps, i, &mut points[i * d..(i + 1) * d])?;
    }
    Ok(RescaledEndpoints {
        dimension: d,
        eps,
        t: spec.t_max,
        micro_t,
        base_seed: spec.base_seed,
        points,
    })
}
