//! Sublinear growth of the corrector: box statistics over shrinking
//! scales.
//!
//! All boxes are sup-norm boxes around the root vertex (the re-rooted
//! origin), matching the `|x| = max |x_i|` convention. The scale-`eps`
//! statistic is
//!
//! ```text
//! s(eps) = eps^d * sum over cluster x with |x| <= 1/eps of
//!          |eps chi(x) - a_eps|^2
//! ```
//!
//! with `a_eps` the cluster mean of `eps chi` over the same box, so the
//! full-box average statistic vanishes identically. The theory guarantees
//! `s(eps) -> 0` but no rate; reports therefore carry several scales.

#[allow(unused_imports)]
use crate::float::FloatExt;

use alloc::vec;
use alloc::vec::Vec;

use crate::cluster::ClusterDecomposition;
use crate::corrector::CorrectorField;
use crate::error::{Error, Result};
use crate::field::DirectionField;
use crate::lattice::Direction;
use crate::percolation::BondConfiguration;

/// One scale of the sublinearity statistic.
#[derive(Clone, Debug)]
pub struct SublinearityPoint {
    pub eps: f64,
    /// Cluster mean of `eps chi` over the box `{|x| <= 1/eps}`.
    pub a_eps: Vec<f64>,
    /// Number of cluster vertices in the box.
    pub vertices: usize,
    pub s: f64,
}

/// Scales ordered by decreasing `eps`.
#[derive(Clone, Debug)]
pub struct SublinearityReport {
    pub points: Vec<SublinearityPoint>,
}

fn pow_dim(eps: f64, d: usize) -> f64 {
    let mut acc = 1.0;
    for _ in 0..d {
        acc *= eps;
    }
    acc
}

fn check_box_fits(eps: f64, side: usize) -> Result<()> {
    if eps <= 0.0 || eps.is_nan() || 1.0 / eps > side as f64 / 2.0 {
        return Err(Error::BoxExceedsTorus {
            half_width: 1.0 / eps,
            side,
        });
    }
    Ok(())
}

/// Compute `a_eps` and `s(eps)` for every requested scale, largest `eps`
/// first. Every box must fit in the torus (`1/eps <= L/2`).
pub fn sublinearity_statistic(
    chi: &CorrectorField,
    eps_list: &[f64],
) -> Result<SublinearityReport> {
    let spec = chi.spec();
    let d = spec.dimension();
    let root = chi.root();
    for &eps in eps_list {
        check_box_fits(eps, spec.side())?;
    }
    let mut scales: Vec<f64> = eps_list.to_vec();
    scales.sort_by(|a, b| b.total_cmp(a));

    let mut points = Vec::with_capacity(scales.len());
    for eps in scales {
        let radius = 1.0 / eps;
        let mut sum = vec![0.0; d];
        let mut count = 0usize;
        for (i, &x) in chi.members().iter().enumerate() {
            if in_centered_box(spec, x, root, radius) {
                count += 1;
                for (acc, &v) in sum.iter_mut().zip(chi.value(i)) {
                    *acc += eps * v;
                }
            }
        }
        if count == 0 {
            return Err(Error::Internal("box around the root lost the root"));
        }
        let a_eps: Vec<f64> = sum.iter().map(|s| s / count as f64).collect();
        let mut s = 0.0;
        for (i, &x) in chi.members().iter().enumerate() {
            if in_centered_box(spec, x, root, radius) {
                for (&v, &a) in chi.value(i).iter().zip(&a_eps) {
                    let dev = eps * v - a;
                    s += dev * dev;
                }
            }
        }
        points.push(SublinearityPoint {
            eps,
            a_eps,
            vertices: count,
            s: pow_dim(eps, d) * s,
        });
    }
    Ok(SublinearityReport { points })
}

fn in_centered_box(
    spec: &crate::lattice::LatticeSpec,
    vertex: usize,
    root: usize,
    radius: f64,
) -> bool {
    for axis in 0..spec.dimension() {
        if (spec.centered_offset(vertex, root, axis) as f64).abs() > radius {
            return false;
        }
    }
    true
}

/// Axis-aligned rectangle inside `[-1, 1]^d` (closed containment).
#[derive(Clone, Debug, PartialEq)]
pub struct Rectangle {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Rectangle {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::BadGeometry("rectangle bounds length mismatch"));
        }
        for (l, h) in lo.iter().zip(&hi) {
            if l > h || l.is_nan() || h.is_nan() || *l < -1.0 || *h > 1.0 {
                return Err(Error::BadGeometry("rectangle must sit inside [-1,1]^d"));
            }
        }
        Ok(Rectangle { lo, hi })
    }

    pub fn full(d: usize) -> Self {
        Rectangle {
            lo: vec![-1.0; d],
            hi: vec![1.0; d],
        }
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    fn contains(&self, z: &[f64]) -> bool {
        z.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&zk, (&l, &h))| l <= zk && zk <= h)
    }
}

/// Per-rectangle weak statistic
/// `eps^d * sum over cluster x with eps x in A of (eps chi(x) - a_eps) . b0`.
///
/// Over the full box this is exactly zero by the definition of `a_eps`.
pub fn box_average_statistic(
    chi: &CorrectorField,
    eps: f64,
    a_eps: &[f64],
    rectangles: &[Rectangle],
    axis_b0: usize,
) -> Result<Vec<f64>> {
    let spec = chi.spec();
    let d = spec.dimension();
    if axis_b0 >= d || a_eps.len() != d {
        return Err(Error::BadGeometry("direction or mean has wrong dimension"));
    }
    check_box_fits(eps, spec.side())?;
    for rect in rectangles {
        if rect.dimension() != d {
            return Err(Error::BadGeometry("rectangle dimension mismatch"));
        }
    }
    let root = chi.root();
    let scale = pow_dim(eps, d);
    let mut out = vec![0.0; rectangles.len()];
    let mut z = vec![0.0; d];
    for (i, &x) in chi.members().iter().enumerate() {
        for (axis, zk) in z.iter_mut().enumerate() {
            *zk = eps * spec.centered_offset(x, root, axis) as f64;
        }
        let dev = eps * chi.value(i)[axis_b0] - a_eps[axis_b0];
        for (r, rect) in rectangles.iter().enumerate() {
            if rect.contains(&z) {
                out[r] += dev;
            }
        }
    }
    for v in out.iter_mut() {
        *v *= scale;
    }
    Ok(out)
}

/// Both sides of the summed small-box inequality behind the scaling step:
/// boxes `C_z` of side `delta` tile the unit box, each paired with an
/// enlarged box `B_z` of side `m * delta`; per-box means on the left,
/// `delta^2` times the field energy over the enlarged boxes on the right.
/// The proportionality constant is not pinned by the theory, so the raw
/// pair is returned for ratio reporting.
pub fn chopped_box_bound(
    chi: &CorrectorField,
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    fields: &[DirectionField],
    eps: f64,
    delta: f64,
    m: usize,
) -> Result<(f64, f64)> {
    let spec = chi.spec();
    let d = spec.dimension();
    if fields.len() != d {
        return Err(Error::BadGeometry("need one solved field per dimension"));
    }
    if delta <= 0.0 || delta >= 1.0 || delta.is_nan() {
        return Err(Error::BadGeometry("delta must lie in (0, 1)"));
    }
    if m < 1 || m as f64 * delta > 2.0 {
        return Err(Error::BadGeometry("enlarged boxes must fit in [-1,1]^d"));
    }
    check_box_fits(eps, spec.side())?;
    // The enlarged boxes extend past the unit box by m*delta/2 and must
    // not wrap.
    if (1.0 + m as f64 * delta / 2.0) / eps > spec.side() as f64 / 2.0 {
        return Err(Error::BadGeometry("enlarged boxes leave the torus"));
    }

    let kmax = (1.0 / delta + 0.5 + 1e-12).floor() as i64;
    let grid_side = (2 * kmax + 1) as usize;
    let boxes = grid_side.pow(d as u32);
    let box_index = |k: &[i64]| -> usize {
        let mut idx = 0usize;
        for &kj in k.iter().rev() {
            idx = idx * grid_side + (kj + kmax) as usize;
        }
        idx
    };

    let root = chi.root();
    let members = chi.members();

    // Pass 1: per-box first and second moments of eps*chi over C_z.
    let mut count = vec![0usize; boxes];
    let mut sums = vec![0.0; boxes * d];
    let mut sumsq = vec![0.0; boxes];
    let mut k = vec![0i64; d];
    let mut z = vec![0.0; d];
    for (i, &x) in members.iter().enumerate() {
        let mut inside = true;
        for axis in 0..d {
            let zx = eps * spec.centered_offset(x, root, axis) as f64;
            if zx.abs() > 1.0 {
                inside = false;
                break;
            }
            z[axis] = zx;
            k[axis] = (zx / delta + 0.5).floor() as i64;
        }
        if !inside || k.iter().any(|&kj| kj.abs() > kmax) {
            continue;
        }
        let idx = box_index(&k);
        count[idx] += 1;
        for axis in 0..d {
            let v = eps * chi.value(i)[axis];
            sums[idx * d + axis] += v;
            sumsq[idx] += v * v;
        }
    }
    let mut lhs = 0.0;
    for idx in 0..boxes {
        if count[idx] == 0 {
            continue;
        }
        let mut mean_sq = 0.0;
        for axis in 0..d {
            let s = sums[idx * d + axis];
            mean_sq += s * s;
        }
        lhs += (sumsq[idx] - mean_sq / count[idx] as f64).max(0.0);
    }

    // Pass 2: field energy per enlarged box B_z (side m*delta, half-open).
    let half = m as f64 * delta / 2.0;
    let mut energy = vec![0.0; boxes];
    let mut ranges: Vec<(i64, i64)> = vec![(0, 0); d];
    for &x in clusters.members() {
        let mut w = 0.0;
        for field in fields {
            for e in Direction::all(d) {
                if config.translated_bond(x, e) {
                    let g = field.value(x, e);
                    w += g * g;
                }
            }
        }
        if w == 0.0 {
            continue;
        }
        let mut feasible = true;
        for (axis, range) in ranges.iter_mut().enumerate() {
            let zx = eps * spec.centered_offset(x, root, axis) as f64;
            // k with z_k - half <= zx < z_k + half, z_k = delta * k, i.e.
            // k in ((zx - half)/delta, (zx + half)/delta]; the positive
            // nudge keeps exactly-integer endpoints on the correct side
            // under float fuzz.
            let lo = ((zx - half) / delta + 1e-9).floor() as i64 + 1;
            let hi = ((zx + half) / delta + 1e-9).floor() as i64;
            let lo = lo.max(-kmax);
            let hi = hi.min(kmax);
            if lo > hi {
                feasible = false;
                break;
            }
            *range = (lo, hi);
        }
        if !feasible {
            continue;
        }
        // odometer over the d candidate ranges
        for axis in 0..d {
            k[axis] = ranges[axis].0;
        }
        loop {
            energy[box_index(&k)] += w;
            let mut axis = 0;
            loop {
                if axis == d {
                    break;
                }
                k[axis] += 1;
                if k[axis] <= ranges[axis].1 {
                    break;
                }
                k[axis] = ranges[axis].0;
                axis += 1;
            }
            if axis == d {
                break;
            }
        }
    }
    let rhs = delta * delta * energy.iter().sum::<f64>();
    Ok((lhs, rhs))
}
