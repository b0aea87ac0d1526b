//! The exact discrete integration-by-parts identity against rescaled test
//! functions.
//!
//! With the degree-weighted empirical measure `mu_eps = eps^d sum over
//! cluster z of n(z) delta_{eps z}` and the scaled difference
//! `grad_eps_e phi(z) = (phi(z + eps e) - phi(z)) / eps`, the two sides
//!
//! ```text
//! lhs = integral of phi(z) div u(z/eps) d mu_eps(z)
//! rhs = -eps * integral of (1/n) sum_e u(z/eps, e) omega(e) grad_eps_e phi(z) d mu_eps(z)
//! ```
//!
//! agree exactly (not asymptotically) as long as the support of `phi`
//! stays clear of the box boundary, because the change of variables behind
//! the identity never wraps. Cluster coordinates are centered at the root
//! vertex.

#[allow(unused_imports)]
use crate::float::FloatExt;

use alloc::vec;

use crate::cluster::ClusterDecomposition;
use crate::error::{Error, Result};
use crate::field::EdgeField;
use crate::lattice::Direction;
use crate::percolation::BondConfiguration;

/// A smooth test function on `(-1, 1)^d` with sup-norm-compact support.
pub trait TestFunction {
    fn eval(&self, z: &[f64]) -> f64;
    /// Sup-norm radius of the support, strictly below 1.
    fn support_radius(&self) -> f64;
}

/// Tensor-product bump `amplitude * prod_k exp(-1 / (1 - (z_k/radius)^2))`
/// supported on `[-radius, radius]^d`.
#[derive(Clone, Copy, Debug)]
pub struct TensorBump {
    radius: f64,
    amplitude: f64,
}

impl TensorBump {
    pub fn new(radius: f64, amplitude: f64) -> Result<Self> {
        if radius <= 0.0 || radius >= 1.0 || radius.is_nan() {
            return Err(Error::BadGeometry("bump radius must lie in (0, 1)"));
        }
        Ok(TensorBump { radius, amplitude })
    }
}

impl TestFunction for TensorBump {
    fn eval(&self, z: &[f64]) -> f64 {
        let mut acc = self.amplitude;
        for &zk in z {
            let s = zk / self.radius;
            let w = 1.0 - s * s;
            if w <= 0.0 {
                return 0.0;
            }
            acc *= (-1.0 / w).exp();
        }
        acc
    }

    fn support_radius(&self) -> f64 {
        self.radius
    }
}

/// Evaluate both sides of the discrete integration-by-parts identity for a
/// directed-edge field `u` and test function `phi` at scale `eps`.
///
/// Returns `(lhs, rhs)`; the identity is exact, so the pair is meant for
/// equality testing at rounding level. Fails if the support of `phi`
/// (padded by one lattice step) does not stay interior after rescaling.
pub fn two_scale_ibp_check(
    config: &BondConfiguration,
    clusters: &ClusterDecomposition,
    u: &impl EdgeField,
    phi: &impl TestFunction,
    eps: f64,
) -> Result<(f64, f64)> {
    let spec = config.spec();
    let d = spec.dimension();
    if eps <= 0.0 || eps.is_nan() {
        return Err(Error::BadGeometry("eps must be positive"));
    }
    let radius = phi.support_radius();
    if radius <= 0.0 || radius >= 1.0 || radius.is_nan() {
        return Err(Error::SupportViolation { radius, eps });
    }
    // Every vertex within the support, moved one lattice step, must stay
    // inside the centered box; otherwise the pairing behind the identity
    // would wrap around the torus.
    if radius / eps + 1.0 > spec.side() as f64 / 2.0 {
        return Err(Error::SupportViolation { radius, eps });
    }

    let root = clusters.root();
    let mut z = vec![0.0; d];
    let mut z_step = vec![0.0; d];
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    let scale = {
        let mut acc = 1.0;
        for _ in 0..d {
            acc *= eps;
        }
        acc
    };
    for &x in clusters.members() {
        for (axis, zk) in z.iter_mut().enumerate() {
            *zk = eps * spec.centered_offset(x, root, axis) as f64;
        }
        let phi_x = phi.eval(&z);
        let mut degree = 0usize;
        let mut div = 0.0;
        let mut edge_sum = 0.0;
        for e in Direction::all(d) {
            if !config.translated_bond(x, e) {
                continue;
            }
            degree += 1;
            let y = spec.neighbor(x, e);
            div += u.value(spec, x, e) - u.value(spec, y, e.opposite());
            z_step.copy_from_slice(&z);
            let sign = if e.is_negative() { -1.0 } else { 1.0 };
            z_step[e.axis()] += sign * eps;
            edge_sum += u.value(spec, x, e) * (phi.eval(&z_step) - phi_x);
        }
        if degree == 0 {
            continue;
        }
        // n(x) from the measure cancels the 1/n(x) of the divergence in
        // the rhs; in the lhs it stays.
        lhs += phi_x * div;
        rhs -= edge_sum;
    }
    Ok((scale * lhs, scale * rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::decompose_clusters;
    use crate::field::DirectedEdgeValues;
    use crate::lattice::LatticeSpec;
    use crate::percolation::sample_bonds;
    use crate::rng::SplitMix64;

    #[test]
    fn bump_is_supported_and_smoothly_zero_at_edge() {
        let bump = TensorBump::new(0.5, 2.0).unwrap();
        assert!(bump.eval(&[0.0, 0.0]) > 0.0);
        assert_eq!(bump.eval(&[0.5, 0.0]), 0.0);
        assert_eq!(bump.eval(&[0.0, -0.7]), 0.0);
        assert!(bump.eval(&[0.49, 0.0]) < 1e-9);
        assert!(TensorBump::new(1.5, 1.0).is_err());
    }

    #[test]
    fn identity_for_constant_coordinate_field() {
        // u(x, e) = c * (e.b): both sides computed independently must
        // agree to rounding.
        let spec = LatticeSpec::new(2, 16).unwrap();
        let config = sample_bonds(&spec, 0.6, 5).unwrap();
        let clusters = decompose_clusters(&config);
        let c = 1.7;
        let u = DirectedEdgeValues::from_fn(&spec, |_, e| c * e.unit_dot(0));
        let phi = TensorBump::new(0.5, 1.0).unwrap();
        let (lhs, rhs) = two_scale_ibp_check(&config, &clusters, &u, &phi, 0.25).unwrap();
        assert!(
            (lhs - rhs).abs() <= 1e-12 * (lhs.abs() + rhs.abs() + 1.0),
            "lhs {lhs} rhs {rhs}"
        );
    }

    #[test]
    fn identity_for_random_bounded_field() {
        let spec = LatticeSpec::new(2, 32).unwrap();
        let config = sample_bonds(&spec, 0.7, 9).unwrap();
        let clusters = decompose_clusters(&config);
        let mut rng = SplitMix64::new(3);
        let u = DirectedEdgeValues::from_fn(&spec, |_, _| rng.next_f64() - 0.5);
        let phi = TensorBump::new(0.8, 3.0).unwrap();
        let (lhs, rhs) = two_scale_ibp_check(&config, &clusters, &u, &phi, 1.0 / 16.0).unwrap();
        assert!(lhs != 0.0, "test should exercise nonzero sums");
        assert!(
            (lhs - rhs).abs() <= 1e-10 * (lhs.abs() + rhs.abs() + 1.0),
            "lhs {lhs} rhs {rhs}"
        );
    }

    #[test]
    fn zero_test_function_gives_zero_pair() {
        let spec = LatticeSpec::new(2, 8).unwrap();
        let config = sample_bonds(&spec, 0.6, 2).unwrap();
        let clusters = decompose_clusters(&config);
        let u = DirectedEdgeValues::from_fn(&spec, |_, _| 1.0);
        let phi = TensorBump::new(0.5, 0.0).unwrap();
        let (lhs, rhs) = two_scale_ibp_check(&config, &clusters, &u, &phi, 0.25).unwrap();
        assert_eq!(lhs, 0.0);
        assert_eq!(rhs, 0.0);
    }

    #[test]
    fn rejects_support_too_close_to_boundary() {
        let spec = LatticeSpec::new(2, 8).unwrap();
        let config = sample_bonds(&spec, 0.6, 2).unwrap();
        let clusters = decompose_clusters(&config);
        let u = DirectedEdgeValues::from_fn(&spec, |_, _| 1.0);
        let phi = TensorBump::new(0.9, 1.0).unwrap();
        // radius/eps + 1 = 0.9/0.25 + 1 = 4.6 > L/2 = 4
        assert!(matches!(
            two_scale_ibp_check(&config, &clusters, &u, &phi, 0.25),
            Err(Error::SupportViolation { .. })
        ));
    }
}
