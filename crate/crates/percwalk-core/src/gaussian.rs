//! One-sample Kolmogorov-Smirnov test against the standard normal.

#[allow(unused_imports)]
use crate::float::FloatExt;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::walk::RescaledEndpoints;

/// Complementary error function, Chebyshev fit (relative error below
/// 1.2e-7 everywhere; ample for p-values derived from statistics of order
/// 1e-2).
fn erfc_approx(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + z / 2.0);
    let poly = -z * z - 1.26551223
        + t * (1.00002368
            + t * (0.37409196
                + t * (0.09678418
                    + t * (-0.18628806
                        + t * (0.27886807
                            + t * (-1.13520398
                                + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277))))))));
    let ans = t * poly.exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Standard normal cumulative distribution function.
pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * erfc_approx(-x / core::f64::consts::SQRT_2)
}

/// Survival function of the asymptotic Kolmogorov distribution,
/// `P[sup_t |B(t)| > x]` for the Brownian bridge.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        // theta-function form, fast for small x
        let f = core::f64::consts::PI * core::f64::consts::PI / (8.0 * x * x);
        let mut cdf = 0.0;
        for k in [1.0f64, 3.0, 5.0, 7.0, 9.0] {
            cdf += (-k * k * f).exp();
        }
        cdf *= (2.0 * core::f64::consts::PI).sqrt() / x;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut sf = 0.0;
        let mut sign = 1.0;
        for k in 1..100 {
            let term = (-2.0 * (k * k) as f64 * x * x).exp();
            sf += sign * term;
            sign = -sign;
            if term < 1e-17 {
                break;
            }
        }
        (2.0 * sf).clamp(0.0, 1.0)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample KS statistic of `values` against the standard normal, with
/// the asymptotic p-value `Q(sqrt(n) D)`.
pub fn ks_test_standard_normal(values: &[f64]) -> Result<KsResult> {
    let n = values.len();
    if n < 2 {
        return Err(Error::SampleTooSmall { n, need: 2 });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let cdf = standard_normal_cdf(x);
        d = d.max((cdf - i as f64 / nf).abs());
        d = d.max(((i + 1) as f64 / nf - cdf).abs());
    }
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_sf(nf.sqrt() * d),
        n,
    })
}

/// Standardize the endpoint component along `axis_b` by its sample mean
/// and variance, then KS-test it against the standard normal.
///
/// Degenerate (zero-variance) samples are rejected.
pub fn gaussianity_test(endpoints: &RescaledEndpoints, axis_b: usize) -> Result<KsResult> {
    let n = endpoints.count();
    if n < 1000 {
        return Err(Error::SampleTooSmall { n, need: 1000 });
    }
    if axis_b >= endpoints.dimension {
        return Err(Error::BadGeometry("direction axis out of range"));
    }
    let xs = endpoints.component(axis_b);
    let mean = crate::stats::mean(&xs);
    let sd = crate::stats::sample_variance(&xs).sqrt();
    if sd <= 0.0 || !sd.is_finite() {
        return Err(Error::DegenerateSample);
    }
    let standardized: Vec<f64> = xs.iter().map(|&x| (x - mean) / sd).collect();
    ks_test_standard_normal(&standardized)
}
