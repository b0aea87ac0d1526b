//! Deterministic random number generation.
//!
//! Two flavours are used throughout the crate:
//!
//! * [`keyed_u64`] — a counter-based draw whose output depends only on
//!   `(key, index)`. Bond sampling uses it so that the state of an edge is
//!   independent of the order edges are visited in, which makes sampling
//!   parallelizable without changing output.
//! * [`SplitMix64`] — a tiny sequential stream for walks and bootstrap
//!   resampling. Streams seeded with nearby values (`base_seed + i`) are
//!   decorrelated by mixing the seed before use.

#[allow(unused_imports)]
use crate::float::FloatExt;

/// Weyl increment of the splitmix64 generator.
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 output function (Stafford mix 13).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based draw: a pure function of `(key, index)`.
#[inline]
pub fn keyed_u64(key: u64, index: u64) -> u64 {
    mix64(key ^ index.wrapping_mul(GOLDEN_GAMMA).wrapping_add(GOLDEN_GAMMA))
}

/// Map a `u64` to `[0, 1)` with 53-bit resolution.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential splitmix64 stream.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    /// The seed is mixed once so that sequential seeds (`base + i`) give
    /// unrelated streams.
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: mix64(seed) }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn next_open_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Strictly positive `Exp(1)` holding time.
    #[inline]
    pub fn unit_exponential(&mut self) -> f64 {
        -self.next_open_f64().ln()
    }

    /// Uniform integer in `[0, n)` (multiply-shift; bias is `O(n / 2^64)`).
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Standard normal draw via Box-Muller.
    pub fn standard_normal(&mut self) -> f64 {
        let r = (-2.0 * self.next_open_f64().ln()).sqrt();
        let theta = 2.0 * core::f64::consts::PI * self.next_f64();
        r * theta.cos()
    }
}
