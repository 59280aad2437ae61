use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

/// Seeded standard-normal variates with a fixed, portable definition.
///
/// * Generator: xoshiro256\*\*, its four state words filled by successive
///   SplitMix64 outputs started from the seed.
/// * Uniforms: `u1 = ((x1 >> 11) + 1) · 2⁻⁵³ ∈ (0, 1]` and
///   `u2 = (x2 >> 11) · 2⁻⁵³ ∈ [0, 1)` from two consecutive 64-bit draws.
/// * Variate: Box-Muller cosine branch, `z = √(−2 ln u1) · cos(2π u2)`. The
///   sine branch is discarded so every variate consumes exactly two draws.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: Xoshiro256StarStar,
}

const TWO_POW_MINUS_53: f64 = 1.0 / (1u64 << 53) as f64;

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn next_normal(&mut self) -> f64 {
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * TWO_POW_MINUS_53;
        let u2 = (self.next_u64() >> 11) as f64 * TWO_POW_MINUS_53;
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
