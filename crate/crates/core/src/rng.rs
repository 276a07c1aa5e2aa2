//! Deterministic random stream for the simulation pipeline.
//!
//! The generator is pinned by recurrence, not by library, so any
//! implementation that follows the same constants reproduces the exact
//! stream: SplitMix64 for uniforms, Box-Muller over consecutive uniforms
//! for gaussians.

const GAMMA: u64 = 0x9E3779B97F4A7C15;
const TWO_NEG_53: f64 = 1.0 / ((1u64 << 53) as f64);

/// SplitMix64: state advances by a fixed odd increment, output is the
/// mixed state. Non-cryptographic.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` from the top 53 bits of the next output.
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_NEG_53
    }
}

/// Uniform and gaussian draws over one shared SplitMix64 stream.
///
/// Box-Muller consumes exactly two uniforms per pair of deviates; the
/// cosine deviate is returned first and the sine deviate is cached for
/// the next call. Draw-order sensitivity is the point: callers that
/// interleave uniform and gaussian draws stay byte-reproducible.
#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: SplitMix64,
    spare: Option<f64>,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            rng: SplitMix64::new(seed),
            spare: None,
        }
    }

    pub fn next_uniform(&mut self) -> f64 {
        self.rng.next_uniform()
    }

    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let mut u1 = self.rng.next_uniform();
        if u1 == 0.0 {
            // log(0) guard; 2^-53 is the smallest nonzero draw.
            u1 = TWO_NEG_53;
        }
        let u2 = self.rng.next_uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(radius * theta.sin());
        radius * theta.cos()
    }
}
