//! Minimal deterministic PRNG for fixture generation.
//!
//! SplitMix64 is pinned here by name and version so that seeded graphs and
//! parameter tensors stay byte-identical across releases. Do not swap the
//! algorithm without bumping [`RANDOM_GRAPH_ALGORITHM`].

/// Identifier emitted in machine output wherever seeded randomness is used.
pub const RANDOM_GRAPH_ALGORITHM: &str = "splitmix64-pair-bernoulli-v1";

/// SplitMix64 stream (Steele, Lea & Flood 2014).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, bound) by rejection-free modulo of a wide product.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}
