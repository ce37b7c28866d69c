//! SplitMix64, the only randomness source in the crate.
//!
//! State update `s += 0x9E3779B97F4A7C15`; output mix
//! `z = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9`,
//! `z = (z ^ (z >> 27)) * 0x94D049BB133111EB`, `z ^ (z >> 31)`.
//! A fixed seed gives the same stream on every platform. The generator
//! itself is `rand_xoshiro::SplitMix64`.

use rand_core::{RngCore, SeedableRng};

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    inner: rand_xoshiro::SplitMix64,
}

impl SplitMix64 {
    pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
    pub const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
    pub const MIX2: u64 = 0x94D0_49BB_1331_11EB;

    pub fn new(seed: u64) -> Self {
        SplitMix64 { inner: rand_xoshiro::SplitMix64::seed_from_u64(seed) }
    }

    /// Independent stream for a labelled sub-task, derived from a base seed.
    pub fn derive(seed: u64, labels: &[u64]) -> Self {
        let mut rng = SplitMix64::new(seed);
        for &l in labels {
            let s = rng.next_u64() ^ l.wrapping_mul(Self::MIX1);
            rng = SplitMix64::new(s);
        }
        rng
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform value in `0..bound` (Lemire's multiply-shift; `bound > 0`).
    pub fn below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    pub fn below_u128(&mut self, bound: u128) -> u128 {
        if bound <= u64::MAX as u128 {
            return self.below(bound as u64) as u128;
        }
        let wide = ((self.next_u64() as u128) << 64) | self.next_u64() as u128;
        wide % bound
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}
