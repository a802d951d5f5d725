//! SplitMix64, the pinned trace generator.
//!
//! Traces must replay byte-for-byte across runs and across rebuilds, so the
//! generator is part of the CLI contract rather than a library default that
//! may drift between versions. This is the standard splitmix64 sequence:
//! the state advances by the golden-gamma constant and each output is a
//! finalizing mix of the new state.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw below `n` by reduction; the tiny modulo bias is
    /// irrelevant here, reproducibility is what matters.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "cannot draw below zero");
        self.next_u64() % n
    }
}
