//! Seedable, portable random numbers for the Monte Carlo studies.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood), chosen because its
//! output sequence is fixed by the algorithm alone — no dependency version
//! can change the figures. Stream splitting rule: the generator for sample
//! `i` of a study with master seed `s` is seeded with `s ^ i`. Uniform
//! doubles take the top 53 bits divided by 2^53, so every value is exactly
//! representable and the stream is identical on every platform.

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Stream for one study sample: master seed XOR sample index.
    pub fn for_sample(seed: u64, index: u64) -> Self {
        Self::new(seed ^ index)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1): 53-bit mantissa division.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in [lo, hi] inclusive.
    pub fn uniform_usize(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        let count = (hi - lo + 1) as f64;
        let idx = (self.next_f64() * count) as usize;
        lo + idx.min(hi - lo)
    }

    /// Fisher–Yates shuffle producing a permutation of 0..len.
    pub fn permutation(&mut self, len: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..len).collect();
        for i in (1..len).rev() {
            let j = self.uniform_usize(0, i);
            perm.swap(i, j);
        }
        perm
    }
}
