//! Seeded random number generation with a fixed, platform-independent
//! algorithm.
//!
//! All randomness in the toolkit (subset sampling, k-means++ seeding) comes
//! from [`SplitMix64`]: a 64-bit additive counter followed by a
//! shift-xor-multiply finalizer. With the constants below it is the
//! generator published by Steele, Lea and Flood ("Fast splittable
//! pseudorandom number generators", 2014) and used to seed the xoshiro
//! family. Given the same seed it yields the same stream on every platform.
//!
//! ```text
//! state  += 0x9E3779B97F4A7C15
//! z       = state
//! z       = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z       = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output  = z ^ (z >> 31)
//! ```
//!
//! Derived quantities:
//! - `next_f64`: `(next_u64() >> 11) * 2^-53`, uniform in `[0, 1)`.
//! - `below(n)`: Lemire's multiply-shift with rejection, uniform in `[0, n)`.
//! - `shuffle`: Fisher-Yates from the last element down, `j = below(i + 1)`.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_2: u64 = 0x94D0_49BB_1331_11EB;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
