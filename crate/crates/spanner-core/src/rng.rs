//! Deterministic pseudo-random number generation.
//!
//! Every randomized construction in this crate draws from [`Rng`], a
//! splittable counter-based generator built on the SplitMix64 finalizer.
//! The full algorithm is specified here (and in the README) so results can
//! be reproduced outside this codebase:
//!
//! * state update: `state += 0x9e3779b97f4a7c15` (wrapping)
//! * output: `mix(state)` where
//!   `mix(z) = { z ^= z >> 30; z *= 0xbf58476d1ce4e5b9; z ^= z >> 27;
//!               z *= 0x94d049bb133111eb; z ^ (z >> 31) }` (wrapping)
//! * `split(tag)` derives a child with state
//!   `mix(state ^ mix(tag + 0x9e3779b97f4a7c15))` and leaves the parent
//!   untouched, so streams for distinct tags are independent of the order
//!   in which they are created.
//!
//! The same seed always yields the same outputs on every platform; there is
//! no global or thread-local state anywhere in the crate.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Splittable deterministic random number generator.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    /// Next 64 uniformly distributed bits.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Independent child stream for the given tag.
    ///
    /// Pure in `(self, tag)`: it does not advance the parent, and children
    /// for distinct tags are decorrelated even when the tags are adjacent
    /// integers (vertex IDs, round numbers, ...).
    pub fn split(&self, tag: u64) -> Rng {
        Rng {
            state: mix(self.state ^ mix(tag.wrapping_add(GOLDEN))),
        }
    }

    /// Uniform double in `[0, 1)` using the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`, unbiased via rejection.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below requires a positive bound");
        // Reject the low `2^64 mod n` values so the kept range has a
        // length divisible by n.
        let cutoff = (u64::MAX - n + 1) % n;
        loop {
            let r = self.next_u64();
            if r >= cutoff {
                return r % n;
            }
        }
    }

    /// Bernoulli trial with success probability `p` (clamped to `[0, 1]`).
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}
