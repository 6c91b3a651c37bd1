//! Counter-mode 64-bit mixing generator.
//!
//! Every code symbol owns an independent stream keyed by the master seed and
//! the symbol index, so encoder and decoder reproduce the same draws without
//! any shared state. The generator is SplitMix64: portable and bit-exact, but
//! not cryptographically strong.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic stream of 64-bit words: the k-th output (k = 1, 2, ...)
/// is `mix(s0 + k * GAMMA)`.
#[derive(Debug, Clone)]
pub struct SymbolRng {
    state: u64,
}

impl SymbolRng {
    /// Stream for code symbol `ell` under `seed`: `s0 = seed ^ mix(ell)`.
    pub fn for_symbol(seed: u64, ell: u64) -> Self {
        Self::from_state(seed ^ mix(ell))
    }

    pub fn from_state(state: u64) -> Self {
        Self { state }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)`.
    ///
    /// Draws at or above `floor(2^64 / bound) * bound` are rejected before
    /// reducing modulo `bound`, so the result carries no modulo bias.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = (1u128 << 64) / bound as u128 * bound as u128;
        loop {
            let x = self.next_u64();
            if (x as u128) < zone {
                return x % bound;
            }
        }
    }

    /// Bernoulli trial with success probability `prob`.
    pub fn chance(&mut self, prob: f64) -> bool {
        self.next_f64() < prob
    }
}

/// Seed for the `t`-th independent simulation trial.
pub fn trial_seed(base_seed: u64, trial: u64) -> u64 {
    mix(base_seed.wrapping_add(trial))
}
