//! Deterministic counter-based random number generation.
//!
//! Experiments must reproduce bit-exactly for a given seed regardless of
//! thread count or platform, so the generator is a self-contained SplitMix64:
//! a strong mixing function applied to a Weyl counter. Per-trial streams are
//! derived from (master seed, trial index), which makes parallel trial
//! execution order-independent.

use num::BigUint;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Stream for one trial of an experiment, decorrelated from the master
    /// seed and from every other trial index.
    pub fn for_trial(master_seed: u64, trial: u64) -> Self {
        Self::new(mix64(
            master_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(trial.wrapping_add(1))),
        ))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw from [0, q) by rejection, unbiased for every q >= 1.
    pub fn uniform_u64(&mut self, q: u64) -> u64 {
        debug_assert!(q >= 1);
        if q.is_power_of_two() {
            return self.next_u64() & (q - 1);
        }
        // reject the final partial copy of [0, q) inside [0, 2^64)
        let zone = u64::MAX - (u64::MAX % q);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % q;
            }
        }
    }

    /// Uniform draw from [0, q) for arbitrarily large q.
    pub fn uniform_big(&mut self, q: &BigUint) -> BigUint {
        let bits = q.bits();
        debug_assert!(bits > 0);
        if let Some(small) = u64::try_from(q).ok().filter(|_| bits <= 64) {
            return BigUint::from(self.uniform_u64(small));
        }
        let words = bits.div_ceil(64) as usize;
        let top_mask = if bits.is_multiple_of(64) {
            u64::MAX
        } else {
            (1u64 << (bits % 64)) - 1
        };
        loop {
            let mut limbs = vec![0u64; words];
            for limb in limbs.iter_mut() {
                *limb = self.next_u64();
            }
            limbs[words - 1] &= top_mask;
            let candidate = BigUint::from_slice(
                &limbs
                    .iter()
                    .flat_map(|w| [*w as u32, (*w >> 32) as u32])
                    .collect::<Vec<_>>(),
            );
            if &candidate < q {
                return candidate;
            }
        }
    }
}
