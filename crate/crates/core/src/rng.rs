//! Seed derivation.
//!
//! A trial's randomness is a pure function of `(root_seed, trial_index)`:
//!
//! 1. `trial_key = ChaCha8(root_seed).set_stream(trial_index).next_u64()`;
//! 2. the advice at node `u` is drawn from `SplitMix64(trial_key ^ mix(u))`,
//!    first a uniform `f64` for the fault coin, then a neighbor index;
//! 3. any walk randomness comes from `ChaCha8(trial_key)` on stream 1.
//!
//! Because nothing depends on the order in which trials or nodes are
//! visited, results do not change with the number of worker threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_xoshiro::SplitMix64;

use crate::NodeId;

const NODE_MIX: u64 = 0xD1B5_4A32_D192_ED03;

pub fn trial_key(root_seed: u64, trial: u64) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(root_seed);
    r.set_stream(trial);
    r.next_u64()
}

pub fn node_rng(key: u64, u: NodeId) -> SplitMix64 {
    SplitMix64::seed_from_u64(key ^ (u as u64).wrapping_mul(NODE_MIX))
}

pub fn walk_rng(key: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(key);
    r.set_stream(1);
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_stable_and_distinct() {
        assert_eq!(trial_key(1, 5), trial_key(1, 5));
        assert_ne!(trial_key(1, 5), trial_key(1, 6));
        assert_ne!(trial_key(1, 5), trial_key(2, 5));
        let a = node_rng(9, 3).next_u64();
        assert_eq!(a, node_rng(9, 3).next_u64());
        assert_ne!(a, node_rng(9, 4).next_u64());
    }
}
