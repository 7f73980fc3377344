//! Seeded random streams.
//!
//! Every parallel fan-out (simulations, greedy candidates, evaluation graphs)
//! derives its stream from a master seed and a task index, so results do not
//! depend on worker count or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random source used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Stream `index` of the family rooted at `master`.
pub fn stream(master: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// SplitMix64 finalizer over `(master, index)`; used to derive child seeds.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
