//! Seeded random streams.
//!
//! Every stochastic component takes a `u64` seed and derives its streams from
//! it, so a run is fully determined by the master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream `index` of the generator family rooted at `seed`.
///
/// Streams with different indices never overlap, which lets each particle
/// (or pipeline stage) own its randomness independently of visiting order.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives an independent seed for one pipeline stage from a master seed
/// (splitmix64 finalizer over `master ^ stage` mixing).
pub fn derive_seed(master: u64, stage: u64) -> u64 {
    let mut z = master ^ stage.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stage identifiers for [`derive_seed`] and [`stream`].
pub mod stages {
    pub const SYNTHESIZE: u64 = 1;
    pub const BALANCE: u64 = 2;
    pub const SPLIT: u64 = 3;
    pub const INIT: u64 = 4;
    pub const TRAIN: u64 = 5;
    pub const SWARM: u64 = 6;
}
