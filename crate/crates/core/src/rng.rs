//! Seeded generators.
//!
//! All simulation uses ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded from a
//! 64-bit value with `seed_from_u64`. Parallel shards share the seed and
//! take the shard index as the ChaCha stream id, so results do not depend on
//! thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type HostRng = ChaCha8Rng;

pub fn host_rng(seed: u64) -> HostRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn shard_rng(seed: u64, shard: u64) -> HostRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}
