//! Deterministic chunked random streams.
//!
//! A run of `count` draws is split into chunks of [`CHUNK_SIZE`] draws. Chunk
//! `i` draws from `ChaCha8Rng` seeded with `mix(seed, tag)` on stream `i`, so
//! the sample sequence is a pure function of `(seed, tag, chunk index)` and is
//! independent of how rayon schedules the chunks. Partial results are always
//! combined in chunk order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Number of draws per chunk. Part of the reproducibility contract.
pub const CHUNK_SIZE: usize = 16_384;

/// Stream tags keep unrelated consumers of the same user seed apart.
pub mod tag {
    pub const MODEL: u64 = 1;
    pub const GAUSSIAN_MEASURE: u64 = 2;
    pub const LEVEL_SET: u64 = 3;
    pub const CHARFUN_MC: u64 = 4;
    pub const LATTICE_INTEGRAL: u64 = 5;
}

fn mix(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The generator for one chunk.
pub fn chunk_rng(seed: u64, tag: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, tag));
    rng.set_stream(chunk);
    rng
}

/// Number of chunks needed for `count` draws.
pub fn chunk_count(count: usize) -> usize {
    count.div_ceil(CHUNK_SIZE)
}

/// Runs `work(rng, chunk_len)` for every chunk in parallel and returns the
/// per-chunk results in chunk order.
pub fn map_chunks<T, F>(count: usize, seed: u64, tag: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    (0..chunk_count(count))
        .into_par_iter()
        .map(|chunk| {
            let len = CHUNK_SIZE.min(count - chunk * CHUNK_SIZE);
            let mut rng = chunk_rng(seed, tag, chunk as u64);
            work(&mut rng, len)
        })
        .collect()
}
