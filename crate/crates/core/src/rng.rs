//! Seeded, counter-based random streams.
//!
//! Every sampler draws from ChaCha8 keyed by a 64-bit seed. Samples are
//! produced in blocks of [`BLOCK`] draws; block `b` uses stream `b` of the
//! keyed generator, so a parallel run that hands out whole blocks yields
//! exactly the sequential output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const BLOCK: usize = 4096;

/// Generator for block `block` of the stream keyed by `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Derive an independent sub-seed (splitmix64 finaliser).
pub fn sub_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draw `count` items, `f` being called once per item with the block's rng.
/// The output does not depend on the rayon thread count.
pub fn sample_blocks<T, F>(seed: u64, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let blocks = count.div_ceil(BLOCK);
    let chunks: Vec<Vec<T>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b as u64);
            let len = BLOCK.min(count - b * BLOCK);
            (0..len).map(|_| f(&mut rng)).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}
