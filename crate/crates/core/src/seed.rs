//! Per-document seed splitting.
//!
//! Every generated document draws from its own RNG keyed by
//! `(master seed, document index)`, so shards can be produced independently
//! and extending a run never perturbs earlier documents.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type DocRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Keyed hash of `(master, index)`.
pub fn child_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(index.wrapping_mul(GOLDEN) ^ 0x5DEE_CE66_D1CE_5EED))
}

pub fn doc_rng(master: u64, index: u64) -> DocRng {
    ChaCha8Rng::seed_from_u64(child_seed(master, index))
}
