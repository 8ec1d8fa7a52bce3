//! Seeded randomness.
//!
//! Every random draw in the crate comes from [`SimRng`], ChaCha8 seeded
//! through `seed_from_u64`. Independent streams for one experiment are
//! obtained with [`derive_seed`], a SplitMix64 finaliser over
//! `(seed, tag, index)`.

use rand::SeedableRng;

pub type SimRng = rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed; distinct `(tag, index)` pairs give unrelated streams.
pub fn derive_seed(seed: u64, tag: &str, index: u64) -> u64 {
    let mut h = splitmix64(seed);
    for b in tag.bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    splitmix64(h ^ index)
}
