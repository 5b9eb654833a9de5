//! Seed derivation for reproducible random streams.
//!
//! Every random stream is a `ChaCha8Rng` seeded from a 64-bit value derived
//! by folding a list of integers through the SplitMix64 finalizer:
//!
//! ```text
//! h = 0x9E37_79B9_7F4A_7C15
//! for x in parts: h = splitmix64(h ^ x)
//! ```
//!
//! Streams are keyed by their role (a tag constant) and by the indices that
//! identify them, so no draw depends on the order in which other streams are
//! consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TAG_SIDE_WEIGHT: u64 = 0x5157_4549;
pub const TAG_EDGES: u64 = 0x4544_4745;
pub const TAG_RESTART: u64 = 0x5245_5354;
pub const TAG_CELL: u64 = 0x4345_4c4c;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x9E37_79B9_7F4A_7C15, |h, &x| splitmix64(h ^ x))
}

pub fn stream(parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(parts))
}
