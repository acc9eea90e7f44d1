//! Reproducible random streams.
//!
//! Every stochastic routine takes a `u64` seed. Independent tasks (panel paths,
//! bootstrap replicates, Monte-Carlo replications) derive their own stream from
//! the seed and a list of integer labels, so results do not depend on the order
//! or the thread in which tasks run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a 64-bit seed from `seed` and an ordered list of labels.
pub fn derive_seed(seed: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(seed), |acc, &l| splitmix64(acc ^ splitmix64(l.wrapping_add(0x51_7C_C1_B7))))
}

/// Returns the generator for the stream identified by `(seed, labels)`.
pub fn stream(seed: u64, labels: &[u64]) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, labels));
    rng.set_stream(labels.len() as u64);
    rng
}
