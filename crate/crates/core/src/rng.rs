//! Seeded, splittable random streams.
//!
//! Every Monte-Carlo sample draws from its own ChaCha8 stream addressed by
//! `(seed, estimate index, sample index)`, so results do not depend on how
//! samples are distributed over threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Below this many samples the sequential path is used.
pub const PARALLEL_SAMPLE_THRESHOLD: usize = 512;

/// SplitMix64 finalizer, used to derive independent seeds from a base seed
/// and a tag.
pub fn mix_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A plain seeded generator.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The stream for sample `sample` of estimate `estimate`.
pub fn sample_rng(seed: u64, estimate: u64, sample: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(estimate);
    rng.set_word_pos(u128::from(sample) << 32);
    rng
}

/// Pairwise summation in a fixed tree shape.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2..=8 => values.iter().sum(),
        len => {
            let (a, b) = values.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Mean of `draw(rng)` over `samples` independent streams of `estimate`.
/// Bit-identical whether or not the work runs in parallel.
pub fn sample_mean<F>(seed: u64, estimate: u64, samples: usize, draw: F) -> f64
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    if samples == 0 {
        return 0.0;
    }
    let one = |s: usize| draw(&mut sample_rng(seed, estimate, s as u64));
    let values: Vec<f64> = if samples >= PARALLEL_SAMPLE_THRESHOLD {
        (0..samples).into_par_iter().map(one).collect()
    } else {
        (0..samples).map(one).collect()
    };
    pairwise_sum(&values) / samples as f64
}
