//! Seeded, splittable random streams.
//!
//! Every bulk computation is cut into fixed-size chunks and chunk `k` draws
//! from ChaCha stream `k` of the run seed. Results are concatenated in chunk
//! order, so they do not depend on how many worker threads ran the chunks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type StreamRng = ChaCha8Rng;

/// Items (points, pairs, probes) per chunk.
pub const CHUNK: usize = 4096;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for a named sub-computation.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ tag.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Sizes of the chunks covering `total` items.
pub fn chunk_sizes(total: usize) -> impl IndexedParallelIterator<Item = (u64, usize)> {
    let chunks = total.div_ceil(CHUNK);
    (0..chunks).into_par_iter().map(move |k| {
        let len = CHUNK.min(total - k * CHUNK);
        (k as u64, len)
    })
}

/// Runs `work(rng, chunk_len)` for every chunk and concatenates the outputs in
/// chunk order.
pub fn par_chunks<T, F>(total: usize, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng, usize) -> Vec<T> + Sync + Send,
{
    let parts: Vec<Vec<T>> = chunk_sizes(total)
        .map(|(k, len)| work(&mut stream(seed, k), len))
        .collect();
    let mut out = Vec::with_capacity(total);
    for part in parts {
        out.extend(part);
    }
    out
}

/// Like [`par_chunks`] but each chunk may fail; the first failure in chunk
/// order wins.
pub fn try_par_chunks<T, E, F>(total: usize, seed: u64, work: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(&mut StreamRng, usize) -> Result<Vec<T>, E> + Sync + Send,
{
    let parts: Vec<Result<Vec<T>, E>> = chunk_sizes(total)
        .map(|(k, len)| work(&mut stream(seed, k), len))
        .collect();
    let mut out = Vec::with_capacity(total);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_differ_and_repeat() {
        let a: u64 = stream(1, 0).random();
        let b: u64 = stream(1, 1).random();
        let c: u64 = stream(1, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn chunk_output_is_thread_count_independent() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    par_chunks(3 * CHUNK + 17, 9, |rng, len| {
                        (0..len).map(|_| rng.random::<f64>()).collect::<Vec<_>>()
                    })
                })
        };
        let one = run(1);
        assert_eq!(one.len(), 3 * CHUNK + 17);
        assert_eq!(one, run(3));
    }

    #[test]
    fn derived_seeds_are_distinct() {
        let s: std::collections::HashSet<u64> = (0..1000).map(|t| derive_seed(5, t)).collect();
        assert_eq!(s.len(), 1000);
    }
}
