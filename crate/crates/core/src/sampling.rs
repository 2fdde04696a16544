//! Seeded, batch-parallel sampling.
//!
//! Work is cut into fixed-size batches. Batch `i` draws from its own
//! generator seeded with `derive_seed(master, &[.., i])`, so merged counts
//! depend only on the master seed, never on the thread pool.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

pub type SimRng = ChaCha8Rng;

/// Trials per batch.
pub const BATCH_SIZE: u64 = 1 << 16;

/// First eight bytes of SHA-256 over the master seed followed by each index,
/// all little-endian.
pub fn derive_seed(master: u64, indices: &[u64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    for i in indices {
        hasher.update(i.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(head)
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Runs `trials` draws split into batches and sums the per-batch tallies.
///
/// `batch` receives a freshly seeded generator and the number of trials in
/// that batch and returns `N` counters.
pub fn batched_counts<const N: usize, F>(
    master: u64,
    stream: &[u64],
    trials: u64,
    batch: F,
) -> [u64; N]
where
    F: Fn(&mut SimRng, u64) -> [u64; N] + Sync,
{
    let batches = trials.div_ceil(BATCH_SIZE);
    (0..batches)
        .into_par_iter()
        .map(|i| {
            let mut indices = stream.to_vec();
            indices.push(i);
            let mut rng = rng_from_seed(derive_seed(master, &indices));
            let len = BATCH_SIZE.min(trials - i * BATCH_SIZE);
            batch(&mut rng, len)
        })
        .reduce(
            || [0; N],
            |mut acc, c| {
                for (a, b) in acc.iter_mut().zip(c) {
                    *a += b;
                }
                acc
            },
        )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derived_seeds_differ_by_index() {
        let a = derive_seed(7, &[0]);
        let b = derive_seed(7, &[1]);
        let c = derive_seed(8, &[0]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(7, &[0]));
    }

    #[test]
    fn counts_are_independent_of_thread_count() {
        let trials = 3 * BATCH_SIZE + 17;
        let run = || {
            batched_counts(42, &[3], trials, |rng, n| {
                let mut c = [0u64; 2];
                for _ in 0..n {
                    c[rng.random_bool(0.3) as usize] += 1;
                }
                c
            })
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let single = pool.install(run);
        let many = run();
        assert_eq!(single, many);
        assert_eq!(single[0] + single[1], trials);
    }
}
