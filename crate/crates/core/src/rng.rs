//! Counter-based random substreams.
//!
//! Every Monte Carlo driver in the crate draws from `ChaCha8Rng` instances
//! keyed by `(seed, purpose)` in the 256-bit key and by the worker index in
//! the 64-bit stream id. A worker's draws therefore depend only on those
//! three numbers, never on thread scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// Distinguishes independent experiments that share a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Purpose(pub u64);

impl Purpose {
    pub const FIDELITY: Purpose = Purpose(1);
    pub const DENSITY: Purpose = Purpose(2);
    pub const DISCRIMINATION_STANDARD: Purpose = Purpose(3);
    pub const DISCRIMINATION_SYMMETRIC: Purpose = Purpose(4);
    pub const GENERIC: Purpose = Purpose(0xffff);
}

pub fn substream(seed: u64, purpose: Purpose, worker: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&purpose.0.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(worker);
    rng
}

/// Number of trials assigned to `worker` when `trials` are split across
/// `workers` contiguous chunks. The first `trials % workers` workers get one extra.
pub fn chunk_len(trials: u64, workers: usize, worker: usize) -> u64 {
    let workers = workers.max(1) as u64;
    let base = trials / workers;
    let extra = trials % workers;
    base + u64::from((worker as u64) < extra)
}

/// Runs `task(rng, n)` once per worker, in parallel, and returns the results
/// in worker order. The caller folds them sequentially, which keeps floating
/// point aggregation independent of scheduling.
pub fn run_split<T, F>(seed: u64, purpose: Purpose, trials: u64, workers: usize, task: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let workers = workers.max(1);
    (0..workers)
        .into_par_iter()
        .map(|w| {
            let mut rng = substream(seed, purpose, w as u64);
            task(&mut rng, chunk_len(trials, workers, w))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn chunks_cover_all_trials() {
        for trials in [0u64, 1, 7, 1000, 1_000_003] {
            for workers in 1..9 {
                let total: u64 = (0..workers).map(|w| chunk_len(trials, workers, w)).sum();
                assert_eq!(total, trials);
            }
        }
    }

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| 0).scan(substream(7, Purpose::GENERIC, 3), |r, _| Some(r.random())).collect();
        let b: Vec<u64> = (0..4).map(|_| 0).scan(substream(7, Purpose::GENERIC, 3), |r, _| Some(r.random())).collect();
        let c: Vec<u64> = (0..4).map(|_| 0).scan(substream(7, Purpose::GENERIC, 4), |r, _| Some(r.random())).collect();
        let d: Vec<u64> = (0..4).map(|_| 0).scan(substream(7, Purpose::FIDELITY, 3), |r, _| Some(r.random())).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn run_split_is_ordered_by_worker() {
        let out = run_split(1, Purpose::GENERIC, 10, 3, |_, n| n);
        assert_eq!(out, vec![4, 3, 3]);
    }
}
