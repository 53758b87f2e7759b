//! Seed-reproducible batching of Monte Carlo work.
//!
//! Work is cut into fixed-size batches. Batch `i` draws from stream `i` of a
//! ChaCha8 generator seeded with the run seed, so results depend only on the
//! seed and the batch size, never on how many threads ran them. Results come
//! back in batch order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Histories per batch unless configured otherwise.
pub const DEFAULT_BATCH_SIZE: u64 = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Batch {
    pub index: u64,
    /// Global id of the first history in this batch.
    pub first: u64,
    pub count: u64,
}

/// Split `total` histories into consecutive batches of `batch_size`.
pub fn plan_batches(total: u64, batch_size: u64) -> Result<Vec<Batch>> {
    if batch_size == 0 {
        return Err(Error::invalid("batch size must be > 0"));
    }
    let n = total.div_ceil(batch_size);
    Ok((0..n)
        .map(|i| {
            let first = i * batch_size;
            Batch { index: i, first, count: batch_size.min(total - first) }
        })
        .collect())
}

pub fn batch_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Run `work` on every batch with `threads` workers (all cores when
/// `None`) and return the results in batch order.
pub fn run_batches<T, F>(batches: &[Batch], seed: u64, threads: Option<usize>, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Batch, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::invalid("thread count must be > 0"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| batches.par_iter().map(|b| work(b, &mut batch_rng(seed, b.index))).collect())
}
