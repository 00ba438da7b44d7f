//! Order-preserving parallel scans.
//!
//! Work is cut into fixed-size chunks independent of the thread count and
//! reassembled in chunk order, so the output never depends on how many
//! workers ran.

use std::ops::RangeInclusive;

use rayon::prelude::*;

const CHUNK: u64 = 1 << 12;

/// Runs `f` inside a dedicated pool of `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
        .install(f)
}

/// All `n` in `range` (ascending) for which `keep(n)` holds.
pub fn filter_range<F>(range: RangeInclusive<u64>, keep: F) -> Vec<u64>
where
    F: Fn(u64) -> bool + Sync,
{
    let (lo, hi) = (*range.start(), *range.end());
    if lo > hi {
        return Vec::new();
    }
    let chunks = (hi - lo) / CHUNK + 1;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = lo + c * CHUNK;
            let end = start.saturating_add(CHUNK - 1).min(hi);
            (start..=end).filter(|&n| keep(n)).collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Number of `n` in `range` for which `keep(n)` holds.
pub fn count_range<F>(range: RangeInclusive<u64>, keep: F) -> u64
where
    F: Fn(u64) -> bool + Sync,
{
    let (lo, hi) = (*range.start(), *range.end());
    if lo > hi {
        return 0;
    }
    let chunks = (hi - lo) / CHUNK + 1;
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = lo + c * CHUNK;
            let end = start.saturating_add(CHUNK - 1).min(hi);
            (start..=end).filter(|&n| keep(n)).count() as u64
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worker_count_does_not_change_output() {
        let one = with_workers(1, || filter_range(0..=100_000, |n| n % 7 == 3));
        let many = with_workers(8, || filter_range(0..=100_000, |n| n % 7 == 3));
        assert_eq!(one, many);
        assert_eq!(one.first(), Some(&3));
        assert!(filter_range(5..=4, |_| true).is_empty());
        assert_eq!(filter_range(u64::MAX - 2..=u64::MAX, |_| true).len(), 3);
        assert_eq!(count_range(0..=100_000, |n| n % 7 == 3), one.len() as u64);
        assert_eq!(count_range(1..=0, |_| true), 0);
    }
}
