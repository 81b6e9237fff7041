//! Reductions whose rounding does not depend on the thread count.
//!
//! Work is cut into blocks of a fixed size, each block is reduced
//! sequentially, and the block results are combined by a pairwise tree
//! whose shape depends only on the number of blocks.

use std::ops::{Add, Range};

use rayon::prelude::*;

/// Block length used by every parallel reduction in the crate.
pub const BLOCK: u64 = 1 << 14;

/// Pairwise sum with a shape fixed by `values.len()`.
pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    match values.len() {
        0 => T::default(),
        1 => values[0],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Splits `range` into blocks of `block` integers, maps each block with
/// `f` in parallel and returns the per-block results in order.
pub fn par_blocks<T, F>(range: Range<u64>, block: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    assert!(block > 0);
    if range.start >= range.end {
        return Vec::new();
    }
    let n_blocks = (range.end - range.start).div_ceil(block);
    (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let lo = range.start + b * block;
            let hi = (lo + block).min(range.end);
            f(lo..hi)
        })
        .collect()
}

/// Deterministic parallel sum of `f(n)` over `range`.
pub fn par_sum<T, F>(range: Range<u64>, f: F) -> T
where
    T: Copy + Default + Add<Output = T> + Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let partial = par_blocks(range, BLOCK, |r| {
        let terms: Vec<T> = r.map(&f).collect();
        pairwise_sum(&terms)
    });
    pairwise_sum(&partial)
}

/// Deterministic parallel sum over a slice.
pub fn par_sum_slice<S, T, F>(items: &[S], f: F) -> T
where
    S: Sync,
    T: Copy + Default + Add<Output = T> + Send,
    F: Fn(&S) -> T + Sync + Send,
{
    let partial = par_blocks(0..items.len() as u64, BLOCK, |r| {
        let terms: Vec<T> = items[r.start as usize..r.end as usize]
            .iter()
            .map(&f)
            .collect();
        pairwise_sum(&terms)
    });
    pairwise_sum(&partial)
}
