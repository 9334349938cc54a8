//! Data-parallel helpers with a sequential fallback.
//!
//! With the default `parallel` feature the helpers fan work out over rayon;
//! without it they degrade to plain iteration with identical results. The
//! `_seq` variants are always sequential so benchmarks can compare both paths
//! in one build.
//!
//! Every helper is order-preserving, and the fold/merge combinator requires a
//! commutative merge, so results never depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Caps the global worker pool. `None` keeps the default (available
/// parallelism). Must be called before the first parallel operation;
/// later calls are ignored.
#[cfg(feature = "parallel")]
pub fn configure_threads(n: Option<usize>) {
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_n: Option<usize>) {}

/// Order-preserving map over a slice.
#[cfg(feature = "parallel")]
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential map, available regardless of features (benchmark baseline).
pub fn map_slice_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Folds items into per-worker accumulators and merges them. `merge` must be
/// commutative and associative for the result to be schedule-independent.
#[cfg(feature = "parallel")]
pub fn fold_merge<T, A, FoldF, MergeF>(items: &[T], identity: fn() -> A, fold: FoldF, merge: MergeF) -> A
where
    T: Sync,
    A: Send,
    FoldF: Fn(A, &T) -> A + Sync,
    MergeF: Fn(A, A) -> A + Sync + Send,
{
    items
        .par_iter()
        .fold(identity, |acc, item| fold(acc, item))
        .reduce(identity, merge)
}

#[cfg(not(feature = "parallel"))]
pub fn fold_merge<T, A, FoldF, MergeF>(items: &[T], identity: fn() -> A, fold: FoldF, _merge: MergeF) -> A
where
    FoldF: Fn(A, &T) -> A,
{
    items.iter().fold(identity(), |acc, item| fold(acc, item))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let items: Vec<u64> = (0..1000).collect();
        let out = map_slice(&items, |x| x * 2);
        let expected: Vec<u64> = items.iter().map(|x| x * 2).collect();
        assert_eq!(out, expected);
        assert_eq!(map_slice_seq(&items, |x| x * 2), expected);
    }

    #[test]
    fn fold_merge_counts() {
        let items: Vec<u64> = (1..=100).collect();
        let sum = fold_merge(&items, || 0u64, |acc, x| acc + x, |a, b| a + b);
        assert_eq!(sum, 5050);
    }
}
