//! Data-parallel map helpers. With the `parallel` feature (default) the work
//! is spread over rayon's pool; without it everything runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over 0..len, parallel when the feature is enabled.
#[cfg(feature = "parallel")]
pub fn map_indexed<U: Send, F: Fn(usize) -> U + Sync + Send>(len: usize, f: F) -> Vec<U> {
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<U, F: Fn(usize) -> U>(len: usize, f: F) -> Vec<U> {
    (0..len).map(f).collect()
}

/// Sequential reference path, always available (used by the benchmarks to
/// compare against the parallel path on the same build).
pub fn map_indexed_seq<U, F: Fn(usize) -> U>(len: usize, f: F) -> Vec<U> {
    (0..len).map(f).collect()
}
