//! Execution-mode shim: data-parallel map over a slice with a sequential
//! fallback, selectable at runtime so both paths can be benchmarked in one
//! binary. The `parallel` feature (on by default) enables the rayon path;
//! without it both modes run sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Strategy for the embarrassingly parallel evaluation loops.
///
/// `Parallel` is a request, not a guarantee: when the crate is built without
/// the `parallel` feature it silently degrades to the sequential loop. Both
/// modes produce bitwise-identical results (the work items are independent
/// and aggregation is order-insensitive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    /// Evaluate work items one at a time on the calling thread.
    Sequential,
    /// Evaluate work items on the rayon thread pool when available.
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        ExecMode::Parallel
    }
}

/// Applies `f` to every element, preserving input order in the output.
pub(crate) fn map_slice<T, U, F>(mode: ExecMode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            return items.par_iter().map(f).collect();
        }
    }
    let _ = mode;
    items.iter().map(f).collect()
}
