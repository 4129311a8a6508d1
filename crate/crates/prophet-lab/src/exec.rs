//! Execution-mode plumbing for the data-parallel kernels.
//!
//! Every parallel loop in the crate funnels through [`map_indexed`], which
//! computes `f(0), …, f(count-1)` and returns the results in index order.
//! Because each work item is a pure function of its index (simulation chunks
//! own per-trial RNG substreams, grid slabs own their coordinate ranges), the
//! output is bit-identical whether the loop runs on rayon or sequentially —
//! thread count and scheduling can only change *when* an item runs, never
//! *what* it computes or where its result lands.

use std::sync::atomic::{AtomicBool, Ordering};

static SEQUENTIAL_ONLY: AtomicBool = AtomicBool::new(false);

/// Force the sequential code path even when the `parallel` feature is
/// compiled in. Results are unaffected either way; this exists so the bench
/// suite can compare both paths within one binary.
pub fn set_sequential_only(on: bool) {
    SEQUENTIAL_ONLY.store(on, Ordering::Relaxed);
}

/// Whether the sequential fallback is currently forced.
pub fn sequential_only() -> bool {
    SEQUENTIAL_ONLY.load(Ordering::Relaxed)
}

/// Map `f` over `0..count`, in parallel when available, preserving order.
pub(crate) fn map_indexed<R, F>(count: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if !sequential_only() {
        use rayon::prelude::*;
        return (0..count).into_par_iter().map(f).collect();
    }
    (0..count).map(f).collect()
}
