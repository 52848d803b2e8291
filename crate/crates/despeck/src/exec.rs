//! Execution-mode switch between rayon data parallelism and plain loops.
//!
//! Compiled without the `parallel` feature, every helper lowers to the
//! sequential loop. With the feature (default), a process-wide flag selects
//! the path at run time, which lets benchmarks compare both on one build and
//! lets the CLI honor `--threads 1`.
//!
//! All helpers are order-preserving: results are written at their index, and
//! reductions fold in index order, so outputs are bit-identical across modes
//! and thread counts.

#[cfg(feature = "parallel")]
use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
static PARALLEL: AtomicBool = AtomicBool::new(true);

/// Select the execution mode. No-op without the `parallel` feature.
pub fn set_parallel(enabled: bool) {
    #[cfg(feature = "parallel")]
    PARALLEL.store(enabled, Ordering::Relaxed);
    #[cfg(not(feature = "parallel"))]
    let _ = enabled;
}

/// True when rayon will actually be used.
pub fn parallel_enabled() -> bool {
    #[cfg(feature = "parallel")]
    {
        PARALLEL.load(Ordering::Relaxed)
    }
    #[cfg(not(feature = "parallel"))]
    {
        false
    }
}

/// `(0..n).map(f)` collected in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Apply `f` to every element of `out`, passing the element index.
pub fn for_each_indexed<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        out.par_iter_mut().enumerate().for_each(|(i, v)| f(i, v));
        return;
    }
    for (i, v) in out.iter_mut().enumerate() {
        f(i, v);
    }
}

/// Process disjoint row chunks of `out` (each `chunk_len` long) in parallel.
/// `f` receives the chunk index and the chunk slice.
pub fn for_each_chunk<T, F>(out: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    debug_assert!(chunk_len > 0);
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        out.par_chunks_mut(chunk_len).enumerate().for_each(|(i, c)| f(i, c));
        return;
    }
    for (i, c) in out.chunks_mut(chunk_len).enumerate() {
        f(i, c);
    }
}
