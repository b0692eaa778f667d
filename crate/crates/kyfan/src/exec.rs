//! Trial execution: data-parallel over independent trials via rayon when the
//! `parallel` feature is enabled, plain iteration otherwise.
//!
//! Every randomized sweep in this crate maps a pure function over trial
//! indices, with per-trial RNG streams derived from a base seed. Results are
//! collected in index order, so parallel and sequential execution produce
//! identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Cap the global worker pool at `threads`. May only succeed once per
/// process; later calls report the error string rayon gives back.
#[cfg(feature = "parallel")]
pub fn configure_thread_pool(threads: usize) -> Result<(), String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

#[cfg(not(feature = "parallel"))]
pub fn configure_thread_pool(_threads: usize) -> Result<(), String> {
    Ok(())
}

/// Map `f` over `0..n`, in parallel when allowed and worthwhile.
#[cfg(feature = "parallel")]
pub fn run_trials<T, F>(n: usize, sequential: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if sequential {
        (0..n).map(f).collect()
    } else {
        (0..n).into_par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn run_trials<T, F>(n: usize, _sequential: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    (0..n).map(f).collect()
}
