//! Ordered data-parallel maps and pairwise summation.
//!
//! Every reduction in the crate goes through [`map_ordered`] followed by
//! [`tree_sum`], so results do not depend on the number of worker threads.

use num_complex::Complex64;

/// Execution strategy for grid loops.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    /// Uses the ambient rayon pool. Falls back to sequential when the
    /// `parallel` feature is off.
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Sizes the global worker pool. Returns `false` if the pool was already
/// initialized or the crate was built without the `parallel` feature.
pub fn configure_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}

/// `f` applied to each index in `range`, results in index order.
pub fn map_ordered<T, F>(exec: Exec, range: std::ops::Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).collect();
    }
    let _ = exec;
    range.map(f).collect()
}

/// Pairwise sum with a fixed bracketing that depends only on the length.
pub fn tree_sum<T>(xs: &[T]) -> T
where
    T: Copy + std::ops::Add<Output = T> + Default,
{
    match xs.len() {
        0 => T::default(),
        1 => xs[0],
        n => {
            let (a, b) = xs.split_at(n / 2);
            tree_sum(a) + tree_sum(b)
        }
    }
}

/// Mean of `xs` by pairwise summation; zero for an empty slice.
pub fn tree_mean(xs: &[Complex64]) -> Complex64 {
    if xs.is_empty() {
        return Complex64::default();
    }
    tree_sum(xs) / xs.len() as f64
}
