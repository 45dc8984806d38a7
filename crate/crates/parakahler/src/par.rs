// Index-parallel map used by grid loops. Sequential unless the `parallel`
// feature is on; results are identical either way.

use alloc::vec::Vec;

#[cfg(feature = "parallel")]
pub(crate) fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Largest value of `f` over `0..n`, treating NaN as infinity.
pub(crate) fn max_of<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    map(n, f).into_iter().fold(
        0.0_f64,
        |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v) },
    )
}
