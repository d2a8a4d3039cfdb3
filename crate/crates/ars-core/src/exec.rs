//! Session fan-out helper. With the `parallel` feature the closure runs on
//! the rayon pool; without it the same code runs sequentially. Results come
//! back in index order either way.

#[cfg(feature = "parallel")]
pub(crate) fn map_sessions<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_sessions<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}
