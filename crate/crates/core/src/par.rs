//! Data-parallel map used by the batch loops (simplex births, triple
//! profiles, tuple sampling). With the `parallel` feature the work is spread
//! over the rayon pool in scope; without it the same closure runs in order.
//! Output order always follows input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Whether this build runs batch loops on the rayon pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
