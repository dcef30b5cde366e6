//! Execution strategy for the data-parallel loops (frames, sweeps, metrics).
//!
//! With the `parallel` feature the [`Exec::Parallel`] strategy runs on the
//! rayon global pool; without it, it silently degrades to sequential. Results
//! are identical either way: work items are independent and output order is
//! preserved.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when this strategy will actually fan out across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Maps `f` over `0..len`, preserving order.
    pub fn map_range<R, F>(self, len: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Maps `f` over `items` with their indices, preserving order.
    pub fn map_indexed<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect();
        }
        items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
    }

    /// Like [`Exec::map_indexed`] but stops at the first error. Which error is
    /// reported is deterministic: the one with the lowest index.
    pub fn try_map_indexed<T, R, E, F>(self, items: &[T], f: F) -> Result<Vec<R>, E>
    where
        T: Sync,
        R: Send,
        E: Send,
        F: Fn(usize, &T) -> Result<R, E> + Sync + Send,
    {
        self.map_indexed(items, f).into_iter().collect()
    }
}
