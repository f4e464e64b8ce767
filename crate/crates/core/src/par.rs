/// How data-parallel loops are scheduled.
///
/// `Parallel` uses the rayon global pool when the `parallel` feature is
/// compiled in and silently degrades to `Sequential` otherwise. Every loop
/// routed through here computes each element independently, so the two modes
/// agree bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when this mode will actually fan out onto worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    pub(crate) fn map_channels<T, U, F>(self, items: &[T; 3], f: F) -> [U; 3]
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            let (a, (b, c)) = rayon::join(
                || f(&items[0]),
                || rayon::join(|| f(&items[1]), || f(&items[2])),
            );
            return [a, b, c];
        }
        [f(&items[0]), f(&items[1]), f(&items[2])]
    }

    pub(crate) fn map_vec<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}
