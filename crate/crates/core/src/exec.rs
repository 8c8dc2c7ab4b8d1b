//! Execution schedule for the data-parallel loops (MDS restarts, seeded
//! replications). With the `parallel` feature disabled every schedule runs
//! sequentially; results never depend on the schedule.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    Sequential,
    #[default]
    Parallel,
}

/// Evaluates `f(0..n)` and returns results in index order.
pub fn map_indices<T, F>(n: usize, schedule: Schedule, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match schedule {
        #[cfg(feature = "parallel")]
        Schedule::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}
