//! Execution policy for the data-parallel loops.
//!
//! Every parallel loop in the crate is written as "map over a fixed list of
//! chunks, then reduce the chunk results in index order". The chunking never
//! depends on the number of threads, so parallel and sequential execution
//! produce bit-identical results. Without the `parallel` feature every policy
//! runs sequentially.

use std::ops::Add;

/// How to run a data-parallel loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Use rayon. `workers == 0` means the global pool.
    #[default]
    Parallel,
    /// Use a dedicated pool with this many threads.
    Workers(usize),
}

impl Execution {
    pub fn from_workers(workers: usize) -> Self {
        match workers {
            0 => Execution::Parallel,
            1 => Execution::Sequential,
            w => Execution::Workers(w),
        }
    }

    /// Evaluate `f(i)` for `i in 0..n` and return the results in index order.
    pub fn map_collect<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            #[cfg(feature = "parallel")]
            Execution::Workers(w) => {
                use rayon::prelude::*;
                match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
                    Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                    Err(_) => (0..n).map(f).collect(),
                }
            }
            #[cfg(not(feature = "parallel"))]
            _ => (0..n).map(f).collect(),
        }
    }
}

/// Pairwise (tree) sum with a fixed association order.
pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Add<Output = T> + Default,
{
    match values.len() {
        0 => T::default(),
        1 => values[0],
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_small_cases() {
        assert_eq!(pairwise_sum::<f64>(&[]), 0.0);
        assert_eq!(pairwise_sum(&[2.5]), 2.5);
        assert_eq!(pairwise_sum(&[1.0, 2.0, 3.0, 4.0, 5.0]), 15.0);
    }

    #[test]
    fn policies_agree_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let seq = pairwise_sum(&Execution::Sequential.map_collect(10_000, f));
        let par = pairwise_sum(&Execution::Parallel.map_collect(10_000, f));
        let w3 = pairwise_sum(&Execution::Workers(3).map_collect(10_000, f));
        assert_eq!(seq.to_bits(), par.to_bits());
        assert_eq!(seq.to_bits(), w3.to_bits());
    }
}
