/// How row-wise kernels are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Rayon data parallelism; identical to `Sequential` without the `parallel` feature.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

// Below this many values per call the thread hand-off costs more than it saves.
const PAR_MIN: usize = 4096;

impl Exec {
    fn parallel_for(self, total: usize) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel && total >= PAR_MIN
    }

    /// Applies `f(row_index, row)` to consecutive chunks of length `row_len`.
    pub fn rows_mut<T, F>(self, data: &mut [T], row_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Send + Sync,
    {
        #[cfg(feature = "parallel")]
        if self.parallel_for(data.len()) {
            use rayon::prelude::*;
            data.par_chunks_mut(row_len)
                .enumerate()
                .for_each(|(r, row)| f(r, row));
            return;
        }
        let _ = self.parallel_for(0);
        data.chunks_mut(row_len)
            .enumerate()
            .for_each(|(r, row)| f(r, row));
    }

    /// Maps `f` over `0..n`, collecting in order.
    pub fn map<R, F>(self, n: usize, work: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Send + Sync,
    {
        #[cfg(feature = "parallel")]
        if self.parallel_for(work) {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        let _ = work;
        (0..n).map(f).collect()
    }
}
