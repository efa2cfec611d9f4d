//! Shard execution.
//!
//! Work is split into fixed-size shards indexed from zero. Each shard owns
//! its random substream, and shard results are collected in index order, so
//! the sequential and parallel paths produce bit-identical output.

/// How shards are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    /// Runs shards on the rayon pool. Falls back to sequential when the
    /// crate is built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn map_shards<T, F>(self, shards: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..shards).into_par_iter().map(f).collect()
            }
            _ => (0..shards).map(f).collect(),
        }
    }
}

/// Splits `total` items into shards of `shard_size`; the last may be short.
pub(crate) fn shard_lengths(total: u64, shard_size: u64) -> impl Iterator<Item = (u64, u64)> {
    let shards = total.div_ceil(shard_size);
    (0..shards).map(move |i| (i, shard_size.min(total - i * shard_size)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_preserve_order() {
        let seq = Execution::Sequential.map_shards(100, |i| i * i);
        let par = Execution::Parallel.map_shards(100, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[7], 49);
    }

    #[test]
    fn shard_lengths_cover_total() {
        let v: Vec<_> = shard_lengths(10, 4).collect();
        assert_eq!(v, vec![(0, 4), (1, 4), (2, 2)]);
        assert_eq!(shard_lengths(0, 4).count(), 0);
    }
}
