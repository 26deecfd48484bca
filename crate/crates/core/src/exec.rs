//! Data-parallel fan-out with a sequential fallback.
//!
//! Every sample `i` of a driver draws from its own generator seeded with
//! [`derive_seed`]`(master, i)`, so aggregates are identical whichever
//! execution mode or thread count is used.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every per-sample stream.
pub type SampleRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    /// Rayon work-stealing pool. Runs sequentially when the `parallel`
    /// feature is disabled.
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether this mode actually fans out in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// `(0..n).map(f).collect()`, possibly in parallel. Output order always
    /// matches index order.
    pub fn map_indexed<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Like [`Self::map_indexed`] over an explicit index range.
    pub fn map_range<T, F>(self, range: std::ops::Range<u64>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Execution::Parallel {
            use rayon::prelude::*;
            return range.into_par_iter().map(f).collect();
        }
        range.map(f).collect()
    }
}

/// Mixes a master seed and a sample index into an independent 64-bit seed
/// (SplitMix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn sample_rng(master: u64, index: u64) -> SampleRng {
    SampleRng::seed_from_u64(derive_seed(master, index))
}
