//! Experiment drivers: closed-form table check, bound tightness study, DU
//! distributions of random channels, and the non-Markovianity witness.

mod distribution;
mod table1;
mod tightness;
mod witness;

pub use distribution::{distribution_csv, run_distribution, DistributionOptions, DuHistogram};
pub use table1::{run_table1, table1_csv, uniform_grid, Table1Report, Table1Row};
pub use tightness::{
    run_tightness, tightness_csv, BinFill, TightnessOptions, TightnessRecord, TightnessReport,
};
pub use witness::{
    parse_trajectory_json, run_witness, FlaggedInterval, Trajectory, WitnessReport, DEFAULT_THRESHOLD,
};

use rand::Rng;

use crate::channels::random_channel;
use crate::du::{du_with, BoundReport, DuOptions, DuResult};
use crate::error::Result;
use crate::exec::sample_rng;

/// One random channel from sample stream `(seed, index)` with its DU and
/// bounds. The optimizer restarts are seeded from the same stream.
pub(crate) fn sample_du(
    sys_dim: usize,
    env_dim: usize,
    seed: u64,
    index: u64,
) -> Result<(DuResult, BoundReport)> {
    let mut rng = sample_rng(seed, index);
    let ch = random_channel(sys_dim, env_dim, &mut rng)?;
    let opts = DuOptions {
        seed: rng.random(),
        ..DuOptions::default()
    };
    du_with(&ch, &opts)
}
