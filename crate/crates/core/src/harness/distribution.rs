use std::fmt::Write;

use serde::Serialize;

use super::sample_du;
use crate::du::DuMethod;
use crate::error::{Error, Result};
use crate::exec::{derive_seed, Execution};

/// Slack on the DU range `[1/n², 1]` for histogram samples.
const RANGE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionOptions {
    pub samples: usize,
    pub sys_dim: usize,
    pub env_dims: Vec<usize>,
    pub seed: u64,
    pub bins: usize,
    pub exec: Execution,
}

impl Default for DistributionOptions {
    fn default() -> Self {
        Self {
            samples: 100_000,
            sys_dim: 2,
            env_dims: vec![2, 4],
            seed: 0,
            bins: 50,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DuHistogram {
    pub sys_dim: usize,
    pub env_dim: usize,
    /// `bins + 1` edges spanning `[1/n², 1]`.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub sample_count: usize,
    /// Mean of the dispatcher DU.
    pub mean: f64,
    pub std_error: f64,
    /// Mean of the first lower bound, for comparison with lower-bound-only
    /// estimates.
    pub mean_lb1: f64,
    pub min: f64,
    pub max: f64,
    /// Samples that took the exact mixed-unitary route.
    pub exact_count: usize,
    /// Samples outside `[1/n² − 1e-9, 1 + 1e-9]`.
    pub out_of_range: usize,
    pub seed: u64,
}

/// DU histograms of Haar-dilation random channels, one per environment
/// dimension. Environment `d` draws from master seed `derive_seed(seed, d)`.
pub fn run_distribution(opts: &DistributionOptions) -> Result<Vec<DuHistogram>> {
    if opts.samples == 0 || opts.bins == 0 {
        return Err(Error::Parameter("distribution needs samples ≥ 1 and bins ≥ 1".into()));
    }
    let n = opts.sys_dim;
    let lo = 1.0 / (n * n) as f64;
    let width = (1.0 - lo) / opts.bins as f64;
    let bin_edges: Vec<f64> = (0..=opts.bins).map(|i| lo + i as f64 * width).collect();

    opts.env_dims
        .iter()
        .map(|&d| {
            let env_seed = derive_seed(opts.seed, d as u64);
            let samples = opts
                .exec
                .map_range(0..opts.samples as u64, |i| {
                    sample_du(n, d, env_seed, i).map(|(r, b)| (r.value, b.lb1, r.method))
                })
                .into_iter()
                .collect::<Result<Vec<_>>>()?;

            let mut counts = vec![0u64; opts.bins];
            let mut out_of_range = 0;
            for &(v, _, _) in &samples {
                if v < lo - RANGE_TOL || v > 1.0 + RANGE_TOL {
                    out_of_range += 1;
                }
                let i = ((v - lo) / width).floor().max(0.0) as usize;
                counts[i.min(opts.bins - 1)] += 1;
            }
            let count = samples.len() as f64;
            let mean = samples.iter().map(|s| s.0).sum::<f64>() / count;
            let var = samples.iter().map(|s| (s.0 - mean).powi(2)).sum::<f64>() / (count - 1.0).max(1.0);
            Ok(DuHistogram {
                sys_dim: n,
                env_dim: d,
                bin_edges: bin_edges.clone(),
                counts,
                sample_count: samples.len(),
                mean,
                std_error: (var / count).sqrt(),
                mean_lb1: samples.iter().map(|s| s.1).sum::<f64>() / count,
                min: samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min),
                max: samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max),
                exact_count: samples
                    .iter()
                    .filter(|s| s.2 == DuMethod::ExactMixedUnitary)
                    .count(),
                out_of_range,
                seed: opts.seed,
            })
        })
        .collect()
}

/// CSV with header `bin_lo,bin_hi,count` and a summary line
/// `# mean=<v> samples=<N> env_dim=<d> seed=<S>`.
pub fn distribution_csv(h: &DuHistogram) -> String {
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for (i, c) in h.counts.iter().enumerate() {
        let _ = writeln!(out, "{:.6},{:.6},{}", h.bin_edges[i], h.bin_edges[i + 1], c);
    }
    let _ = writeln!(
        out,
        "# mean={:.9} samples={} env_dim={} seed={}",
        h.mean, h.sample_count, h.env_dim, h.seed
    );
    let _ = writeln!(
        out,
        "# std_error={:.3e} mean_lb1={:.9} du_column=dispatcher",
        h.std_error, h.mean_lb1
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_environment_is_all_unitary() {
        let h = run_distribution(&DistributionOptions {
            samples: 200,
            env_dims: vec![1],
            seed: 1,
            ..DistributionOptions::default()
        })
        .unwrap();
        let h = &h[0];
        assert_eq!(h.counts.last(), Some(&200));
        assert!((h.mean - 1.0).abs() < 1e-12);
        assert_eq!(h.exact_count, 200);
    }

    #[test]
    fn counts_integrate_to_sample_count() {
        let hs = run_distribution(&DistributionOptions {
            samples: 300,
            env_dims: vec![2, 4],
            seed: 2,
            bins: 20,
            ..DistributionOptions::default()
        })
        .unwrap();
        for h in hs {
            assert_eq!(h.counts.iter().sum::<u64>(), 300);
            assert_eq!(h.out_of_range, 0);
            assert!(h.min >= 0.25 - 1e-9 && h.max <= 1.0 + 1e-9);
            assert!(h.mean_lb1 <= h.mean + 1e-9);
            let csv = distribution_csv(&h);
            assert!(csv.starts_with("bin_lo,bin_hi,count\n"));
            assert!(csv.contains(&format!("# mean={:.9} samples=300 env_dim={} seed=2", h.mean, h.env_dim)));
        }
    }

    #[test]
    fn mode_independent() {
        let base = DistributionOptions {
            samples: 64,
            env_dims: vec![2],
            seed: 3,
            ..DistributionOptions::default()
        };
        let a = run_distribution(&base).unwrap();
        let b = run_distribution(&DistributionOptions {
            exec: Execution::Sequential,
            ..base
        })
        .unwrap();
        assert_eq!(a[0].counts, b[0].counts);
        assert_eq!(a[0].mean, b[0].mean);
    }

    #[test]
    fn rejects_empty_runs() {
        assert!(run_distribution(&DistributionOptions {
            samples: 0,
            ..DistributionOptions::default()
        })
        .is_err());
    }
}
