//! How close the two lower bounds come to the DU of random channels.
//!
//! With `stratified` set, candidates are rejection-sampled into DU bins of
//! equal width until each bin holds `⌈samples / bins⌉` records or has seen
//! `attempt_cap` draws while still open. Candidates whose `[lb, ub]`
//! bracket only touches full bins are rejected before the optimizer runs.

use std::fmt::Write;

use serde::Serialize;

use super::sample_du;
use crate::channels::{canonicalize, random_channel};
use crate::du::du_bounds;
use crate::error::Result;
use crate::exec::{derive_seed, sample_rng, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TightnessRecord {
    pub du_value: f64,
    pub lb1: f64,
    pub lb2: f64,
    /// `du − lb1`
    pub lb1_err: f64,
    /// `du − lb2`
    pub lb2_err: f64,
    pub ub: f64,
    /// Per-sample seed; `sample_du`-style reruns reproduce the channel.
    pub seed: u64,
}

impl TightnessRecord {
    pub fn max_lb_err(&self) -> f64 {
        self.lb1_err.max(self.lb2_err)
    }

    /// Error of the better lower bound relative to the DU.
    pub fn best_relative_err(&self) -> f64 {
        self.lb1_err.min(self.lb2_err) / self.du_value
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TightnessOptions {
    pub samples: usize,
    pub sys_dim: usize,
    pub env_dim: usize,
    pub seed: u64,
    pub stratified: bool,
    pub bin_width: f64,
    pub attempt_cap: u64,
    /// Candidates evaluated per round when stratifying.
    pub batch: usize,
    pub exec: Execution,
}

impl Default for TightnessOptions {
    fn default() -> Self {
        Self {
            samples: 1000,
            sys_dim: 2,
            env_dim: 2,
            seed: 0,
            stratified: false,
            bin_width: 0.05,
            attempt_cap: 1_000_000,
            batch: 256,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BinFill {
    pub lo: f64,
    pub hi: f64,
    pub target: usize,
    pub filled: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TightnessReport {
    /// Sorted by ascending DU.
    pub records: Vec<TightnessRecord>,
    /// Bins left below target (stratified runs only).
    pub underfilled: Vec<BinFill>,
    pub attempts: u64,
    pub seed: u64,
}

impl TightnessReport {
    /// Records sorted by ascending upper bound.
    pub fn by_upper_bound(&self) -> Vec<TightnessRecord> {
        let mut r = self.records.clone();
        r.sort_by(|a, b| a.ub.total_cmp(&b.ub));
        r
    }
}

fn record(seed: u64, index: u64, sys_dim: usize, env_dim: usize) -> Result<TightnessRecord> {
    let (res, b) = sample_du(sys_dim, env_dim, seed, index)?;
    Ok(TightnessRecord {
        du_value: res.value,
        lb1: b.lb1,
        lb2: b.lb2,
        lb1_err: res.value - b.lb1,
        lb2_err: res.value - b.lb2,
        ub: b.ub,
        seed: derive_seed(seed, index),
    })
}

struct Bins {
    lo: f64,
    width: f64,
    target: usize,
    filled: Vec<usize>,
    attempts: Vec<u64>,
    cap: u64,
}

impl Bins {
    fn index(&self, x: f64) -> usize {
        let i = ((x - self.lo) / self.width).floor();
        (i.max(0.0) as usize).min(self.filled.len() - 1)
    }

    fn open(&self, i: usize) -> bool {
        self.filled[i] < self.target && self.attempts[i] < self.cap
    }

    fn any_open(&self) -> bool {
        (0..self.filled.len()).any(|i| self.open(i))
    }

    fn any_open_in(&self, lo: f64, hi: f64) -> bool {
        (self.index(lo)..=self.index(hi)).any(|i| self.open(i))
    }

    fn charge(&mut self) {
        for i in 0..self.filled.len() {
            if self.open(i) {
                self.attempts[i] += 1;
            }
        }
    }
}

pub fn run_tightness(opts: &TightnessOptions) -> Result<TightnessReport> {
    let (n, d, seed) = (opts.sys_dim, opts.env_dim, opts.seed);
    let (mut records, underfilled, attempts) = if opts.stratified {
        stratified(opts)?
    } else {
        let recs = opts
            .exec
            .map_range(0..opts.samples as u64, |i| record(seed, i, n, d))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        (recs, Vec::new(), opts.samples as u64)
    };
    records.sort_by(|a, b| a.du_value.total_cmp(&b.du_value));
    Ok(TightnessReport {
        records,
        underfilled,
        attempts,
        seed,
    })
}

fn stratified(opts: &TightnessOptions) -> Result<(Vec<TightnessRecord>, Vec<BinFill>, u64)> {
    let (n, d, seed) = (opts.sys_dim, opts.env_dim, opts.seed);
    let lo = 1.0 / (n * n) as f64;
    let nbins = ((1.0 - lo) / opts.bin_width).ceil().max(1.0) as usize;
    let mut bins = Bins {
        lo,
        width: opts.bin_width,
        target: opts.samples.div_ceil(nbins),
        filled: vec![0; nbins],
        attempts: vec![0; nbins],
        cap: opts.attempt_cap,
    };
    let mut records = Vec::new();
    let mut next: u64 = 0;
    while bins.any_open() {
        let start = next;
        next += opts.batch as u64;
        // Screen on the cheap bracket, decided against the fill state at the
        // start of the round so the outcome is schedule independent.
        let candidates = opts.exec.map_range(start..next, |i| -> Result<Option<TightnessRecord>> {
            let mut rng = sample_rng(seed, i);
            let ch = random_channel(n, d, &mut rng)?;
            let b = du_bounds(&canonicalize(&ch)?)?;
            if !bins.any_open_in(b.best_lower(), b.ub) {
                return Ok(None);
            }
            record(seed, i, n, d).map(Some)
        });
        for cand in candidates {
            if !bins.any_open() {
                break;
            }
            bins.charge();
            if let Some(rec) = cand? {
                let i = bins.index(rec.du_value);
                if bins.filled[i] < bins.target {
                    bins.filled[i] += 1;
                    records.push(rec);
                }
            }
        }
    }
    let attempts = bins.attempts.iter().copied().max().unwrap_or(0);
    let underfilled = (0..nbins)
        .filter(|&i| bins.filled[i] < bins.target)
        .map(|i| BinFill {
            lo: lo + i as f64 * opts.bin_width,
            hi: (lo + (i + 1) as f64 * opts.bin_width).min(1.0),
            target: bins.target,
            filled: bins.filled[i],
        })
        .collect();
    Ok((records, underfilled, attempts))
}

/// CSV with header `du,lb1,lb2,lb1_err,lb2_err,ub,seed` and trailing
/// `#` summary lines.
pub fn tightness_csv(records: &[TightnessRecord], report: &TightnessReport) -> String {
    let mut out = String::from("du,lb1,lb2,lb1_err,lb2_err,ub,seed\n");
    for r in records {
        let _ = writeln!(
            out,
            "{:.15},{:.15},{:.15},{:.6e},{:.6e},{:.15},{}",
            r.du_value, r.lb1, r.lb2, r.lb1_err, r.lb2_err, r.ub, r.seed
        );
    }
    let _ = writeln!(
        out,
        "# seed={} records={} attempts={}",
        report.seed,
        report.records.len(),
        report.attempts
    );
    for b in &report.underfilled {
        let _ = writeln!(
            out,
            "# underfilled bin [{:.2},{:.2}): {}/{}",
            b.lo, b.hi, b.filled, b.target
        );
    }
    out
}
