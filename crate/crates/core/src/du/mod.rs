//! Degree of unitarity: exact formula, bounds, optimizer and the dispatcher
//! that combines them.

mod bounds;
mod optimize;

pub use bounds::{du_bounds, BoundReport};
pub use optimize::{ascent_runs, best_run, AscentRun, OptimizerOptions, MONOTONE_SLACK};

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::channels::{as_mixed_unitary, canonicalize, KrausChannel, MixedUnitaryForm, MIXED_UNITARY_TOL};
use crate::error::{Error, Result};
use crate::exec::SampleRng;
use crate::fidelity::process_fidelity;
use crate::matkernel::{hs_inner, UnitaryMatrix};

/// Slack allowed when checking a DU value against its bounds.
pub const SANDWICH_TOL: f64 = 1e-9;
/// Orthogonality tolerance for the exact mixed-unitary formula.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DuMethod {
    ExactMixedUnitary,
    NumericalOptimizer,
}

impl DuMethod {
    pub fn name(self) -> &'static str {
        match self {
            DuMethod::ExactMixedUnitary => "exact_mixed_unitary",
            DuMethod::NumericalOptimizer => "numerical_optimizer",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DuResult {
    pub value: f64,
    pub method: DuMethod,
    /// Unitary attaining `value` as its process fidelity with the channel.
    pub witness: UnitaryMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// Every optimizer run had a non-decreasing objective. Always true on
    /// the exact path.
    pub monotone: bool,
}

/// `max_k |α_k|²` for a channel `E_k = α_k U_k` with pairwise orthogonal
/// unitaries. Fails when the orthogonality hypothesis does not hold.
pub fn du_exact_mixed_unitary(mu: &MixedUnitaryForm) -> Result<DuResult> {
    if mu.unitaries.is_empty() {
        return Err(Error::Hypothesis("no unitaries".into()));
    }
    for (i, a) in mu.unitaries.iter().enumerate() {
        for (j, b) in mu.unitaries.iter().enumerate().skip(i + 1) {
            let overlap = hs_inner(a.matrix(), b.matrix())?.norm();
            if overlap > ORTHOGONALITY_TOL {
                return Err(Error::Hypothesis(format!(
                    "unitaries {i} and {j} overlap: |⟨U_i, U_j⟩| = {overlap:.3e}"
                )));
            }
        }
    }
    let weights: Vec<f64> = mu.coefficients.iter().map(|a| a.norm_sqr()).collect();
    let mut best = 0;
    for (k, &w) in weights.iter().enumerate().skip(1) {
        if w > weights[best] {
            best = k;
        }
    }
    Ok(DuResult {
        value: weights[best],
        method: DuMethod::ExactMixedUnitary,
        witness: mu.unitaries[best].clone(),
        iterations: 0,
        converged: true,
        monotone: true,
    })
}

/// Numerical DU: fixed-point ascent from the two bound witnesses plus
/// `opts.restarts` Haar-random starts. `value` is recomputed as the process
/// fidelity at the returned witness.
pub fn du_optimize_with<R: Rng + ?Sized>(
    ch: &KrausChannel,
    warm_starts: &[UnitaryMatrix],
    opts: &OptimizerOptions,
    rng: &mut R,
) -> Result<DuResult> {
    let runs = ascent_runs(ch, warm_starts, opts, rng, false)?;
    let best = &runs[best_run(&runs)];
    Ok(DuResult {
        value: process_fidelity(ch, &best.unitary)?,
        method: DuMethod::NumericalOptimizer,
        witness: best.unitary.clone(),
        iterations: best.iterations,
        converged: best.converged,
        monotone: runs.iter().all(|r| r.monotone),
    })
}

/// [`du_optimize_with`] using the bound witnesses as warm starts and the
/// default iteration limits.
pub fn du_optimize<R: Rng + ?Sized>(ch: &KrausChannel, restarts: usize, rng: &mut R) -> Result<DuResult> {
    let bounds = du_bounds(&canonicalize(ch)?)?;
    let opts = OptimizerOptions {
        restarts,
        ..OptimizerOptions::default()
    };
    du_optimize_with(
        ch,
        &[bounds.witness_lb1, bounds.witness_lb2],
        &opts,
        rng,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DuOptions {
    pub optimizer: OptimizerOptions,
    /// Seed for the optimizer's random restarts.
    pub seed: u64,
    /// Tolerance for recognizing canonical operators as scaled unitaries.
    pub mixed_unitary_tol: f64,
}

impl Default for DuOptions {
    fn default() -> Self {
        Self {
            optimizer: OptimizerOptions::default(),
            seed: 0,
            mixed_unitary_tol: MIXED_UNITARY_TOL,
        }
    }
}

/// DU with default options. See [`du_with`].
pub fn du(ch: &KrausChannel) -> Result<(DuResult, BoundReport)> {
    du_with(ch, &DuOptions::default())
}

/// Canonicalizes the channel, computes its bounds, then takes the exact
/// mixed-unitary route when the canonical operators are scaled orthogonal
/// unitaries and the optimizer otherwise. The value is checked against the
/// bounds before returning.
pub fn du_with(ch: &KrausChannel, opts: &DuOptions) -> Result<(DuResult, BoundReport)> {
    ch.ensure_valid()?;
    let ck = canonicalize(ch)?;
    let bounds = du_bounds(&ck)?;
    let exact = as_mixed_unitary(&ck, opts.mixed_unitary_tol)
        .and_then(|mu| du_exact_mixed_unitary(&mu).ok());
    let result = match exact {
        Some(r) => r,
        None => {
            let mut rng = SampleRng::seed_from_u64(opts.seed);
            let warm = [bounds.witness_lb1.clone(), bounds.witness_lb2.clone()];
            du_optimize_with(&ck.to_channel(), &warm, &opts.optimizer, &mut rng)?
        }
    };
    check_sandwich(&result, &bounds)?;
    Ok((result, bounds))
}

fn check_sandwich(result: &DuResult, bounds: &BoundReport) -> Result<()> {
    let lo = bounds.best_lower();
    if result.value < lo - SANDWICH_TOL || result.value > bounds.ub + SANDWICH_TOL {
        return Err(Error::BoundViolation(format!(
            "DU {} outside [{lo}, {}]",
            result.value, bounds.ub
        )));
    }
    Ok(())
}
