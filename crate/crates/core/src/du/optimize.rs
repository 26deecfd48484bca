//! Fixed-point ascent over the unitary group.
//!
//! The objective `f(U) = Σ_k |⟨U, E_k⟩|² = vec(U)† χ vec(U)` is a convex
//! quadratic form, with `χ` the process matrix. Each step replaces `U` by
//! the polar unitary of `G = reshape(χ vec U) = Σ_k ⟨E_k, U⟩ E_k`, which
//! maximizes the linearization `Re⟨G, V⟩` over unitaries `V`. Convexity
//! gives `f(U_{t+1}) ≥ f(U_t)`.

use rand::Rng;

use crate::channels::{kraus_to_chi, KrausChannel};
use crate::error::Result;
use crate::exec::{derive_seed, Execution, SampleRng};
use crate::matkernel::{haar_unitary, polar, polar_unitary_2x2, ComplexMatrix, UnitaryMatrix, C64};
use rand::SeedableRng;

/// Allowed per-step decrease of the objective attributed to rounding.
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerOptions {
    /// Haar-random starting points, in addition to any warm starts.
    pub restarts: usize,
    pub max_iterations: usize,
    /// Stop once `|f_{t+1} − f_t|` falls below this (unnormalized objective).
    pub tolerance: f64,
    /// How independent runs are scheduled.
    pub exec: Execution,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iterations: 10_000,
            tolerance: 1e-12,
            exec: Execution::Sequential,
        }
    }
}

/// Outcome of one ascent run.
#[derive(Clone, Debug)]
pub struct AscentRun {
    pub objective: f64,
    pub unitary: UnitaryMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// No step decreased the objective by more than [`MONOTONE_SLACK`].
    pub monotone: bool,
    /// Objective after each step, starting with the initial point. Only
    /// filled when requested.
    pub trace: Vec<f64>,
}

/// Objective `vec(U)† χ vec(U)` with row-major `vec`.
pub(crate) struct Objective {
    n: usize,
    chi: Vec<C64>,
}

impl Objective {
    pub fn new(ch: &KrausChannel) -> Result<Self> {
        let chi = kraus_to_chi(ch)?;
        Ok(Self {
            n: ch.dim(),
            chi: chi.matrix().as_slice().to_vec(),
        })
    }

    /// Writes `χ vec(U)` into `grad` and returns `f(U)`.
    fn eval(&self, u: &[C64], grad: &mut [C64]) -> f64 {
        let d2 = self.n * self.n;
        let mut f = C64::new(0.0, 0.0);
        for a in 0..d2 {
            let row = &self.chi[a * d2..(a + 1) * d2];
            let g: C64 = row.iter().zip(u).map(|(c, x)| c * x).sum();
            grad[a] = g;
            f += u[a].conj() * g;
        }
        f.re
    }

    fn project(&self, grad: &[C64]) -> Option<Vec<C64>> {
        if self.n == 2 {
            let m: &[C64; 4] = grad.try_into().expect("2x2");
            if let Some(w) = polar_unitary_2x2(m) {
                return Some(w.to_vec());
            }
        }
        let g = ComplexMatrix::new(self.n, self.n, grad.to_vec()).ok()?;
        if g.frobenius_norm() == 0.0 {
            return None;
        }
        Some(polar(&g).ok()?.unitary_part.into_matrix().into_vec())
    }

    pub fn ascend(&self, start: &UnitaryMatrix, opts: &OptimizerOptions, record: bool) -> AscentRun {
        let d2 = self.n * self.n;
        let mut u = start.matrix().as_slice().to_vec();
        let mut grad = vec![C64::new(0.0, 0.0); d2];
        let mut f = self.eval(&u, &mut grad);
        let mut trace = if record { vec![f] } else { Vec::new() };
        let mut monotone = true;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < opts.max_iterations {
            let Some(next) = self.project(&grad) else {
                // G = 0: U is a stationary point with f(U) = 0.
                converged = true;
                break;
            };
            let mut next_grad = vec![C64::new(0.0, 0.0); d2];
            let next_f = self.eval(&next, &mut next_grad);
            iterations += 1;
            if record {
                trace.push(next_f);
            }
            if next_f < f - MONOTONE_SLACK {
                monotone = false;
            }
            let step = (next_f - f).abs();
            if next_f >= f {
                u = next;
                grad = next_grad;
                f = next_f;
            }
            if step < opts.tolerance {
                converged = true;
                break;
            }
        }
        let unitary = UnitaryMatrix::new(ComplexMatrix::new(self.n, self.n, u).expect("n x n"))
            .unwrap_or_else(|_| start.clone());
        AscentRun {
            objective: f,
            unitary,
            iterations,
            converged,
            monotone,
            trace,
        }
    }
}

/// Runs the ascent from each warm start and from `opts.restarts` Haar-random
/// unitaries. Run `i` uses warm start `i` or, past those, a Haar draw seeded
/// from one base seed taken from `rng`, so the outcome does not depend on
/// `opts.exec`. Returns all runs in start order.
pub fn ascent_runs<R: Rng + ?Sized>(
    ch: &KrausChannel,
    warm_starts: &[UnitaryMatrix],
    opts: &OptimizerOptions,
    rng: &mut R,
    record: bool,
) -> Result<Vec<AscentRun>> {
    let objective = Objective::new(ch)?;
    let base: u64 = rng.random();
    let n = ch.dim();
    let total = warm_starts.len() + opts.restarts;
    let runs = opts.exec.map_indexed(total, |i| {
        let start = if i < warm_starts.len() {
            warm_starts[i].clone()
        } else {
            let mut r = SampleRng::seed_from_u64(derive_seed(base, i as u64));
            haar_unitary(n, &mut r).expect("n ≥ 1")
        };
        objective.ascend(&start, opts, record)
    });
    Ok(runs)
}

/// Index of the best run: largest objective, ties to the lowest index.
pub fn best_run(runs: &[AscentRun]) -> usize {
    let mut best = 0;
    for (i, r) in runs.iter().enumerate().skip(1) {
        if r.objective > runs[best].objective {
            best = i;
        }
    }
    best
}
