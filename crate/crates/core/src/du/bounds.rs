use serde::Serialize;

use crate::channels::CanonicalKraus;
use crate::error::Result;
use crate::fidelity::process_fidelity;
use crate::matkernel::{polar, svd, UnitaryMatrix};

/// Certified bracket on the degree of unitarity of a channel, computed from
/// its canonical Kraus operators `F_i` and their singular values `σ_ij`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    /// Process fidelity at the polar unitary of the `F_i` with the largest
    /// Frobenius norm.
    pub lb1: f64,
    /// `(Σ_j σ_1j)² / n²` for that same operator; never above `lb1`.
    pub lb1_simplified: f64,
    /// Process fidelity at the polar unitary of the `F_i` with the largest
    /// nuclear norm.
    pub lb2: f64,
    /// `Σ_i (Σ_j σ_ij)² / n²`.
    pub ub: f64,
    pub singular_values: Vec<Vec<f64>>,
    pub witness_lb1: UnitaryMatrix,
    pub witness_lb2: UnitaryMatrix,
}

impl BoundReport {
    pub fn best_lower(&self) -> f64 {
        self.lb1.max(self.lb2)
    }
}

/// First index of the maximum; later equal values do not replace it.
fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn du_bounds(ck: &CanonicalKraus) -> Result<BoundReport> {
    let n = ck.dim() as f64;
    let n2 = n * n;
    let singular_values: Vec<Vec<f64>> = ck
        .ops()
        .iter()
        .map(|f| svd(f).map(|s| s.singular_values))
        .collect::<Result<_>>()?;
    let frobenius_sq: Vec<f64> = singular_values
        .iter()
        .map(|s| s.iter().map(|x| x * x).sum())
        .collect();
    let nuclear: Vec<f64> = singular_values.iter().map(|s| s.iter().sum()).collect();

    let i1 = argmax_first(&frobenius_sq);
    let i0 = argmax_first(&nuclear);
    let channel = ck.to_channel();
    let witness_lb1 = polar(&ck.ops()[i1])?.unitary_part;
    let witness_lb2 = if i0 == i1 {
        witness_lb1.clone()
    } else {
        polar(&ck.ops()[i0])?.unitary_part
    };
    let lb1 = process_fidelity(&channel, &witness_lb1)?;
    let lb2 = process_fidelity(&channel, &witness_lb2)?;

    Ok(BoundReport {
        lb1,
        lb1_simplified: nuclear[i1].powi(2) / n2,
        lb2,
        ub: nuclear.iter().map(|s| s * s).sum::<f64>() / n2,
        singular_values,
        witness_lb1,
        witness_lb2,
    })
}
