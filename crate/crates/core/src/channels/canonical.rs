use serde::Serialize;

use super::KrausChannel;
use crate::error::Result;
use crate::matkernel::{hermitian_eig, hs_inner, polar, ComplexMatrix, UnitaryMatrix, C64, RANK_TOL};

/// Default tolerance for `F†F ∝ I` in [`as_mixed_unitary`].
pub const MIXED_UNITARY_TOL: f64 = 1e-8;

/// Orthogonal Kraus set `F_i = Σ_j u*_ij E_j` with `⟨F_i, F_k⟩ = δ_ik D_kk`,
/// weights in descending order.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalKraus {
    dim: usize,
    ops: Vec<ComplexMatrix>,
    weights: Vec<f64>,
    /// Full `K x K` unitary `u` over the source operators, including rows
    /// of discarded zero-weight combinations.
    mixing: ComplexMatrix,
}

impl CanonicalKraus {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mixing(&self) -> &ComplexMatrix {
        &self.mixing
    }

    pub fn to_channel(&self) -> KrausChannel {
        KrausChannel::new(self.ops.clone()).expect("canonical operators share the source shape")
    }
}

/// Diagonalizes the correlation matrix `W_jk = ⟨E_j, E_k⟩` and returns the
/// orthogonal Kraus operators, dropping weights `≤ 1e-12`.
pub fn canonicalize(ch: &KrausChannel) -> Result<CanonicalKraus> {
    ch.ensure_valid()?;
    let ops = ch.ops();
    let k = ops.len();
    let mut w = ComplexMatrix::zeros(k, k);
    for j in 0..k {
        for l in j..k {
            let z = hs_inner(&ops[j], &ops[l])?;
            w[(j, l)] = z;
            w[(l, j)] = z.conj();
        }
    }
    let eig = hermitian_eig(&w)?;
    // W = V D V†, u = V†, so F_i = Σ_j V_ji E_j.
    let mut out_ops = Vec::new();
    let mut weights = Vec::new();
    for (i, &d) in eig.values.iter().enumerate() {
        if d <= RANK_TOL {
            continue;
        }
        let mut f = ComplexMatrix::zeros(ch.dim(), ch.dim());
        for (j, e) in ops.iter().enumerate() {
            let coef = eig.vectors[(j, i)];
            if coef.norm() == 0.0 {
                continue;
            }
            f = &f + &e.scale(coef);
        }
        out_ops.push(f);
        weights.push(d);
    }
    Ok(CanonicalKraus {
        dim: ch.dim(),
        ops: out_ops,
        weights,
        mixing: eig.vectors.adjoint(),
    })
}

/// `E_k = α_k U_k` with `Σ |α_k|² = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct MixedUnitaryForm {
    pub unitaries: Vec<UnitaryMatrix>,
    pub coefficients: Vec<C64>,
}

impl MixedUnitaryForm {
    pub fn dim(&self) -> usize {
        self.unitaries[0].dim()
    }

    pub fn to_channel(&self) -> KrausChannel {
        let ops = self
            .unitaries
            .iter()
            .zip(&self.coefficients)
            .map(|(u, &a)| u.matrix().scale(a))
            .collect();
        KrausChannel::new(ops).expect("unitaries share a dimension")
    }
}

/// Recognizes canonical operators that are each proportional to a unitary.
///
/// Returns `None` ("not mixed-unitary") when some `F_k` fails
/// `‖F_k†F_k / c_k − I‖_F ≤ tol` with `c_k = tr(F_k†F_k)/n`. On success the
/// unitary part is taken from the polar decomposition of `F_k` and its
/// global phase fixed so the first nonzero entry is real and positive.
pub fn as_mixed_unitary(ck: &CanonicalKraus, tol: f64) -> Option<MixedUnitaryForm> {
    let n = ck.dim as f64;
    let mut unitaries = Vec::with_capacity(ck.ops.len());
    let mut coefficients = Vec::with_capacity(ck.ops.len());
    for f in &ck.ops {
        let gram = &f.adjoint() * f;
        let c = gram.trace().re / n;
        if c <= 0.0 {
            return None;
        }
        let residual = gram
            .scale_real(1.0 / c)
            .distance(&ComplexMatrix::identity(ck.dim))
            .ok()?;
        if residual > tol {
            return None;
        }
        let raw = polar(f).ok()?.unitary_part.into_matrix();
        let first = raw.as_slice().iter().copied().find(|z| z.norm() > 1e-9)?;
        let phase = first / first.norm();
        let u = UnitaryMatrix::new(raw.scale(phase.conj())).ok()?;
        unitaries.push(u);
        coefficients.push(phase * c.sqrt());
    }
    if unitaries.is_empty() {
        return None;
    }
    Some(MixedUnitaryForm {
        unitaries,
        coefficients,
    })
}
