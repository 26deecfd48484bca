//! Quantum channels in Kraus form, their process (chi) matrices, the
//! orthogonal canonical Kraus form, and channel constructors.

mod canonical;
mod chi;
mod json;
mod random;
mod standard;

pub use canonical::{as_mixed_unitary, canonicalize, CanonicalKraus, MixedUnitaryForm, MIXED_UNITARY_TOL};
pub use chi::{chi_to_kraus, kraus_to_chi, ChiMatrix};
pub use json::{parse_channel_json, parse_json_with_context, ChannelSpec};
pub use random::{random_channel, random_channel_with_env, random_isometric_remix};
pub use standard::{standard_channel, StandardKind};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matkernel::{hermitian_eig, ComplexMatrix, UnitaryMatrix, STRUCTURE_TOL};

/// Tolerance on `‖Σ E_k†E_k − I‖_F`.
pub const TRACE_PRESERVING_TOL: f64 = 1e-9;

/// A list of `n x n` Kraus operators. Construction checks shapes only, so
/// non-trace-preserving inputs can still be loaded and reported on by
/// [`KrausChannel::validate`]; every computation calls
/// [`KrausChannel::ensure_valid`] first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KrausChannel {
    dim: usize,
    #[serde(rename = "kraus")]
    ops: Vec<ComplexMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl KrausChannel {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::Dimension("channel needs at least one Kraus operator".into()))?;
        let dim = first.rows();
        for (k, op) in ops.iter().enumerate() {
            if op.rows() != dim || op.cols() != dim {
                return Err(Error::Dimension(format!(
                    "Kraus operator {k} is {}x{}, expected {dim}x{dim}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        Ok(Self { dim, ops })
    }

    /// Builds a channel and rejects it unless it is trace preserving.
    pub fn new_validated(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::new(ops)?;
        ch.ensure_valid()?;
        Ok(ch)
    }

    /// The unitary channel `ρ ↦ U ρ U†`.
    pub fn unitary(u: &UnitaryMatrix) -> Self {
        Self {
            dim: u.dim(),
            ops: vec![u.matrix().clone()],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::unitary(&UnitaryMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for e in &self.ops {
            sum = &sum + &(&e.adjoint() * e);
        }
        let residual = sum
            .distance(&ComplexMatrix::identity(self.dim))
            .expect("square by construction");
        ValidationReport {
            residual,
            tolerance: TRACE_PRESERVING_TOL,
            passed: residual <= TRACE_PRESERVING_TOL,
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.passed {
            Ok(())
        } else {
            Err(Error::InvalidChannel {
                residual: report.residual,
                tolerance: report.tolerance,
            })
        }
    }

    /// `ε(ρ) = Σ_k E_k ρ E_k†` for a density matrix `ρ`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::Dimension(format!(
                "density matrix is {}x{}, channel acts on dimension {}",
                rho.rows(),
                rho.cols(),
                self.dim
            )));
        }
        check_density(rho)?;
        Ok(self.apply_unchecked(rho))
    }

    /// Applies the Kraus sum to any square matrix of matching size.
    pub fn apply_unchecked(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for e in &self.ops {
            out = &out + &(&(e * x) * &e.adjoint());
        }
        out
    }

    /// `f ∘ self`: apply `self` first, then `f`. The product Kraus set is
    /// compressed through the canonical form so it never exceeds `n²`
    /// operators.
    pub fn then(&self, f: &KrausChannel) -> Result<KrausChannel> {
        compose(f, self)
    }

    /// Channel `ρ ↦ ε(U ρ U†)`.
    pub fn precompose_unitary(&self, u: &UnitaryMatrix) -> Result<KrausChannel> {
        compose(self, &KrausChannel::unitary(u))
    }

    /// Channel `ρ ↦ U ε(ρ) U†`.
    pub fn postcompose_unitary(&self, u: &UnitaryMatrix) -> Result<KrausChannel> {
        compose(&KrausChannel::unitary(u), self)
    }
}

fn check_density(rho: &ComplexMatrix) -> Result<()> {
    if rho.hermiticity_residual() > STRUCTURE_TOL {
        return Err(Error::Contract("density matrix is not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STRUCTURE_TOL || tr.im.abs() > STRUCTURE_TOL {
        return Err(Error::Contract(format!("density matrix has trace {tr}")));
    }
    let eig = hermitian_eig(rho)?;
    if eig.values.last().is_some_and(|&l| l < -STRUCTURE_TOL) {
        return Err(Error::Contract("density matrix is not positive semidefinite".into()));
    }
    Ok(())
}

/// Composition `f ∘ e` with Kraus set `{F_j E_k}`, canonicalized.
pub fn compose(f: &KrausChannel, e: &KrausChannel) -> Result<KrausChannel> {
    if f.dim != e.dim {
        return Err(Error::Dimension(format!(
            "cannot compose channels on dimensions {} and {}",
            f.dim, e.dim
        )));
    }
    let mut ops = Vec::with_capacity(f.len() * e.len());
    for fj in &f.ops {
        for ek in &e.ops {
            ops.push(fj * ek);
        }
    }
    let raw = KrausChannel::new(ops)?;
    Ok(canonicalize(&raw)?.to_channel())
}
