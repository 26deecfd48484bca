use serde::Serialize;

use super::KrausChannel;
use crate::error::{Error, Result};
use crate::matkernel::{hermitian_eig, ComplexMatrix, C64, RANK_TOL, STRUCTURE_TOL};

/// Process matrix in the operator basis `A_j = |m⟩⟨n|`, flat index
/// `j = m·dim + n`, so that `ε(ρ) = Σ_{ab} χ_ab A_a ρ A_b†`.
///
/// Coefficients of a Kraus operator in this basis are its row-major entries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiMatrix {
    dim: usize,
    chi: ComplexMatrix,
}

impl ChiMatrix {
    /// Wraps an `n² x n²` matrix after checking Hermiticity, positivity and
    /// the trace-preservation condition `Σ χ_ab A_b† A_a = I`.
    pub fn new(dim: usize, chi: ComplexMatrix) -> Result<Self> {
        let d2 = dim * dim;
        if chi.rows() != d2 || chi.cols() != d2 {
            return Err(Error::Dimension(format!(
                "chi matrix for dimension {dim} must be {d2}x{d2}"
            )));
        }
        if chi.hermiticity_residual() > STRUCTURE_TOL {
            return Err(Error::Contract("chi matrix is not Hermitian".into()));
        }
        let min = *hermitian_eig(&chi)?.values.last().expect("nonempty");
        if min < -STRUCTURE_TOL {
            return Err(Error::Contract(format!(
                "chi matrix is not positive semidefinite (eigenvalue {min:.3e})"
            )));
        }
        let out = Self { dim, chi };
        let residual = out
            .trace_condition()
            .distance(&ComplexMatrix::identity(dim))?;
        if residual > STRUCTURE_TOL {
            return Err(Error::Contract(format!(
                "chi matrix is not trace preserving (residual {residual:.3e})"
            )));
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.chi
    }

    /// `Σ_ab χ_ab A_b† A_a`. With `A_a = |m⟩⟨n|` and `A_b = |m'⟩⟨n'|`,
    /// `A_b† A_a = δ_{m m'} |n'⟩⟨n|`.
    pub fn trace_condition(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n, n);
        for m in 0..n {
            for col in 0..n {
                for row in 0..n {
                    let a = m * n + col;
                    let b = m * n + row;
                    out[(row, col)] += self.chi[(a, b)];
                }
            }
        }
        out
    }

    /// `ε(ρ) = Σ_ab χ_ab A_a ρ A_b†`, evaluated entrywise:
    /// `(A_a ρ A_b†)_{m m'} = ρ_{n n'}` for `a = (m, n)`, `b = (m', n')`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim;
        if rho.rows() != n || rho.cols() != n {
            return Err(Error::Dimension("density matrix does not match chi dimension".into()));
        }
        let mut out = ComplexMatrix::zeros(n, n);
        for a in 0..n * n {
            let (m, nn) = (a / n, a % n);
            for b in 0..n * n {
                let (mp, np) = (b / n, b % n);
                out[(m, mp)] += self.chi[(a, b)] * rho[(nn, np)];
            }
        }
        Ok(out)
    }
}

/// `χ_ab = Σ_k c_ka c_kb*` with `c_k` the row-major entries of `E_k`.
pub fn kraus_to_chi(ch: &KrausChannel) -> Result<ChiMatrix> {
    ch.ensure_valid()?;
    let n = ch.dim();
    let d2 = n * n;
    let mut chi = ComplexMatrix::zeros(d2, d2);
    for e in ch.ops() {
        let c = e.as_slice();
        for a in 0..d2 {
            for b in 0..d2 {
                chi[(a, b)] += c[a] * c[b].conj();
            }
        }
    }
    Ok(ChiMatrix { dim: n, chi })
}

/// Kraus operators `E_k = √λ_k · reshape(v_k)` from the eigenpairs of `χ`;
/// eigenvalues below `1e-12` are dropped.
pub fn chi_to_kraus(x: &ChiMatrix) -> Result<KrausChannel> {
    let n = x.dim;
    let eig = hermitian_eig(&x.chi)?;
    if let Some(&min) = eig.values.last() {
        if min < -STRUCTURE_TOL {
            return Err(Error::Contract(format!(
                "chi matrix is not positive semidefinite (eigenvalue {min:.3e})"
            )));
        }
    }
    let ops: Vec<ComplexMatrix> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > RANK_TOL)
        .map(|(k, &l)| {
            let s = l.sqrt();
            let data: Vec<C64> = eig.vectors.column(k).into_iter().map(|z| z * s).collect();
            ComplexMatrix::new(n, n, data).expect("n² entries")
        })
        .collect();
    KrausChannel::new(ops)
}
