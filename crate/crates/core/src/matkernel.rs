//! Dense complex matrices and the handful of decompositions the rest of the
//! crate needs: SVD, polar decomposition, Hermitian eigendecomposition and
//! Haar-random unitaries.
//!
//! Matrices are small (system dimension up to 8, dilations up to 64), so the
//! storage is a plain row-major `Vec`. Decompositions go through `faer`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use faer::{Mat, Side};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for unitarity and Hermiticity checks.
pub const STRUCTURE_TOL: f64 = 1e-9;
/// Singular values / eigenvalues below this are treated as zero.
pub const RANK_TOL: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting bad shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("{rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Contract("matrix has non-finite entries".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    /// Real-valued convenience constructor, row-major.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![ONE; n])
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let data = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Matrix product, checking inner dimensions.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r, c) = (self.rows * rhs.rows, self.cols * rhs.cols);
        let mut out = Self::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `‖self - other‖_F`; shapes must agree.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        check_same_shape(self, other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `‖self - self†‖_F` for square matrices.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc += (self[(r, c)] - self[(c, r)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `‖self†self - I‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.adjoint() * self;
        gram.distance(&Self::identity(self.cols))
            .unwrap_or(f64::INFINITY)
    }

    fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.rows, self.cols, |r, c| self.data[r * self.cols + c])
    }

    fn from_faer(m: faer::MatRef<'_, C64>) -> Self {
        let (rows, cols) = (m.nrows(), m.ncols());
        Self::from_fn(rows, cols, |r, c| m[(r, c)])
    }
}

fn check_same_shape(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::Dimension(format!(
            "{}x{} vs {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(())
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Mul<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        &self * rhs
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        check_same_shape(self, rhs).expect("matrix sum shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        check_same_shape(self, rhs).expect("matrix difference shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Wire format: list of rows, each a list of `[re, im]` pairs.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|r| self.row(r).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let rows: Vec<Vec<C64>> = rows
            .into_iter()
            .map(|row| row.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// A square matrix validated to satisfy `‖U†U − I‖_F ≤ 1e-9`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Dimension("unitary must be square".into()));
        }
        let res = mat.unitarity_residual();
        if res > STRUCTURE_TOL {
            return Err(Error::Contract(format!(
                "matrix is not unitary (residual {res:.3e})"
            )));
        }
        Ok(Self(mat))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Product of two unitaries; no re-validation needed.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        Ok(Self(self.0.matmul(&rhs.0)?))
    }

    /// Skips validation. Callers guarantee unitarity by construction.
    pub(crate) fn new_unchecked(mat: ComplexMatrix) -> Self {
        Self(mat)
    }
}

impl<'de> Deserialize<'de> for UnitaryMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        UnitaryMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug)]
pub struct PolarFactors {
    pub unitary_part: UnitaryMatrix,
    /// Hermitian positive semidefinite factor `P` with `A = W P`.
    pub psd_part: ComplexMatrix,
}

/// `A = U diag(σ) V†` with σ descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

/// Spectral decomposition `h = V diag(λ) V†` with λ descending and the
/// eigenvectors in the columns of `vectors`. The unitary `u` with
/// `D = u h u†` is `vectors.adjoint()`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Hilbert-Schmidt inner product `tr(a† b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    check_same_shape(a, b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// Full SVD of a (possibly rectangular) matrix.
pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    if a.data.is_empty() {
        return Err(Error::Dimension("SVD of an empty matrix".into()));
    }
    let dec = a.to_faer().svd().map_err(|_| Error::NoConvergence {
        routine: "svd",
        iterations: 0,
    })?;
    Ok(Svd {
        u: ComplexMatrix::from_faer(dec.U()),
        singular_values: dec.S().column_vector().iter().map(|s| s.re.max(0.0)).collect(),
        v: ComplexMatrix::from_faer(dec.V()),
    })
}

/// Polar decomposition `A = W P` through the SVD: `W = U V†`, `P = V Σ V†`.
/// `W` is unitary even when `A` is rank deficient.
pub fn polar(a: &ComplexMatrix) -> Result<PolarFactors> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "polar decomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let Svd {
        u,
        singular_values,
        v,
    } = svd(a)?;
    let w = &u * &v.adjoint();
    let sigma = ComplexMatrix::from_real_diag(&singular_values);
    let p = &(&v * &sigma) * &v.adjoint();
    Ok(PolarFactors {
        unitary_part: UnitaryMatrix::new_unchecked(w),
        psd_part: p,
    })
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::Dimension("eigendecomposition needs a square matrix".into()));
    }
    let res = h.hermiticity_residual();
    if res > STRUCTURE_TOL * h.frobenius_norm().max(1.0) {
        return Err(Error::Contract(format!(
            "matrix is not Hermitian (residual {res:.3e})"
        )));
    }
    let n = h.rows();
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = Mat::from_fn(n, n, |r, c| (h[(r, c)] + h[(c, r)].conj()) * 0.5);
    let dec = sym.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence {
        routine: "hermitian_eig",
        iterations: 0,
    })?;
    // faer sorts ascending
    let s = dec.S().column_vector();
    let u = dec.U();
    let values = (0..n).rev().map(|i| s[i].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| u[(r, n - 1 - c)]);
    Ok(HermitianEigen { values, vectors })
}

/// Principal square root of a Hermitian PSD matrix; small negative
/// eigenvalues from rounding are clipped to zero.
pub fn psd_sqrt(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let HermitianEigen { values, vectors } = hermitian_eig(h)?;
    let roots: Vec<f64> = values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    Ok(&(&vectors * &ComplexMatrix::from_real_diag(&roots)) * &vectors.adjoint())
}

/// Matrix of i.i.d. standard complex Gaussians (`E|z|² = 1`).
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let data = (0..rows * cols)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * scale, im * scale)
        })
        .collect();
    ComplexMatrix { rows, cols, data }
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if dim == 0 {
        return Err(Error::Dimension("Haar unitary of dimension 0".into()));
    }
    loop {
        let qr = ginibre(dim, dim, rng).to_faer().qr();
        let r = qr.R();
        // A singular Ginibre draw has probability zero; resample if it happens.
        if (0..dim).any(|i| r[(i, i)].norm() < RANK_TOL) {
            continue;
        }
        let q = qr.compute_Q();
        let u = ComplexMatrix::from_fn(dim, dim, |i, j| q[(i, j)] * (r[(j, j)] / r[(j, j)].norm()));
        return Ok(UnitaryMatrix::new_unchecked(u));
    }
}

/// Haar-random pure state of the given dimension.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let g = ginibre(dim, 1, rng).into_vec();
    let norm = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    g.into_iter().map(|z| z / norm).collect()
}

/// Closed-form unitary polar factor of an invertible 2x2 matrix `m`
/// (row-major): `W = (M + e^{iθ} adj(M)†) / (σ₁ + σ₂)` with
/// `e^{iθ} = det M / |det M|`. Returns `None` when `det M` vanishes.
pub(crate) fn polar_unitary_2x2(m: &[C64; 4]) -> Option<[C64; 4]> {
    let [a, b, c, d] = *m;
    let det = a * d - b * c;
    let det_abs = det.norm();
    let scale = m.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if !(det_abs > 1e-14 * scale) {
        return None;
    }
    let phase = det / det_abs;
    // adj(M)† = [[d*, -c*], [-b*, a*]]
    let w = [
        a + phase * d.conj(),
        b - phase * c.conj(),
        c - phase * b.conj(),
        d + phase * a.conj(),
    ];
    let norm = (w.iter().map(|z| z.norm_sqr()).sum::<f64>() / 2.0).sqrt();
    Some(w.map(|z| z / norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn rejects_bad_shapes_and_nan() {
        assert!(ComplexMatrix::new(2, 2, vec![ONE; 3]).is_err());
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::from_rows(&[vec![ONE, ONE], vec![ONE]]).is_err());
    }

    #[test]
    fn hs_inner_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(hs_inner(&i2, &i2).unwrap(), c(2.0, 0.0));
        assert_eq!(hs_inner(&pauli_x(), &pauli_z()).unwrap(), ZERO);
        let b = i2.scale(c(1.0, 1.0));
        assert_eq!(hs_inner(&i2, &b).unwrap(), c(2.0, 2.0));
        assert!(matches!(
            hs_inner(&i2, &ComplexMatrix::identity(3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn svd_examples() {
        let s = svd(&ComplexMatrix::from_real_diag(&[3.0, 4.0])).unwrap();
        assert!((s.singular_values[0] - 4.0).abs() < 1e-12);
        assert!((s.singular_values[1] - 3.0).abs() < 1e-12);

        let z = svd(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(z.singular_values.iter().all(|&x| x == 0.0));
        assert!(z.u.unitarity_residual() < 1e-12);

        let g = 0.36f64;
        let a = ComplexMatrix::from_real(2, 2, &[0.0, g.sqrt(), 0.0, 0.0]).unwrap();
        let s = svd(&a).unwrap();
        assert!((s.singular_values[0] - 0.6).abs() < 1e-12);
        assert!(s.singular_values[1].abs() < 1e-12);
    }

    #[test]
    fn svd_reconstructs_rectangular() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (m, n) in [(3, 5), (5, 3), (4, 4)] {
            let a = ginibre(m, n, &mut rng);
            let Svd {
                u,
                singular_values,
                v,
            } = svd(&a).unwrap();
            let mut sigma = ComplexMatrix::zeros(m, n);
            for (i, &s) in singular_values.iter().enumerate() {
                sigma[(i, i)] = c(s, 0.0);
            }
            let rec = &(&u * &sigma) * &v.adjoint();
            assert!(rec.distance(&a).unwrap() < 1e-9 * a.frobenius_norm());
            assert!(singular_values.windows(2).all(|w| w[0] >= w[1]));
            assert!(u.unitarity_residual() < 1e-10 && v.unitarity_residual() < 1e-10);
        }
    }

    #[test]
    fn svd_reconstructs_rank_deficient() {
        // low-rank complex products, including outer products of dense vectors
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in [2, 3, 4, 8] {
            for rank in 1..n {
                for _ in 0..20 {
                    let a = &ginibre(n, rank, &mut rng) * &ginibre(rank, n, &mut rng);
                    let s = svd(&a).unwrap();
                    let rec = &(&s.u * &ComplexMatrix::from_real_diag(&s.singular_values)) * &s.v.adjoint();
                    assert!(rec.distance(&a).unwrap() < 1e-12 * a.frobenius_norm().max(1.0));
                    let tail: f64 = s.singular_values[rank..].iter().sum();
                    assert!(tail < 1e-12 * a.frobenius_norm());
                }
            }
        }
    }

    #[test]
    fn polar_examples() {
        let p = polar(&ComplexMatrix::identity(2)).unwrap();
        assert!(p.unitary_part.matrix().distance(&ComplexMatrix::identity(2)).unwrap() < 1e-12);
        assert!(p.psd_part.distance(&ComplexMatrix::identity(2)).unwrap() < 1e-12);

        let a = ComplexMatrix::from_real_diag(&[1.0, 0.8]);
        let p = polar(&a).unwrap();
        assert!(p.unitary_part.matrix().distance(&ComplexMatrix::identity(2)).unwrap() < 1e-12);
        assert!(p.psd_part.distance(&a).unwrap() < 1e-12);

        let a = ComplexMatrix::from_real_diag(&[2.0, -1.0]);
        let p = polar(&a).unwrap();
        let w = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        assert!(p.unitary_part.matrix().distance(&w).unwrap() < 1e-12);
        assert!(p
            .psd_part
            .distance(&ComplexMatrix::from_real_diag(&[2.0, 1.0]))
            .unwrap()
            < 1e-12);

        assert!(matches!(
            polar(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn polar_of_rank_deficient_is_unitary() {
        let a = ComplexMatrix::from_real(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 0.0]).unwrap();
        let p = polar(&a).unwrap();
        assert!(p.unitary_part.matrix().unitarity_residual() < 1e-10);
        let rec = p.unitary_part.matrix() * &p.psd_part;
        assert!(rec.distance(&a).unwrap() < 1e-9 * a.frobenius_norm());
    }

    #[test]
    fn hermitian_eig_examples() {
        let e = hermitian_eig(&ComplexMatrix::from_real_diag(&[1.0, 2.0])).unwrap();
        assert_eq!(e.values.len(), 2);
        assert!((e.values[0] - 2.0).abs() < 1e-12 && (e.values[1] - 1.0).abs() < 1e-12);

        let e = hermitian_eig(&pauli_x()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12 && (e.values[1] + 1.0).abs() < 1e-12);

        let e = hermitian_eig(&ComplexMatrix::identity(4)).unwrap();
        assert!(e.values.iter().all(|&l| (l - 1.0).abs() < 1e-12));
        assert!(e.vectors.unitarity_residual() < 1e-12);

        let not_h = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eig(&not_h), Err(Error::Contract(_))));
    }

    #[test]
    fn hermitian_eig_keeps_diagonal_basis() {
        // Canonicalization relies on an already-diagonal correlation matrix
        // keeping its basis (up to phases).
        let d = ComplexMatrix::from_real_diag(&[1.7, 0.1, 0.1, 0.1]);
        let e = hermitian_eig(&d).unwrap();
        for c in 0..4 {
            let col = e.vectors.column(c);
            let big = col.iter().filter(|z| z.norm() > 1e-12).count();
            assert_eq!(big, 1);
        }
    }

    #[test]
    fn haar_unitary_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = haar_unitary(4, &mut rng).unwrap();
        assert!(u.matrix().unitarity_residual() < 1e-12);

        let a = haar_unitary(2, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let b = haar_unitary(2, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        assert_eq!(a, b);

        assert!(matches!(haar_unitary(0, &mut rng), Err(Error::Dimension(_))));
    }

    #[test]
    fn haar_second_moment_of_trace() {
        // E|tr U|² = 1 on U(n); estimate independently by plain averaging.
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 10_000;
        let mean = (0..n)
            .map(|_| haar_unitary(2, &mut rng).unwrap().matrix().trace().norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0).abs() < 0.05, "mean |tr U|^2 = {mean}");
    }

    #[test]
    fn haar_phase_correction_matters() {
        // Without the R-diagonal phase fix, E[U_00] drifts away from zero;
        // with it, the first entry's phase is uniform.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 20_000;
        let mean: C64 = (0..n)
            .map(|_| haar_unitary(2, &mut rng).unwrap().matrix()[(0, 0)])
            .sum::<C64>()
            / n as f64;
        assert!(mean.norm() < 0.03, "E[U00] = {mean}");
    }

    #[test]
    fn closed_form_polar_matches_svd_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = ginibre(2, 2, &mut rng);
            let arr: [C64; 4] = a.as_slice().try_into().unwrap();
            let w = polar_unitary_2x2(&arr).unwrap();
            let w = ComplexMatrix::new(2, 2, w.to_vec()).unwrap();
            let reference = polar(&a).unwrap();
            assert!(w.distance(reference.unitary_part.matrix()).unwrap() < 1e-10);
        }
        assert!(polar_unitary_2x2(&[ONE, ZERO, ZERO, ZERO]).is_none());
    }

    #[test]
    fn serde_wire_format() {
        let m = ComplexMatrix::new(1, 2, vec![c(1.0, -2.0), c(0.5, 0.0)]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[1.0,-2.0],[0.5,0.0]]]");
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0]],[]]").is_err());
    }
}
