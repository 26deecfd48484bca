//! Fidelity between a channel and a unitary.
//!
//! With `n` the system dimension and `{E_k}` any Kraus set,
//!
//! ```text
//! F_pro = Σ_k |tr(U† E_k)|² / n²
//! F_ave = (n + Σ_k |tr(U† E_k)|²) / (n (n + 1)) = (n F_pro + 1) / (n + 1)
//! ```
//!
//! [`average_fidelity_mc`] estimates `F_ave` directly as the mean output
//! fidelity over Haar-random pure inputs and is used to cross-check the
//! closed form.

use rand::Rng;
use serde::Serialize;

use crate::channels::{kraus_to_chi, KrausChannel};
use crate::error::{Error, Result};
use crate::exec::{sample_rng, Execution};
use crate::matkernel::{
    haar_state, hermitian_eig, psd_sqrt, svd, ComplexMatrix, HermitianEigen, UnitaryMatrix, C64, RANK_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FidelityPair {
    pub f_pro: f64,
    pub f_ave: f64,
    pub dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Standard error of the mean; infinite for a single sample.
    pub std_error: f64,
    pub samples: usize,
}

fn check_dims(ch: &KrausChannel, u: &UnitaryMatrix) -> Result<()> {
    if ch.dim() != u.dim() {
        return Err(Error::Dimension(format!(
            "channel on dimension {} vs unitary of dimension {}",
            ch.dim(),
            u.dim()
        )));
    }
    Ok(())
}

/// `Σ_k |tr(U† E_k)|²`, the unnormalized overlap shared by both fidelities.
pub fn overlap_sum(ch: &KrausChannel, u: &UnitaryMatrix) -> Result<f64> {
    check_dims(ch, u)?;
    let um = u.matrix().as_slice();
    Ok(ch
        .ops()
        .iter()
        .map(|e| {
            um.iter()
                .zip(e.as_slice())
                .map(|(a, b)| a.conj() * b)
                .sum::<C64>()
                .norm_sqr()
        })
        .sum())
}

pub fn process_fidelity(ch: &KrausChannel, u: &UnitaryMatrix) -> Result<f64> {
    let n = ch.dim() as f64;
    Ok(overlap_sum(ch, u)? / (n * n))
}

pub fn average_fidelity(ch: &KrausChannel, u: &UnitaryMatrix) -> Result<f64> {
    let n = ch.dim() as f64;
    Ok((n + overlap_sum(ch, u)?) / (n * (n + 1.0)))
}

pub fn fidelity_pair(ch: &KrausChannel, u: &UnitaryMatrix) -> Result<FidelityPair> {
    Ok(FidelityPair {
        f_pro: process_fidelity(ch, u)?,
        f_ave: average_fidelity(ch, u)?,
        dim: ch.dim(),
    })
}

/// `F_ave` from `F_pro`.
pub fn average_from_process(f_pro: f64, dim: usize) -> f64 {
    let n = dim as f64;
    (n * f_pro + 1.0) / (n + 1.0)
}

/// Uhlmann fidelity `‖√a √b‖₁²` of two PSD matrices.
///
/// Eigenvalues of `b` at rounding level are treated as zero, so a
/// rank-deficient `b` (e.g. a pure state) does not pick up `√ε` noise.
pub fn state_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let sa = psd_sqrt(a)?;
    let HermitianEigen { values, vectors } = hermitian_eig(b)?;
    let top = values.first().copied().unwrap_or(0.0).max(0.0);
    let roots: Vec<f64> = values
        .iter()
        .map(|&l| if l > RANK_TOL * top { l.sqrt() } else { 0.0 })
        .collect();
    let sb = &(&vectors * &ComplexMatrix::from_real_diag(&roots)) * &vectors.adjoint();
    let nuclear: f64 = svd(&(&sa * &sb))?.singular_values.iter().sum();
    Ok(nuclear * nuclear)
}

/// Process fidelity computed from the trace-normalized process matrices of
/// the channel and the unitary. Slower than [`process_fidelity`]; used as a
/// cross-check on small instances.
pub fn chi_process_fidelity(ch: &KrausChannel, u: &UnitaryMatrix) -> Result<f64> {
    check_dims(ch, u)?;
    let n = ch.dim() as f64;
    let chi_e = kraus_to_chi(ch)?.matrix().scale_real(1.0 / n);
    let chi_u = kraus_to_chi(&KrausChannel::unitary(u))?.matrix().scale_real(1.0 / n);
    state_fidelity(&chi_e, &chi_u)
}

/// Output fidelity `⟨ψ|U† ε(|ψ⟩⟨ψ|) U|ψ⟩ = Σ_k |⟨ψ|U† E_k|ψ⟩|²`.
fn output_fidelity(ch: &KrausChannel, u: &UnitaryMatrix, psi: &[C64]) -> f64 {
    let n = ch.dim();
    let um = u.matrix();
    // φ = U ψ
    let phi: Vec<C64> = (0..n)
        .map(|r| (0..n).map(|c| um[(r, c)] * psi[c]).sum())
        .collect();
    ch.ops()
        .iter()
        .map(|e| {
            let mut amp = C64::new(0.0, 0.0);
            for r in 0..n {
                let row: C64 = (0..n).map(|c| e[(r, c)] * psi[c]).sum();
                amp += phi[r].conj() * row;
            }
            amp.norm_sqr()
        })
        .sum()
}

fn summarize(values: &[f64]) -> McEstimate {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std_error = if n > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        f64::INFINITY
    };
    McEstimate {
        mean,
        std_error,
        samples: n,
    }
}

/// Monte Carlo estimate of the state-averaged fidelity over Haar-random
/// pure inputs.
pub fn average_fidelity_mc<R: Rng + ?Sized>(
    ch: &KrausChannel,
    u: &UnitaryMatrix,
    samples: usize,
    rng: &mut R,
) -> Result<McEstimate> {
    check_dims(ch, u)?;
    if samples == 0 {
        return Err(Error::Parameter("Monte Carlo needs at least one sample".into()));
    }
    let values: Vec<f64> = (0..samples)
        .map(|_| output_fidelity(ch, u, &haar_state(ch.dim(), rng)))
        .collect();
    Ok(summarize(&values))
}

/// Seeded, possibly parallel variant of [`average_fidelity_mc`]. Sample `i`
/// draws from its own stream, so the estimate does not depend on `exec`.
pub fn average_fidelity_mc_seeded(
    ch: &KrausChannel,
    u: &UnitaryMatrix,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<McEstimate> {
    check_dims(ch, u)?;
    if samples == 0 {
        return Err(Error::Parameter("Monte Carlo needs at least one sample".into()));
    }
    let values = exec.map_indexed(samples, |i| {
        let mut rng = sample_rng(seed, i as u64);
        output_fidelity(ch, u, &haar_state(ch.dim(), &mut rng))
    });
    Ok(summarize(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{random_channel, random_isometric_remix, standard_channel, StandardKind};
    use crate::matkernel::haar_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x() -> UnitaryMatrix {
        UnitaryMatrix::new(ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()).unwrap()
    }
    fn z() -> UnitaryMatrix {
        UnitaryMatrix::new(ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()).unwrap()
    }

    #[test]
    fn process_fidelity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let u = haar_unitary(3, &mut rng).unwrap();
        let f = process_fidelity(&KrausChannel::unitary(&u), &u).unwrap();
        assert!((f - 1.0).abs() < 1e-12);

        let f = process_fidelity(&KrausChannel::unitary(&x()), &z()).unwrap();
        assert_eq!(f, 0.0);

        let ad = standard_channel(StandardKind::AmplitudeDamping, 0.36).unwrap();
        let f = process_fidelity(&ad, &UnitaryMatrix::identity(2)).unwrap();
        assert!((f - 0.81).abs() < 1e-12);

        assert!(matches!(
            process_fidelity(&ad, &UnitaryMatrix::identity(3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn average_fidelity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let u = haar_unitary(2, &mut rng).unwrap();
        let f = average_fidelity(&KrausChannel::unitary(&u), &u).unwrap();
        assert!((f - 1.0).abs() < 1e-12);

        let dep = standard_channel(StandardKind::Depolarizing, 1.0).unwrap();
        for _ in 0..10 {
            let v = haar_unitary(2, &mut rng).unwrap();
            assert!((average_fidelity(&dep, &v).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn average_and_process_fidelity_are_related() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for n in [2, 3] {
            for _ in 0..50 {
                let ch = random_channel(n, 3, &mut rng).unwrap();
                let u = haar_unitary(n, &mut rng).unwrap();
                let p = fidelity_pair(&ch, &u).unwrap();
                assert!((p.f_ave - average_from_process(p.f_pro, n)).abs() < 1e-12);
                assert!((0.0..=1.0).contains(&p.f_pro));
            }
        }
    }

    #[test]
    fn chi_route_agrees_with_kraus_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        for _ in 0..30 {
            let ch = random_channel(2, 2, &mut rng).unwrap();
            let u = haar_unitary(2, &mut rng).unwrap();
            let a = process_fidelity(&ch, &u).unwrap();
            let b = chi_process_fidelity(&ch, &u).unwrap();
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn representation_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..100 {
            let ch = random_channel(2, 3, &mut rng).unwrap();
            let remixed = random_isometric_remix(&ch, 6, &mut rng).unwrap();
            let u = haar_unitary(2, &mut rng).unwrap();
            let a = process_fidelity(&ch, &u).unwrap();
            let b = process_fidelity(&remixed, &u).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn monte_carlo_identity_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        let est = average_fidelity_mc(&KrausChannel::identity(2), &UnitaryMatrix::identity(2), 100, &mut rng)
            .unwrap();
        assert!((est.mean - 1.0).abs() < 1e-12);
        assert!(est.std_error < 1e-12);
        assert!(average_fidelity_mc(&KrausChannel::identity(2), &UnitaryMatrix::identity(2), 0, &mut rng).is_err());
    }

    #[test]
    fn monte_carlo_matches_closed_form() {
        let cases = [
            (standard_channel(StandardKind::AmplitudeDamping, 0.36).unwrap(), UnitaryMatrix::identity(2)),
            (standard_channel(StandardKind::BitFlip, 0.3).unwrap(), x()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        for (ch, u) in cases {
            let est = average_fidelity_mc(&ch, &u, 100_000, &mut rng).unwrap();
            let exact = average_fidelity(&ch, &u).unwrap();
            assert!(
                (est.mean - exact).abs() < 3.0 * est.std_error,
                "{} vs {exact} ± {}",
                est.mean,
                est.std_error
            );
        }
    }

    #[test]
    fn seeded_monte_carlo_is_mode_independent() {
        let ch = standard_channel(StandardKind::AmplitudeDamping, 0.5).unwrap();
        let u = UnitaryMatrix::identity(2);
        let a = average_fidelity_mc_seeded(&ch, &u, 2000, 9, Execution::Parallel).unwrap();
        let b = average_fidelity_mc_seeded(&ch, &u, 2000, 9, Execution::Sequential).unwrap();
        assert_eq!(a, b);
    }
}
