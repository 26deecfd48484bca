use rand::Rng;

use super::KrausChannel;
use crate::error::{Error, Result};
use crate::matkernel::{haar_unitary, ComplexMatrix, C64};

/// Random channel from a Haar-random dilation: the system (dimension `n`)
/// and an environment (dimension `d`) prepared in `|0⟩` evolve under a
/// Haar unitary on `n·d` dimensions, then the environment is traced out.
///
/// `E_k = (I ⊗ ⟨k|) U (I ⊗ |0⟩)`, with the composite index `s·d + e`.
pub fn random_channel<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<KrausChannel> {
    let mut env = vec![C64::new(0.0, 0.0); d.max(1)];
    env[0] = C64::new(1.0, 0.0);
    random_channel_with_env(n, d, &env, rng)
}

/// As [`random_channel`] with an arbitrary normalized environment state.
pub fn random_channel_with_env<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    env_state: &[C64],
    rng: &mut R,
) -> Result<KrausChannel> {
    if n < 1 || d < 1 {
        return Err(Error::Dimension(format!("random channel with n={n}, d={d}")));
    }
    if env_state.len() != d {
        return Err(Error::Dimension(format!(
            "environment state has {} amplitudes, expected {d}",
            env_state.len()
        )));
    }
    let u = haar_unitary(n * d, rng)?;
    let u = u.matrix();
    let ops = (0..d)
        .map(|k| {
            let mut e = ComplexMatrix::zeros(n, n);
            for s_out in 0..n {
                for s_in in 0..n {
                    e[(s_out, s_in)] = env_state
                        .iter()
                        .enumerate()
                        .map(|(j, &amp)| u[(s_out * d + k, s_in * d + j)] * amp)
                        .sum();
                }
            }
            e
        })
        .collect();
    KrausChannel::new(ops)
}

/// Kraus set `E'_i = Σ_j V_ij E_j` for a Haar-random isometry `V`
/// (`m x K`, `m ≥ K`). Describes the same channel.
pub fn random_isometric_remix<R: Rng + ?Sized>(
    ch: &KrausChannel,
    m: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    let k = ch.len();
    if m < k {
        return Err(Error::Dimension(format!(
            "isometry needs at least {k} outputs, got {m}"
        )));
    }
    let v = haar_unitary(m, rng)?;
    let v = v.matrix();
    let ops = (0..m)
        .map(|i| {
            ch.ops()
                .iter()
                .enumerate()
                .fold(ComplexMatrix::zeros(ch.dim(), ch.dim()), |acc, (j, e)| {
                    &acc + &e.scale(v[(i, j)])
                })
        })
        .collect();
    KrausChannel::new(ops)
}
