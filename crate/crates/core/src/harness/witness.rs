//! DU along a channel trajectory as a non-Markovianity witness.
//!
//! Composition with a later channel never raises the DU, so an increase
//! between two times rules out a Markovian (divisible) evolution. A
//! trajectory without increases proves nothing either way.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channels::{parse_json_with_context, ChannelSpec, KrausChannel};
use crate::du::du;
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    channels: Vec<KrausChannel>,
}

impl Trajectory {
    /// Requires matching lengths, strictly ascending times and valid
    /// channels of one dimension.
    pub fn new(times: Vec<f64>, channels: Vec<KrausChannel>) -> Result<Self> {
        if times.len() != channels.len() || times.is_empty() {
            return Err(Error::Format(format!(
                "trajectory has {} times and {} channels",
                times.len(),
                channels.len()
            )));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Format("trajectory times must be strictly ascending".into()));
        }
        let dim = channels[0].dim();
        for (i, ch) in channels.iter().enumerate() {
            if ch.dim() != dim {
                return Err(Error::Format(format!(
                    "channel {i} acts on dimension {}, expected {dim}",
                    ch.dim()
                )));
            }
            ch.ensure_valid()?;
        }
        Ok(Self { times, channels })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn channels(&self) -> &[KrausChannel] {
        &self.channels
    }

    pub fn dim(&self) -> usize {
        self.channels[0].dim()
    }
}

#[derive(Deserialize)]
struct TrajectoryFile {
    dim: usize,
    times: Vec<f64>,
    channels: Vec<Value>,
}

/// Parses `{ "dim": n, "times": [...], "channels": [channel-object, ...] }`.
pub fn parse_trajectory_json(text: &str) -> Result<Trajectory> {
    let value = parse_json_with_context(text)?;
    let file: TrajectoryFile =
        serde_json::from_value(value).map_err(|e| Error::Format(format!("trajectory: {e}")))?;
    let channels = file
        .channels
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let ch = ChannelSpec::from_value(v)
                .and_then(|s| s.to_channel())
                .map_err(|e| Error::Format(format!("channel {i}: {e}")))?;
            if ch.dim() != file.dim {
                return Err(Error::Format(format!(
                    "channel {i} acts on dimension {}, but \"dim\" is {}",
                    ch.dim(),
                    file.dim
                )));
            }
            Ok(ch)
        })
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(file.times, channels)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlaggedInterval {
    pub from_index: usize,
    pub from_time: f64,
    pub to_time: f64,
    pub increase: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub times: Vec<f64>,
    pub du: Vec<f64>,
    pub threshold: f64,
    pub flagged: Vec<FlaggedInterval>,
}

impl WitnessReport {
    pub fn non_markovian(&self) -> bool {
        !self.flagged.is_empty()
    }

    pub fn verdict(&self) -> &'static str {
        if self.non_markovian() {
            "non-Markovian"
        } else {
            "inconclusive (no DU increase; this does not certify Markovianity)"
        }
    }
}

pub fn run_witness(traj: &Trajectory, threshold: f64) -> Result<WitnessReport> {
    let du_values = traj
        .channels
        .iter()
        .map(|ch| du(ch).map(|(r, _)| r.value))
        .collect::<Result<Vec<_>>>()?;
    let flagged = du_values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] - w[0] > threshold)
        .map(|(i, w)| FlaggedInterval {
            from_index: i,
            from_time: traj.times[i],
            to_time: traj.times[i + 1],
            increase: w[1] - w[0],
        })
        .collect();
    Ok(WitnessReport {
        times: traj.times.clone(),
        du: du_values,
        threshold,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{standard_channel, StandardKind};

    fn damping(gammas: &[f64]) -> Trajectory {
        let times = (0..gammas.len()).map(|i| i as f64).collect();
        let chans = gammas
            .iter()
            .map(|&g| standard_channel(StandardKind::AmplitudeDamping, g).unwrap())
            .collect();
        Trajectory::new(times, chans).unwrap()
    }

    #[test]
    fn markovian_damping_is_not_flagged() {
        let times: Vec<f64> = (0..=10).map(|i| 0.5 * i as f64).collect();
        let chans = times
            .iter()
            .map(|t| standard_channel(StandardKind::AmplitudeDamping, 1.0 - (-t).exp()).unwrap())
            .collect();
        let report = run_witness(&Trajectory::new(times.clone(), chans).unwrap(), DEFAULT_THRESHOLD).unwrap();
        assert!(!report.non_markovian());
        for (t, v) in times.iter().zip(&report.du) {
            let expect = (1.0 + (-t / 2.0).exp()).powi(2) / 4.0;
            assert!((v - expect).abs() < 1e-9);
        }
        assert!(report.du.windows(2).all(|w| w[1] < w[0]));
        assert!(report.verdict().starts_with("inconclusive"));
    }

    #[test]
    fn recovering_damping_is_flagged_on_the_right_interval() {
        let report = run_witness(&damping(&[0.0, 0.5, 0.2]), DEFAULT_THRESHOLD).unwrap();
        assert_eq!(report.flagged.len(), 1);
        assert_eq!(report.flagged[0].from_index, 1);
        assert_eq!(report.verdict(), "non-Markovian");
    }

    #[test]
    fn constant_trajectory_is_not_flagged() {
        let report = run_witness(&damping(&[0.3, 0.3, 0.3, 0.3]), DEFAULT_THRESHOLD).unwrap();
        assert!(!report.non_markovian());
    }

    #[test]
    fn parses_trajectory_file() {
        let text = r#"{ "dim": 2, "times": [0, 1],
            "channels": [ {"standard": "amplitude_damping", "param": 0.1},
                          {"dim": 2, "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]} ] }"#;
        let t = parse_trajectory_json(text).unwrap();
        assert_eq!(t.times(), &[0.0, 1.0]);
        assert_eq!(t.channels().len(), 2);
    }

    #[test]
    fn rejects_bad_trajectories() {
        for text in [
            r#"{ "dim": 2, "times": [1, 0], "channels": [{"standard": "bit_flip", "param": 0.1}, {"standard": "bit_flip", "param": 0.1}] }"#,
            r#"{ "dim": 2, "times": [0], "channels": [] }"#,
            r#"{ "dim": 3, "times": [0], "channels": [{"standard": "bit_flip", "param": 0.1}] }"#,
            r#"{ "times": [0] }"#,
        ] {
            assert!(parse_trajectory_json(text).is_err(), "{text}");
        }
        let bad = r#"{ "dim": 1, "times": [0], "channels": [{"dim": 1, "kraus": [[[[0.5,0]]]]}] }"#;
        assert!(matches!(parse_trajectory_json(bad), Err(Error::InvalidChannel { .. })));
    }
}
