use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::KrausChannel;
use crate::error::{Error, Result};
use crate::matkernel::{ComplexMatrix, C64};

/// Named qubit channel families with closed-form DU.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandardKind {
    Depolarizing,
    BitFlip,
    PhaseFlip,
    AmplitudeDamping,
}

impl StandardKind {
    pub const ALL: [StandardKind; 4] = [
        StandardKind::Depolarizing,
        StandardKind::BitFlip,
        StandardKind::PhaseFlip,
        StandardKind::AmplitudeDamping,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StandardKind::Depolarizing => "depolarizing",
            StandardKind::BitFlip => "bit_flip",
            StandardKind::PhaseFlip => "phase_flip",
            StandardKind::AmplitudeDamping => "amplitude_damping",
        }
    }

    /// Closed-form degree of unitarity of the family at `param`.
    pub fn closed_form_du(self, param: f64) -> f64 {
        match self {
            StandardKind::Depolarizing => (param / 4.0).max(1.0 - 0.75 * param),
            StandardKind::BitFlip | StandardKind::PhaseFlip => param.max(1.0 - param),
            StandardKind::AmplitudeDamping => (1.0 + (1.0 - param).sqrt()).powi(2) / 4.0,
        }
    }

    /// Whether the family is unital (hence mixed-unitary on a qubit).
    pub fn is_unital(self) -> bool {
        self != StandardKind::AmplitudeDamping
    }
}

impl fmt::Display for StandardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StandardKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        StandardKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown standard channel '{s}'")))
    }
}

fn mat(entries: [f64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &entries).expect("2x2")
}

/// Kraus operators of the named qubit channel. Operators with a zero
/// prefactor are omitted, so e.g. depolarizing at `p = 0` is just `{I}`.
///
/// Bit and phase flip use `p` as the weight of the identity branch:
/// `{√p I, √(1-p) X}` and `{√p I, √(1-p) Z}`.
pub fn standard_channel(kind: StandardKind, param: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&param) {
        return Err(Error::Parameter(format!(
            "{kind} parameter {param} outside [0, 1]"
        )));
    }
    let id = mat([1.0, 0.0, 0.0, 1.0]);
    let x = mat([0.0, 1.0, 1.0, 0.0]);
    let z = mat([1.0, 0.0, 0.0, -1.0]);
    let y = ComplexMatrix::new(
        2,
        2,
        vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
    .expect("2x2");
    // (squared prefactor, operator) pairs
    let terms: Vec<(f64, ComplexMatrix)> = match kind {
        StandardKind::Depolarizing => {
            let q = param / 4.0;
            vec![(1.0 - 3.0 * q, id), (q, x), (q, y), (q, z)]
        }
        StandardKind::BitFlip => vec![(param, id), (1.0 - param, x)],
        StandardKind::PhaseFlip => vec![(param, id), (1.0 - param, z)],
        StandardKind::AmplitudeDamping => vec![
            (1.0, mat([1.0, 0.0, 0.0, (1.0 - param).sqrt()])),
            (param, mat([0.0, 1.0, 0.0, 0.0])),
        ],
    };
    let ops = terms
        .into_iter()
        .filter(|(w, _)| *w > 0.0)
        .map(|(w, m)| m.scale_real(w.sqrt()))
        .collect();
    KrausChannel::new(ops)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depolarizing_zero_is_identity() {
        let ch = standard_channel(StandardKind::Depolarizing, 0.0).unwrap();
        assert_eq!(ch.len(), 1);
        assert_eq!(ch.ops()[0], ComplexMatrix::identity(2));
    }

    #[test]
    fn amplitude_damping_operators() {
        let ch = standard_channel(StandardKind::AmplitudeDamping, 0.36).unwrap();
        assert_eq!(ch.len(), 2);
        assert!(ch.ops()[0].distance(&mat([1.0, 0.0, 0.0, 0.8])).unwrap() < 1e-15);
        assert!(ch.ops()[1].distance(&mat([0.0, 0.6, 0.0, 0.0])).unwrap() < 1e-15);
        let zero = standard_channel(StandardKind::AmplitudeDamping, 0.0).unwrap();
        assert_eq!(zero.len(), 1);
    }

    #[test]
    fn bit_flip_operators() {
        let ch = standard_channel(StandardKind::BitFlip, 0.3).unwrap();
        assert!(ch.ops()[0]
            .distance(&ComplexMatrix::identity(2).scale_real(0.3f64.sqrt()))
            .unwrap()
            < 1e-15);
        assert!(ch.ops()[1]
            .distance(&mat([0.0, 1.0, 1.0, 0.0]).scale_real(0.7f64.sqrt()))
            .unwrap()
            < 1e-15);
    }

    #[test]
    fn all_families_are_trace_preserving() {
        for kind in StandardKind::ALL {
            for i in 0..=20 {
                let ch = standard_channel(kind, i as f64 / 20.0).unwrap();
                assert!(ch.validate().passed, "{kind} at {i}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            standard_channel(StandardKind::BitFlip, 1.5),
            Err(Error::Parameter(_))
        ));
        assert!(standard_channel(StandardKind::PhaseFlip, -0.1).is_err());
        assert!(standard_channel(StandardKind::PhaseFlip, f64::NAN).is_err());
    }

    #[test]
    fn names_round_trip() {
        for k in StandardKind::ALL {
            assert_eq!(k.name().parse::<StandardKind>().unwrap(), k);
        }
        assert!("erasure".parse::<StandardKind>().is_err());
    }
}
