//! Degree of unitarity (DU) of quantum channels.
//!
//! The DU of a channel `ε` with Kraus operators `{E_k}` on an `n`-dimensional
//! system is the largest process fidelity it reaches against any unitary:
//!
//! ```text
//! DU(ε) = max_U  Σ_k |tr(U† E_k)|² / n²
//! ```
//!
//! The crate computes it exactly for mixed-unitary qubit channels, brackets
//! it with polar-decomposition lower bounds and a nuclear-norm upper bound
//! for any channel, and closes the gap with a fixed-point optimizer over the
//! unitary group. The [`harness`] module holds the sampling drivers used by
//! the command-line tool.

pub mod channels;
pub mod du;
pub mod error;
pub mod exec;
pub mod fidelity;
pub mod harness;
pub mod matkernel;

pub use channels::{
    CanonicalKraus, ChannelSpec, ChiMatrix, KrausChannel, MixedUnitaryForm, StandardKind,
    ValidationReport,
};
pub use du::{BoundReport, DuMethod, DuResult, OptimizerOptions};
pub use error::{Error, Result};
pub use exec::Execution;
pub use matkernel::{ComplexMatrix, PolarFactors, UnitaryMatrix, C64};
