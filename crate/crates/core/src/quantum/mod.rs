//! Exact simulation of secret sharing lifted to quantum states.
//!
//! Every unitary in the construction is a linear bijection on basis labels,
//! so states are sparse label-to-amplitude maps and "applying a circuit"
//! is a relabeling. Simulation is generic over the real scalar type.

mod encode;
mod hermitian;
mod state;
mod verify;

use thiserror::Error;

use crate::classical::ClassicalError;
use crate::galois::GaloisError;
use crate::msp::MspError;

pub use encode::{apply_plan, qencode, EncodedState, AMPLITUDE_GUARD};
pub use hermitian::{hermitian_eigenvalues, symmetric_eigenvalues};
pub use state::{
    fidelity, internal_tolerance, partial_trace, trace_distance, trace_distance_bound,
    DensityMatrix, Label, QuantumState,
};
pub use verify::{
    acceptance_tolerance, qss_mixed, qss_pure, verify_erasure, CheckKind, CheckRecord, MixedScheme,
    PureScheme, Report, TestFamily, Verdict, DEFAULT_FAMILY_SEED, RANDOM_FAMILY_MEMBERS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("label has {actual} coordinates, expected {expected}")]
    LabelArity { expected: usize, actual: usize },
    #[error("label digit outside its coordinate dimension")]
    LabelOutOfRange,
    #[error("state has squared norm {norm}, expected 1")]
    Normalization { norm: f64 },
    #[error("coordinate dimensions do not match")]
    DimensionMismatch,
    #[error("relabeling maps two basis states to one label")]
    NotABijection,
    #[error("coordinate {coordinate} out of range for {arity} coordinates")]
    CoordinateOutOfRange { coordinate: usize, arity: usize },
    #[error("encoding would exceed {limit} amplitudes")]
    Guard { limit: usize },
    #[error("reconstruction plan was built for a different program or erased set")]
    PlanMismatch,
    #[error("structure is not self-dual, so no pure-state scheme exists; use verify-mixed for the mixed-state scheme")]
    NotSelfDual,
    #[error("structure is not Q2*; no-cloning forbids any quantum scheme")]
    NotQ2Star,
    #[error("set {0} is not in the adversary structure and its dual")]
    NotCorrectable(crate::structures::PlayerSet),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Msp(#[from] MspError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
}
