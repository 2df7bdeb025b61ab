//! General classical schemes as exact probability tables, and the
//! condition under which lifting one to quantum states keeps it secure.

mod eq1;
mod homomorphic;
mod scheme;
mod search;
mod sqrt;

use num_rational::Ratio;
use thiserror::Error;

use crate::galois::GaloisError;
use crate::quantum::QuantumError;
use crate::structures::{PlayerSet, StructureError, MAX_PLAYERS};

pub use eq1::{
    eq1_check, lift_and_test, Eq1Report, Eq1Violation, LiftReport, Probe, FLOAT_TOLERANCE,
};
pub use homomorphic::{homomorphic_dichotomy_check, homomorphic_scheme, HomomorphicSpec};
pub use scheme::{scheme_from_msp, ClassicalScheme, Shares};
pub use search::{
    enumerate_schemes, search_counterexample, search_structure, Counterexample, SearchBounds,
    SearchFamily, SearchOutcome, CONFIRMATION_DISTANCE, SEARCH_PROBES,
};
pub use sqrt::{SqrtSum, EXACT_LIMIT};

/// Exact probability.
pub type Prob = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConditionError {
    #[error("player count {0} outside 1..={MAX_PLAYERS}")]
    PlayerCount(usize),
    #[error("a scheme needs at least one secret")]
    NoSecrets,
    #[error("share space of size {0} is empty or exceeds 65536")]
    SpaceSize(usize),
    #[error("secret {secret}: share tuple {shares:?} has the wrong arity or leaves its space")]
    ShareOutOfRange { secret: usize, shares: Vec<u16> },
    #[error("secret {secret}: negative probability")]
    Negative { secret: usize },
    #[error("secret {secret}: probabilities sum to {total}, not 1")]
    NotNormalized { secret: usize, total: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("enumeration exceeds the guard of {limit}")]
    Guard { limit: u64 },
    #[error("set {set} names players outside 1..={n}")]
    PlayerOutOfRange { set: PlayerSet, n: usize },
    #[error("not secret: the shares of {0} depend on the secret")]
    NotSecret(PlayerSet),
    #[error("not correct: the shares of {0} do not determine the secret")]
    NotCorrect(PlayerSet),
    #[error("{0} is not in the adversary structure and its dual")]
    NotCorrectable(PlayerSet),
    #[error("probe states must live on one coordinate of dimension {secrets}")]
    FamilyDimension { secrets: usize },
    #[error("group moduli must be at least 2")]
    Group,
    #[error("homomorphism rows must have {inputs} entries")]
    HomShape { inputs: usize },
    #[error("homomorphism has a nontrivial kernel")]
    NotInjective,
    #[error("condition and oracle disagree on scheme:\n{scheme}")]
    OracleDisagreement { scheme: String },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}
