//! Classical and quantum secret sharing for general access structures.
//!
//! Linear schemes come from monotone span programs over a prime field;
//! lifting them to quantum states is simulated exactly, and arbitrary
//! classical schemes are checked against the condition for a secure lift.

pub mod classical;
pub mod condition;
pub mod galois;
pub mod msp;
pub mod quantum;
pub mod rng;
pub mod structures;

pub type QuantumState64 = quantum::QuantumState<f64>;
pub type QuantumState32 = quantum::QuantumState<f32>;
pub type DensityMatrix64 = quantum::DensityMatrix<f64>;
pub type DensityMatrix32 = quantum::DensityMatrix<f32>;
pub type EncodedState64 = quantum::EncodedState<f64>;
pub type EncodedState32 = quantum::EncodedState<f32>;
pub type TestFamily64 = quantum::TestFamily<f64>;
pub type TestFamily32 = quantum::TestFamily<f32>;
