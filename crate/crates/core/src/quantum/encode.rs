use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Float;

use super::state::{real, Label, QuantumState};
use super::QuantumError;
use crate::classical::{increment, ReconstructionPlan};
use crate::msp::Msp;
use crate::structures::PlayerSet;

/// Largest number of nonzero amplitudes an encoding may produce.
pub const AMPLITUDE_GUARD: usize = 2_000_000;

/// An encoded secret: one coordinate per row of the program, coordinate
/// `l` held by player `ψ(l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedState<R> {
    state: QuantumState<R>,
    msp: Msp,
}

impl<R: Float> EncodedState<R> {
    pub fn state(&self) -> &QuantumState<R> {
        &self.state
    }

    pub fn msp(&self) -> &Msp {
        &self.msp
    }

    /// Coordinates held by the players in `b`.
    pub fn coordinates_of(&self, b: PlayerSet) -> Vec<usize> {
        self.msp.row_indices(b)
    }
}

/// Encodes a one-coordinate state `Σ α_s |s⟩` as
/// `Σ_s α_s |K|^{-(e-1)/2} Σ_a |M (s, a)⟩`.
///
/// The input is padded to `|s⟩ ⊗ Σ_a |a⟩ ⊗ |0…0⟩` on `d` coordinates and
/// every basis label `x` is mapped to `M' x`, where `M'` is `M` completed
/// to an invertible matrix; this is a permutation of the basis.
pub fn qencode<R: Float>(
    msp: &Msp,
    input: &QuantumState<R>,
) -> Result<EncodedState<R>, QuantumError> {
    let field = msp.field();
    let p = field.order() as usize;
    if input.dims() != [p] {
        return Err(QuantumError::DimensionMismatch);
    }
    let (d, e) = (msp.rows(), msp.cols());
    let branches = p
        .checked_pow(e as u32 - 1)
        .filter(|b| b.saturating_mul(input.support_len()) <= AMPLITUDE_GUARD)
        .ok_or(QuantumError::Guard {
            limit: AMPLITUDE_GUARD,
        })?;
    let extended = msp.matrix().extend_to_invertible()?;

    let weight = Complex::new(real::<R>(branches as f64).sqrt().recip(), R::zero());
    let mut padded: BTreeMap<Label, Complex<R>> = BTreeMap::new();
    for (label, &alpha) in input.amplitudes() {
        let mut a = vec![0u16; e - 1];
        for _ in 0..branches {
            let mut x = Vec::with_capacity(d);
            x.push(label[0]);
            x.extend_from_slice(&a);
            x.resize(d, 0);
            padded.insert(x, alpha * weight);
            increment(&mut a, field);
        }
    }
    let padded = QuantumState::from_parts_unchecked(vec![p; d], padded);
    let state = padded.relabel(|x| extended.mul_vec(x).expect("square extension"))?;
    Ok(EncodedState {
        state,
        msp: msp.clone(),
    })
}

/// Applies `x_A ↦ U x_A` to the coordinates of `A = P − B`, leaving `B`
/// untouched. Afterwards the first coordinate of `A` carries the input
/// state, unentangled from the rest.
pub fn apply_plan<R: Float>(
    enc: &EncodedState<R>,
    plan: &ReconstructionPlan,
) -> Result<QuantumState<R>, QuantumError> {
    let msp = &enc.msp;
    let a = plan.erased().complement(msp.players());
    let a_rows = msp.row_indices(a);
    if a_rows != plan.a_rows()
        || plan.matrix().cols() != a_rows.len()
        || plan.matrix().field() != msp.field()
    {
        return Err(QuantumError::PlanMismatch);
    }
    enc.state.relabel(|label| {
        let xs: Vec<u16> = a_rows.iter().map(|&r| label[r]).collect();
        let ys = plan.apply(&xs);
        let mut out = label.to_vec();
        for (&r, y) in a_rows.iter().zip(ys) {
            out[r] = y;
        }
        out
    })
}
