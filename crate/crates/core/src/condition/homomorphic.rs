use std::collections::BTreeMap;

use num_traits::Zero;

use super::scheme::{project, support_values, ClassicalScheme, Shares};
use super::{ConditionError, Prob};
use crate::classical::DEAL_GUARD;
use crate::structures::{AdversaryStructure, PlayerSet};

/// A homomorphism `h : G × G^m → G^n` for `G = Z_{m_1} × ... × Z_{m_k}`,
/// given by an `n × (m + 1)` integer matrix acting on each component.
///
/// Group elements are indexed in mixed radix, first component most
/// significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomomorphicSpec {
    moduli: Vec<u64>,
    m: usize,
    matrix: Vec<Vec<i64>>,
}

impl HomomorphicSpec {
    pub fn new(moduli: Vec<u64>, m: usize, matrix: Vec<Vec<i64>>) -> Result<Self, ConditionError> {
        if moduli.is_empty() || moduli.iter().any(|&q| q < 2) {
            return Err(ConditionError::Group);
        }
        let order = moduli.iter().try_fold(1u64, |acc, &q| acc.checked_mul(q));
        if order.is_none_or(|o| o > 1 << 16) {
            return Err(ConditionError::SpaceSize(usize::MAX));
        }
        if matrix.is_empty() || matrix.iter().any(|row| row.len() != m + 1) {
            return Err(ConditionError::HomShape { inputs: m + 1 });
        }
        Ok(HomomorphicSpec { moduli, m, matrix })
    }

    pub fn order(&self) -> u64 {
        self.moduli.iter().product()
    }

    pub fn outputs(&self) -> usize {
        self.matrix.len()
    }

    pub fn randomness(&self) -> usize {
        self.m
    }

    fn components(&self, mut x: u64) -> Vec<u64> {
        let mut out = vec![0; self.moduli.len()];
        for (slot, &q) in out.iter_mut().zip(&self.moduli).rev() {
            *slot = x % q;
            x /= q;
        }
        out
    }

    fn index(&self, comps: &[u64]) -> u64 {
        comps
            .iter()
            .zip(&self.moduli)
            .fold(0, |acc, (&c, &q)| acc * q + c)
    }

    /// `h(x_0, ..., x_m)` with each `x_j` a group element index.
    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        let comps: Vec<Vec<u64>> = x.iter().map(|&e| self.components(e)).collect();
        self.matrix
            .iter()
            .map(|row| {
                let out: Vec<u64> = self
                    .moduli
                    .iter()
                    .enumerate()
                    .map(|(c, &q)| {
                        let q = q as i64;
                        row.iter().zip(&comps).fold(0i64, |acc, (&k, xc)| {
                            (acc + k.rem_euclid(q) * xc[c] as i64) % q
                        }) as u64
                    })
                    .collect();
                self.index(&out)
            })
            .collect()
    }

    fn inputs(&self) -> Result<u64, ConditionError> {
        self.order()
            .checked_pow(self.m as u32 + 1)
            .filter(|&c| c <= DEAL_GUARD)
            .ok_or(ConditionError::Guard { limit: DEAL_GUARD })
    }

    /// Injective exactly when the kernel is trivial; checked by
    /// enumerating `G^(m+1)`.
    pub fn is_injective(&self) -> Result<bool, ConditionError> {
        let g = self.order();
        let total = self.inputs()?;
        let mut x = vec![0u64; self.m + 1];
        for _ in 1..total {
            odometer(&mut x, g);
            if self.apply(&x).iter().all(|&y| y == 0) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn odometer(x: &mut [u64], base: u64) {
    for d in x.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return;
        }
        *d = 0;
    }
}

/// Shares `s` by drawing `v ∈ G^m` uniformly and publishing `h(s, v)`.
pub fn homomorphic_scheme(
    spec: &HomomorphicSpec,
    structure: AdversaryStructure,
) -> Result<ClassicalScheme, ConditionError> {
    if !spec.is_injective()? {
        return Err(ConditionError::NotInjective);
    }
    let g = spec.order();
    let draws = g.pow(spec.m as u32);
    let weight = Prob::new(1, draws as i64);
    let table = (0..g)
        .map(|s| {
            let mut rows = BTreeMap::new();
            let mut x = vec![0u64; spec.m + 1];
            x[0] = s;
            for _ in 0..draws {
                let y: Shares = spec.apply(&x).into_iter().map(|v| v as u16).collect();
                rows.insert(y, weight);
                if spec.m > 0 {
                    odometer(&mut x[1..], g);
                }
            }
            rows
        })
        .collect();
    ClassicalScheme::new(vec![g as usize; spec.outputs()], table)?.with_structure(structure)
}

/// For every `y_q` and every pair of `u`-shares, the conditionals
/// `P(y_u | y_q)` are either not both positive or equal. A uniform prior
/// on the secret is used; when `y_q` determines the secret the prior
/// drops out.
pub fn homomorphic_dichotomy_check(sch: &ClassicalScheme, u: PlayerSet) -> bool {
    let n = sch.players();
    let ui = sch.coordinates(u);
    let qi = sch.coordinates(u.complement(n));
    // joint[y_q][y_u] = Σ_s P(y_u, y_q | s)
    let mut joint: BTreeMap<Shares, BTreeMap<Shares, Prob>> = BTreeMap::new();
    for s in 0..sch.secrets() {
        for (y, p) in sch.distribution(s) {
            *joint
                .entry(project(y, &qi))
                .or_default()
                .entry(project(y, &ui))
                .or_insert_with(Prob::zero) += *p;
        }
    }
    let values: Vec<Shares> = support_values(sch, u).into_iter().collect();
    joint.values().all(|row| {
        let total: Prob = row.values().copied().sum();
        let cond = |y: &Shares| row.get(y).map_or(Prob::zero(), |p| *p / total);
        values.iter().enumerate().all(|(i, a)| {
            values[i + 1..].iter().all(|b| {
                let (pa, pb) = (cond(a), cond(b));
                pa.is_zero() || pb.is_zero() || pa == pb
            })
        })
    })
}
