use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::{Float, ToPrimitive};

use super::scheme::{project, support_values, ClassicalScheme, Shares};
use super::sqrt::SqrtSum;
use super::ConditionError;
use crate::quantum::{
    acceptance_tolerance, partial_trace, trace_distance, trace_distance_bound, DensityMatrix,
    QuantumState, TestFamily, AMPLITUDE_GUARD,
};
use crate::structures::PlayerSet;

/// Float comparisons are used only when the table is too large to factor.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// A pair of `u`-share tuples whose overlap sum depends on the secret.
#[derive(Debug, Clone, PartialEq)]
pub struct Eq1Violation {
    pub first: Shares,
    pub second: Shares,
    /// Overlap sum for each secret, in canonical form (or decimal when the
    /// float fallback was used).
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eq1Report {
    pub set: PlayerSet,
    pub holds: bool,
    /// Whether every comparison was done on exact canonical forms.
    pub exact: bool,
    pub pairs: usize,
    pub violation: Option<Eq1Violation>,
}

/// Checks the split `u` / `P − u`, returning the reconstruction map of the
/// complement.
fn preconditions(
    sch: &ClassicalScheme,
    u: PlayerSet,
) -> Result<BTreeMap<Shares, usize>, ConditionError> {
    let n = sch.players();
    if u.max_player() > n {
        return Err(ConditionError::PlayerOutOfRange { set: u, n });
    }
    if !sch.check_secrecy(u) {
        return Err(ConditionError::NotSecret(u));
    }
    let q = u.complement(n);
    let g = sch
        .reconstruction_map(q)
        .ok_or(ConditionError::NotCorrect(q))?;
    let structure = sch.structure();
    if !structure.is_member(u) || !structure.dual().is_member(u) {
        return Err(ConditionError::NotCorrectable(u));
    }
    Ok(g)
}

/// Whether `Σ_{y_q} √P(y_u¹, y_q | s) √P(y_u², y_q | s)` is independent of
/// `s` for every pair of `u`-shares. The sum ranges over `y_q` with
/// `g(y_q) = s`; correctness makes every other term vanish.
pub fn eq1_check(sch: &ClassicalScheme, u: PlayerSet) -> Result<Eq1Report, ConditionError> {
    preconditions(sch, u)?;
    let n = sch.players();
    let ui = sch.coordinates(u);
    let qi = sch.coordinates(u.complement(n));
    // cond[s][y_u][y_q] = P(y_u, y_q | s)
    let cond: Vec<BTreeMap<Shares, BTreeMap<Shares, _>>> = (0..sch.secrets())
        .map(|s| {
            let mut by_u: BTreeMap<Shares, BTreeMap<Shares, _>> = BTreeMap::new();
            for (y, p) in sch.distribution(s) {
                by_u.entry(project(y, &ui))
                    .or_default()
                    .insert(project(y, &qi), *p);
            }
            by_u
        })
        .collect();
    let values: Vec<Shares> = support_values(sch, u).into_iter().collect();
    let empty = BTreeMap::new();
    let mut report = Eq1Report {
        set: u,
        holds: true,
        exact: true,
        pairs: 0,
        violation: None,
    };
    for (i, y1) in values.iter().enumerate() {
        for y2 in &values[i + 1..] {
            report.pairs += 1;
            let mut sums = Vec::with_capacity(cond.len());
            let mut floats = Vec::with_capacity(cond.len());
            let mut exact = true;
            for by_u in &cond {
                let (a, b) = (
                    by_u.get(y1).unwrap_or(&empty),
                    by_u.get(y2).unwrap_or(&empty),
                );
                let mut sum = SqrtSum::zero();
                let mut float = 0.0;
                for (yq, pa) in a {
                    if let Some(pb) = b.get(yq) {
                        exact &= sum.add_sqrt_product(*pa, *pb);
                        float += (pa.to_f64().unwrap_or(f64::NAN)
                            * pb.to_f64().unwrap_or(f64::NAN))
                        .sqrt();
                    }
                }
                sums.push(sum);
                floats.push(float);
            }
            let equal = if exact {
                sums.windows(2).all(|w| w[0] == w[1])
            } else {
                report.exact = false;
                floats
                    .windows(2)
                    .all(|w| (w[0] - w[1]).abs() <= FLOAT_TOLERANCE)
            };
            if !equal && report.holds {
                report.holds = false;
                report.violation = Some(Eq1Violation {
                    first: y1.clone(),
                    second: y2.clone(),
                    values: if exact {
                        sums.iter().map(SqrtSum::to_string).collect()
                    } else {
                        floats.iter().map(|f| format!("{f:.15}")).collect()
                    },
                });
            }
        }
    }
    Ok(report)
}

/// One probe input of the oracle, with its amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub name: String,
    pub amplitudes: Vec<Complex<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftReport {
    pub set: PlayerSet,
    pub holds: bool,
    pub max_distance: f64,
    /// The two inputs whose reduced states on `u` are furthest apart.
    pub witness: Option<(Probe, Probe)>,
}

/// Brute-force oracle: lifts every input `Σ α_s |s⟩` to
/// `Σ_s α_s Σ_y √P(y | s) |y⟩`, reduces to the shares of `u` and compares
/// the reduced states pairwise in trace distance.
pub fn lift_and_test<R: Float>(
    sch: &ClassicalScheme,
    u: PlayerSet,
    family: &TestFamily<R>,
) -> Result<LiftReport, ConditionError> {
    preconditions(sch, u)?;
    let support: usize = (0..sch.secrets()).map(|s| sch.distribution(s).len()).sum();
    if support > AMPLITUDE_GUARD {
        return Err(ConditionError::Guard {
            limit: AMPLITUDE_GUARD as u64,
        });
    }
    if family.members().first().map(|(_, s)| s.dims()) != Some(&[sch.secrets()][..]) {
        return Err(ConditionError::FamilyDimension {
            secrets: sch.secrets(),
        });
    }
    let keep = sch.coordinates(u);
    let zero = Complex::new(R::zero(), R::zero());
    let roots: Vec<Vec<(Shares, R)>> = (0..sch.secrets())
        .map(|s| {
            sch.distribution(s)
                .iter()
                .map(|(y, p)| {
                    (
                        y.clone(),
                        R::from(p.to_f64().unwrap_or(f64::NAN))
                            .unwrap_or(R::nan())
                            .sqrt(),
                    )
                })
                .collect()
        })
        .collect();
    let mut reduced: Vec<DensityMatrix<R>> = Vec::with_capacity(family.len());
    for (_, input) in family.members() {
        let mut amps: BTreeMap<Shares, Complex<R>> = BTreeMap::new();
        for (label, alpha) in input.amplitudes() {
            for (y, root) in &roots[label[0] as usize] {
                let slot = amps.entry(y.clone()).or_insert(zero);
                *slot = *slot + *alpha * *root;
            }
        }
        let state = QuantumState::new(sch.spaces().to_vec(), amps)?;
        reduced.push(partial_trace(&state, &keep)?);
    }
    let tol = acceptance_tolerance::<R>();
    let mut worst = R::zero();
    let mut at = None;
    for i in 0..reduced.len() {
        for j in i + 1..reduced.len() {
            let mut d = trace_distance_bound(&reduced[i], &reduced[j])?;
            if d > tol {
                d = trace_distance(&reduced[i], &reduced[j])?;
            }
            if d > worst {
                worst = d;
                at = Some((i, j));
            }
        }
    }
    let probe = |k: usize| {
        let (name, state) = &family.members()[k];
        Probe {
            name: name.clone(),
            amplitudes: (0..sch.secrets())
                .map(|s| {
                    let a = state.amplitude(&[s as u16]);
                    Complex::new(
                        a.re.to_f64().unwrap_or(f64::NAN),
                        a.im.to_f64().unwrap_or(f64::NAN),
                    )
                })
                .collect(),
        }
    };
    let holds = worst <= tol;
    Ok(LiftReport {
        set: u,
        holds,
        max_distance: worst.to_f64().unwrap_or(f64::NAN),
        witness: if holds {
            None
        } else {
            at.map(|(i, j)| (probe(i), probe(j)))
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condition::{scheme_from_msp, Prob};
    use crate::galois::{Field, Matrix};
    use crate::msp::Msp;
    use crate::structures::AdversaryStructure;

    fn set(ids: &[usize]) -> PlayerSet {
        PlayerSet::from_players(ids.iter().copied())
    }

    fn table(rows: &[(usize, &[u16], (i64, i64))], secrets: usize) -> Vec<BTreeMap<Shares, Prob>> {
        let mut t = vec![BTreeMap::new(); secrets];
        for &(s, y, (n, d)) in rows {
            t[s].insert(y.to_vec(), Prob::new(n, d));
        }
        t
    }

    /// The smallest table violating the condition: under secret 0 the
    /// second share copies the first, under secret 1 it is constant.
    fn counterexample() -> ClassicalScheme {
        let t = table(
            &[
                (0, &[0, 0], (1, 2)),
                (0, &[1, 1], (1, 2)),
                (1, &[0, 2], (1, 2)),
                (1, &[1, 2], (1, 2)),
            ],
            2,
        );
        ClassicalScheme::new(vec![2, 3], t).unwrap()
    }

    #[test]
    fn shamir_satisfies_the_condition() {
        let sch = scheme_from_msp(&Msp::shamir(3, 1, Field::new(5).unwrap()).unwrap()).unwrap();
        let r = eq1_check(&sch, set(&[1])).unwrap();
        assert!(r.holds && r.exact);
        assert_eq!(r.pairs, 10);
        let fam = TestFamily::<f64>::with_random(5, 11, 10);
        assert!(lift_and_test(&sch, set(&[1]), &fam).unwrap().holds);
    }

    #[test]
    fn one_time_pad_satisfies_the_condition() {
        let f = Field::new(2).unwrap();
        let m = Matrix::from_rows(f, &[[1i64, 1], [0, 1]]).unwrap();
        let sch = scheme_from_msp(&Msp::new(m, vec![1, 2], 2).unwrap()).unwrap();
        // 1-of-1 splits only: u = {} is the sole correctable set.
        assert!(eq1_check(&sch, PlayerSet::EMPTY).unwrap().holds);
        assert!(matches!(
            eq1_check(&sch, set(&[1])),
            Err(ConditionError::NotCorrect(_))
        ));
    }

    #[test]
    fn counterexample_fails_both_ways() {
        let sch = counterexample();
        let r = eq1_check(&sch, set(&[1])).unwrap();
        assert!(!r.holds);
        let v = r.violation.unwrap();
        assert_eq!((v.first, v.second), (vec![0], vec![1]));
        assert_eq!(v.values, vec!["0".to_string(), "1/2".to_string()]);
        let fam = TestFamily::<f64>::with_random(2, 3, 4);
        let lift = lift_and_test(&sch, set(&[1]), &fam).unwrap();
        assert!(!lift.holds);
        assert!(lift.max_distance > 1e-6);
        let (a, b) = lift.witness.unwrap();
        assert_ne!(a.name, b.name);
    }

    #[test]
    fn precondition_errors_are_distinct() {
        let sch = scheme_from_msp(&Msp::shamir(3, 1, Field::new(5).unwrap()).unwrap()).unwrap();
        assert_eq!(
            eq1_check(&sch, set(&[2, 3])).unwrap_err(),
            ConditionError::NotSecret(set(&[2, 3]))
        );
        assert_eq!(
            eq1_check(&sch, set(&[4])).unwrap_err(),
            ConditionError::PlayerOutOfRange {
                set: set(&[4]),
                n: 3
            }
        );
        // Y_2 alone does not determine s here, though Y_1 is secret.
        let t = table(&[(0, &[0, 0], (1, 1)), (1, &[0, 0], (1, 1))], 2);
        let blind = ClassicalScheme::new(vec![1, 1], t).unwrap();
        assert_eq!(
            eq1_check(&blind, set(&[1])).unwrap_err(),
            ConditionError::NotCorrect(set(&[2]))
        );
        // Correct and secret, but the claimed structure excludes u.
        let claimed = counterexample()
            .with_structure(AdversaryStructure::threshold(2, 0).unwrap())
            .unwrap();
        assert_eq!(
            eq1_check(&claimed, set(&[1])).unwrap_err(),
            ConditionError::NotCorrectable(set(&[1]))
        );
    }

    #[test]
    fn single_secret_is_trivially_hidden() {
        let t = table(&[(0, &[0, 0], (1, 2)), (0, &[1, 1], (1, 2))], 1);
        let structure = AdversaryStructure::new(2, &[set(&[1])]).unwrap();
        let sch = ClassicalScheme::new(vec![2, 2], t)
            .unwrap()
            .with_structure(structure)
            .unwrap();
        assert!(eq1_check(&sch, set(&[1])).unwrap().holds);
        let fam = TestFamily::<f64>::with_random(1, 0, 3);
        assert!(lift_and_test(&sch, set(&[1]), &fam).unwrap().holds);
    }
}
