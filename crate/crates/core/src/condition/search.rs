//! Exhaustive search for two-player schemes violating the condition.
//!
//! Candidates tolerate `𝒜 = {∅, {1}}`: share 1 is independent of the
//! secret and share 2 determines it. Every probability is a multiple of
//! `1/D`. Candidates are visited in a fixed order, so the first hit is
//! reproducible.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use super::eq1::{eq1_check, lift_and_test, Eq1Report, LiftReport};
use super::homomorphic::{homomorphic_scheme, HomomorphicSpec};
use super::scheme::{ClassicalScheme, Shares};
use super::{ConditionError, Prob};
use crate::quantum::TestFamily;
use crate::structures::{AdversaryStructure, PlayerSet};

/// Any trace distance below this is treated as agreement by the search.
pub const CONFIRMATION_DISTANCE: f64 = 1e-6;

/// Random probes added to the basis states and the uniform superposition.
pub const SEARCH_PROBES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchFamily {
    /// Every table of the shape above.
    General,
    /// Tables where share 1 is a function of share 2.
    FunctionOfQ,
    /// Tables produced by an injective homomorphism over a finite abelian
    /// group (the group doubles as the secret space).
    Homomorphic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_secrets: usize,
    pub max_share_size: usize,
    pub max_denominator: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_secrets: 2,
            max_share_size: 3,
            max_denominator: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub scheme: ClassicalScheme,
    pub eq1: Eq1Report,
    pub lift: LiftReport,
}

impl Counterexample {
    /// Human-readable certificate: the failing pair with its per-secret
    /// overlaps, and the two oracle inputs that separate the reduced states.
    pub fn certificate(&self, seed: u64) -> String {
        let mut out = String::new();
        out.push_str(&format!("set {}\n", self.eq1.set));
        if let Some(v) = &self.eq1.violation {
            let ys = |y: &Shares| y.iter().map(u16::to_string).collect::<Vec<_>>().join(" ");
            out.push_str(&format!(
                "condition false at y_u=({}) y_u'=({})\n",
                ys(&v.first),
                ys(&v.second)
            ));
            for (s, val) in v.values.iter().enumerate() {
                out.push_str(&format!("  secret {s}: overlap {val}\n"));
            }
        }
        out.push_str(&format!(
            "oracle seed {seed} max trace distance {:.6}\n",
            self.lift.max_distance
        ));
        if let Some((a, b)) = &self.lift.witness {
            for p in [a, b] {
                let amps: Vec<String> = p
                    .amplitudes
                    .iter()
                    .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                    .collect();
                out.push_str(&format!("  input {}: {}\n", p.name, amps.join(" ")));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub examined: usize,
    pub found: Option<Counterexample>,
}

/// The split every candidate is judged on.
pub fn search_structure() -> AdversaryStructure {
    AdversaryStructure::new(2, &[PlayerSet::singleton(1)]).expect("two players")
}

/// Returns the first candidate failing the condition, confirmed by the
/// oracle. A candidate on which the two disagree is reported as an error.
pub fn search_counterexample(
    bounds: SearchBounds,
    family: SearchFamily,
    seed: u64,
) -> Result<SearchOutcome, ConditionError> {
    let u = PlayerSet::singleton(1);
    let mut examined = 0;
    let mut result: Result<Option<Counterexample>, ConditionError> = Ok(None);
    enumerate_schemes(bounds, family, |scheme| {
        examined += 1;
        let eq1 = match eq1_check(&scheme, u) {
            Ok(r) => r,
            Err(e) => {
                result = Err(e);
                return ControlFlow::Break(());
            }
        };
        if eq1.holds {
            return ControlFlow::Continue(());
        }
        let probes = TestFamily::<f64>::with_random(scheme.secrets(), seed, SEARCH_PROBES);
        result = match lift_and_test(&scheme, u, &probes) {
            Ok(lift) if !lift.holds && lift.max_distance > CONFIRMATION_DISTANCE => {
                Ok(Some(Counterexample { scheme, eq1, lift }))
            }
            Ok(_) => Err(ConditionError::OracleDisagreement {
                scheme: scheme.to_text(),
            }),
            Err(e) => Err(e),
        };
        ControlFlow::Break(())
    });
    Ok(SearchOutcome {
        examined,
        found: result?,
    })
}

/// Visits every candidate of `family` within `bounds`, in search order.
pub fn enumerate_schemes<F>(bounds: SearchBounds, family: SearchFamily, mut visit: F)
where
    F: FnMut(ClassicalScheme) -> ControlFlow<()>,
{
    let _ = match family {
        SearchFamily::General => tables(bounds, false, &mut visit),
        SearchFamily::FunctionOfQ => tables(bounds, true, &mut visit),
        SearchFamily::Homomorphic => homomorphic(bounds, &mut visit),
    };
}

fn tables<F>(bounds: SearchBounds, function_of_q: bool, visit: &mut F) -> ControlFlow<()>
where
    F: FnMut(ClassicalScheme) -> ControlFlow<()>,
{
    let structure = search_structure();
    for k in 2..=bounds.max_secrets {
        for a in 1..=bounds.max_share_size {
            for b in k..=bounds.max_share_size {
                for d in 1..=bounds.max_denominator {
                    for marginal in compositions(d, a, 1) {
                        for owner in surjections(b, k) {
                            let owned: Vec<Vec<u16>> = (0..k)
                                .map(|s| {
                                    (0..b as u16).filter(|&y| owner[y as usize] == s).collect()
                                })
                                .collect();
                            let options: Vec<Vec<Vec<Vec<usize>>>> = owned
                                .iter()
                                .map(|cols| splits(&marginal, cols.len(), function_of_q))
                                .collect();
                            if options.iter().any(Vec::is_empty) {
                                continue;
                            }
                            let mut pick = vec![0usize; k];
                            loop {
                                let table = (0..k)
                                    .map(|s| {
                                        let counts = &options[s][pick[s]];
                                        let mut rows: BTreeMap<Shares, Prob> = BTreeMap::new();
                                        for (y1, row) in counts.iter().enumerate() {
                                            for (c, &n) in row.iter().enumerate() {
                                                if n > 0 {
                                                    rows.insert(
                                                        vec![y1 as u16, owned[s][c]],
                                                        Prob::new(n as i64, d as i64),
                                                    );
                                                }
                                            }
                                        }
                                        rows
                                    })
                                    .collect();
                                let scheme = ClassicalScheme::new(vec![a, b], table)
                                    .and_then(|s| s.with_structure(structure.clone()))
                                    .expect("candidates are normalized by construction");
                                visit(scheme)?;
                                if !advance(&mut pick, &options) {
                                    break;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    ControlFlow::Continue(())
}

/// Mixed-radix increment over the option lists; `false` once exhausted.
fn advance(pick: &mut [usize], options: &[Vec<Vec<Vec<usize>>>]) -> bool {
    for s in (0..pick.len()).rev() {
        pick[s] += 1;
        if pick[s] < options[s].len() {
            return true;
        }
        pick[s] = 0;
    }
    false
}

/// Compositions of `total` into `parts` parts, each at least `min`, with
/// larger leading parts first.
fn compositions(total: usize, parts: usize, min: usize) -> Vec<Vec<usize>> {
    fn go(
        total: usize,
        parts: usize,
        min: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if parts == 1 {
            if total >= min {
                prefix.push(total);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        let reserve = min * (parts - 1);
        if total < reserve {
            return;
        }
        for first in (min..=total - reserve).rev() {
            prefix.push(first);
            go(total - first, parts - 1, min, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        go(total, parts, min, &mut Vec::new(), &mut out);
    }
    out
}

/// Maps `0..b → 0..k` hitting every value, in lexicographic order.
fn surjections(b: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut f = vec![0usize; b];
    loop {
        let mut hit = vec![false; k];
        f.iter().for_each(|&v| hit[v] = true);
        if hit.iter().all(|&h| h) {
            out.push(f.clone());
        }
        let mut i = b;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            f[i] += 1;
            if f[i] < k {
                break;
            }
            f[i] = 0;
        }
    }
}

/// Count matrices with row sums `marginal` and `cols` columns, each column
/// nonzero. With `function_of_q`, each column has exactly one nonzero entry.
fn splits(marginal: &[usize], cols: usize, function_of_q: bool) -> Vec<Vec<Vec<usize>>> {
    let per_row: Vec<Vec<Vec<usize>>> =
        marginal.iter().map(|&c| compositions(c, cols, 0)).collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; marginal.len()];
    loop {
        let rows: Vec<Vec<usize>> = pick
            .iter()
            .enumerate()
            .map(|(r, &i)| per_row[r][i].clone())
            .collect();
        let ok = (0..cols).all(|c| {
            let nonzero = rows.iter().filter(|row| row[c] > 0).count();
            if function_of_q {
                nonzero == 1
            } else {
                nonzero > 0
            }
        });
        if ok {
            out.push(rows);
        }
        let mut r = marginal.len();
        loop {
            if r == 0 {
                return out;
            }
            r -= 1;
            pick[r] += 1;
            if pick[r] < per_row[r].len() {
                break;
            }
            pick[r] = 0;
        }
    }
}

/// Two-output homomorphisms over groups of order at most the smaller of
/// the secret and share bounds, with randomness `G^m` such that `|G|^m`
/// respects the denominator bound. Only valid splits are visited.
fn homomorphic<F>(bounds: SearchBounds, visit: &mut F) -> ControlFlow<()>
where
    F: FnMut(ClassicalScheme) -> ControlFlow<()>,
{
    let structure = search_structure();
    let u = PlayerSet::singleton(1);
    let limit = bounds.max_secrets.min(bounds.max_share_size) as u64;
    for moduli in groups(limit) {
        let order: u64 = moduli.iter().product();
        let exponent = moduli.iter().fold(1u64, |acc, &q| num_integer::lcm(acc, q)) as i64;
        let mut m = 0usize;
        while order.pow(m as u32) <= bounds.max_denominator as u64 {
            let entries = 2 * (m + 1);
            let mut coeffs = vec![0i64; entries];
            loop {
                let matrix = vec![coeffs[..m + 1].to_vec(), coeffs[m + 1..].to_vec()];
                let spec = HomomorphicSpec::new(moduli.clone(), m, matrix).expect("valid shape");
                if let Ok(scheme) = homomorphic_scheme(&spec, structure.clone()) {
                    if scheme.check_secrecy(u) && scheme.check_correctness(PlayerSet::singleton(2))
                    {
                        visit(scheme)?;
                    }
                }
                let mut i = entries;
                let more = loop {
                    if i == 0 {
                        break false;
                    }
                    i -= 1;
                    coeffs[i] += 1;
                    if coeffs[i] < exponent {
                        break true;
                    }
                    coeffs[i] = 0;
                };
                if !more {
                    break;
                }
            }
            m += 1;
        }
    }
    ControlFlow::Continue(())
}

/// Non-decreasing modulus lists with product in `2..=limit`.
fn groups(limit: u64) -> Vec<Vec<u64>> {
    fn go(limit: u64, min: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let product: u64 = prefix.iter().product();
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        let mut q = min;
        while product * q <= limit {
            prefix.push(q);
            go(limit, q, prefix, out);
            prefix.pop();
            q += 1;
        }
    }
    let mut out = Vec::new();
    go(limit, 2, &mut Vec::new(), &mut out);
    out.sort_by_key(|g| (g.iter().product::<u64>(), g.clone()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers_enumerate_in_order() {
        assert_eq!(
            compositions(2, 2, 0),
            vec![vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        assert_eq!(compositions(3, 2, 1), vec![vec![2, 1], vec![1, 2]]);
        assert!(compositions(1, 2, 1).is_empty());
        assert_eq!(surjections(3, 2).len(), 6);
        assert_eq!(surjections(2, 2), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(groups(4), vec![vec![2], vec![3], vec![2, 2], vec![4]]);
        assert_eq!(splits(&[1, 1], 2, false).len(), 2);
        assert_eq!(splits(&[2], 2, true), vec![vec![vec![1, 1]]]);
        assert_eq!(splits(&[1, 1], 1, true).len(), 0);
    }

    #[test]
    fn first_counterexample_is_the_copy_or_constant_table() {
        let out = search_counterexample(SearchBounds::default(), SearchFamily::General, 1).unwrap();
        let found = out
            .found
            .expect("a counterexample exists within the default bounds");
        let text = found.scheme.to_text();
        assert_eq!(
            text,
            "scheme n=2 secrets=2\nspace 1 2\nspace 2 3\n\
             p 0 0 0 1/2\np 0 1 1 1/2\np 1 0 2 1/2\np 1 1 2 1/2\n"
        );
        assert!(!found.lift.holds && found.lift.max_distance > CONFIRMATION_DISTANCE);
        assert!(found.certificate(1).contains("condition false"));
    }

    #[test]
    fn function_of_q_family_has_no_counterexample() {
        let bounds = SearchBounds {
            max_secrets: 2,
            max_share_size: 3,
            max_denominator: 4,
        };
        let out = search_counterexample(bounds, SearchFamily::FunctionOfQ, 1).unwrap();
        assert!(out.found.is_none());
        assert!(out.examined > 0);
    }

    #[test]
    fn homomorphic_family_has_no_counterexample() {
        let bounds = SearchBounds {
            max_secrets: 3,
            max_share_size: 3,
            max_denominator: 8,
        };
        let out = search_counterexample(bounds, SearchFamily::Homomorphic, 1).unwrap();
        assert!(out.found.is_none());
        assert!(out.examined > 0);
    }
}
