//! Shared fixtures and independent oracles for the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use qss_core::condition::{ClassicalScheme, Prob};
use qss_core::galois::Field;
use qss_core::msp::Msp;
use qss_core::rng::{self, SeededRng};
use qss_core::structures::{parse_formula, AdversaryStructure, Formula, PlayerSet};

pub fn gf(p: u32) -> Field {
    Field::new(p).expect("prime")
}

pub fn set(ids: &[usize]) -> PlayerSet {
    PlayerSet::from_players(ids.iter().copied())
}

/// Formulas exercising every gate kind, nesting and reused players.
pub const CORPUS: &[&str] = &[
    "1",
    "and(1,2)",
    "or(1,2)",
    "or(and(1,3),and(2,3))",
    "thr2(1,2,3)",
    "and(1,or(2,3))",
    "or(1,and(2,3,4))",
    "or(and(1,2),and(3,4))",
    "and(or(1,2),or(3,4))",
    "thr2(and(1,2),3,or(4,5))",
    "thr3(1,2,3,4,5)",
    "or(and(1,2),and(2,3),and(3,4),and(4,5))",
    "thr2(or(1,2),and(1,3),4)",
];

/// Field large enough for every threshold gate in the corpus.
pub const CORPUS_FIELD: u32 = 7;

pub fn corpus() -> Vec<Formula> {
    CORPUS
        .iter()
        .map(|f| parse_formula(f).expect("corpus formula"))
        .collect()
}

/// The adversary structure a formula describes: sets on which it is false.
pub fn structure_of(f: &Formula, n: usize) -> AdversaryStructure {
    AdversaryStructure::from_predicate(n, |b| !f.eval(b)).expect("structure")
}

/// Maximal {{1,2},{3}}: Q2* but not self-dual.
pub fn nonsd_msp() -> Msp {
    Msp::compile(&parse_formula("or(and(1,3),and(2,3))").unwrap(), gf(5)).unwrap()
}

/// Every antichain over `n` players, as the list of its sets. Counts are
/// the Dedekind numbers.
pub fn antichains(n: usize) -> Vec<Vec<PlayerSet>> {
    fn grow(next: u32, total: u32, chosen: &mut Vec<PlayerSet>, out: &mut Vec<Vec<PlayerSet>>) {
        if next == total {
            out.push(chosen.clone());
            return;
        }
        grow(next + 1, total, chosen, out);
        let s = PlayerSet::from_bits(next);
        if chosen
            .iter()
            .all(|&c| !c.is_subset_of(s) && !s.is_subset_of(c))
        {
            chosen.push(s);
            grow(next + 1, total, chosen, out);
            chosen.pop();
        }
    }
    let mut out = Vec::new();
    grow(0, 1 << n, &mut Vec::new(), &mut out);
    out
}

/// A random family over `n` players; the structure keeps its maximal sets.
pub fn random_family(rng: &mut SeededRng, n: usize) -> Vec<PlayerSet> {
    let k = 1 + rng::below(rng, 6) as usize;
    (0..k)
        .map(|_| PlayerSet::from_bits(rng::below(rng, 1 << n) as u32))
        .collect()
}

/// Brute-force dual: `B ∈ 𝒜*` iff the complement of `B` is not in `𝒜`.
pub fn dual_by_definition(a: &AdversaryStructure, b: PlayerSet) -> bool {
    !a.is_member(b.complement(a.players()))
}

/// Secret at zero of the interpolating polynomial through `points`, in
/// plain integer arithmetic mod `p`.
pub fn lagrange_at_zero(points: &[(i64, i64)], p: i64) -> i64 {
    let md = |v: i64| v.rem_euclid(p);
    let inv = |v: i64| {
        let (mut acc, mut base, mut e) = (1i64, md(v), p - 2);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc
    };
    let mut total = 0;
    for (i, &(xi, yi)) in points.iter().enumerate() {
        let mut num = 1;
        let mut den = 1;
        for (j, &(xj, _)) in points.iter().enumerate() {
            if i != j {
                num = md(num * md(-xj));
                den = md(den * md(xi - xj));
            }
        }
        total = md(total + yi * num % p * inv(den));
    }
    total
}

/// A random valid two-player scheme with at most `max_secrets` secrets,
/// share spaces of size at most 3 and denominators at most 8. Share 2
/// determines the secret, so {2} is qualified and {1} must be secret.
pub fn random_two_player_scheme(rng: &mut SeededRng, max_secrets: usize) -> ClassicalScheme {
    loop {
        let k = 2 + rng::below(rng, max_secrets as u64 - 1) as usize;
        let y1 = 1 + rng::below(rng, 3) as usize;
        if k > 3 {
            continue;
        }
        let y2 = k + rng::below(rng, (4 - k) as u64) as usize;
        let den = 1 + rng::below(rng, 8) as i64;
        // marginal of share 1, common to all secrets
        let marginal = composition(rng, den, y1);
        // surjection share 2 -> secret
        let owner: Vec<usize> = loop {
            let o: Vec<usize> = (0..y2)
                .map(|_| rng::below(rng, k as u64) as usize)
                .collect();
            if (0..k).all(|s| o.contains(&s)) {
                break o;
            }
        };
        let mut table = Vec::with_capacity(k);
        for s in 0..k {
            let cols: Vec<usize> = (0..y2).filter(|&c| owner[c] == s).collect();
            let mut rows = BTreeMap::new();
            for (a, &weight) in marginal.iter().enumerate() {
                if weight == 0 {
                    continue;
                }
                let split = composition(rng, weight, cols.len());
                for (&c, &w) in cols.iter().zip(&split) {
                    if w > 0 {
                        rows.insert(vec![a as u16, c as u16], Prob::new(w, den));
                    }
                }
            }
            table.push(rows);
        }
        if let Ok(sch) = ClassicalScheme::new(vec![y1, y2], table) {
            let u = PlayerSet::singleton(1);
            if sch.structure().is_member(u) && sch.structure().dual().is_member(u) {
                return sch;
            }
        }
    }
}

/// Random split of `total` into `parts` non-negative integers.
fn composition(rng: &mut SeededRng, total: i64, parts: usize) -> Vec<i64> {
    let mut out = vec![0; parts];
    for _ in 0..total {
        out[rng::below(rng, parts as u64) as usize] += 1;
    }
    out
}
