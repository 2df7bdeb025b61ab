use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::{One, Zero};

use super::{ConditionError, Prob};
use crate::classical::{increment, DEAL_GUARD};
use crate::msp::Msp;
use crate::structures::{AdversaryStructure, PlayerSet, MAX_PLAYERS};

/// A share tuple `(y_1, ..., y_n)`, one index per player.
pub type Shares = Vec<u16>;

/// A classical scheme given by its conditional distribution `P(Y = y | S = s)`.
///
/// Randomness is marginalized away. Only the support is stored; missing
/// tuples have probability zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalScheme {
    spaces: Vec<usize>,
    table: Vec<BTreeMap<Shares, Prob>>,
    structure: AdversaryStructure,
}

impl ClassicalScheme {
    /// Validates shapes and exact normalization. The adversary structure is
    /// taken to be every set whose shares are independent of the secret.
    pub fn new(
        spaces: Vec<usize>,
        table: Vec<BTreeMap<Shares, Prob>>,
    ) -> Result<Self, ConditionError> {
        let n = spaces.len();
        if n == 0 || n > MAX_PLAYERS {
            return Err(ConditionError::PlayerCount(n));
        }
        if table.is_empty() {
            return Err(ConditionError::NoSecrets);
        }
        if let Some(&size) = spaces.iter().find(|&&s| s == 0 || s > 1 << 16) {
            return Err(ConditionError::SpaceSize(size));
        }
        let mut table = table;
        for (s, rows) in table.iter_mut().enumerate() {
            rows.retain(|_, p| !p.is_zero());
            let mut total = Prob::zero();
            for (y, p) in rows.iter() {
                if y.len() != n || y.iter().zip(&spaces).any(|(&v, &size)| v as usize >= size) {
                    return Err(ConditionError::ShareOutOfRange {
                        secret: s,
                        shares: y.clone(),
                    });
                }
                if *p < Prob::zero() {
                    return Err(ConditionError::Negative { secret: s });
                }
                total += *p;
            }
            if !total.is_one() {
                return Err(ConditionError::NotNormalized {
                    secret: s,
                    total: total.to_string(),
                });
            }
        }
        let structure = AdversaryStructure::threshold(n, 0)?;
        let mut scheme = ClassicalScheme {
            spaces,
            table,
            structure,
        };
        scheme.structure = AdversaryStructure::from_predicate(n, |u| scheme.check_secrecy(u))?;
        Ok(scheme)
    }

    /// Replaces the derived structure by the one the scheme claims to
    /// tolerate.
    pub fn with_structure(mut self, structure: AdversaryStructure) -> Result<Self, ConditionError> {
        if structure.players() != self.players() {
            return Err(ConditionError::PlayerCount(structure.players()));
        }
        self.structure = structure;
        Ok(self)
    }

    pub fn players(&self) -> usize {
        self.spaces.len()
    }

    pub fn secrets(&self) -> usize {
        self.table.len()
    }

    pub fn spaces(&self) -> &[usize] {
        &self.spaces
    }

    pub fn structure(&self) -> &AdversaryStructure {
        &self.structure
    }

    /// Support of `P(· | s)`.
    pub fn distribution(&self, s: usize) -> &BTreeMap<Shares, Prob> {
        &self.table[s]
    }

    pub fn probability(&self, s: usize, y: &[u16]) -> Prob {
        self.table[s].get(y).copied().unwrap_or_else(Prob::zero)
    }

    /// `P(Y_b = y_b | S = s)` with `y_b` listing the players of `b` in order.
    pub fn marginal(&self, s: usize, b: PlayerSet) -> BTreeMap<Shares, Prob> {
        let idx = self.coordinates(b);
        let mut out: BTreeMap<Shares, Prob> = BTreeMap::new();
        for (y, p) in &self.table[s] {
            *out.entry(project(y, &idx)).or_insert_with(Prob::zero) += *p;
        }
        out
    }

    /// Zero-based coordinates of the players in `b` that exist.
    pub fn coordinates(&self, b: PlayerSet) -> Vec<usize> {
        b.players()
            .filter(|&i| i <= self.players())
            .map(|i| i - 1)
            .collect()
    }

    /// The map `y_q ↦ s` if every share tuple of `q` in the support
    /// determines the secret.
    pub fn reconstruction_map(&self, q: PlayerSet) -> Option<BTreeMap<Shares, usize>> {
        let idx = self.coordinates(q);
        let mut g = BTreeMap::new();
        for (s, rows) in self.table.iter().enumerate() {
            for y in rows.keys() {
                if *g.entry(project(y, &idx)).or_insert(s) != s {
                    return None;
                }
            }
        }
        Some(g)
    }

    /// `H(S | Y_q) = 0`.
    pub fn check_correctness(&self, q: PlayerSet) -> bool {
        self.reconstruction_map(q).is_some()
    }

    /// `I(S ; Y_u) = 0`: the marginal on `u` is the same for every secret.
    pub fn check_secrecy(&self, u: PlayerSet) -> bool {
        let first = self.marginal(0, u);
        (1..self.secrets()).all(|s| self.marginal(s, u) == first)
    }

    /// Text form: header, one `space` line per player and one `p` line per
    /// support point.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "scheme n={} secrets={}",
            self.players(),
            self.secrets()
        );
        for (i, size) in self.spaces.iter().enumerate() {
            let _ = writeln!(out, "space {} {}", i + 1, size);
        }
        for (s, rows) in self.table.iter().enumerate() {
            for (y, p) in rows {
                let ys: Vec<String> = y.iter().map(u16::to_string).collect();
                let _ = writeln!(out, "p {} {} {}/{}", s, ys.join(" "), p.numer(), p.denom());
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, ConditionError> {
        let err = |line: usize, msg: &str| ConditionError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut header: Option<(usize, usize)> = None;
        let mut spaces: Vec<Option<usize>> = Vec::new();
        let mut table: Vec<BTreeMap<Shares, Prob>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let words: Vec<&str> = body.split_whitespace().collect();
            match (words[0], header) {
                ("scheme", None) => {
                    let mut n = None;
                    let mut k = None;
                    for w in &words[1..] {
                        match w.split_once('=') {
                            Some(("n", v)) => n = v.parse().ok(),
                            Some(("secrets", v)) => k = v.parse().ok(),
                            _ => return Err(err(line, "expected n=<players> secrets=<count>")),
                        }
                    }
                    let (n, k) = n
                        .zip(k)
                        .ok_or_else(|| err(line, "header needs n= and secrets="))?;
                    if n == 0 || n > MAX_PLAYERS {
                        return Err(ConditionError::PlayerCount(n));
                    }
                    if k == 0 || k > 1 << 16 {
                        return Err(err(line, "secret count out of range"));
                    }
                    header = Some((n, k));
                    spaces = vec![None; n];
                    table = vec![BTreeMap::new(); k];
                }
                ("scheme", Some(_)) => return Err(err(line, "duplicate header")),
                (_, None) => return Err(err(line, "missing 'scheme' header")),
                ("space", Some((n, _))) => {
                    let [i, size] = words[1..] else {
                        return Err(err(line, "expected 'space <player> <size>'"));
                    };
                    let i: usize = i.parse().map_err(|_| err(line, "bad player id"))?;
                    let size: usize = size.parse().map_err(|_| err(line, "bad space size"))?;
                    if i == 0 || i > n {
                        return Err(err(line, "player id out of range"));
                    }
                    if spaces[i - 1].replace(size).is_some() {
                        return Err(err(line, "space declared twice"));
                    }
                }
                ("p", Some((n, k))) => {
                    if words.len() != n + 3 {
                        return Err(err(
                            line,
                            "expected 'p <secret> <y_1> ... <y_n> <num>/<den>'",
                        ));
                    }
                    let s: usize = words[1].parse().map_err(|_| err(line, "bad secret"))?;
                    if s >= k {
                        return Err(err(line, "secret out of range"));
                    }
                    let y: Shares = words[2..n + 2]
                        .iter()
                        .map(|w| w.parse().map_err(|_| err(line, "bad share value")))
                        .collect::<Result<_, _>>()?;
                    let p: Prob = words[n + 2]
                        .parse()
                        .map_err(|_| err(line, "bad probability"))?;
                    if table[s].insert(y, p).is_some() {
                        return Err(err(line, "duplicate row"));
                    }
                }
                _ => return Err(err(line, "unknown directive")),
            }
        }
        if header.is_none() {
            return Err(err(text.lines().count().max(1), "missing 'scheme' header"));
        }
        let spaces = spaces
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                s.ok_or(ConditionError::Parse {
                    line: 0,
                    msg: format!("no space line for player {}", i + 1),
                })
            })
            .collect::<Result<_, _>>()?;
        Self::new(spaces, table)
    }
}

pub(crate) fn project(y: &[u16], idx: &[usize]) -> Shares {
    idx.iter().map(|&i| y[i]).collect()
}

/// All share tuples of `b` appearing under any secret.
pub(crate) fn support_values(sch: &ClassicalScheme, b: PlayerSet) -> BTreeSet<Shares> {
    let idx = sch.coordinates(b);
    (0..sch.secrets())
        .flat_map(|s| {
            sch.distribution(s)
                .keys()
                .map(|y| project(y, &idx))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// The exact table of the linear scheme: `P(y | s) = #{a : M (s, a) = y} / |K|^(e-1)`.
///
/// Player `i`'s share is the tuple of its rows, read as a base-`|K|`
/// number with the first row most significant.
pub fn scheme_from_msp(msp: &Msp) -> Result<ClassicalScheme, ConditionError> {
    let field = msp.field();
    let p = field.order() as u64;
    let e = msp.cols();
    let deals = p
        .checked_pow(e as u32)
        .filter(|&d| d <= DEAL_GUARD)
        .ok_or(ConditionError::Guard { limit: DEAL_GUARD })?;
    let n = msp.players();
    let mut spaces = Vec::with_capacity(n);
    let mut rows_of = Vec::with_capacity(n);
    for i in 1..=n {
        let rows = msp.row_indices(PlayerSet::singleton(i));
        let size = (p as usize)
            .checked_pow(rows.len() as u32)
            .filter(|&s| s <= 1 << 16)
            .ok_or(ConditionError::SpaceSize(usize::MAX))?;
        spaces.push(size);
        rows_of.push(rows);
    }
    let branches = deals / p;
    let weight = Prob::new(1, branches as i64);
    let mut table = vec![BTreeMap::new(); p as usize];
    for (s, rows) in table.iter_mut().enumerate() {
        let mut a = vec![0u16; e - 1];
        for _ in 0..branches {
            let mut x = vec![s as u16];
            x.extend_from_slice(&a);
            let v = msp.matrix().mul_vec(&x)?;
            let y: Shares = rows_of
                .iter()
                .map(|rs| rs.iter().fold(0u64, |acc, &r| acc * p + v[r] as u64) as u16)
                .collect();
            *rows.entry(y).or_insert_with(Prob::zero) += weight;
            increment(&mut a, field);
        }
    }
    ClassicalScheme::new(spaces, table)?.with_structure(msp.structure())
}
