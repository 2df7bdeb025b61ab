//! Adversary structures over at most [`MAX_PLAYERS`] players.
//!
//! A structure is stored as the antichain of its maximal sets; membership
//! is "contained in some maximal set". Every derived operation (dual,
//! predicates, extension) enumerates the full subset lattice, which is
//! cheap at this size.

mod formula;
mod io;

use std::fmt;

use thiserror::Error;

pub use formula::{parse_formula, Formula, FormulaError};
pub use io::{parse_structure, write_structure};

pub const MAX_PLAYERS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("player count {0} outside 1..={MAX_PLAYERS}")]
    PlayerCount(usize),
    #[error("player id {id} out of range 1..={n}")]
    PlayerOutOfRange { id: usize, n: usize },
    #[error("structure is not Q2*; no-cloning forbids QSS")]
    NotQ2Star,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A subset of players `{1, ..., n}`; player `i` is bit `i - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PlayerSet(u32);

impl PlayerSet {
    pub const EMPTY: PlayerSet = PlayerSet(0);

    pub fn from_bits(bits: u32) -> Self {
        PlayerSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        PlayerSet(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(player: usize) -> Self {
        debug_assert!(player >= 1);
        PlayerSet(1 << (player - 1))
    }

    pub fn from_players<I: IntoIterator<Item = usize>>(players: I) -> Self {
        players.into_iter().fold(PlayerSet::EMPTY, |acc, p| {
            acc.union(PlayerSet::singleton(p))
        })
    }

    #[inline]
    pub fn contains(self, player: usize) -> bool {
        (1..=32).contains(&player) && self.0 & (1 << (player - 1)) != 0
    }

    #[inline]
    pub fn is_subset_of(self, other: PlayerSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn union(self, other: PlayerSet) -> PlayerSet {
        PlayerSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: PlayerSet) -> PlayerSet {
        PlayerSet(self.0 & other.0)
    }

    #[inline]
    pub fn complement(self, n: usize) -> PlayerSet {
        PlayerSet(!self.0 & PlayerSet::full(n).0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Players in increasing order.
    pub fn players(self) -> impl Iterator<Item = usize> {
        (1..=32).filter(move |&p| self.contains(p))
    }

    /// Largest player id, 0 for the empty set.
    pub fn max_player(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    /// All `2^n` subsets of `{1, ..., n}` in increasing bitmask order.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = PlayerSet> {
        (0..(1u64 << n)).map(|b| PlayerSet(b as u32))
    }

    /// Parses a comma-separated list such as `2,3`; the empty string and `-`
    /// denote the empty set.
    pub fn parse_list(text: &str) -> Result<PlayerSet, String> {
        let text = text.trim();
        let text = text
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .unwrap_or(text);
        if text.is_empty() || text == "-" {
            return Ok(PlayerSet::EMPTY);
        }
        let mut set = PlayerSet::EMPTY;
        for tok in text.split(',') {
            let id: usize = tok
                .trim()
                .parse()
                .map_err(|_| format!("invalid player id {:?}", tok.trim()))?;
            if !(1..=32).contains(&id) {
                return Err(format!("player id {id} out of range"));
            }
            set = set.union(PlayerSet::singleton(id));
        }
        Ok(set)
    }
}

impl fmt::Display for PlayerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.players().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// A downward-closed family of player sets, stored by its maximal sets.
///
/// An empty antichain is the empty family; `[∅]` is the family `{∅}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdversaryStructure {
    n: usize,
    maximal: Vec<PlayerSet>,
}

impl AdversaryStructure {
    /// Builds a structure from any generating family; non-maximal sets are
    /// pruned.
    pub fn new(n: usize, sets: &[PlayerSet]) -> Result<Self, StructureError> {
        check_player_count(n)?;
        let full = PlayerSet::full(n);
        for s in sets {
            if !s.is_subset_of(full) {
                let id = s.max_player();
                return Err(StructureError::PlayerOutOfRange { id, n });
            }
        }
        Ok(AdversaryStructure {
            n,
            maximal: reduce_to_maximal(sets),
        })
    }

    /// The threshold structure "at most `t` players", `t < n`.
    pub fn threshold(n: usize, t: usize) -> Result<Self, StructureError> {
        check_player_count(n)?;
        let sets: Vec<PlayerSet> = PlayerSet::all_subsets(n).filter(|s| s.len() == t).collect();
        Self::new(n, &sets)
    }

    /// The structure whose members are exactly the sets accepted by `member`.
    /// `member` must be downward closed.
    pub fn from_predicate<F: FnMut(PlayerSet) -> bool>(
        n: usize,
        mut member: F,
    ) -> Result<Self, StructureError> {
        check_player_count(n)?;
        let table: Vec<bool> = PlayerSet::all_subsets(n).map(&mut member).collect();
        Ok(Self::from_membership_table(n, &table))
    }

    fn from_membership_table(n: usize, table: &[bool]) -> Self {
        let maximal = (0..table.len())
            .filter(|&b| table[b] && (0..n).all(|i| b & (1 << i) != 0 || !table[b | (1 << i)]))
            .map(|b| PlayerSet(b as u32))
            .collect();
        AdversaryStructure { n, maximal }
    }

    fn membership_table(&self) -> Vec<bool> {
        PlayerSet::all_subsets(self.n)
            .map(|b| self.is_member(b))
            .collect()
    }

    pub fn players(&self) -> usize {
        self.n
    }

    /// Maximal sets in increasing bitmask order.
    pub fn maximal_sets(&self) -> &[PlayerSet] {
        &self.maximal
    }

    pub fn is_member(&self, b: PlayerSet) -> bool {
        self.maximal.iter().any(|&m| b.is_subset_of(m))
    }

    /// All members in increasing bitmask order.
    pub fn members(&self) -> Vec<PlayerSet> {
        PlayerSet::all_subsets(self.n)
            .filter(|&b| self.is_member(b))
            .collect()
    }

    /// `{B : B^c ∉ 𝒜}`.
    pub fn dual(&self) -> AdversaryStructure {
        let full = (1usize << self.n) - 1;
        let table = self.membership_table();
        let dual: Vec<bool> = (0..=full).map(|b| !table[full ^ b]).collect();
        Self::from_membership_table(self.n, &dual)
    }

    /// Every member also belongs to `other`.
    pub fn is_subfamily_of(&self, other: &AdversaryStructure) -> bool {
        self.n == other.n && self.maximal.iter().all(|&m| other.is_member(m))
    }

    /// No two members cover the player set.
    pub fn is_q2(&self) -> bool {
        let full = PlayerSet::full(self.n);
        let by_pairs = !self
            .maximal
            .iter()
            .any(|&a| self.maximal.iter().any(|&b| a.union(b) == full));
        let by_inclusion = self.is_subfamily_of(&self.dual());
        assert_eq!(by_pairs, by_inclusion, "Q2 characterizations disagree");
        by_pairs
    }

    pub fn is_q2star(&self) -> bool {
        let dual = self.dual();
        let by_dual = dual.is_q2();
        let by_inclusion = dual.is_subfamily_of(self);
        assert_eq!(by_dual, by_inclusion, "Q2* characterizations disagree");
        by_dual
    }

    pub fn is_selfdual(&self) -> bool {
        let both = self.is_q2() && self.is_q2star();
        debug_assert_eq!(both, *self == self.dual());
        both
    }

    /// Self-dual extension over `n + 1` players; player `n + 1` is the new
    /// share τ:  𝒜' = 𝒜 ∪ { B ∪ {τ} : B ∈ 𝒜* }.
    pub fn extend_selfdual(&self) -> Result<AdversaryStructure, StructureError> {
        if !self.is_q2star() {
            return Err(StructureError::NotQ2Star);
        }
        let tau = PlayerSet::singleton(self.n + 1);
        let mut sets = self.maximal.clone();
        sets.extend(self.dual().maximal.iter().map(|b| b.union(tau)));
        let ext = AdversaryStructure::new(self.n + 1, &sets)?;
        debug_assert!(ext.is_selfdual());
        Ok(ext)
    }

    /// Members not containing player `n`, viewed over `n - 1` players.
    pub fn restrict_drop_last(&self) -> AdversaryStructure {
        let last = PlayerSet::singleton(self.n);
        let sets: Vec<PlayerSet> = self
            .maximal
            .iter()
            .map(|m| PlayerSet(m.0 & !last.0))
            .collect();
        AdversaryStructure {
            n: self.n - 1,
            maximal: reduce_to_maximal(&sets),
        }
    }
}

impl fmt::Display for AdversaryStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} maximal=[", self.n)?;
        for (i, m) in self.maximal.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "]")
    }
}

fn check_player_count(n: usize) -> Result<(), StructureError> {
    if (1..=MAX_PLAYERS).contains(&n) {
        Ok(())
    } else {
        Err(StructureError::PlayerCount(n))
    }
}

fn reduce_to_maximal(sets: &[PlayerSet]) -> Vec<PlayerSet> {
    let mut out: Vec<PlayerSet> = Vec::new();
    for (i, &s) in sets.iter().enumerate() {
        let dominated = sets
            .iter()
            .enumerate()
            .any(|(j, &t)| s.is_subset_of(t) && (s != t || j < i));
        if !dominated {
            out.push(s);
        }
    }
    out.sort();
    out
}
