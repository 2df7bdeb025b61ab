//! Plain-text structure files:
//!
//! ```text
//! # comment
//! players 3
//! maximal 1 2
//! maximal 3
//! ```
//!
//! A bare `maximal` line denotes the empty set.

use std::fmt::Write as _;

use super::{AdversaryStructure, PlayerSet, StructureError};

pub fn parse_structure(text: &str) -> Result<AdversaryStructure, StructureError> {
    let mut players: Option<usize> = None;
    let mut sets = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: String| StructureError::Parse { line, msg };
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let mut toks = content.split_whitespace();
        match toks.next() {
            Some("players") => {
                if players.is_some() {
                    return Err(err("duplicate players directive".into()));
                }
                let n = toks
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| err("expected player count".into()))?;
                if toks.next().is_some() {
                    return Err(err("trailing tokens".into()));
                }
                players = Some(n);
            }
            Some("maximal") => {
                let n = players.ok_or_else(|| err("maximal before players".into()))?;
                let mut set = PlayerSet::EMPTY;
                for t in toks {
                    let id: usize = t
                        .parse()
                        .map_err(|_| err(format!("invalid player id {t:?}")))?;
                    if id == 0 || id > n {
                        return Err(StructureError::PlayerOutOfRange { id, n });
                    }
                    set = set.union(PlayerSet::singleton(id));
                }
                sets.push(set);
            }
            Some(other) => return Err(err(format!("unknown directive {other:?}"))),
            None => unreachable!(),
        }
    }
    let n = players.ok_or(StructureError::Parse {
        line: 0,
        msg: "missing players directive".into(),
    })?;
    AdversaryStructure::new(n, &sets)
}

pub fn write_structure(a: &AdversaryStructure) -> String {
    let mut out = format!("players {}\n", a.players());
    for m in a.maximal_sets() {
        out.push_str("maximal");
        for p in m.players() {
            let _ = write!(out, " {p}");
        }
        out.push('\n');
    }
    out
}
