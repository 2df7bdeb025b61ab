//! Monotone threshold formulas and their text syntax.
//!
//! ```text
//! expr := INT
//!       | "and(" expr ("," expr)+ ")"
//!       | "or("  expr ("," expr)+ ")"
//!       | "thr" INT "(" expr ("," expr)+ ")"
//! ```
//!
//! Whitespace is ignored between tokens.

use std::fmt;

use thiserror::Error;

use super::{PlayerSet, MAX_PLAYERS};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(usize),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    /// At least `k` of the children.
    Threshold(usize, Vec<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at position {pos}: expected {expected}")]
    Syntax { pos: usize, expected: &'static str },
    #[error("threshold {k} out of range 1..={arity}")]
    ThresholdRange { k: usize, arity: usize },
    #[error("player id {0} out of range 1..={MAX_PLAYERS}")]
    PlayerId(usize),
}

impl Formula {
    pub fn eval(&self, b: PlayerSet) -> bool {
        match self {
            Formula::Var(i) => b.contains(*i),
            Formula::And(cs) => cs.iter().all(|c| c.eval(b)),
            Formula::Or(cs) => cs.iter().any(|c| c.eval(b)),
            Formula::Threshold(k, cs) => cs.iter().filter(|c| c.eval(b)).count() >= *k,
        }
    }

    /// Largest player id mentioned.
    pub fn max_player(&self) -> usize {
        match self {
            Formula::Var(i) => *i,
            Formula::And(cs) | Formula::Or(cs) | Formula::Threshold(_, cs) => {
                cs.iter().map(Formula::max_player).max().unwrap_or(0)
            }
        }
    }

    /// Largest threshold-gate arity, 0 when there is none.
    pub fn max_threshold_arity(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::And(cs) | Formula::Or(cs) => cs
                .iter()
                .map(Formula::max_threshold_arity)
                .max()
                .unwrap_or(0),
            Formula::Threshold(_, cs) => cs
                .iter()
                .map(Formula::max_threshold_arity)
                .max()
                .unwrap_or(0)
                .max(cs.len()),
        }
    }

    /// Disjunction of conjunctions, one term per set; single-element
    /// terms and single-term disjunctions collapse.
    pub fn dnf(terms: &[PlayerSet]) -> Option<Formula> {
        let mut clauses: Vec<Formula> = terms
            .iter()
            .filter(|t| !t.is_empty())
            .map(|t| {
                let mut vars: Vec<Formula> = t.players().map(Formula::Var).collect();
                if vars.len() == 1 {
                    vars.pop().unwrap()
                } else {
                    Formula::And(vars)
                }
            })
            .collect();
        match clauses.len() {
            0 => None,
            1 => clauses.pop(),
            _ => Some(Formula::Or(clauses)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (head, children) = match self {
            Formula::Var(i) => return write!(f, "{i}"),
            Formula::And(cs) => ("and".to_string(), cs),
            Formula::Or(cs) => ("or".to_string(), cs),
            Formula::Threshold(k, cs) => (format!("thr{k}"), cs),
        };
        write!(f, "{head}(")?;
        for (i, c) in children.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("end of input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, expected: &'static str) -> FormulaError {
        FormulaError::Syntax {
            pos: self.pos,
            expected,
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<usize, FormulaError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(FormulaError::Syntax {
                pos: start,
                expected: "integer",
            })
    }

    fn expr(&mut self) -> Result<Formula, FormulaError> {
        self.skip_ws();
        if self.eat("and") {
            Ok(Formula::And(self.args()?))
        } else if self.eat("or") {
            Ok(Formula::Or(self.args()?))
        } else if self.eat("thr") {
            let k = self.int()?;
            let args = self.args()?;
            if k == 0 || k > args.len() {
                return Err(FormulaError::ThresholdRange {
                    k,
                    arity: args.len(),
                });
            }
            Ok(Formula::Threshold(k, args))
        } else if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            let id = self.int()?;
            if id == 0 || id > MAX_PLAYERS {
                return Err(FormulaError::PlayerId(id));
            }
            Ok(Formula::Var(id))
        } else {
            Err(self.error("player id, and(, or( or thrK("))
        }
    }

    // "(" expr ("," expr)+ ")"
    fn args(&mut self) -> Result<Vec<Formula>, FormulaError> {
        if !self.eat("(") {
            return Err(self.error("'('"));
        }
        let mut out = vec![self.expr()?];
        loop {
            if self.eat(",") {
                out.push(self.expr()?);
            } else if out.len() >= 2 && self.eat(")") {
                return Ok(out);
            } else if out.len() < 2 {
                return Err(self.error("','"));
            } else {
                return Err(self.error("',' or ')'"));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(players: &[usize]) -> PlayerSet {
        PlayerSet::from_players(players.iter().copied())
    }

    #[test]
    fn parse_examples() {
        let f = parse_formula("or(and(1,3),and(2,3))").unwrap();
        assert_eq!(
            f,
            Formula::Or(vec![
                Formula::And(vec![Formula::Var(1), Formula::Var(3)]),
                Formula::And(vec![Formula::Var(2), Formula::Var(3)]),
            ])
        );
        assert_eq!(
            parse_formula("thr2(1,2,3)").unwrap(),
            Formula::Threshold(2, vec![Formula::Var(1), Formula::Var(2), Formula::Var(3)])
        );
        assert_eq!(
            parse_formula("and(1"),
            Err(FormulaError::Syntax {
                pos: 5,
                expected: "','"
            })
        );
        assert_eq!(
            parse_formula(" or ( 1 , 2 ) ").unwrap().to_string(),
            "or(1,2)"
        );
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_formula("thr4(1,2,3)"),
            Err(FormulaError::ThresholdRange { k: 4, arity: 3 })
        );
        assert!(matches!(
            parse_formula("thr0(1,2)"),
            Err(FormulaError::ThresholdRange { .. })
        ));
        assert!(parse_formula("and(1)").is_err());
        assert!(parse_formula("0").is_err());
        assert!(parse_formula("1 2").is_err());
        assert!(parse_formula("xor(1,2)").is_err());
        assert!(parse_formula("").is_err());
    }

    #[test]
    fn eval_examples() {
        let f = parse_formula("or(and(1,3),and(2,3))").unwrap();
        assert!(f.eval(set(&[2, 3])));
        assert!(!f.eval(set(&[1, 2])));
        let t = parse_formula("thr2(1,2,3)").unwrap();
        assert!(!t.eval(set(&[1])));
        assert!(t.eval(set(&[1, 3])));
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = (1usize..=6).prop_map(Formula::Var);
        leaf.prop_recursive(3, 24, 4, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
                proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
                proptest::collection::vec(inner, 2..4)
                    .prop_flat_map(|cs| (1..=cs.len(), Just(cs)))
                    .prop_map(|(k, cs)| Formula::Threshold(k, cs)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(f in arb_formula()) {
            prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }

        #[test]
        fn eval_is_monotone(f in arb_formula(), a in 0u32..64, extra in 0u32..64) {
            let small = PlayerSet::from_bits(a);
            let big = PlayerSet::from_bits(a | extra);
            prop_assert!(!f.eval(small) || f.eval(big));
        }
    }
}
