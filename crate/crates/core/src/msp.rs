//! Monotone span programs `(K, M, ψ)`.
//!
//! Column 0 of `M` is the secret coordinate; a player set `B` computes the
//! program when the target `ε = (1, 0, ..., 0)` lies in the row space of
//! `M_B`. Constructors compose programs by the standard insertion
//! technique: a gate is itself a small program whose row `j` is expanded
//! into the rows of child `j`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::galois::{Field, GaloisError, Matrix};
use crate::structures::{AdversaryStructure, Formula, PlayerSet, StructureError, MAX_PLAYERS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MspError {
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("matrix has rank {rank} but {cols} columns; columns must be independent")]
    RankDeficient { rank: usize, cols: usize },
    #[error("a span program needs at least one column")]
    NoColumns,
    #[error("{labels} labels for {rows} rows")]
    LabelCount { labels: usize, rows: usize },
    #[error("row {row} labeled with player {player}, outside 1..={n}")]
    LabelOutOfRange { row: usize, player: usize, n: usize },
    #[error("player count {0} outside 1..={MAX_PLAYERS}")]
    PlayerCount(usize),
    #[error("field too small: GF({p}) needs more than {needed} distinct nonzero points")]
    FieldTooSmall { p: u32, needed: usize },
    #[error("degree {k} must be below the player count {n}")]
    Degree { k: usize, n: usize },
    #[error("formula mentions player {player} but only {n} players exist")]
    FormulaPlayers { player: usize, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A monotone span program.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Msp {
    matrix: Matrix,
    labels: Vec<usize>,
    n: usize,
}

impl Msp {
    /// Validates the labeling and full column rank.
    pub fn new(matrix: Matrix, labels: Vec<usize>, n: usize) -> Result<Self, MspError> {
        let msp = Self::from_parts_unchecked(matrix, labels, n)?;
        let rank = msp.matrix.rank();
        if rank != msp.matrix.cols() {
            return Err(MspError::RankDeficient {
                rank,
                cols: msp.matrix.cols(),
            });
        }
        Ok(msp)
    }

    /// Like [`Msp::new`] but without the column-rank check; meant for
    /// fault-injection in verification tests.
    pub fn from_parts_unchecked(
        matrix: Matrix,
        labels: Vec<usize>,
        n: usize,
    ) -> Result<Self, MspError> {
        if !(1..=MAX_PLAYERS).contains(&n) {
            return Err(MspError::PlayerCount(n));
        }
        if matrix.cols() == 0 {
            return Err(MspError::NoColumns);
        }
        if labels.len() != matrix.rows() {
            return Err(MspError::LabelCount {
                labels: labels.len(),
                rows: matrix.rows(),
            });
        }
        if let Some((row, &player)) = labels.iter().enumerate().find(|(_, &p)| p == 0 || p > n) {
            return Err(MspError::LabelOutOfRange { row, player, n });
        }
        Ok(Msp { matrix, labels, n })
    }

    /// Shamir sharing of degree `k` among `n` players: row `i` is
    /// `(1, i, i^2, ..., i^k)`.
    pub fn shamir(n: usize, k: usize, field: Field) -> Result<Self, MspError> {
        if field.order() as usize <= n {
            return Err(MspError::FieldTooSmall {
                p: field.order(),
                needed: n,
            });
        }
        if k >= n {
            return Err(MspError::Degree { k, n });
        }
        Self::new(vandermonde(field, n, k + 1), (1..=n).collect(), n)
    }

    /// The one-row program `M = [1]` owned by `player`.
    pub fn single(player: usize, n: usize, field: Field) -> Result<Self, MspError> {
        Self::new(Matrix::identity(field, 1), vec![player], n)
    }

    pub fn field(&self) -> Field {
        self.matrix.field()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Player owning each row (1-based players, 0-based rows).
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn players(&self) -> usize {
        self.n
    }

    /// `d`, the number of shares.
    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    /// `e`, the number of columns.
    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target(&self) -> Vec<u16> {
        let mut eps = vec![0u16; self.cols()];
        eps[0] = 1;
        eps
    }

    /// Indices of the rows labeled into `b`, in order.
    pub fn row_indices(&self, b: PlayerSet) -> Vec<usize> {
        (0..self.rows())
            .filter(|&r| b.contains(self.labels[r]))
            .collect()
    }

    /// `M_B`.
    pub fn rows_of(&self, b: PlayerSet) -> Matrix {
        self.matrix.select_rows(&self.row_indices(b))
    }

    /// `f(B)`: whether `ε` lies in the row space of `M_B`.
    ///
    /// Both sides of `Im(M_B^T) = ker(M_B)^⊥` are evaluated; a disagreement
    /// means the linear algebra is broken and panics.
    pub fn eval(&self, b: PlayerSet) -> bool {
        let mb = self.rows_of(b);
        let eps = self.target();
        let spans = mb.solve_left(&eps).expect("dimensions match").is_some();
        let witness = mb.kernel_witness(&eps).expect("dimensions match").is_some();
        assert_ne!(
            spans, witness,
            "span and kernel criteria disagree for {b} (linear algebra bug)"
        );
        spans
    }

    /// The adversary structure `f^{-1}(0)`.
    pub fn structure(&self) -> AdversaryStructure {
        AdversaryStructure::from_predicate(self.n, |b| !self.eval(b))
            .expect("player count validated at construction")
    }

    /// Same program viewed over `n >= self.players()` players.
    pub fn with_players(&self, n: usize) -> Result<Self, MspError> {
        Self::new(self.matrix.clone(), self.labels.clone(), n)
    }

    /// Insertion composition: row `j` of `gate` is replaced by the rows of
    /// `children[j]`, whose secret column is multiplied into the gate row
    /// and whose remaining columns get a fresh block.
    pub fn compose(gate: &Matrix, children: &[Msp], n: usize) -> Result<Self, MspError> {
        if gate.rows() != children.len() {
            return Err(MspError::LabelCount {
                labels: children.len(),
                rows: gate.rows(),
            });
        }
        let k = gate.field();
        let extra: usize = children.iter().map(|c| c.cols() - 1).sum();
        let width = gate.cols() + extra;
        let total_rows: usize = children.iter().map(Msp::rows).sum();
        let mut data = Vec::with_capacity(total_rows * width);
        let mut labels = Vec::with_capacity(total_rows);
        let mut offset = gate.cols();
        for (j, child) in children.iter().enumerate() {
            if child.field() != k {
                return Err(GaloisError::FieldMismatch(k.order(), child.field().order()).into());
            }
            for (r, row) in child.matrix.row_iter().enumerate() {
                let mut out = vec![0u16; width];
                for (o, &g) in out.iter_mut().zip(gate.row(j)) {
                    *o = k.mul(row[0], g);
                }
                out[offset..offset + child.cols() - 1].copy_from_slice(&row[1..]);
                data.extend(out);
                labels.push(child.labels[r]);
            }
            offset += child.cols() - 1;
        }
        Self::new(Matrix::from_data(k, total_rows, width, data)?, labels, n)
    }

    /// Any child suffices: every child receives the secret itself.
    pub fn or(children: &[Msp], n: usize) -> Result<Self, MspError> {
        let field = first_field(children)?;
        let gate = Matrix::from_data(field, children.len(), 1, vec![1; children.len()])?;
        Self::compose(&gate, children, n)
    }

    /// All children needed: the secret is split additively.
    pub fn and(children: &[Msp], n: usize) -> Result<Self, MspError> {
        let field = first_field(children)?;
        let a = children.len();
        let mut gate = Matrix::zeros(field, a, a);
        for j in 0..a - 1 {
            gate.set(j, j + 1, 1);
        }
        gate.set(a - 1, 0, 1);
        for c in 1..a {
            gate.set(a - 1, c, -1);
        }
        Self::compose(&gate, children, n)
    }

    /// At least `k` children needed: a Vandermonde gate at points `1..=a`.
    pub fn threshold(k: usize, children: &[Msp], n: usize) -> Result<Self, MspError> {
        let field = first_field(children)?;
        let a = children.len();
        if field.order() as usize <= a {
            return Err(MspError::FieldTooSmall {
                p: field.order(),
                needed: a,
            });
        }
        if k == 0 || k > a {
            return Err(MspError::Degree { k, n: a });
        }
        Self::compose(&vandermonde(field, a, k), children, n)
    }

    /// Compiles a formula over `max_player(formula)` players.
    pub fn compile(formula: &Formula, field: Field) -> Result<Self, MspError> {
        Self::compile_with_players(formula, formula.max_player(), field)
    }

    pub fn compile_with_players(
        formula: &Formula,
        n: usize,
        field: Field,
    ) -> Result<Self, MspError> {
        let needed = formula.max_threshold_arity();
        if needed > 0 && field.order() as usize <= needed {
            return Err(MspError::FieldTooSmall {
                p: field.order(),
                needed,
            });
        }
        if formula.max_player() > n {
            return Err(MspError::FormulaPlayers {
                player: formula.max_player(),
                n,
            });
        }
        let compile_all = |cs: &[Formula]| -> Result<Vec<Msp>, MspError> {
            cs.iter()
                .map(|c| Self::compile_with_players(c, n, field))
                .collect()
        };
        match formula {
            Formula::Var(i) => Self::single(*i, n, field),
            Formula::Or(cs) => Self::or(&compile_all(cs)?, n),
            Formula::And(cs) => Self::and(&compile_all(cs)?, n),
            Formula::Threshold(k, cs) => Self::threshold(*k, &compile_all(cs)?, n),
        }
    }

    /// A program for the dual function `f*(B) = ¬f(B^c)`, using the
    /// default [`EnumerativeDualizer`].
    pub fn dual(&self) -> Result<Self, MspError> {
        self.dual_with(&EnumerativeDualizer)
    }

    pub fn dual_with(&self, dualizer: &dyn Dualizer) -> Result<Self, MspError> {
        dualizer.dual(self)
    }

    /// Program over `n + 1` players (player `n + 1` is τ) for the self-dual
    /// extension, computing `f ∨ (f* ∧ f_τ)`.
    pub fn extend(&self) -> Result<Self, MspError> {
        self.extend_with(&EnumerativeDualizer)
    }

    pub fn extend_with(&self, dualizer: &dyn Dualizer) -> Result<Self, MspError> {
        if !self.structure().is_q2star() {
            return Err(StructureError::NotQ2Star.into());
        }
        let n = self.n + 1;
        if n > MAX_PLAYERS {
            return Err(MspError::PlayerCount(n));
        }
        let field = self.field();
        let dual = self.dual_with(dualizer)?.with_players(n)?;
        let tau = Self::single(n, n, field)?;
        let guarded = Self::and(&[dual, tau], n)?;
        Self::or(&[self.with_players(n)?, guarded], n)
    }

    /// Text dump: `msp field=<p> d=<d> e=<e> n=<n>` followed by one
    /// `row <player> <entries...>` line per row.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "msp field={} d={} e={} n={}\n",
            self.field().order(),
            self.rows(),
            self.cols(),
            self.n
        );
        for (r, row) in self.matrix.row_iter().enumerate() {
            let _ = write!(out, "row {}", self.labels[r]);
            for v in row {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, MspError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(MspError::Parse {
            line: 0,
            msg: "empty input".into(),
        })?;
        let perr = |line: usize, msg: &str| MspError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut toks = header.split_whitespace();
        if toks.next() != Some("msp") {
            return Err(perr(hline, "expected 'msp' header"));
        }
        let mut fields = [None; 4];
        for tok in toks {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| perr(hline, "expected key=value"))?;
            let slot = ["field", "d", "e", "n"]
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| perr(hline, "unknown header key"))?;
            let v: usize = value
                .parse()
                .map_err(|_| perr(hline, "header value is not an integer"))?;
            fields[slot] = Some(v);
        }
        let [Some(p), Some(d), Some(e), Some(n)] = fields else {
            return Err(perr(hline, "header needs field, d, e and n"));
        };
        let field = Field::new(p as u32)?;
        let mut data = Vec::with_capacity(d * e);
        let mut labels = Vec::with_capacity(d);
        for (line, content) in lines {
            let mut toks = content.split_whitespace();
            if toks.next() != Some("row") {
                return Err(perr(line, "expected 'row'"));
            }
            let nums: Result<Vec<i64>, _> = toks.map(str::parse::<i64>).collect();
            let nums = nums.map_err(|_| perr(line, "non-integer entry"))?;
            if nums.len() != e + 1 {
                return Err(perr(line, "wrong number of entries"));
            }
            if nums[0] < 1 {
                return Err(perr(line, "player id must be positive"));
            }
            labels.push(nums[0] as usize);
            data.extend(nums[1..].iter().map(|&v| field.reduce(v)));
        }
        if labels.len() != d {
            return Err(perr(hline, "row count does not match d"));
        }
        Self::new(Matrix::from_data(field, d, e, data)?, labels, n)
    }
}

/// Strategy for building a program that computes the dual function.
pub trait Dualizer {
    fn dual(&self, msp: &Msp) -> Result<Msp, MspError>;
}

/// Computes the dual structure by subset enumeration and compiles the
/// disjunction of its minimal qualified sets.
///
/// Correct for any input, but the output can be exponentially larger than
/// the input; a size-preserving construction can be plugged in through
/// [`Dualizer`].
#[derive(Debug, Clone, Copy, Default)]
pub struct EnumerativeDualizer;

impl Dualizer for EnumerativeDualizer {
    fn dual(&self, msp: &Msp) -> Result<Msp, MspError> {
        let n = msp.players();
        let dual = msp.structure().dual();
        let minimal: Vec<PlayerSet> = PlayerSet::all_subsets(n)
            .filter(|&b| {
                !dual.is_member(b)
                    && b.players().all(|p| {
                        dual.is_member(PlayerSet::from_bits(
                            b.bits() & !PlayerSet::singleton(p).bits(),
                        ))
                    })
            })
            .collect();
        let formula = Formula::dnf(&minimal).ok_or(MspError::NoColumns)?;
        Msp::compile_with_players(&formula, n, msp.field())
    }
}

fn first_field(children: &[Msp]) -> Result<Field, MspError> {
    children.first().map(Msp::field).ok_or(MspError::NoColumns)
}

/// `rows × cols` Vandermonde matrix at points `1..=rows`.
fn vandermonde(field: Field, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::zeros(field, rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(
                r,
                c,
                i64::from(field.pow(field.reduce(r as i64 + 1), c as u32)),
            );
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::parse_formula;

    fn gf(p: u32) -> Field {
        Field::new(p).unwrap()
    }

    fn set(players: &[usize]) -> PlayerSet {
        PlayerSet::from_players(players.iter().copied())
    }

    fn structure(n: usize, maximal: &[&[usize]]) -> AdversaryStructure {
        let sets: Vec<PlayerSet> = maximal.iter().map(|m| set(m)).collect();
        AdversaryStructure::new(n, &sets).unwrap()
    }

    fn compile(text: &str, p: u32) -> Msp {
        Msp::compile(&parse_formula(text).unwrap(), gf(p)).unwrap()
    }

    fn same_function(a: &Msp, b: &Msp) -> bool {
        a.players() == b.players()
            && PlayerSet::all_subsets(a.players()).all(|s| a.eval(s) == b.eval(s))
    }

    #[test]
    fn rows_of_examples() {
        let sh = Msp::shamir(3, 1, gf(5)).unwrap();
        assert_eq!(
            sh.rows_of(set(&[2, 3])),
            Matrix::from_rows(gf(5), &[[1, 2], [1, 3]]).unwrap()
        );
        let empty = sh.rows_of(PlayerSet::EMPTY);
        assert_eq!((empty.rows(), empty.cols()), (0, 2));
        assert_eq!(sh.rows_of(PlayerSet::full(3)), *sh.matrix());
    }

    #[test]
    fn eval_examples() {
        let sh = Msp::shamir(3, 1, gf(5)).unwrap();
        assert!(sh.eval(set(&[2, 3])));
        assert!(!sh.eval(set(&[1])));
        assert!(!sh.eval(PlayerSet::EMPTY));
    }

    #[test]
    fn structure_examples() {
        let sh = Msp::shamir(3, 1, gf(5)).unwrap();
        assert_eq!(sh.structure(), AdversaryStructure::threshold(3, 1).unwrap());
        assert_eq!(
            compile("and(1,2)", 5).structure(),
            structure(2, &[&[1], &[2]])
        );
        let one = Msp::single(1, 1, gf(5)).unwrap();
        assert_eq!(one.structure().maximal_sets(), &[PlayerSet::EMPTY]);
    }

    #[test]
    fn shamir_examples() {
        let sh = Msp::shamir(3, 1, gf(5)).unwrap();
        assert_eq!(
            *sh.matrix(),
            Matrix::from_rows(gf(5), &[[1, 1], [1, 2], [1, 3]]).unwrap()
        );
        assert_eq!(sh.labels(), &[1, 2, 3]);
        assert!(matches!(
            Msp::shamir(3, 1, gf(3)),
            Err(MspError::FieldTooSmall { .. })
        ));
        let trivial = Msp::shamir(1, 0, gf(2)).unwrap();
        assert_eq!(*trivial.matrix(), Matrix::identity(gf(2), 1));
        assert!(matches!(
            Msp::shamir(3, 3, gf(5)),
            Err(MspError::Degree { .. })
        ));
    }

    #[test]
    fn compile_examples() {
        let f = compile("or(and(1,3),and(2,3))", 5);
        assert_eq!(f.structure(), structure(3, &[&[1, 2], &[3]]));
        let v = compile("1", 5);
        assert_eq!(*v.matrix(), Matrix::identity(gf(5), 1));
        assert_eq!(v.labels(), &[1]);
        let t = compile("thr2(1,2,3)", 5);
        assert!(same_function(&t, &Msp::shamir(3, 1, gf(5)).unwrap()));
        assert!(matches!(
            Msp::compile(&parse_formula("thr2(1,2,3)").unwrap(), gf(2)),
            Err(MspError::FieldTooSmall { .. })
        ));
    }

    #[test]
    fn dual_examples() {
        let d = compile("and(1,2)", 5).dual().unwrap();
        assert!(same_function(&d, &compile("or(1,2)", 5)));
        let sh = Msp::shamir(3, 1, gf(5)).unwrap();
        assert!(same_function(&sh.dual().unwrap(), &sh));
        let g = compile("or(and(1,3),thr2(1,2,4))", 5);
        assert!(same_function(&g.dual().unwrap().dual().unwrap(), &g));
    }

    #[test]
    fn extend_examples() {
        let f = compile("or(and(1,3),and(2,3))", 5).extend().unwrap();
        assert_eq!(
            f.structure(),
            structure(4, &[&[1, 2], &[3], &[1, 4], &[2, 4]])
        );
        let sh = Msp::shamir(3, 1, gf(5)).unwrap().extend().unwrap();
        assert_eq!(sh.structure(), structure(4, &[&[1, 4], &[2, 4], &[3, 4]]));
        let one_of_two = Msp::shamir(2, 0, gf(5)).unwrap();
        assert_eq!(
            one_of_two.extend(),
            Err(MspError::Structure(StructureError::NotQ2Star))
        );
    }

    #[test]
    fn construction_rejects_bad_programs() {
        let k = gf(5);
        let dep = Matrix::from_rows(k, &[[1, 2], [2, 4]]).unwrap();
        assert!(matches!(
            Msp::new(dep.clone(), vec![1, 2], 2),
            Err(MspError::RankDeficient { rank: 1, cols: 2 })
        ));
        assert!(Msp::from_parts_unchecked(dep, vec![1, 2], 2).is_ok());
        let id = Matrix::identity(k, 2);
        assert!(matches!(
            Msp::new(id.clone(), vec![1, 3], 2),
            Err(MspError::LabelOutOfRange { .. })
        ));
        assert!(matches!(
            Msp::new(id, vec![1], 2),
            Err(MspError::LabelCount { .. })
        ));
    }

    #[test]
    fn dump_round_trips() {
        let g = compile("or(and(1,3),thr2(1,2,4))", 7);
        let text = g.to_text();
        assert!(text.starts_with("msp field=7 d="));
        assert_eq!(Msp::parse(&text).unwrap(), g);
        let sh = Msp::shamir(3, 1, gf(5)).unwrap();
        assert_eq!(
            sh.to_text(),
            "msp field=5 d=3 e=2 n=3\nrow 1 1 1\nrow 2 1 2\nrow 3 1 3\n"
        );
    }

    #[test]
    fn parse_rejects_malformed_dumps() {
        assert!(Msp::parse("").is_err());
        assert!(Msp::parse("msp field=5 d=1 e=1\nrow 1 1\n").is_err());
        assert!(Msp::parse("msp field=6 d=1 e=1 n=1\nrow 1 1\n").is_err());
        assert!(Msp::parse("msp field=5 d=2 e=1 n=1\nrow 1 1\n").is_err());
        assert!(Msp::parse("msp field=5 d=1 e=1 n=1\nrow 1 1 1\n").is_err());
        assert!(Msp::parse("msp field=5 d=1 e=1 n=1\nrow 0 1\n").is_err());
        assert!(Msp::parse("msp field=5 d=1 e=1 n=1\nrow 1 x\n").is_err());
        assert!(Msp::parse("msp field=5 d=1 e=1 n=1\nrow 1 0\n").is_err());
    }
}
