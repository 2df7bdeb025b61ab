//! Classical secret sharing from a span program.
//!
//! Dealing maps `(s, a_2, ..., a_e)` to `ŝ = M·(s, a)`; row `l` goes to
//! player `ψ(l)`. Randomness is always an explicit argument so that the
//! exhaustive verifier and the tests see every deal.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::galois::{Field, FieldElement, GaloisError, Matrix};
use crate::msp::Msp;
use crate::rng::{self, SeededRng};
use crate::structures::PlayerSet;

/// Upper bound on the number of `(s, a)` deals [`verify_classical`] will
/// enumerate.
pub const DEAL_GUARD: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassicalError {
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error("expected {expected} random field elements, got {actual}")]
    RandomnessLength { expected: usize, actual: usize },
    #[error("secret lives in GF({actual}) but the program is over GF({expected})")]
    FieldMismatch { expected: u32, actual: u32 },
    #[error("set cannot reconstruct: {0}")]
    Unqualified(PlayerSet),
    #[error("missing share for row {0}")]
    MissingShare(usize),
    #[error("share for row {0} is not held by the reconstructing set")]
    UnexpectedShare(usize),
    #[error("{0} is not in the adversary structure")]
    NotAdversarial(PlayerSet),
    #[error("complement of {0} cannot reconstruct, so it is not in the dual structure")]
    NotInDual(PlayerSet),
    #[error("{deals} deals exceed the enumeration guard of {DEAL_GUARD}; use a smaller field")]
    EnumerationGuard { deals: u64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// The dealt vector `ŝ = M·s_*`, with the row labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareVector {
    field: Field,
    entries: Vec<u16>,
    labels: Vec<usize>,
}

impl ShareVector {
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn entries(&self) -> &[u16] {
        &self.entries
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Shares held by `b`, keyed by 0-based row index.
    pub fn view(&self, b: PlayerSet) -> BTreeMap<usize, u16> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(r, _)| b.contains(self.labels[*r]))
            .map(|(r, &v)| (r, v))
            .collect()
    }

    /// Share file: a `field <p>` header then `share <player> <row> <value>`
    /// lines with 1-based row indices. `comment` lines are written first,
    /// prefixed by `#`.
    pub fn to_text(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "field {}", self.field.order());
        for (r, (&v, &p)) in self.entries.iter().zip(&self.labels).enumerate() {
            let _ = writeln!(out, "share {p} {} {v}", r + 1);
        }
        out
    }
}

/// Parsed share file: field plus `(player, 0-based row) -> value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareFile {
    pub field: Field,
    pub shares: BTreeMap<usize, (usize, u16)>,
}

impl ShareFile {
    pub fn parse(text: &str) -> Result<Self, ClassicalError> {
        let mut field = None;
        let mut shares = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |msg: &str| ClassicalError::Parse {
                line,
                msg: msg.to_string(),
            };
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            match toks.as_slice() {
                ["field", p] => {
                    let p: u32 = p.parse().map_err(|_| err("invalid field"))?;
                    field = Some(Field::new(p)?);
                }
                ["share", player, row, value] => {
                    let k = field.ok_or_else(|| err("share before field header"))?;
                    let player: usize = player.parse().map_err(|_| err("invalid player"))?;
                    let row: usize = row.parse().map_err(|_| err("invalid row index"))?;
                    let value: i64 = value.parse().map_err(|_| err("invalid value"))?;
                    if row == 0 {
                        return Err(err("row indices are 1-based"));
                    }
                    if shares.insert(row - 1, (player, k.reduce(value))).is_some() {
                        return Err(err("duplicate row"));
                    }
                }
                _ => {
                    return Err(err(
                        "expected 'field <p>' or 'share <player> <row> <value>'",
                    ))
                }
            }
        }
        let field = field.ok_or(ClassicalError::Parse {
            line: 0,
            msg: "missing field header".into(),
        })?;
        Ok(ShareFile { field, shares })
    }

    /// Row values of the rows owned by `b`, checking labels against `msp`.
    pub fn view(&self, msp: &Msp, b: PlayerSet) -> Result<BTreeMap<usize, u16>, ClassicalError> {
        if self.field != msp.field() {
            return Err(ClassicalError::FieldMismatch {
                expected: msp.field().order(),
                actual: self.field.order(),
            });
        }
        let mut out = BTreeMap::new();
        for (&row, &(player, value)) in &self.shares {
            if !b.contains(player) {
                continue;
            }
            if msp.labels().get(row) != Some(&player) {
                return Err(ClassicalError::UnexpectedShare(row));
            }
            out.insert(row, value);
        }
        Ok(out)
    }
}

/// `M·(s, a)`.
pub fn share(
    msp: &Msp,
    secret: FieldElement,
    randomness: &[u16],
) -> Result<ShareVector, ClassicalError> {
    share_with(msp.matrix(), msp, secret, randomness)
}

fn share_with(
    dealer: &Matrix,
    msp: &Msp,
    secret: FieldElement,
    randomness: &[u16],
) -> Result<ShareVector, ClassicalError> {
    let field = msp.field();
    if secret.field() != field {
        return Err(ClassicalError::FieldMismatch {
            expected: field.order(),
            actual: secret.field().order(),
        });
    }
    if randomness.len() + 1 != msp.cols() {
        return Err(ClassicalError::RandomnessLength {
            expected: msp.cols() - 1,
            actual: randomness.len(),
        });
    }
    let mut s_star = Vec::with_capacity(msp.cols());
    s_star.push(secret.value());
    s_star.extend(randomness.iter().map(|&a| field.reduce(i64::from(a))));
    Ok(ShareVector {
        field,
        entries: dealer.mul_vec(&s_star)?,
        labels: msp.labels().to_vec(),
    })
}

/// Draws the `e - 1` random coordinates from `rng`.
pub fn sample_randomness(msp: &Msp, rng: &mut SeededRng) -> Vec<u16> {
    let p = u64::from(msp.field().order());
    (1..msp.cols()).map(|_| rng::below(rng, p) as u16).collect()
}

/// Recovers the secret as `u_1^T · ŝ_Q` where `u_1^T M_Q = ε^T`.
///
/// No consistency checking: tampered shares give an unflagged wrong value.
pub fn reconstruct(
    msp: &Msp,
    q: PlayerSet,
    shares: &BTreeMap<usize, u16>,
) -> Result<FieldElement, ClassicalError> {
    let rows = msp.row_indices(q);
    if let Some(&extra) = shares.keys().find(|r| !rows.contains(r)) {
        return Err(ClassicalError::UnexpectedShare(extra));
    }
    let values: Vec<u16> = rows
        .iter()
        .map(|r| {
            shares
                .get(r)
                .copied()
                .ok_or(ClassicalError::MissingShare(*r))
        })
        .collect::<Result<_, _>>()?;
    let u1 = msp
        .matrix()
        .select_rows(&rows)
        .solve_left(&msp.target())?
        .ok_or(ClassicalError::Unqualified(q))?;
    let field = msp.field();
    Ok(field.element(i64::from(field.dot(&u1, &values))))
}

/// The invertible transformation on the shares of `A = P - B` whose first
/// output is the secret and whose other outputs, together with the shares
/// of `B`, are independent of the secret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionPlan {
    b: PlayerSet,
    a_rows: Vec<usize>,
    b_rows: Vec<usize>,
    u: Matrix,
    witness: Vec<u16>,
}

impl ReconstructionPlan {
    pub fn erased(&self) -> PlayerSet {
        self.b
    }

    /// Rows held by `A`, in order; `U` acts on these coordinates.
    pub fn a_rows(&self) -> &[usize] {
        &self.a_rows
    }

    pub fn b_rows(&self) -> &[usize] {
        &self.b_rows
    }

    /// `U`, an `m × m` invertible matrix.
    pub fn matrix(&self) -> &Matrix {
        &self.u
    }

    pub fn u1(&self) -> &[u16] {
        self.u.row(0)
    }

    /// `v` with `M_B v = 0` and `ε^T v = 1`.
    pub fn witness(&self) -> &[u16] {
        &self.witness
    }

    /// `U · x` on the `A` coordinates.
    pub fn apply(&self, a_shares: &[u16]) -> Vec<u16> {
        self.u
            .mul_vec(a_shares)
            .expect("plan dimensions are consistent")
    }
}

/// Builds `U` for `b ∈ 𝒜 ∩ 𝒜*`. The construction reads only the program
/// and `b`.
pub fn build_reconstruction_plan(
    msp: &Msp,
    b: PlayerSet,
) -> Result<ReconstructionPlan, ClassicalError> {
    let n = msp.players();
    let a = b.complement(n);
    let a_rows = msp.row_indices(a);
    let b_rows = msp.row_indices(b);
    let m_a = msp.matrix().select_rows(&a_rows);
    let m_b = msp.matrix().select_rows(&b_rows);
    let eps = msp.target();

    let witness = m_b
        .kernel_witness(&eps)?
        .ok_or(ClassicalError::NotAdversarial(b))?;
    let u1 = m_a.solve_left(&eps)?.ok_or(ClassicalError::NotInDual(b))?;

    let field = msp.field();
    let w = m_a.mul_vec(&witness)?;
    let mut rows = vec![u1.clone()];
    rows.extend(Matrix::from_data(field, 1, w.len(), w.clone())?.kernel_basis());
    let m = a_rows.len();
    let data: Vec<u16> = rows.concat();
    let u = Matrix::from_data(field, rows.len(), m, data)?;

    // u1 · w = ε · v = 1, so u1 is outside W and U is invertible.
    assert_eq!(field.dot(&u1, &w), 1, "u1 must not lie in W");
    assert!(
        u.is_invertible(),
        "reconstruction matrix must be invertible"
    );
    Ok(ReconstructionPlan {
        b,
        a_rows,
        b_rows,
        u,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassicalFailure {
    /// The full player set cannot reconstruct at all.
    Degenerate,
    /// A qualified set recovered the wrong value.
    Reconstruction {
        set: PlayerSet,
        secret: u16,
        randomness: Vec<u16>,
        recovered: u16,
    },
    /// An adversary set sees differently distributed shares for two
    /// secrets.
    Secrecy { set: PlayerSet, secrets: (u16, u16) },
}

/// Outcome of [`verify_classical`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalReport {
    pub deals: u64,
    pub qualified_sets: usize,
    pub adversary_sets: usize,
    pub failure: Option<ClassicalFailure>,
}

impl ClassicalReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Deals every `(s, a)` and checks that qualified sets reconstruct and
/// that every adversary set's view is distributed independently of `s`.
pub fn verify_classical(msp: &Msp) -> Result<ClassicalReport, ClassicalError> {
    verify_dealing(msp, msp.matrix())
}

/// [`verify_classical`] with shares dealt by `dealer` instead of the
/// program's own matrix, while reconstruction and the structure still come
/// from `msp`.
pub fn verify_dealing(msp: &Msp, dealer: &Matrix) -> Result<ClassicalReport, ClassicalError> {
    let field = msp.field();
    let p = u64::from(field.order());
    let e = msp.cols();
    let deals = p.checked_pow(e as u32).filter(|&d| d <= DEAL_GUARD).ok_or(
        ClassicalError::EnumerationGuard {
            deals: p.saturating_pow(e as u32),
        },
    )?;
    if dealer.rows() != msp.rows() || dealer.cols() != e {
        return Err(GaloisError::DimensionMismatch {
            expected: msp.rows() * e,
            actual: dealer.rows() * dealer.cols(),
        }
        .into());
    }

    let n = msp.players();
    let structure = msp.structure();
    let mut report = ClassicalReport {
        deals,
        qualified_sets: 0,
        adversary_sets: structure.maximal_sets().len(),
        failure: None,
    };
    if structure.is_member(PlayerSet::full(n)) {
        report.failure = Some(ClassicalFailure::Degenerate);
        return Ok(report);
    }

    let eps = msp.target();
    let qualified: Vec<(PlayerSet, Vec<usize>, Vec<u16>)> = PlayerSet::all_subsets(n)
        .filter(|&q| !structure.is_member(q))
        .map(|q| {
            let rows = msp.row_indices(q);
            let u1 = msp
                .matrix()
                .select_rows(&rows)
                .solve_left(&eps)
                .expect("dimensions match")
                .expect("qualified set spans the target");
            (q, rows, u1)
        })
        .collect();
    report.qualified_sets = qualified.len();

    let views: Vec<(PlayerSet, Vec<usize>)> = structure
        .maximal_sets()
        .iter()
        .map(|&b| (b, msp.row_indices(b)))
        .collect();
    // views[i][s] : multiset of the B-share tuples dealt for secret s
    let mut histograms: Vec<Vec<HashMap<Vec<u16>, u32>>> =
        vec![vec![HashMap::new(); p as usize]; views.len()];

    let mut s_star = vec![0u16; e];
    for _ in 0..deals {
        let shares = dealer.mul_vec(&s_star)?;
        let s = s_star[0];
        for (q, rows, u1) in &qualified {
            let got: Vec<u16> = rows.iter().map(|&r| shares[r]).collect();
            let recovered = field.dot(u1, &got);
            if recovered != s && report.failure.is_none() {
                report.failure = Some(ClassicalFailure::Reconstruction {
                    set: *q,
                    secret: s,
                    randomness: s_star[1..].to_vec(),
                    recovered,
                });
            }
        }
        for ((_, rows), hist) in views.iter().zip(histograms.iter_mut()) {
            let tuple: Vec<u16> = rows.iter().map(|&r| shares[r]).collect();
            *hist[s as usize].entry(tuple).or_default() += 1;
        }
        increment(&mut s_star, field);
    }
    if report.failure.is_none() {
        for ((b, _), hist) in views.iter().zip(&histograms) {
            if let Some(s) = (1..hist.len()).find(|&s| hist[s] != hist[0]) {
                report.failure = Some(ClassicalFailure::Secrecy {
                    set: *b,
                    secrets: (0, s as u16),
                });
                break;
            }
        }
    }
    Ok(report)
}

/// Odometer over `K^e`: the last coordinate moves fastest, the secret
/// coordinate slowest.
pub(crate) fn increment(v: &mut [u16], field: Field) {
    for x in v.iter_mut().rev() {
        *x = field.add(*x, 1);
        if *x != 0 {
            return;
        }
    }
}
