use std::fmt::Write as _;

use num_complex::Complex;
use num_traits::Float;

use super::encode::{apply_plan, qencode, EncodedState};
use super::state::{fidelity, partial_trace, real, trace_distance, trace_distance_bound};
use super::state::{DensityMatrix, QuantumState};
use super::QuantumError;
use crate::classical::{build_reconstruction_plan, ReconstructionPlan};
use crate::msp::Msp;
use crate::rng::{seeded, unit};
use crate::structures::{AdversaryStructure, PlayerSet};

pub const DEFAULT_FAMILY_SEED: u64 = 2024;
pub const RANDOM_FAMILY_MEMBERS: usize = 20;

/// `1e-9`, or a few thousand ulps when the scalar cannot resolve that.
pub fn acceptance_tolerance<R: Float>() -> R {
    real::<R>(1e-9).max(R::epsilon() * real(4096.0))
}

/// Probe inputs for recovery and secrecy: every basis state, the uniform
/// superposition and a batch of seeded random states.
#[derive(Debug, Clone)]
pub struct TestFamily<R> {
    seed: u64,
    members: Vec<(String, QuantumState<R>)>,
}

impl<R: Float> TestFamily<R> {
    pub fn standard(dim: usize, seed: u64) -> Self {
        Self::with_random(dim, seed, RANDOM_FAMILY_MEMBERS)
    }

    pub fn with_random(dim: usize, seed: u64, random: usize) -> Self {
        let mut members = Vec::with_capacity(dim + 1 + random);
        for k in 0..dim {
            let state = QuantumState::basis(dim, k as u16).expect("digit in range");
            members.push((format!("basis{k}"), state));
        }
        let flat = vec![Complex::new(R::one(), R::zero()); dim];
        members.push((
            "uniform".to_string(),
            QuantumState::normalized(vec![dim], dense(&flat)).expect("nonzero"),
        ));
        let mut rng = seeded(seed);
        for i in 0..random {
            // Box-Muller pairs give a Haar-random direction after normalizing.
            let amps: Vec<Complex<R>> = (0..dim)
                .map(|_| {
                    let r = (-2.0 * (1.0 - unit(&mut rng)).ln()).sqrt();
                    let theta = std::f64::consts::TAU * unit(&mut rng);
                    Complex::new(real(r * theta.cos()), real(r * theta.sin()))
                })
                .collect();
            let state = QuantumState::normalized(vec![dim], dense(&amps)).expect("nonzero");
            members.push((format!("random{i}"), state));
        }
        TestFamily { seed, members }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn members(&self) -> &[(String, QuantumState<R>)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn dim(&self) -> Option<usize> {
        self.members.first().map(|(_, s)| s.dims()[0])
    }
}

fn dense<R: Float>(amps: &[Complex<R>]) -> std::collections::BTreeMap<Vec<u16>, Complex<R>> {
    amps.iter()
        .enumerate()
        .map(|(k, &a)| (vec![k as u16], a))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Minimum fidelity of the recovered coordinate with the input.
    Recover,
    /// Minimum purity of the recovered coordinate; 1 means the output
    /// factors across the cut.
    Factorization,
    /// Maximum pairwise trace distance of the erased or adversarial shares.
    Secrecy,
    /// The set is outside the correctable family; nothing was simulated.
    NotApplicable,
}

impl CheckKind {
    fn name(self) -> &'static str {
        match self {
            CheckKind::Recover => "recover",
            CheckKind::Factorization => "factorization",
            CheckKind::Secrecy => "secrecy",
            CheckKind::NotApplicable => "applicable",
        }
    }

    fn metric(self) -> &'static str {
        match self {
            CheckKind::Recover => "fidelity",
            CheckKind::Factorization => "purity",
            CheckKind::Secrecy => "tdist",
            CheckKind::NotApplicable => "applicable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub kind: CheckKind,
    pub set: PlayerSet,
    pub value: f64,
    /// Input (or input pair) attaining the worst value.
    pub witness: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub title: String,
    pub seed: u64,
    pub inputs: usize,
    pub records: Vec<CheckRecord>,
}

impl Report {
    fn new(title: String, family_seed: u64, inputs: usize) -> Self {
        Report {
            title,
            seed: family_seed,
            inputs,
            records: Vec::new(),
        }
    }

    /// Fail if any simulated check failed; not applicable if nothing was
    /// simulated at all.
    pub fn verdict(&self) -> Verdict {
        if self.records.iter().any(|r| !r.pass) {
            Verdict::Fail
        } else if self
            .records
            .iter()
            .all(|r| r.kind == CheckKind::NotApplicable)
        {
            Verdict::NotApplicable
        } else {
            Verdict::Pass
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict() == Verdict::Pass
    }

    pub fn records_of(&self, kind: CheckKind) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(move |r| r.kind == kind)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        let _ = writeln!(
            out,
            "test family: {} inputs, seed {}",
            self.inputs, self.seed
        );
        for r in &self.records {
            let _ = match r.kind {
                CheckKind::NotApplicable => {
                    writeln!(
                        out,
                        "  {:<13} {:<10} not applicable",
                        r.kind.name(),
                        r.set.to_string()
                    )
                }
                _ => writeln!(
                    out,
                    "  {:<13} {:<10} {} {} (worst: {}) {}",
                    r.kind.name(),
                    r.set.to_string(),
                    r.kind.metric(),
                    format_value(r.kind, r.value),
                    r.witness,
                    if r.pass { "ok" } else { "FAIL" }
                ),
            };
        }
        let verdict = match self.verdict() {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "NOT APPLICABLE",
        };
        let _ = writeln!(out, "result: {verdict}");
        out
    }

    /// One `key=value` line per check, stable across runs.
    pub fn to_machine(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "check=family seed={} inputs={}",
            self.seed, self.inputs
        );
        for r in &self.records {
            let _ = match r.kind {
                CheckKind::NotApplicable => {
                    writeln!(
                        out,
                        "check=applicable set={} applicable=false pass=na",
                        r.set
                    )
                }
                _ => writeln!(
                    out,
                    "check={} set={} {}={} pass={}",
                    r.kind.name(),
                    r.set,
                    r.kind.metric(),
                    format_value(r.kind, r.value),
                    r.pass
                ),
            };
        }
        let verdict = match self.verdict() {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not-applicable",
        };
        let _ = writeln!(out, "check=overall result={verdict}");
        out
    }
}

fn format_value(kind: CheckKind, v: f64) -> String {
    match kind {
        CheckKind::Secrecy => format!("{v:.3e}"),
        _ => format!("{v:.12}"),
    }
}

fn to_f64<R: Float>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn encode_family<R: Float>(
    msp: &Msp,
    family: &TestFamily<R>,
) -> Result<Vec<EncodedState<R>>, QuantumError> {
    if family.dim() != Some(msp.field().order() as usize) {
        return Err(QuantumError::DimensionMismatch);
    }
    family
        .members()
        .iter()
        .map(|(_, s)| qencode(msp, s))
        .collect()
}

/// Recovery and factorization records for one plan; `label` is the set
/// reported (the erased set, or the recovering set for mixed schemes).
fn recovery_records<R: Float>(
    encs: &[EncodedState<R>],
    family: &TestFamily<R>,
    plan: &ReconstructionPlan,
    label: PlayerSet,
) -> Result<[CheckRecord; 2], QuantumError> {
    let tol = acceptance_tolerance::<R>();
    let target = plan.a_rows()[0];
    let (mut fid, mut fid_at) = (R::infinity(), String::new());
    let (mut pur, mut pur_at) = (R::infinity(), String::new());
    for (enc, (name, input)) in encs.iter().zip(family.members()) {
        let out = apply_plan(enc, plan)?;
        let rho = partial_trace(&out, &[target])?;
        let f = fidelity(&rho, input)?;
        if f < fid {
            fid = f;
            fid_at = name.clone();
        }
        let p = rho.purity();
        if p < pur {
            pur = p;
            pur_at = name.clone();
        }
    }
    Ok([
        CheckRecord {
            kind: CheckKind::Recover,
            set: label,
            value: to_f64(fid),
            witness: fid_at,
            pass: fid >= R::one() - tol,
        },
        CheckRecord {
            kind: CheckKind::Factorization,
            set: label,
            value: to_f64(pur),
            witness: pur_at,
            pass: pur >= R::one() - tol,
        },
    ])
}

/// Largest pairwise trace distance between the reduced states on `rows`.
///
/// The Frobenius bound settles almost every pair; the exact spectrum is
/// computed only when the bound exceeds the tolerance, so the reported
/// value is an upper bound on the true maximum.
fn secrecy_record<R: Float>(
    encs: &[EncodedState<R>],
    family: &TestFamily<R>,
    rows: &[usize],
    set: PlayerSet,
) -> Result<CheckRecord, QuantumError> {
    let tol = acceptance_tolerance::<R>();
    let rhos: Vec<DensityMatrix<R>> = encs
        .iter()
        .map(|e| partial_trace(e.state(), rows))
        .collect::<Result<_, _>>()?;
    let names = family.members();
    let (mut worst, mut at) = (R::zero(), String::from("-"));
    for i in 0..rhos.len() {
        for j in i + 1..rhos.len() {
            let mut d = trace_distance_bound(&rhos[i], &rhos[j])?;
            if d > tol {
                d = trace_distance(&rhos[i], &rhos[j])?;
            }
            if d > worst {
                worst = d;
                at = format!("{}/{}", names[i].0, names[j].0);
            }
        }
    }
    Ok(CheckRecord {
        kind: CheckKind::Secrecy,
        set,
        value: to_f64(worst),
        witness: at,
        pass: worst <= tol,
    })
}

fn not_applicable(set: PlayerSet) -> CheckRecord {
    CheckRecord {
        kind: CheckKind::NotApplicable,
        set,
        value: f64::NAN,
        witness: String::new(),
        pass: true,
    }
}

/// Encodes every family member, erases `b`, recovers from the rest and
/// compares the states of `b` pairwise. Sets outside `𝒜 ∩ 𝒜*` yield a
/// not-applicable report rather than a failure.
pub fn verify_erasure<R: Float>(
    msp: &Msp,
    b: PlayerSet,
    family: &TestFamily<R>,
) -> Result<Report, QuantumError> {
    let mut report = Report::new(format!("erasure of {b}"), family.seed(), family.len());
    let structure = msp.structure();
    if b.max_player() > msp.players() || !structure.is_member(b) || !structure.dual().is_member(b) {
        report.records.push(not_applicable(b));
        return Ok(report);
    }
    let plan = build_reconstruction_plan(msp, b)?;
    let encs = encode_family(msp, family)?;
    report
        .records
        .extend(recovery_records(&encs, family, &plan, b)?);
    report
        .records
        .push(secrecy_record(&encs, family, &msp.row_indices(b), b)?);
    Ok(report)
}

/// A pure-state scheme: the program's structure is self-dual, so every
/// adversary set is also correctable as an erasure.
#[derive(Debug, Clone)]
pub struct PureScheme {
    msp: Msp,
    structure: AdversaryStructure,
    plans: Vec<ReconstructionPlan>,
}

pub fn qss_pure(msp: &Msp) -> Result<PureScheme, QuantumError> {
    let structure = msp.structure();
    if !structure.is_selfdual() {
        return Err(if structure.is_q2star() {
            QuantumError::NotSelfDual
        } else {
            QuantumError::NotQ2Star
        });
    }
    let plans = structure
        .members()
        .into_iter()
        .map(|b| build_reconstruction_plan(msp, b))
        .collect::<Result<_, _>>()?;
    Ok(PureScheme {
        msp: msp.clone(),
        structure,
        plans,
    })
}

impl PureScheme {
    pub fn msp(&self) -> &Msp {
        &self.msp
    }

    pub fn structure(&self) -> &AdversaryStructure {
        &self.structure
    }

    pub fn plans(&self) -> &[ReconstructionPlan] {
        &self.plans
    }

    pub fn encode<R: Float>(
        &self,
        input: &QuantumState<R>,
    ) -> Result<EncodedState<R>, QuantumError> {
        qencode(&self.msp, input)
    }

    /// State of the recovered coordinate after `b` is erased.
    pub fn recover<R: Float>(
        &self,
        enc: &EncodedState<R>,
        b: PlayerSet,
    ) -> Result<DensityMatrix<R>, QuantumError> {
        let plan = self
            .plans
            .iter()
            .find(|p| p.erased() == b)
            .ok_or(QuantumError::NotCorrectable(b))?;
        let out = apply_plan(enc, plan)?;
        partial_trace(&out, &plan.a_rows()[..1])
    }

    /// Recovery, factorization and secrecy for every `B ∈ 𝒜`.
    pub fn verify_all<R: Float>(&self, family: &TestFamily<R>) -> Result<Report, QuantumError> {
        let mut report = Report::new(
            format!(
                "pure scheme over GF({}), {} players",
                self.msp.field().order(),
                self.msp.players()
            ),
            family.seed(),
            family.len(),
        );
        let encs = encode_family(&self.msp, family)?;
        for plan in &self.plans {
            let b = plan.erased();
            report
                .records
                .extend(recovery_records(&encs, family, plan, b)?);
            report
                .records
                .push(secrecy_record(&encs, family, plan.b_rows(), b)?);
        }
        Ok(report)
    }
}

/// A mixed-state scheme: a pure scheme for the self-dual extension with
/// the share of the extra player τ = n+1 discarded.
///
/// Whether the dealer keeps τ or destroys it, the players see the same
/// reduced state, so tracing it out models both.
#[derive(Debug, Clone)]
pub struct MixedScheme {
    original: Msp,
    extended: Msp,
    structure: AdversaryStructure,
    recoveries: Vec<(PlayerSet, ReconstructionPlan)>,
}

pub fn qss_mixed(msp: &Msp) -> Result<MixedScheme, QuantumError> {
    let structure = msp.structure();
    if !structure.is_q2star() {
        return Err(QuantumError::NotQ2Star);
    }
    let extended = msp.extend()?;
    let n = msp.players();
    let tau = PlayerSet::singleton(n + 1);
    // Q recovers by treating everyone else, τ included, as erased.
    let recoveries = PlayerSet::all_subsets(n)
        .filter(|q| !structure.is_member(*q))
        .map(|q| {
            let erased = q.complement(n).union(tau);
            build_reconstruction_plan(&extended, erased).map(|plan| (q, plan))
        })
        .collect::<Result<_, _>>()?;
    Ok(MixedScheme {
        original: msp.clone(),
        extended,
        structure,
        recoveries,
    })
}

impl MixedScheme {
    pub fn original(&self) -> &Msp {
        &self.original
    }

    pub fn extended(&self) -> &Msp {
        &self.extended
    }

    pub fn structure(&self) -> &AdversaryStructure {
        &self.structure
    }

    /// Qualified sets of the original structure, each with its plan.
    pub fn recoveries(&self) -> &[(PlayerSet, ReconstructionPlan)] {
        &self.recoveries
    }

    /// Purified encoding over the extended program; the τ coordinates are
    /// part of the state but belong to no real player.
    pub fn encode<R: Float>(
        &self,
        input: &QuantumState<R>,
    ) -> Result<EncodedState<R>, QuantumError> {
        qencode(&self.extended, input)
    }

    /// Mixed state handed to the players in `b` (τ excluded).
    pub fn shares_of<R: Float>(
        &self,
        enc: &EncodedState<R>,
        b: PlayerSet,
    ) -> Result<DensityMatrix<R>, QuantumError> {
        let b = b.intersection(PlayerSet::full(self.original.players()));
        partial_trace(enc.state(), &self.extended.row_indices(b))
    }

    /// State recovered by the qualified set `q`. The plan touches only the
    /// coordinates of `q`, so acting on the purification gives the same
    /// result as acting on the players' mixed state.
    pub fn recover<R: Float>(
        &self,
        enc: &EncodedState<R>,
        q: PlayerSet,
    ) -> Result<DensityMatrix<R>, QuantumError> {
        let (_, plan) = self
            .recoveries
            .iter()
            .find(|(set, _)| *set == q)
            .ok_or(QuantumError::NotCorrectable(q))?;
        let out = apply_plan(enc, plan)?;
        partial_trace(&out, &plan.a_rows()[..1])
    }

    /// Recovery for every qualified set and secrecy for every `B ∈ 𝒜`.
    pub fn verify_all<R: Float>(&self, family: &TestFamily<R>) -> Result<Report, QuantumError> {
        let mut report = Report::new(
            format!(
                "mixed scheme over GF({}), {} players (+τ)",
                self.original.field().order(),
                self.original.players()
            ),
            family.seed(),
            family.len(),
        );
        let encs = encode_family(&self.extended, family)?;
        for (q, plan) in &self.recoveries {
            report
                .records
                .extend(recovery_records(&encs, family, plan, *q)?);
        }
        for b in self.structure.members() {
            let rows = self.extended.row_indices(b);
            report
                .records
                .push(secrecy_record(&encs, family, &rows, b)?);
        }
        Ok(report)
    }
}
