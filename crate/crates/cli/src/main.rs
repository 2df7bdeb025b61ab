//! `qss`: command-line front end.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on
//! usage or input-format errors.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qss_core::classical::{reconstruct, sample_randomness, share, ClassicalError, ShareFile};
use qss_core::condition::{
    eq1_check, lift_and_test, scheme_from_msp, search_counterexample, ClassicalScheme,
    ConditionError, SearchBounds, SearchFamily, SEARCH_PROBES,
};
use qss_core::galois::Field;
use qss_core::msp::Msp;
use qss_core::quantum::{
    qss_mixed, qss_pure, QuantumError, Report, TestFamily, DEFAULT_FAMILY_SEED,
};
use qss_core::rng::seeded;
use qss_core::structures::{
    parse_formula, parse_structure, write_structure, AdversaryStructure, PlayerSet,
};

#[derive(Parser)]
#[command(
    name = "qss",
    version,
    about = "Classical and quantum secret sharing toolkit"
)]
struct Cli {
    /// Report style.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Adversary structures.
    #[command(subcommand)]
    Structure(StructureCmd),
    /// Monotone span programs.
    #[command(subcommand)]
    Msp(MspCmd),
    /// Deal shares of a secret with seeded randomness.
    Share {
        msp: PathBuf,
        #[arg(long)]
        secret: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recover the secret from the shares of a set.
    Reconstruct {
        msp: PathBuf,
        shares: PathBuf,
        #[arg(long, value_parser = parse_set)]
        set: PlayerSet,
    },
    /// Simulated quantum schemes.
    #[command(subcommand)]
    Qss(QssCmd),
    /// General classical schemes and the lifting condition.
    #[command(subcommand)]
    Condition(ConditionCmd),
}

#[derive(Subcommand)]
enum StructureCmd {
    /// Report Q2, Q2* and self-duality.
    Check {
        file: PathBuf,
        /// Fail (exit 1) unless these hold: q2, q2star, selfdual.
        #[arg(long, value_enum, value_delimiter = ',')]
        require: Vec<Predicate>,
    },
    /// Print the dual structure.
    Dual { file: PathBuf },
    /// Print the self-dual extension (new player n+1).
    Extend { file: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Predicate {
    Q2,
    Q2star,
    Selfdual,
}

#[derive(Subcommand)]
enum MspCmd {
    /// Compile a monotone formula such as "or(and(1,3),and(2,3))".
    FromFormula {
        formula: String,
        #[arg(long)]
        field: u32,
        /// Player count, if larger than the highest id in the formula.
        #[arg(long)]
        players: Option<usize>,
    },
    /// Shamir program: degree-`degree` polynomial, `players` shares.
    Shamir {
        #[arg(long)]
        players: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        field: u32,
    },
    /// Program for the dual structure.
    Dual { file: PathBuf },
    /// Program for the self-dual extension.
    Extend { file: PathBuf },
    /// Print 1 if the set is qualified, else 0.
    Eval {
        file: PathBuf,
        #[arg(long, value_parser = parse_set)]
        set: PlayerSet,
    },
}

#[derive(Args)]
struct FamilyArgs {
    /// Seed of the random probe states.
    #[arg(long, default_value_t = DEFAULT_FAMILY_SEED)]
    seed: u64,
    /// Number of random probe states.
    #[arg(long, default_value_t = qss_core::quantum::RANDOM_FAMILY_MEMBERS)]
    random: usize,
}

#[derive(Subcommand)]
enum QssCmd {
    /// Verify the pure-state scheme of a self-dual program.
    VerifyPure {
        file: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Verify the mixed-state scheme of a Q2* program.
    VerifyMixed {
        file: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
    },
}

#[derive(Subcommand)]
enum ConditionCmd {
    /// Evaluate the condition and the brute-force oracle on a split.
    Check {
        file: PathBuf,
        #[arg(long, value_parser = parse_set)]
        set: PlayerSet,
        #[arg(long, default_value_t = DEFAULT_FAMILY_SEED)]
        seed: u64,
    },
    /// Search two-player tables for one violating the condition.
    Search {
        #[arg(long, default_value_t = 2)]
        secrets: usize,
        #[arg(long, default_value_t = 3)]
        share_size: usize,
        #[arg(long, default_value_t = 8)]
        den: usize,
        #[arg(long, value_enum, default_value_t = Family::General)]
        family: Family,
        #[arg(long, default_value_t = DEFAULT_FAMILY_SEED)]
        seed: u64,
        /// Also write the certificate here.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Exact probability table of a span program's scheme.
    FromMsp { file: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    General,
    FunctionOfQ,
    Homomorphic,
}

fn parse_set(text: &str) -> Result<PlayerSet, String> {
    PlayerSet::parse_list(text)
}

/// Why a command did not succeed.
enum Failure {
    /// A check ran and failed; carries output to print.
    Check(String),
    /// Bad usage or unreadable input.
    Usage(String),
}

type Outcome = Result<String, Failure>;

fn usage<E: Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<AdversaryStructure, Failure> {
    parse_structure(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_msp(path: &Path) -> Result<Msp, Failure> {
    Msp::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn field(p: u32) -> Result<Field, Failure> {
    Field::new(p).map_err(usage)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, text) = match run(&cli) {
        Ok(text) => (0, text),
        Err(Failure::Check(text)) => (1, text),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Structure(cmd) => structure(cmd),
        Command::Msp(cmd) => msp(cmd),
        Command::Share { msp, secret, seed } => {
            let m = load_msp(msp)?;
            let mut rng = seeded(*seed);
            let a = sample_randomness(&m, &mut rng);
            let v = share(&m, m.field().element(*secret), &a).map_err(usage)?;
            Ok(v.to_text(&[
                format!("seed={seed}"),
                format!("secret field=GF({})", m.field().order()),
            ]))
        }
        Command::Reconstruct { msp, shares, set } => {
            let m = load_msp(msp)?;
            let file = ShareFile::parse(&read(shares)?).map_err(usage)?;
            let view = file.view(&m, *set).map_err(usage)?;
            match reconstruct(&m, *set, &view) {
                Ok(s) => Ok(format!("{}\n", s.value())),
                Err(e @ ClassicalError::Unqualified(_)) => Err(Failure::Check(format!("{e}\n"))),
                Err(e) => Err(usage(e)),
            }
        }
        Command::Qss(cmd) => qss(cmd, cli.format),
        Command::Condition(cmd) => condition(cmd, cli.format),
    }
}

fn structure(cmd: &StructureCmd) -> Outcome {
    match cmd {
        StructureCmd::Check { file, require } => {
            let a = load_structure(file)?;
            let (q2, q2star, selfdual) = (a.is_q2(), a.is_q2star(), a.is_selfdual());
            let text = format!("q2={q2} q2star={q2star} selfdual={selfdual}\n");
            let ok = require.iter().all(|p| match p {
                Predicate::Q2 => q2,
                Predicate::Q2star => q2star,
                Predicate::Selfdual => selfdual,
            });
            if ok {
                Ok(text)
            } else {
                Err(Failure::Check(text))
            }
        }
        StructureCmd::Dual { file } => Ok(write_structure(&load_structure(file)?.dual())),
        StructureCmd::Extend { file } => {
            let a = load_structure(file)?;
            a.extend_selfdual()
                .map(|e| write_structure(&e))
                .map_err(|e| Failure::Check(format!("{e}\n")))
        }
    }
}

fn msp(cmd: &MspCmd) -> Outcome {
    let program = match cmd {
        MspCmd::FromFormula {
            formula,
            field: p,
            players,
        } => {
            let f = parse_formula(formula).map_err(usage)?;
            let k = field(*p)?;
            match players {
                Some(n) => Msp::compile_with_players(&f, *n, k),
                None => Msp::compile(&f, k),
            }
            .map_err(usage)?
        }
        MspCmd::Shamir {
            players,
            degree,
            field: p,
        } => Msp::shamir(*players, *degree, field(*p)?).map_err(usage)?,
        MspCmd::Dual { file } => load_msp(file)?.dual().map_err(usage)?,
        MspCmd::Extend { file } => {
            let m = load_msp(file)?;
            if !m.structure().is_q2star() {
                return Err(Failure::Check(
                    "structure is not Q2*; no-cloning forbids QSS\n".into(),
                ));
            }
            m.extend().map_err(usage)?
        }
        MspCmd::Eval { file, set } => {
            let m = load_msp(file)?;
            if set.max_player() > m.players() {
                return Err(usage(format!(
                    "set {set} names players beyond {}",
                    m.players()
                )));
            }
            return Ok(format!("{}\n", u8::from(m.eval(*set))));
        }
    };
    Ok(program.to_text())
}

fn report(r: &Report, format: Format) -> Outcome {
    let text = match format {
        Format::Text => r.to_text(),
        Format::Machine => r.to_machine(),
    };
    if r.passed() {
        Ok(text)
    } else {
        Err(Failure::Check(text))
    }
}

fn quantum_failure(e: QuantumError) -> Failure {
    match e {
        QuantumError::NotSelfDual | QuantumError::NotQ2Star => Failure::Check(format!("{e}\n")),
        other => usage(other),
    }
}

fn qss(cmd: &QssCmd, format: Format) -> Outcome {
    match cmd {
        QssCmd::VerifyPure { file, family } => {
            let m = load_msp(file)?;
            let scheme = qss_pure(&m).map_err(quantum_failure)?;
            let fam = TestFamily::<f64>::with_random(
                m.field().order() as usize,
                family.seed,
                family.random,
            );
            report(&scheme.verify_all(&fam).map_err(usage)?, format)
        }
        QssCmd::VerifyMixed { file, family } => {
            let m = load_msp(file)?;
            let scheme = qss_mixed(&m).map_err(quantum_failure)?;
            let fam = TestFamily::<f64>::with_random(
                m.field().order() as usize,
                family.seed,
                family.random,
            );
            report(&scheme.verify_all(&fam).map_err(usage)?, format)
        }
    }
}

fn condition(cmd: &ConditionCmd, format: Format) -> Outcome {
    match cmd {
        ConditionCmd::Check { file, set, seed } => {
            let sch = ClassicalScheme::parse(&read(file)?).map_err(usage)?;
            let invalid = |e: ConditionError| match e {
                ConditionError::NotSecret(_)
                | ConditionError::NotCorrect(_)
                | ConditionError::NotCorrectable(_) => Failure::Usage(format!(
                    "not a valid secret-sharing table for this split: {e}"
                )),
                other => usage(other),
            };
            let eq1 = eq1_check(&sch, *set).map_err(invalid)?;
            let fam = TestFamily::<f64>::with_random(sch.secrets(), *seed, SEARCH_PROBES);
            let lift = lift_and_test(&sch, *set, &fam).map_err(invalid)?;
            let agree = eq1.holds == lift.holds;
            let mut text = format!("eq1={} oracle={} agree={agree}\n", eq1.holds, lift.holds);
            if format == Format::Machine {
                text.push_str(&format!(
                    "set={} exact={} pairs={} seed={seed} tdist={:.3e}\n",
                    eq1.set, eq1.exact, eq1.pairs, lift.max_distance
                ));
            } else if let Some(v) = &eq1.violation {
                text.push_str(&format!(
                    "violated at y_u={:?} y_u'={:?}: {}\n",
                    v.first,
                    v.second,
                    v.values.join(" vs ")
                ));
                text.push_str(&format!(
                    "oracle seed {seed}, max trace distance {:.6}\n",
                    lift.max_distance
                ));
            }
            if eq1.holds && lift.holds {
                Ok(text)
            } else {
                Err(Failure::Check(text))
            }
        }
        ConditionCmd::Search {
            secrets,
            share_size,
            den,
            family,
            seed,
            cert,
        } => {
            let bounds = SearchBounds {
                max_secrets: *secrets,
                max_share_size: *share_size,
                max_denominator: *den,
            };
            let family = match family {
                Family::General => SearchFamily::General,
                Family::FunctionOfQ => SearchFamily::FunctionOfQ,
                Family::Homomorphic => SearchFamily::Homomorphic,
            };
            let outcome = search_counterexample(bounds, family, *seed).map_err(usage)?;
            match outcome.found {
                Some(found) => {
                    let header = format!(
                        "# counterexample after {} candidates; secrets<={secrets} share-size<={share_size} den<={den} seed={seed}\n",
                        outcome.examined
                    );
                    if let Some(path) = cert {
                        fs::write(path, found.certificate(*seed))
                            .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    }
                    Ok(format!("{header}{}", found.scheme.to_text()))
                }
                None => Err(Failure::Check(format!(
                    "no counterexample among {} candidates\n",
                    outcome.examined
                ))),
            }
        }
        ConditionCmd::FromMsp { file } => {
            Ok(scheme_from_msp(&load_msp(file)?).map_err(usage)?.to_text())
        }
    }
}
