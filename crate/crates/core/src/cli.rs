//! Command-line surface. [`run`] parses arguments, performs the command and
//! returns the process exit code.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::constructions::{
    build_edegree, build_edegree_copy, build_fork, build_singleton, build_upcone,
    build_upcone_copy, Built,
};
use crate::curves::{
    display_bivariate, genus, orbit_count, prime_sequence, rational_solutions, CurveFamily, Policy,
};
use crate::presentation::{verify, Presentation};
use crate::reductions::{
    annihilator_search, basis_from_c, basis_from_d, c_from_t, d_from_t, membership_via_basis,
    BasisEnumeration, BoundedSearch, Bounds, MembershipBounds, ReductionError, Search, Structural,
    TranscendenceOracle, Witness,
};
use crate::schedules::{ChipSpec, EnumerationSchedule, PhiTable};

pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "trdeg",
    version,
    about = "Computable field presentations built from Fermat curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the first primes of the exponent sequence.
    Primes {
        #[arg(long)]
        count: usize,
        #[command(flatten)]
        policy: PolicyFlags,
        #[arg(long)]
        allow_slow: bool,
    },
    /// Describe one curve of the family.
    Curve {
        #[arg(long)]
        index: usize,
        #[command(flatten)]
        policy: PolicyFlags,
        #[arg(long)]
        allow_slow: bool,
    },
    /// Build a presentation from a schedule.
    Build {
        kind: BuildKind,
        /// Enumeration schedule (singleton, upcone).
        #[arg(long)]
        set: Option<PathBuf>,
        /// Chip specification (edegree).
        #[arg(long)]
        chip: Option<PathBuf>,
        #[command(flatten)]
        common: BuildFlags,
    },
    /// Build a copy variant driven by a second schedule.
    BuildCopy {
        kind: CopyKind,
        #[arg(long)]
        set: Option<PathBuf>,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        phi: Option<PathBuf>,
        #[command(flatten)]
        common: BuildFlags,
    },
    /// Build two presentations sharing a diagram prefix.
    Fork {
        #[arg(long)]
        curve: usize,
        #[arg(long)]
        prefix_stages: u64,
        #[arg(long)]
        stages: u64,
        #[arg(long, default_value_t = Policy::Toy)]
        policy: Policy,
        #[arg(long)]
        out_f: PathBuf,
        #[arg(long)]
        out_e: PathBuf,
    },
    /// Check a dump; with --against, also that an earlier dump is a prefix.
    Verify {
        dump: PathBuf,
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Run one of the oracle reductions on a dump.
    Reduce {
        #[command(subcommand)]
        which: Reduce,
    },
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct PolicyFlags {
    #[arg(long)]
    paper: bool,
    #[arg(long)]
    toy: bool,
}

impl PolicyFlags {
    fn policy(&self) -> Policy {
        if self.toy {
            Policy::Toy
        } else {
            Policy::Paper
        }
    }
}

#[derive(Debug, Args)]
struct BuildFlags {
    #[arg(long)]
    stages: u64,
    #[arg(long, default_value_t = Policy::Toy)]
    policy: Policy,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BuildKind {
    Singleton,
    Upcone,
    Edegree,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CopyKind {
    Upcone,
    Edegree,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum OracleKind {
    #[default]
    Structural,
    Search,
}

#[derive(Debug, Args)]
struct OracleFlags {
    #[arg(long, value_enum, default_value_t = OracleKind::Structural)]
    oracle: OracleKind,
    /// Degree bound for the search oracle.
    #[arg(long, default_value_t = 7)]
    degree: u32,
    /// Height bound, in bits, for the search oracle.
    #[arg(long, default_value_t = 64)]
    height: u64,
}

impl OracleFlags {
    fn oracle(&self) -> Box<dyn TranscendenceOracle> {
        match self.oracle {
            OracleKind::Structural => Box::new(Structural),
            OracleKind::Search => Box::new(BoundedSearch {
                bounds: Bounds::new(self.degree, self.height),
            }),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Reduce {
    /// Decide whether a curve index is in C.
    CFromT {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        index: usize,
        #[command(flatten)]
        oracle: OracleFlags,
    },
    /// Decide whether an index is in D.
    DFromT {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        index: u64,
        #[command(flatten)]
        oracle: OracleFlags,
    },
    /// Enumerate a transcendence basis with the help of C.
    BasisFromC {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        set: PathBuf,
    },
    /// Enumerate a transcendence basis with the help of D.
    BasisFromD {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        phi: PathBuf,
    },
    /// Decide basis membership of an element from a basis enumeration.
    Membership {
        #[arg(long)]
        presentation: PathBuf,
        /// Comma-separated labels or indices.
        #[arg(long)]
        basis: String,
        /// Label or index.
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 1)]
        width: usize,
        #[arg(long, default_value_t = 8)]
        degree: u32,
        #[arg(long, default_value_t = 64)]
        height: u64,
    },
    /// Search for a polynomial relation among elements.
    Annihilator {
        #[arg(long)]
        presentation: PathBuf,
        /// Comma-separated labels or indices.
        #[arg(long)]
        tuple: String,
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 64)]
        height: u64,
    },
}

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn malformed(msg: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_MALFORMED,
            message: msg.to_string(),
        }
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        let code = match e {
            ReductionError::Inconclusive(_) => EXIT_INCONCLUSIVE,
            _ => EXIT_MALFORMED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<String, Failure>;

/// Parses `args` (including the program name), runs the command, writes its
/// report to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn std::io::Write = if code == 0 { out } else { err };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(cli.command) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Presentation, Failure> {
    Presentation::load(&read(path)?)
        .map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn schedule(path: &Path) -> Result<EnumerationSchedule, Failure> {
    EnumerationSchedule::parse(&read(path)?)
        .map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn phi_table(path: &Path) -> Result<PhiTable, Failure> {
    PhiTable::parse(&read(path)?)
        .map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn required<'a>(flag: &str, v: &'a Option<PathBuf>) -> Result<&'a Path, Failure> {
    v.as_deref()
        .ok_or_else(|| Failure::malformed(format!("--{flag} is required here")))
}

fn execute(cmd: Command) -> Outcome {
    match cmd {
        Command::Primes {
            count,
            policy,
            allow_slow,
        } => {
            let mut qs = Vec::with_capacity(count);
            for i in 0..count {
                let q =
                    prime_sequence(i, policy.policy(), allow_slow).map_err(Failure::malformed)?;
                qs.push(q.to_string());
            }
            Ok(format!("{}\n", qs.join(" ")))
        }
        Command::Curve {
            index,
            policy,
            allow_slow,
        } => {
            let fam = CurveFamily {
                policy: policy.policy(),
                allow_slow,
            };
            let q = fam.q(index).map_err(Failure::malformed)?;
            let mut s = format!("q {q}\n");
            if let Ok(poly) = fam.curve_poly(index) {
                writeln!(s, "curve {}", display_bivariate(&poly)).unwrap();
            }
            writeln!(s, "genus {}", genus(q)).unwrap();
            let sols: Vec<String> = rational_solutions()
                .iter()
                .map(|(x, y)| format!("({x},{y})"))
                .collect();
            writeln!(s, "solutions {}", sols.join(" ")).unwrap();
            writeln!(s, "orbits {}", orbit_count(q)).unwrap();
            Ok(s)
        }
        Command::Build {
            kind,
            set,
            chip,
            common,
        } => {
            let quiet = &mut |_: &Presentation| {};
            let (stages, policy) = (common.stages, common.policy);
            let built = match kind {
                BuildKind::Singleton => {
                    build_singleton(&schedule(required("set", &set)?)?, stages, policy, quiet)
                }
                BuildKind::Upcone => {
                    build_upcone(&schedule(required("set", &set)?)?, stages, policy, quiet)
                }
                BuildKind::Edegree => {
                    let text = read(required("chip", &chip)?)?;
                    let spec = ChipSpec::parse(&text).map_err(Failure::malformed)?;
                    build_edegree(&spec, stages, policy, quiet)
                }
            };
            emit(built.map_err(Failure::malformed)?, &common)
        }
        Command::BuildCopy {
            kind,
            set,
            target,
            phi,
            common,
        } => {
            let quiet = &mut |_: &Presentation| {};
            let (stages, policy) = (common.stages, common.policy);
            let d = schedule(&target)?;
            let built = match kind {
                CopyKind::Upcone => {
                    let c = schedule(required("set", &set)?)?;
                    build_upcone_copy(&c, Some(&d), stages, policy, quiet)
                }
                CopyKind::Edegree => {
                    let phi = phi_table(required("phi", &phi)?)?;
                    build_edegree_copy(&phi, &d, stages, policy, quiet)
                }
            };
            emit(built.map_err(Failure::malformed)?, &common)
        }
        Command::Fork {
            curve,
            prefix_stages,
            stages,
            policy,
            out_f,
            out_e,
        } => {
            let fork =
                build_fork(curve, prefix_stages, stages, policy).map_err(Failure::malformed)?;
            write(&out_f, &fork.f.dump(true))?;
            write(&out_e, &fork.e.dump(true))?;
            Ok(format!(
                "prefix facts {}\nF facts {}\nE facts {}\n",
                fork.prefix_facts,
                fork.f.facts().len(),
                fork.e.facts().len()
            ))
        }
        Command::Verify { dump, against } => {
            let p = load(&dump)?;
            let earlier = against.as_deref().map(load).transpose()?;
            let report = verify(&p, earlier.as_ref());
            if report.ok() {
                Ok(format!("{report}\n"))
            } else {
                Err(Failure {
                    code: EXIT_VERIFY,
                    message: report.to_string(),
                })
            }
        }
        Command::Reduce { which } => reduce(which),
    }
}

fn emit((p, truth): Built, flags: &BuildFlags) -> Outcome {
    write(&flags.out, &p.dump(true))?;
    if let Some(t) = &flags.truth {
        write(t, &truth.to_text())?;
    }
    Ok(format!(
        "stage {} domain {} facts {}\n",
        p.stage(),
        p.domain_size(),
        p.facts().len()
    ))
}

/// Resolves a label or a plain index.
fn element_ref(p: &Presentation, s: &str) -> Result<usize, Failure> {
    let s = s.trim();
    if let Ok(i) = s.parse::<usize>() {
        if i < p.domain_size() {
            return Ok(i);
        }
        return Err(Failure::malformed(format!(
            "index {i} is outside the domain"
        )));
    }
    p.index_of_label(s).map_err(Failure::malformed)
}

fn element_list(p: &Presentation, s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| element_ref(p, t))
        .collect()
}

fn label_of(p: &Presentation, idx: usize) -> String {
    p.ledger()
        .iter()
        .find(|e| e.index == idx)
        .map_or_else(|| "-".to_string(), |e| e.label.clone())
}

fn basis_text(p: &Presentation, b: &BasisEnumeration) -> String {
    let mut s = String::new();
    for (idx, why) in b.provenance() {
        writeln!(s, "{idx} {} {why}", label_of(p, idx)).unwrap();
    }
    s
}

fn reduce(which: Reduce) -> Outcome {
    match which {
        Reduce::CFromT {
            presentation,
            index,
            oracle,
        } => {
            let p = load(&presentation)?;
            let r = c_from_t(&p, oracle.oracle().as_ref(), index)?;
            Ok(match r.witness {
                Some((a, b)) => format!("{index} not in C, witness ({a}, {b})\n"),
                None => format!("{index} in C (no qualifying pair in the domain)\n"),
            })
        }
        Reduce::DFromT {
            presentation,
            index,
            oracle,
        } => {
            let p = load(&presentation)?;
            let member = d_from_t(&p, oracle.oracle().as_ref(), index)?;
            Ok(format!(
                "{index} {} D\n",
                if member { "in" } else { "not in" }
            ))
        }
        Reduce::BasisFromC { presentation, set } => {
            let p = load(&presentation)?;
            let b = basis_from_c(&p, &schedule(&set)?)?;
            Ok(basis_text(&p, &b))
        }
        Reduce::BasisFromD {
            presentation,
            target,
            phi,
        } => {
            let p = load(&presentation)?;
            let b = basis_from_d(&p, &schedule(&target)?, &phi_table(&phi)?)?;
            Ok(basis_text(&p, &b))
        }
        Reduce::Membership {
            presentation,
            basis,
            element,
            width,
            degree,
            height,
        } => {
            let p = load(&presentation)?;
            let b: BasisEnumeration = element_list(&p, &basis)?.into_iter().collect();
            let idx = element_ref(&p, &element)?;
            let bounds = MembershipBounds::new(width, degree, height);
            let m = membership_via_basis(&p, &b, idx, bounds)?;
            Ok(format!(
                "{} {}\nwitness {}\n",
                idx,
                if m.member { "member" } else { "non-member" },
                m.witness.display_with(&m.names())
            ))
        }
        Reduce::Annihilator {
            presentation,
            tuple,
            degree,
            height,
        } => {
            let p = load(&presentation)?;
            let t = element_list(&p, &tuple)?;
            match annihilator_search(&p, &t, Bounds::new(degree, height))? {
                Search::Found(w) => {
                    let names = Witness::default_names(t.len());
                    Ok(format!("witness {}\n", w.display_with(&names)))
                }
                Search::Absent => Ok(format!("absent up to degree {degree}\n")),
                Search::Inconclusive(c) => Err(Failure {
                    code: EXIT_INCONCLUSIVE,
                    message: format!("inconclusive: {c:?}"),
                }),
            }
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}
