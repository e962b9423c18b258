//! The `qsg` command line: verification, commutants, normal forms, bases,
//! characters, representation search and the scenario catalog.
//!
//! Exit codes: 0 all checks pass, 1 a violation was certified, 2 a check was
//! inconclusive (degree cap or search budget), 64 usage error, 66 file or
//! parse error, 70 internal error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use qsg::builtins;
use qsg::cache::complete_cached;
use qsg::commutant::{self, ClassicalFamily, M2Automorphism, PermFamily, Permutation};
use qsg::dsl::{self, Parsed};
use qsg::repsearch::{self, NoncommutingPair, SearchConfig};
use qsg::semigroup::{Check, Outcome, Report};
use qsg::structure::{self, LinearBasis};
use qsg::{Error, NCPoly, Presentation};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_FILE: i32 = 66;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "qsg", version, about = "Quantum semigroups of finite quantum spaces by noncommutative rewriting")]
struct Cli {
    /// Flat key=value output
    #[arg(long, global = true)]
    machine: bool,
    /// Degree cap for completion
    #[arg(long, global = true, default_value_t = qsg::rewrite::DEFAULT_DEGREE_CAP)]
    cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Space {
    Xn,
    M2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every semigroup axiom of a file
    Verify { file: PathBuf },
    /// Quantum commutant of a classical family of maps
    Commutant {
        #[arg(long, value_enum)]
        space: Space,
        /// Number of points (Xn only)
        #[arg(long)]
        n: Option<usize>,
        /// A permutation in cycle notation; repeatable
        #[arg(long = "perm")]
        perms: Vec<String>,
        /// `swap` or a unitary `a, b; c, d`; repeatable
        #[arg(long = "auto")]
        autos: Vec<String>,
        /// Write the commutant semigroup here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normal form of an expression
    Nf { file: PathBuf, expr: String },
    /// Linear basis of normal words
    Basis {
        file: PathBuf,
        #[arg(long)]
        max_deg: usize,
    },
    /// Character equations of the abelianization
    Abelianize { file: PathBuf },
    /// Check a parametrized family of characters on seeded samples
    Characters {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "two-circle")]
        param: String,
        /// Rows of the sample table to print
        #[arg(long, default_value_t = 10)]
        rows: usize,
    },
    /// Numerical search for a matrix representation
    Rep {
        file: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 400)]
        max_iters: usize,
        /// Look for a representation where these two generators do not commute
        #[arg(long, num_args = 2, value_names = ["G", "H"])]
        noncommute: Option<Vec<String>>,
    },
    /// Run a named scenario on the M2 swap commutant
    Scenario { name: String },
    /// Print a builtin semigroup in the file syntax
    Export { name: String },
}

/// Result of a command: text to print and the exit code.
struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn report(report: &Report, machine: bool, extra: &str) -> Self {
        let mut text = if machine { report.render_machine() } else { report.render_human() };
        text.push_str(extra);
        Output { text, code: report.status().exit_code() }
    }
}

enum Failure {
    Usage(String),
    File(String),
    Other(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Parse(_) | Error::CorruptCache(_) | Error::HashMismatch { .. } => {
                Failure::File(e.to_string())
            }
            Error::Invalid(_) | Error::UnknownParametrization(_) | Error::UnknownLetter(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Other(other),
        }
    }
}

type CmdResult = std::result::Result<Output, Failure>;

/// Runs with process arguments, writing to stdout and stderr.
pub fn run(args: Vec<String>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let cache = std::env::var_os("QSG_CACHE_DIR").map(PathBuf::from);
    match dispatch(&cli, cache.as_deref()) {
        Ok(o) => {
            let _ = write!(out, "{}", o.text);
            o.code
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::File(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_FILE
        }
        Err(Failure::Other(Error::DegreeOverflow { degree, cap })) => {
            let _ = writeln!(err, "inconclusive: degree {degree} exceeds the degree cap {cap}");
            2
        }
        Err(Failure::Other(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INTERNAL
        }
    }
}

fn dispatch(cli: &Cli, cache: Option<&Path>) -> CmdResult {
    let machine = cli.machine;
    let cap = cli.cap;
    if cap == 0 {
        return Err(Failure::Usage("--cap must be positive".into()));
    }
    match &cli.command {
        Command::Verify { file } => verify(&load(file)?, cap, cache, machine),
        Command::Commutant { space, n, perms, autos, out } => {
            commutant_cmd(*space, *n, perms, autos, out.as_deref(), cap, cache, machine)
        }
        Command::Nf { file, expr } => nf(&load(file)?, expr, cap, cache, machine),
        Command::Basis { file, max_deg } => basis(&load(file)?, *max_deg, cap, cache, machine),
        Command::Abelianize { file } => {
            let parsed = load(file)?;
            let (_, sys) = structure::abelianize(parsed.presentation())?;
            Ok(Output { text: sys.export(), code: 0 })
        }
        Command::Characters { file, samples, seed, param, rows } => {
            characters(&load(file)?, *samples, *seed, param, *rows, machine)
        }
        Command::Rep { file, dim, restarts, seed, max_iters, noncommute } => {
            let cfg = SearchConfig { restarts: *restarts, seed: *seed, max_iters: *max_iters, ..Default::default() };
            rep(&load(file)?, *dim, &cfg, noncommute.as_deref(), machine)
        }
        Command::Scenario { name } => {
            if !structure::SCENARIOS.contains(&name.as_str()) {
                return Err(Failure::Usage(format!(
                    "unknown scenario '{name}' (known: {})",
                    structure::SCENARIOS.join(", ")
                )));
            }
            Ok(Output::report(&structure::run_scenario(name, cap, cache)?, machine, ""))
        }
        Command::Export { name } => match builtins::by_name(name) {
            Some(s) => Ok(Output { text: dsl::print_semigroup(&s), code: 0 }),
            None => Err(Failure::Usage(format!("unknown builtin '{name}' (known: qmap-x<n>, qmap-m2, m2-commutant)"))),
        },
    }
}

fn load(path: &Path) -> std::result::Result<Parsed, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::File(format!("{}: {e}", path.display())))?;
    dsl::parse(&text).map_err(|e| Failure::File(format!("{}:{e}", path.display())))
}

fn verify(parsed: &Parsed, cap: usize, cache: Option<&Path>, machine: bool) -> CmdResult {
    match parsed {
        Parsed::Semigroup(s) => {
            let rs = complete_cached(&s.algebra, cap, cache)?;
            let mut report = s.verify_all(&rs);
            report.subject = s.name.clone();
            if !rs.is_consistent() {
                report.note("algebra", "zero (the relations generate the unit ideal)");
            }
            Ok(Output::report(&report, machine, ""))
        }
        Parsed::Presentation(p) => {
            let rs = complete_cached(p, cap, cache)?;
            let mut report = Report::new(p.name());
            report.note("hash", p.hash());
            report.note("rules", rs.rules().len().to_string());
            report.note("skipped overlaps", rs.skipped_overlaps().to_string());
            let outcome = if !rs.is_consistent() {
                report.note("algebra", "zero (the relations generate the unit ideal)");
                Outcome::Pass
            } else if rs.skipped_overlaps() == 0 {
                Outcome::Pass
            } else {
                Outcome::Inconclusive(format!("{} overlaps above degree cap {cap}", rs.skipped_overlaps()))
            };
            report.push(Check::new("rewrite system is confluent", outcome));
            Ok(Output::report(&report, machine, ""))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn commutant_cmd(
    space: Space,
    n: Option<usize>,
    perms: &[String],
    autos: &[String],
    out: Option<&Path>,
    cap: usize,
    cache: Option<&Path>,
    machine: bool,
) -> CmdResult {
    let (comm, mut report) = match space {
        Space::Xn => {
            let n = n.ok_or_else(|| Failure::Usage("--space Xn needs --n".into()))?;
            if !autos.is_empty() {
                return Err(Failure::Usage("--auto applies to --space M2".into()));
            }
            if perms.is_empty() {
                return Err(Failure::Usage("give at least one --perm".into()));
            }
            if n == 0 || n > 64 {
                return Err(Failure::Usage("--n must be between 1 and 64".into()));
            }
            let texts: Vec<&str> = perms.iter().map(String::as_str).collect();
            let family = PermFamily::parse(n, &texts)?;
            let only = |p: Permutation| family.len() == 1 && family.perms().next() == Some(&p);
            if n >= 2 && only(Permutation::cycle(n)) {
                structure::cyclic_commutant_report(n, cap, cache)?
            } else if n >= 3 && only(Permutation::transposition(n, n - 1, n)) {
                commutant::transposition_report(n, cap, cache)?
            } else {
                let comm = commutant::build_commutant(
                    &builtins::qmap_xn(n),
                    &ClassicalFamily::Permutations(family),
                    cap,
                    cache,
                )?;
                let report = structure::describe_structure(&comm.semigroup, &comm.rewrite, cap);
                (comm, report)
            }
        }
        Space::M2 => {
            if !perms.is_empty() || n.is_some() {
                return Err(Failure::Usage("--perm and --n apply to --space Xn".into()));
            }
            if autos.is_empty() {
                return Err(Failure::Usage("give at least one --auto".into()));
            }
            let us = autos.iter().map(|a| M2Automorphism::parse(a)).collect::<qsg::Result<Vec<_>>>()?;
            let comm = commutant::build_commutant(&builtins::qmap_m2(), &ClassicalFamily::M2(us), cap, cache)?;
            let report = structure::describe_structure(&comm.semigroup, &comm.rewrite, cap);
            (comm, report)
        }
    };
    let mut full = comm.report.clone();
    full.subject = comm.semigroup.name.clone();
    for (k, v) in std::mem::take(&mut report.notes) {
        if !full.notes.contains(&(k.clone(), v.clone())) {
            full.notes.push((k, v));
        }
    }
    for c in std::mem::take(&mut report.checks) {
        if full.check(&c.name).is_none() {
            full.push(c);
        }
    }
    if let Some(path) = out {
        std::fs::write(path, dsl::print_semigroup(&comm.semigroup))
            .map_err(|e| Failure::File(format!("{}: {e}", path.display())))?;
        full.note("written to", path.display().to_string());
    }
    Ok(Output::report(&full, machine, ""))
}

fn nf(parsed: &Parsed, expr: &str, cap: usize, cache: Option<&Path>, machine: bool) -> CmdResult {
    let pres = parsed.presentation();
    let p = pres.expr(expr).map_err(|e| Failure::Usage(format!("expression: {e}")))?;
    let rs = complete_cached(pres, cap, cache)?;
    let (text, code) = match rs.normal_form(&p) {
        Ok(r) => (r.display(pres), 0),
        Err(e) => (format!("inconclusive: {e}"), 2),
    };
    let text = if machine { format!("expr={expr}\nnf={text}\n") } else { format!("{text}\n") };
    Ok(Output { text, code })
}

fn basis(parsed: &Parsed, max_deg: usize, cap: usize, cache: Option<&Path>, machine: bool) -> CmdResult {
    let pres = parsed.presentation();
    if max_deg > cap {
        return Err(Failure::Usage(format!("--max-deg {max_deg} exceeds --cap {cap}")));
    }
    let rs = complete_cached(pres, cap, cache)?;
    let LinearBasis { words, stabilized } = structure::basis_up_to(pres, &rs, max_deg)?;
    let names: Vec<String> = words.iter().map(|w| NCPoly::word(w.clone()).display(pres)).collect();
    let mut text = String::new();
    if machine {
        let _ = writeln!(text, "size={}", names.len());
        let _ = writeln!(text, "stabilized={stabilized}");
        for (i, w) in names.iter().enumerate() {
            let _ = writeln!(text, "word.{i}={w}");
        }
    } else {
        let state = if stabilized { "complete" } else { "truncated" };
        let _ = writeln!(text, "{} normal words up to degree {max_deg} ({state})", names.len());
        for w in &names {
            let _ = writeln!(text, "  {w}");
        }
    }
    Ok(Output { text, code: 0 })
}

fn characters(parsed: &Parsed, samples: usize, seed: u64, param: &str, rows: usize, machine: bool) -> CmdResult {
    let pres = parsed.presentation();
    let (_, sys) = structure::abelianize(pres)?;
    let param = structure::parametrization(param)?;
    let check = structure::check_parametrized_solution(&sys, param.as_ref(), samples, seed)?;
    let mut report = Report::new(format!("characters of {}", pres.name()));
    report.note("variables", sys.variables.join(" "));
    for (k, e) in sys.equations.iter().enumerate() {
        report.note(format!("equation {}", k + 1), format!("{} = 0", e.display(&sys.variables)));
    }
    report.note("parametrization", param.name());
    report.note("samples", samples.to_string());
    report.note("seed", seed.to_string());
    report.note("max float residual", format!("{:e}", check.max_float));
    let exact = check.max_exact.clone();
    report.push(Check::from_bool(format!("{} points solve the system", param.name()), num_is_zero(&exact), || {
        ("max exact residual".into(), exact.to_string())
    }));
    let mut table = String::new();
    if !machine && rows > 0 {
        let _ = writeln!(
            table,
            "\n{:>6}  {}",
            "sample",
            sys.variables.iter().map(|v| format!("{v:>12}")).collect::<String>()
        );
        for k in 0..samples.min(rows) {
            let values = param.sample(&mut structure::sample_rng(seed, k));
            let point = sys.point_from(&values)?;
            let cells: String = point.iter().map(|x| format!("{:>12.6}", to_f64(x))).collect();
            let _ = writeln!(table, "{k:>6}  {cells}");
        }
    }
    Ok(Output::report(&report, machine, &table))
}

fn num_is_zero(x: &num_rational::BigRational) -> bool {
    use num_traits::Zero;
    x.is_zero()
}

fn to_f64(x: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

fn rep(parsed: &Parsed, dim: usize, cfg: &SearchConfig, noncommute: Option<&[String]>, machine: bool) -> CmdResult {
    let pres: &Presentation = parsed.presentation();
    if dim == 0 {
        return Err(Failure::Usage("--dim must be positive".into()));
    }
    let tol = 1e-10;
    let mut report = Report::new(format!("{}: dimension {dim}", pres.name()));
    report.note("restarts", cfg.restarts.to_string());
    report.note("seed", cfg.seed.to_string());
    let point = match noncommute {
        Some([g, h]) => {
            for name in [g, h] {
                if pres.generator_index(name).is_none() {
                    return Err(Failure::Usage(format!("unknown generator '{name}'")));
                }
            }
            match repsearch::certify_noncommuting_pair(pres, g, h, dim, cfg, tol, 0.1)? {
                NoncommutingPair::Found { point, commutator_norm } => {
                    report.note("commutator norm", format!("{commutator_norm:e}"));
                    report.push(Check::new(format!("{g} and {h} fail to commute"), Outcome::Pass));
                    Some(point)
                }
                NoncommutingPair::NotFound => {
                    report.push(Check::new(
                        format!("{g} and {h} fail to commute"),
                        Outcome::Inconclusive("not found within the search budget".into()),
                    ));
                    None
                }
            }
        }
        Some(_) => return Err(Failure::Usage("--noncommute takes two generators".into())),
        None => {
            let point = repsearch::search_rep(pres, dim, cfg);
            let outcome = if point.residual < tol {
                Outcome::Pass
            } else {
                Outcome::Inconclusive(format!("best residual {:e} after {} restarts", point.residual, cfg.restarts))
            };
            report.push(Check::new("relations hold numerically", outcome));
            Some(point)
        }
    };
    let extra = match &point {
        Some(p) => {
            report.note("residual", format!("{:e}", p.residual));
            if machine {
                String::new()
            } else {
                format!("\n{}", p.export())
            }
        }
        None => String::new(),
    };
    Ok(Output::report(&report, machine, &extra))
}
