//! Command-line surface. Results go to the writer passed to [`run`],
//! diagnostics are returned as errors and classified by [`exit_code`].

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use maltsev_kan_core::detect::{detect, DetectError, DetectOptions, DEFAULT_MAX_CLOSURE};
use maltsev_kan_core::horn::{fill_horn, fill_horn_traced, lift_horn, Horn, HornError, Lift, LiftProblem};
use maltsev_kan_core::oracle::{
    kan12_circle_solutions, kan12_term, verify_fibration, FibrationOptions, FibrationReport, HornRecord, OracleError,
    DEFAULT_BUDGET,
};
use maltsev_kan_core::simplicial::{format_vector, nerve_scaling_hom, TruncatedSimplicialAlgebra};
use maltsev_kan_core::theory::library;
use maltsev_kan_core::Elem;
use serde::Serialize;

use crate::format::{self, DocumentKind, FormatError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NEGATIVE: u8 = 3;
pub const EXIT_RESOURCE: u8 = 4;
pub const EXIT_INVALID: u8 = 5;

/// Largest level carrier `gen-fixture` will build; operation tables grow with
/// its square.
pub const MAX_FIXTURE_CARRIER: usize = 4096;

#[derive(Debug, Parser)]
#[command(
    name = "maltsev-kan",
    version,
    about = "Maltsev terms, horn fillers and Kan fibration checks on finite simplicial algebras"
)]
pub struct Cli {
    /// Render simplices of module fixtures as coordinate tuples.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate an algebra, simplicial algebra or homomorphism file.
    Validate { file: PathBuf },
    /// Search the clone of a finite algebra for a Maltsev term.
    DetectMaltsev {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_CLOSURE)]
        max_closure: usize,
        /// Also print closure size, generations and whether the target was reached.
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        parallel: bool,
    },
    /// Fill a horn in a simplicial algebra with a Maltsev term.
    FillHorn {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Face `I=ELEM`; repeat once per face.
        #[arg(long = "face", value_parser = parse_face)]
        faces: Vec<(usize, Elem)>,
        #[arg(long)]
        trace: bool,
    },
    /// Lift a horn along a surjective homomorphism.
    LiftHorn {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        y: Elem,
        #[arg(long = "face", value_parser = parse_face)]
        faces: Vec<(usize, Elem)>,
        #[arg(long)]
        trace: bool,
    },
    /// Exhaustively check the lifting property of a homomorphism.
    VerifyFibration {
        file: PathBuf,
        #[arg(long)]
        max_dim: usize,
        /// Cap on the number of candidate evaluations.
        #[arg(long, env = "MALTSEV_KAN_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Write the full report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        parallel: bool,
    },
    /// Search the free Z/m-module circle for the (1,2)-horn filler.
    Kan12Circle {
        #[arg(long)]
        m: usize,
    },
    /// Write a fixture simplicial algebra.
    GenFixture {
        #[arg(long, value_enum)]
        kind: FixtureKind,
        #[arg(long)]
        m: usize,
        /// Truncation level N.
        #[arg(long)]
        levels: usize,
        /// For `constant`: use this algebra file instead of Z/m.
        #[arg(long)]
        algebra: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the nerve map g -> factor*g from Z/src-m to Z/dst-m, with its
    /// source and target beside it.
    GenHom {
        #[arg(long)]
        src_m: usize,
        #[arg(long)]
        dst_m: usize,
        #[arg(long, default_value_t = 1)]
        factor: usize,
        #[arg(long)]
        levels: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FixtureKind {
    Constant,
    Nerve,
    Circle,
}

/// Bad arguments detected after parsing.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

fn parse_face(text: &str) -> Result<(usize, Elem), String> {
    let (i, x) = text.split_once('=').ok_or_else(|| format!("expected I=ELEM, found {text:?}"))?;
    let i = i.trim().parse().map_err(|e| format!("face index {i:?}: {e}"))?;
    let x = x.trim().parse().map_err(|e| format!("element {x:?}: {e}"))?;
    Ok((i, x))
}

/// Maps an error chain to an exit code.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<FormatError>() {
            return if matches!(e, FormatError::Io { .. }) { EXIT_USAGE } else { EXIT_INVALID };
        }
        if cause.is::<DetectError>() {
            return EXIT_RESOURCE;
        }
        if let Some(e) = cause.downcast_ref::<OracleError>() {
            return match e {
                OracleError::BudgetExceeded { .. } => EXIT_RESOURCE,
                OracleError::DimensionOutOfRange { .. } => EXIT_USAGE,
                OracleError::Horn(h) => horn_code(h),
            };
        }
        if let Some(e) = cause.downcast_ref::<HornError>() {
            return horn_code(e);
        }
    }
    1
}

fn horn_code(e: &HornError) -> u8 {
    match e {
        HornError::DimensionOutOfRange { .. }
        | HornError::MissingIndexOutOfRange { .. }
        | HornError::BadFaceIndex { .. }
        | HornError::DuplicateFace { .. }
        | HornError::MissingFace { .. } => EXIT_USAGE,
        HornError::ElementOutOfRange { .. }
        | HornError::MatchingViolation { .. }
        | HornError::NotOverY { .. }
        | HornError::StartNotOverY { .. }
        | HornError::Theory(_) => EXIT_INVALID,
        HornError::NoPreimage { .. } | HornError::MissingMaltsevTerm { .. } => EXIT_NEGATIVE,
        HornError::InvariantViolation { .. } => 1,
    }
}

/// Renders elements as integers, or as coordinate tuples with `--pretty`
/// when every level has `m^d` elements for one modulus `m`.
struct Render {
    base: Option<usize>,
}

impl Render {
    fn new(pretty: bool, x: &TruncatedSimplicialAlgebra) -> Self {
        let base = pretty.then(|| x.levels().iter().map(|l| l.carrier()).find(|&c| c > 1)).flatten();
        Render { base }
    }

    fn elem(&self, x: &TruncatedSimplicialAlgebra, n: usize, v: Elem) -> String {
        let Some(m) = self.base else { return v.to_string() };
        let carrier = x.level(n).carrier();
        let mut dim = 0;
        let mut size = 1;
        while size < carrier {
            size *= m;
            dim += 1;
        }
        if size == carrier {
            format_vector(m, dim, v)
        } else {
            v.to_string()
        }
    }
}

fn resolve(path: &Path) -> Result<PathBuf> {
    path.canonicalize().map_err(|source| FormatError::Io { path: path.to_owned(), source }).map_err(anyhow::Error::from)
}

fn resolve_output(path: &Path) -> Result<PathBuf> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let dir = resolve(parent).with_context(|| format!("output directory for {}", path.display()))?;
    let name = path.file_name().ok_or_else(|| usage(format!("{} is not a file path", path.display())))?;
    Ok(dir.join(name))
}

/// Executes a parsed command and returns the exit code for a completed run.
/// Errors carry their own code through [`exit_code`].
pub fn run(cli: Cli, out: &mut impl Write) -> Result<u8> {
    let pretty = cli.pretty;
    match cli.command {
        Command::Validate { file } => validate(&resolve(&file)?, out),
        Command::DetectMaltsev { file, max_closure, stats, parallel } => {
            let file = resolve(&file)?;
            let alg = format::load_algebra(&file)?;
            let options = DetectOptions { max_closure, parallel, ..DetectOptions::default() };
            let detection = detect(&alg, options).with_context(|| format!("{}: closure search", file.display()))?;
            match &detection.witness {
                Some(t) => writeln!(out, "{t}")?,
                None => writeln!(out, "none")?,
            }
            if stats {
                let s = detection.stats;
                writeln!(out, "closure_size {}\ngenerations {}\nfound {}", s.closure_size, s.generations, s.found)?;
            }
            Ok(if detection.witness.is_some() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::FillHorn { file, n, k, faces, trace } => {
            let file = resolve(&file)?;
            let x = format::load_simplicial(&file)?;
            let horn = Horn::new(n, k, faces)?;
            let lift =
                if trace { fill_horn_traced(&x, &horn)? } else { Lift { x: fill_horn(&x, &horn)?, trace: None } };
            print_lift(out, &Render::new(pretty, &x), &x, n, &lift)?;
            Ok(EXIT_OK)
        }
        Command::LiftHorn { file, n, k, y, faces, trace } => {
            let file = resolve(&file)?;
            let loaded = format::load_hom(&file)?;
            let horn = Horn::new(n, k, faces)?;
            let problem = LiftProblem::new(&loaded.hom, horn, y);
            let lift = lift_horn(&problem, trace)?;
            let x = loaded.hom.source();
            print_lift(out, &Render::new(pretty, x), x, n, &lift)?;
            Ok(EXIT_OK)
        }
        Command::VerifyFibration { file, max_dim, budget, report, parallel } => {
            let file = resolve(&file)?;
            let report_path = report.as_deref().map(resolve_output).transpose()?;
            let loaded = format::load_hom(&file)?;
            let f = &loaded.hom;
            let result = verify_fibration(f, max_dim, FibrationOptions { budget, parallel })?;
            let surjective = f.is_levelwise_surjective();
            let render = Render::new(pretty, f.source());
            writeln!(out, "levelwise surjective: {surjective}")?;
            writeln!(out, "checked horns: {}", result.checked_horns)?;
            writeln!(out, "failures: {}", result.failures.len())?;
            writeln!(out, "lifts checked: {}", result.lifts_checked)?;
            writeln!(out, "lift disagreements: {}", result.lift_disagreements.len())?;
            if let Some(first) = result.failures.first() {
                writeln!(out, "first failure: {}", describe(first, &render, f.source()))?;
            }
            if let Some(path) = report_path {
                let text = report_json(&result, surjective);
                format::write(&path, &text)?;
            }
            let negative = !result.failures.is_empty() || !result.lift_disagreements.is_empty();
            Ok(if negative { EXIT_NEGATIVE } else { EXIT_OK })
        }
        Command::Kan12Circle { m } => {
            if m < 2 {
                bail!(usage("--m must be at least 2"));
            }
            let solutions = kan12_circle_solutions(m);
            let Some(&x) = solutions.first() else {
                writeln!(out, "none")?;
                return Ok(EXIT_NEGATIVE);
            };
            writeln!(out, "x {x}")?;
            writeln!(out, "coordinates {}", format_vector(m, 3, x))?;
            writeln!(out, "solutions {}", solutions.len())?;
            writeln!(out, "term {}", kan12_term(m, x))?;
            Ok(EXIT_OK)
        }
        Command::GenFixture { kind, m, levels, algebra, out: path } => {
            let algebra = algebra.as_deref().map(resolve).transpose()?;
            let path = resolve_output(&path)?;
            let x = build_fixture(kind, m, levels, algebra.as_deref())?;
            format::write(&path, &format::serialize_simplicial(&x))?;
            writeln!(out, "wrote {}", path.display())?;
            Ok(EXIT_OK)
        }
        Command::GenHom { src_m, dst_m, factor, levels, out: path } => {
            let path = resolve_output(&path)?;
            check_fixture_size(src_m.max(dst_m), levels, 0)?;
            let f = nerve_scaling_hom(src_m, dst_m, levels, factor).map_err(|e| usage(e.to_string()))?;
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("hom");
            format::write_hom(&path, &f, &format!("{stem}.source.json"), &format!("{stem}.target.json"))?;
            writeln!(out, "wrote {}", path.display())?;
            Ok(EXIT_OK)
        }
    }
}

fn validate(file: &Path, out: &mut impl Write) -> Result<u8> {
    let (kind, text) = format::load_kind(file)?;
    match kind {
        DocumentKind::Algebra => {
            let alg = format::parse_algebra(file, &text)?;
            write!(
                out,
                "ok: algebra {:?}, carrier {}, {} operations",
                alg.name(),
                alg.carrier(),
                alg.signature().len()
            )?;
            match alg.maltsev_term() {
                Some(t) => writeln!(out, ", Maltsev term {t} verified")?,
                None => writeln!(out)?,
            }
        }
        DocumentKind::Simplicial => {
            let x = format::parse_simplicial(file, &text)?;
            let sizes: Vec<usize> = x.levels().iter().map(|l| l.carrier()).collect();
            writeln!(out, "ok: simplicial algebra, N = {}, level sizes {sizes:?}", x.top())?;
        }
        DocumentKind::Hom => {
            let loaded = format::parse_hom(file, &text)?;
            let f = &loaded.hom;
            writeln!(
                out,
                "ok: homomorphism, N = {}, levelwise surjective: {}",
                f.source().top(),
                f.is_levelwise_surjective()
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn print_lift(
    out: &mut impl Write,
    render: &Render,
    x: &TruncatedSimplicialAlgebra,
    n: usize,
    lift: &Lift,
) -> Result<()> {
    writeln!(out, "{}", render.elem(x, n, lift.x))?;
    if let Some(trace) = &lift.trace {
        for entry in trace {
            writeln!(out, "w_{:<3} {:<11} {}", entry.j, entry.phase.to_string(), render.elem(x, n, entry.w))?;
        }
    }
    Ok(())
}

fn describe(record: &HornRecord, render: &Render, x: &TruncatedSimplicialAlgebra) -> String {
    let faces: Vec<String> =
        record.faces.iter().map(|&(i, e)| format!("{i}={}", render.elem(x, record.n - 1, e))).collect();
    format!("n={} k={} y={} faces [{}]", record.n, record.k, record.y, faces.join(" "))
}

fn check_fixture_size(m: usize, levels: usize, extra_dims: usize) -> Result<()> {
    let fits = u32::try_from(levels + extra_dims)
        .ok()
        .and_then(|d| m.checked_pow(d))
        .is_some_and(|size| size <= MAX_FIXTURE_CARRIER);
    if !fits {
        bail!(usage(format!("top level would exceed {MAX_FIXTURE_CARRIER} elements")));
    }
    Ok(())
}

pub fn build_fixture(
    kind: FixtureKind,
    m: usize,
    levels: usize,
    algebra: Option<&Path>,
) -> Result<TruncatedSimplicialAlgebra> {
    if levels < 1 {
        bail!(usage("--levels must be at least 1"));
    }
    if algebra.is_some() && kind != FixtureKind::Constant {
        bail!(usage("--algebra only applies to --kind constant"));
    }
    Ok(match kind {
        FixtureKind::Constant => {
            let alg = match algebra {
                Some(path) => format::load_algebra(path)?,
                None => {
                    if m < 1 {
                        bail!(usage("--m must be at least 1"));
                    }
                    check_fixture_size(m, 1, 0)?;
                    library::cyclic_group(m)
                }
            };
            TruncatedSimplicialAlgebra::constant(&alg, levels)
        }
        FixtureKind::Nerve => {
            if m < 1 {
                bail!(usage("--m must be at least 1"));
            }
            check_fixture_size(m, levels, 0)?;
            TruncatedSimplicialAlgebra::nerve_abelian(m, levels)
        }
        FixtureKind::Circle => {
            if m < 2 || levels < 2 {
                bail!(usage("the circle needs --m >= 2 and --levels >= 2"));
            }
            check_fixture_size(m, levels, 1)?;
            TruncatedSimplicialAlgebra::circle_free_mod(m, levels)
        }
    })
}

#[derive(Serialize)]
struct RecordJson<'a> {
    n: usize,
    k: usize,
    y: Elem,
    faces: &'a [(usize, Elem)],
}

#[derive(Serialize)]
struct ReportJson<'a> {
    levelwise_surjective: bool,
    checked_horns: u64,
    failures: Vec<RecordJson<'a>>,
    lifts_checked: u64,
    lift_disagreements: Vec<RecordJson<'a>>,
    elapsed_secs: f64,
}

fn records(list: &[HornRecord]) -> Vec<RecordJson<'_>> {
    list.iter().map(|r| RecordJson { n: r.n, k: r.k, y: r.y, faces: &r.faces }).collect()
}

/// The report file. Everything except `elapsed_secs` is independent of
/// timing and thread count.
pub fn report_json(report: &FibrationReport, levelwise_surjective: bool) -> String {
    let json = ReportJson {
        levelwise_surjective,
        checked_horns: report.checked_horns,
        failures: records(&report.failures),
        lifts_checked: report.lifts_checked,
        lift_disagreements: records(&report.lift_disagreements),
        elapsed_secs: report.elapsed.as_secs_f64(),
    };
    serde_json::to_string(&json).expect("report serializes")
}
