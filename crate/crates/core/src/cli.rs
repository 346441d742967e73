//! Command-line front end.
//!
//! Deterministic output (charsets, points, reports) goes to stdout or the
//! `--out` path. The summary line and traces go to stderr, since they carry
//! wall times.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::One;

use crate::bcsfr::{bcsfr, inc_bcsfr, BcsfrConfig, BcsfrError, ChoosePolicy, FeasibleSetResult};
use crate::boolpoly::MAX_VARS;
use crate::charset::{parse_charsets, write_charsets, CharSetError};
use crate::coding::files::parse_assignment;
use crate::coding::{
    build_lnc_problem, build_lrc_problem, read_instance, search_space_size, BroadcastMode, CodingError, InputError,
    Instance, LncProblem, PolySystem,
};
use crate::optimize::{export_wcnf, minimize, verify_assignment, Objective, OptimizeError, DEFAULT_MAX_DF};
use crate::oracle::{
    compare_oracle_vs_cs, feasible_oracle_dense, Assignment, OracleError, StructuredOracle, SystemOracle, Violation,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fullrank", version, about = "Characteristic-set solver for full-rank constraints over GF(2)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: RunOpts,
}

#[derive(Debug, Args)]
pub struct RunOpts {
    /// Selection among monic polynomials: cso1, cso2, det0 or rand:<seed>.
    #[arg(long, global = true, default_value = "det0", value_parser = parse_policy)]
    pub choose: ChoosePolicy,
    /// Broadcast node encoding: identify or equations.
    #[arg(long, global = true, default_value = "identify", value_parser = parse_broadcast)]
    pub broadcast: BroadcastMode,
    /// Decompose one rank block at a time. Chosen automatically when the
    /// whole system exceeds the variable limit.
    #[arg(long, global = true)]
    pub incremental: bool,
    /// Largest charset degree of freedom searched exhaustively.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DF)]
    pub max_df: u32,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Print decomposition events to stderr.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Output file, or directory for export-wcnf.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose the feasible set into characteristic sets.
    Solve { input: PathBuf },
    /// Cross-check a decomposition against brute force.
    Verify {
        input: PathBuf,
        /// Check this charset file instead of a fresh decomposition.
        #[arg(long)]
        charsets: Option<PathBuf>,
        /// Largest number of points the oracle may visit.
        #[arg(long, default_value_t = 1 << 26)]
        budget: u64,
    },
    /// Print the number of feasible points.
    Count { input: PathBuf },
    /// Print feasible points as 0/1 strings, x1 first.
    Enumerate {
        input: PathBuf,
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Minimize a weighted sum of the x-variables over the feasible set.
    Optimize {
        input: PathBuf,
        /// Comma separated weights (default: all ones).
        #[arg(long)]
        weights: Option<String>,
    },
    /// Check one assignment for feasibility and report its objective.
    Check {
        input: PathBuf,
        assignment: PathBuf,
        #[arg(long)]
        weights: Option<String>,
    },
    /// Write one WCNF file per charset for an external MaxSAT solver.
    ExportWcnf {
        input: PathBuf,
        /// 1-based charset index (default: all).
        #[arg(long)]
        charset: Option<usize>,
        #[arg(long)]
        weights: Option<String>,
    },
}

fn parse_policy(s: &str) -> Result<ChoosePolicy, String> {
    s.parse()
}

fn parse_broadcast(s: &str) -> Result<BroadcastMode, String> {
    s.parse()
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(m: impl ToString) -> Self {
        CliError { code: EXIT_INPUT, message: m.to_string() }
    }

    fn budget(m: impl ToString) -> Self {
        CliError { code: EXIT_BUDGET, message: m.to_string() }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::input(e)
    }
}

impl From<CodingError> for CliError {
    fn from(e: CodingError) -> Self {
        CliError::input(e)
    }
}

impl From<BcsfrError> for CliError {
    fn from(e: BcsfrError) -> Self {
        CliError::input(e)
    }
}

impl From<CharSetError> for CliError {
    fn from(e: CharSetError) -> Self {
        match e {
            CharSetError::EnumerationTooLarge { .. } | CharSetError::BudgetExceeded(_) => CliError::budget(e),
            _ => CliError::input(e),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Budget(_) => CliError::budget(e),
            OracleError::CharSet(c) => c.into(),
            OracleError::Malformed => CliError::input(e),
        }
    }
}

impl From<OptimizeError> for CliError {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::Infeasible => CliError { code: EXIT_INFEASIBLE, message: e.to_string() },
            OptimizeError::DfTooLarge { .. } => CliError::budget(e),
            OptimizeError::Oracle(o) => o.into(),
            _ => CliError::input(e),
        }
    }
}

/// An input compiled to a polynomial system.
pub struct Loaded {
    pub system: PolySystem,
    /// Present for network and LRC inputs.
    pub problem: Option<LncProblem>,
}

impl Loaded {
    pub fn search_space(&self) -> BigUint {
        match &self.problem {
            Some(p) => search_space_size(&p.spec).expect("validated"),
            None => BigUint::one() << self.system.n,
        }
    }
}

pub fn load(path: &Path, mode: BroadcastMode) -> Result<Loaded, CliError> {
    Ok(match read_instance(path)? {
        Instance::Network(spec) => {
            let p = build_lnc_problem(&spec, mode)?;
            Loaded { system: p.system.clone(), problem: Some(p) }
        }
        Instance::Lrc(spec) => {
            let p = build_lrc_problem(&spec)?;
            Loaded { system: p.system.clone(), problem: Some(p) }
        }
        Instance::System(system) => Loaded { system, problem: None },
    })
}

pub fn decompose(system: &PolySystem, opts: &RunOpts) -> Result<(FeasibleSetResult, Duration), CliError> {
    let cfg = BcsfrConfig { choose_policy_monic: opts.choose, trace: opts.trace, ..BcsfrConfig::default() };
    let start = Instant::now();
    let incremental = opts.incremental || system.n + system.v > MAX_VARS;
    let r = if incremental { inc_bcsfr(&system.parts(), &cfg)? } else { bcsfr(system, &cfg)? };
    Ok((r, start.elapsed()))
}

fn weights(spec: &Option<String>, n: usize) -> Result<Objective, CliError> {
    let Some(s) = spec else { return Ok(Objective::unit(n)) };
    let weights = s
        .split(',')
        .map(|w| w.trim().parse::<u64>().map_err(|_| CliError::input(format!("bad weight {w:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if weights.len() != n {
        return Err(CliError::input(format!("{} weights given, expected {n}", weights.len())));
    }
    Ok(Objective { weights })
}

fn bits(x: u128, n: usize) -> String {
    Assignment::from_bits(x, n).to_string()
}

fn emit(opts: &RunOpts, text: &str) -> Result<(), CliError> {
    match &opts.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(CliError::input)
        }
    }
}

fn summary(r: &FeasibleSetResult, space: &BigUint, elapsed: Duration) -> String {
    format!(
        "{} charsets, {} solutions, search space {}, {:.3}s",
        r.charsets.len(),
        r.solution_count,
        space,
        elapsed.as_secs_f64()
    )
}

fn solved(loaded: &Loaded, opts: &RunOpts) -> Result<FeasibleSetResult, CliError> {
    let (r, elapsed) = decompose(&loaded.system, opts)?;
    if opts.trace {
        for line in &r.trace {
            eprintln!("{line}");
        }
    }
    eprintln!("{}", summary(&r, &loaded.search_space(), elapsed));
    Ok(r)
}

/// Runs a parsed command, returning its exit code.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let opts = &cli.opts;
    if let Some(k) = opts.workers {
        // only fails when a pool already exists, which keeps the old size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
    }
    match &cli.command {
        Command::Solve { input } => {
            let loaded = load(input, opts.broadcast)?;
            let r = solved(&loaded, opts)?;
            emit(opts, &write_charsets(&r.charsets))?;
            Ok(if r.charsets.is_empty() { EXIT_INFEASIBLE } else { EXIT_OK })
        }
        Command::Count { input } => {
            let loaded = load(input, opts.broadcast)?;
            let r = solved(&loaded, opts)?;
            emit(opts, &format!("{}\n", r.solution_count))?;
            Ok(if r.charsets.is_empty() { EXIT_INFEASIBLE } else { EXIT_OK })
        }
        Command::Enumerate { input, limit } => {
            let loaded = load(input, opts.broadcast)?;
            let r = solved(&loaded, opts)?;
            let mut text = String::new();
            let mut left = *limit;
            for t in &r.charsets {
                if left == Some(0) {
                    break;
                }
                let mut printed = 0;
                for x in t.enumerate_zeros(left)? {
                    writeln!(text, "{}", bits(x, r.n)).unwrap();
                    printed += 1;
                }
                left = left.map(|l| l - printed);
            }
            emit(opts, &text)?;
            Ok(if r.charsets.is_empty() { EXIT_INFEASIBLE } else { EXIT_OK })
        }
        Command::Verify { input, charsets, budget } => {
            let loaded = load(input, opts.broadcast)?;
            let n = loaded.system.n;
            let r = match charsets {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
                    FeasibleSetResult::from_charsets(parse_charsets(&text, n, n)?, n)
                }
                None => solved(&loaded, opts)?,
            };
            let (points, candidates) = match &loaded.problem {
                Some(p) => {
                    let oracle = StructuredOracle::new(&p.spec, &p.topology, &p.varmap)?;
                    oracle.enumerate(*budget)?
                }
                None => {
                    if n > 63 || 1u64 << n > *budget {
                        return Err(CliError::budget(format!("dense oracle over 2^{n} points exceeds the budget")));
                    }
                    (feasible_oracle_dense(&loaded.system)?, 1u64 << n)
                }
            };
            let report = compare_oracle_vs_cs(&points, &r)?;
            let mut text = String::new();
            if report.passed() {
                writeln!(text, "PASS: {} feasible points over {candidates} candidates", report.oracle_count).unwrap();
            } else {
                write!(text, "FAIL: oracle {} points, charsets {}", report.oracle_count, report.solution_count)
                    .unwrap();
                if let Some(x) = report.missing {
                    write!(text, "; missing {}", bits(x, n)).unwrap();
                }
                if let Some(x) = report.extra {
                    write!(text, "; extra {}", bits(x, n)).unwrap();
                }
                if let Some(x) = report.overlap {
                    write!(text, "; overlap {}", bits(x, n)).unwrap();
                }
                text.push('\n');
            }
            emit(opts, &text)?;
            Ok(if report.passed() { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        Command::Optimize { input, weights: w } => {
            let loaded = load(input, opts.broadcast)?;
            let obj = weights(w, loaded.system.n)?;
            let r = solved(&loaded, opts)?;
            let o = minimize(&r, &obj, opts.max_df)?;
            let mut text = format!("optimum {}\noptimal points {}\n", o.value, o.witness_count);
            for a in &o.witnesses {
                writeln!(text, "{a}").unwrap();
            }
            emit(opts, &text)?;
            Ok(EXIT_OK)
        }
        Command::Check { input, assignment, weights: w } => {
            let loaded = load(input, opts.broadcast)?;
            let n = loaded.system.n;
            let obj = weights(w, n)?;
            let text = std::fs::read_to_string(assignment)
                .map_err(|e| CliError::input(format!("cannot read {}: {e}", assignment.display())))?;
            let a = Assignment { values: parse_assignment(&text, n)? };
            let (ok, value) = verify_assignment(&loaded.system, &a, &obj)?;
            let line = if ok {
                format!("feasible, objective {value}\n")
            } else {
                let why = match SystemOracle::new(&loaded.system)?.violation(a.to_bits()) {
                    Some(Violation::Nonrank(j)) => format!("constraint {} fails", j + 1),
                    Some(Violation::RankDeficit { block, rank, needed }) => {
                        format!("rank block {} has rank {rank} < {needed}", block + 1)
                    }
                    None => unreachable!("infeasible point has a violation"),
                };
                format!("infeasible ({why}), objective {value}\n")
            };
            emit(opts, &line)?;
            Ok(if ok { EXIT_OK } else { EXIT_INFEASIBLE })
        }
        Command::ExportWcnf { input, charset, weights: w } => {
            let dir = opts.out.clone().ok_or_else(|| CliError::input("export-wcnf needs --out <dir>"))?;
            let loaded = load(input, opts.broadcast)?;
            let obj = weights(w, loaded.system.n)?;
            let r = solved(&loaded, opts)?;
            let target = match charset {
                Some(0) => return Err(CliError::input("charset indices start at 1")),
                Some(k) => Some(k - 1),
                None => None,
            };
            let files = export_wcnf(&r, &obj, target, &dir)?;
            let mut out = std::io::stdout().lock();
            for f in files {
                writeln!(out, "{}", f.display()).map_err(CliError::input)?;
            }
            Ok(if r.charsets.is_empty() { EXIT_INFEASIBLE } else { EXIT_OK })
        }
    }
}

/// Parses arguments, runs, and maps failures to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
