//! `fibtower` command-line tool.
//!
//! Exit codes: 0 success, 1 mathematical mismatch or failed property,
//! 2 usage error, 3 resource budget exhausted.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use fibtower_core::fib::{fib_big, DEFAULT_MAX_EXACT_INDEX};
use fibtower_core::oracle::DEFAULT_ORACLE_MAX_INDEX;
use fibtower_core::pisano::{pisano_period_with, PisanoMethod};
use fibtower_core::sweep::{classify, Status};
use fibtower_core::verify::{self, PropertyOutcome};
use fibtower_core::{analyze, fib_mod, run_sweep, Error, Grid, Span, TowerSpec};

/// Writes to stdout; a closed pipe ends the process quietly.
fn emit(args: std::fmt::Arguments) {
    if let Err(e) = io::stdout().lock().write_fmt(args) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("failed writing to stdout: {e}");
    }
}

macro_rules! out {
    ($($t:tt)*) => { emit(format_args!($($t)*)) };
}

macro_rules! outln {
    ($($t:tt)*) => { emit(format_args!("{}\n", format_args!($($t)*))) };
}

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Env var overriding the oracle's index budget.
const MAX_INDEX_ENV: &str = "FIBTOWER_MAX_INDEX";

#[derive(Parser)]
#[command(name = "fibtower", version, about = "Fibonacci towers G(k,n,m) modulo powers of F_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print F_i exactly.
    Fib { i: BigUint },
    /// Print F_i mod M.
    Fibmod { i: BigUint, modulus: BigUint },
    /// Print the Pisano period of M.
    Pisano {
        modulus: BigUint,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Analyze one tower G(k,n,m).
    Analyze {
        k: u64,
        n: u64,
        m: u64,
        #[arg(long)]
        json: bool,
    },
    /// Analyze every point of a (k, n, m) grid.
    Sweep {
        #[arg(long = "k", value_name = "A..B")]
        k: String,
        #[arg(long = "n", value_name = "A..B")]
        n: String,
        #[arg(long = "m", value_name = "A..B")]
        m: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run property suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Upper modulus for the pisano suite.
        #[arg(long, default_value_t = 100_000)]
        pisano_limit: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Factored,
    Auto,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    Lemmas,
    Oracle,
    Pisano,
    All,
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::BudgetExceeded { .. }
        | Error::OracleBudgetExceeded { .. }
        | Error::FactorBudgetExceeded { .. }
        | Error::CapExceeded { .. } => EXIT_BUDGET,
        Error::PreconditionViolated(_) => EXIT_USAGE,
        Error::NoC { .. } | Error::NoWitness { .. } => EXIT_MISMATCH,
    }
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_for(&err))
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn oracle_budget() -> Result<u64, String> {
    match std::env::var(MAX_INDEX_ENV) {
        Ok(v) => v
            .parse()
            .map_err(|_| format!("{MAX_INDEX_ENV} must be a decimal integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_ORACLE_MAX_INDEX),
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "n/a".to_owned(), T::to_string)
}

fn cmd_analyze(k: u64, n: u64, m: u64, json: bool) -> ExitCode {
    let spec = match TowerSpec::new(k, n, m) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let report = match analyze(&spec) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if json {
        outln!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        let rows = [
            ("spec", spec.to_string()),
            ("F_n", report.fn_value.to_string()),
            ("expected_valuation", report.expected_valuation.to_string()),
            ("divisibility_ok", report.divisibility_ok.to_string()),
            ("unit_residue", report.unit_residue.to_string()),
            ("exact", opt(&report.exact)),
            ("case", report.case.to_string()),
            ("branch", opt(&report.branch.map(|b| b.as_str()))),
            ("predicted_residue", opt(&report.predicted_residue)),
            ("match", opt(&report.matches)),
            ("chain_depth", report.chain.depth.to_string()),
            ("chain_verified", report.chain.verified.to_string()),
        ];
        for (key, value) in rows {
            outln!("{key:<20} {value}");
        }
        if report.trivial_base() {
            outln!("{:<20} F_n = 1, every power divides", "note");
        }
    }
    match classify(&report) {
        Status::Ok => ExitCode::SUCCESS,
        _ => ExitCode::from(EXIT_MISMATCH),
    }
}

fn cmd_sweep(k: &str, n: &str, m: &str, jobs: usize, out: Option<PathBuf>, format: Format) -> ExitCode {
    let grid = match (k.parse::<Span>(), n.parse::<Span>(), m.parse::<Span>()) {
        (Ok(k), Ok(n), Ok(m)) => Grid { k, n, m },
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return usage(e),
    };
    if grid.k.lo == 0 || grid.n.lo == 0 || grid.m.lo == 0 {
        return usage("grid parameters start at 1");
    }
    let report = match run_sweep(&grid, jobs) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match out {
        Some(path) => {
            if let Err(e) = fs::write(&path, text) {
                return usage(format!("cannot write {}: {e}", path.display()));
            }
        }
        None => out!("{text}"),
    }
    let s = &report.summary;
    eprintln!(
        "{} rows: {} ok, {} mismatch, {} budget_exceeded",
        s.rows, s.ok, s.mismatch, s.budget_exceeded
    );
    if report.all_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_MISMATCH)
    }
}

fn report_suite(label: &str, outcomes: &[PropertyOutcome]) -> bool {
    for o in outcomes {
        outln!("{o}");
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    outln!("{passed}/{} {label} pass", outcomes.len());
    passed == outcomes.len()
}

fn cmd_verify(suite: Suite, pisano_limit: u64) -> ExitCode {
    let budget = match oracle_budget() {
        Ok(b) => b,
        Err(e) => return usage(e),
    };
    let mut ok = true;
    if matches!(suite, Suite::Identities | Suite::All) {
        ok &= report_suite("identity families", &verify::identity_suite());
    }
    if matches!(suite, Suite::Lemmas | Suite::All) {
        ok &= report_suite("lemma properties", &verify::lemma_suite());
    }
    if matches!(suite, Suite::Oracle | Suite::All) {
        ok &= report_suite("oracle properties", &verify::oracle_suite(budget));
    }
    if matches!(suite, Suite::Pisano | Suite::All) {
        ok &= report_suite("pisano properties", &verify::pisano_suite(pisano_limit));
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_MISMATCH)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Fib { i } => match fib_big(&i, DEFAULT_MAX_EXACT_INDEX) {
            Ok(v) => {
                outln!("{v}");
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Fibmod { i, modulus } => {
            if modulus == BigUint::ZERO {
                return usage("modulus must be positive");
            }
            outln!("{}", fib_mod(&i, &modulus));
            ExitCode::SUCCESS
        }
        Command::Pisano { modulus, method } => {
            if modulus == BigUint::ZERO {
                return usage("modulus must be positive");
            }
            let method = match method {
                Method::Brute => PisanoMethod::Brute,
                Method::Factored => PisanoMethod::Factored,
                Method::Auto => PisanoMethod::Auto,
            };
            match pisano_period_with(&modulus, method) {
                Ok(p) => {
                    outln!("{p}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Analyze { k, n, m, json } => cmd_analyze(k, n, m, json),
        Command::Sweep {
            k,
            n,
            m,
            jobs,
            out,
            format,
        } => cmd_sweep(&k, &n, &m, jobs, out, format),
        Command::Verify {
            suite,
            pisano_limit,
        } => cmd_verify(suite, pisano_limit),
    }
}
