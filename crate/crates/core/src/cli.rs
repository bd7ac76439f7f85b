//! Command-line front end: check, analyze, translate, solve, bench, compare.
//!
//! Exit codes: 0 success, 1 input error, 2 resource exhaustion, 3 internal
//! invariant violation (an answer the kernel rejects, or disagreeing modes).

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::{bench_query, random_signatures};
use crate::hhf_logic::{print_clauses, translate, Mode};
use crate::hhf_prover::{Limits, Status, Strategy, DEFAULT_BUDGET, DEFAULT_DEPTH};
use crate::lf_syntax::{parse_signature, pretty_print, Signature, Sort};
use crate::lf_typecheck::canonicalize_signature;
use crate::reconstruct::{prepare_query, run_query, CertStatus, FinalizeError, PreparedQuery, QueryRun};
use crate::rigidity::guard_plan;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Depth bound used by `compare` unless `--depth` is given.
pub const COMPARE_DEPTH: u32 = 10;

#[derive(Parser, Debug)]
#[command(name = "lfhh", version, about = "LF signatures to hereditary Harrop clauses, with proof search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Maximum number of backchaining steps on one branch.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub depth: Option<u32>,
    /// Maximum number of unification steps.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// `dfs` or `id` (iterative deepening).
    #[arg(long)]
    pub strategy: Option<Strategy>,
    /// Print backchaining events and the kernel derivation.
    #[arg(long)]
    pub trace: bool,
}

impl SearchArgs {
    fn limits(&self, depth: u32, strategy: Strategy) -> Limits {
        Limits {
            depth: self.depth.unwrap_or(depth),
            budget: self.budget,
            strategy: self.strategy.unwrap_or(strategy),
            max_solutions: 1,
            trace: self.trace,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Naive,
    Optimized,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Naive => Mode::Naive,
            ModeArg::Optimized => Mode::Optimized,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeSel {
    Naive,
    Optimized,
    Both,
}

impl ModeSel {
    fn modes(self) -> Vec<Mode> {
        match self {
            ModeSel::Naive => vec![Mode::Naive],
            ModeSel::Optimized => vec![Mode::Optimized],
            ModeSel::Both => vec![Mode::Naive, Mode::Optimized],
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Type-check a signature.
    Check { file: PathBuf },
    /// Report which binders of each constant occur rigidly.
    Analyze { file: PathBuf },
    /// Print the clauses of a signature.
    Translate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Optimized)]
        mode: ModeArg,
    },
    /// Search for an inhabitant of a query type and certify it.
    Solve {
        file: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Optimized)]
        mode: ModeArg,
        /// Report every answer instead of the first.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Counters for ground `append` checks of growing size.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,4,8,16,32,64")]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = ModeSel::Both)]
        mode: ModeSel,
        /// Leave the result list as a meta-variable.
        #[arg(long)]
        search: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        search_args: SearchArgs,
    },
    /// Run a query in both modes and compare the certified answers, or do
    /// so for every query of generated signatures (`--seed`).
    Compare {
        file: Option<PathBuf>,
        #[arg(long)]
        query: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of generated signatures.
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
}

/// Loads and checks a signature; prints the error and returns the exit
/// code on failure.
fn load(file: &PathBuf, err: &mut dyn Write) -> Result<Signature, i32> {
    let text = std::fs::read_to_string(file).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {}", file.display(), e);
        EXIT_INPUT
    })?;
    let sig = parse_signature(&text).map_err(|e| {
        let _ = writeln!(err, "{}:{}", file.display(), e);
        EXIT_INPUT
    })?;
    let (canonical, _) = canonicalize_signature(&sig).map_err(|e| {
        match failing_line(&text, &sig) {
            Some(line) => writeln!(err, "{}:{}: {}", file.display(), line, e),
            None => writeln!(err, "{}: {}", file.display(), e),
        }
        .ok();
        EXIT_INPUT
    })?;
    Ok(canonical)
}

/// Line of the first declaration that does not check, found by checking
/// growing prefixes of the signature.
fn failing_line(text: &str, sig: &Signature) -> Option<usize> {
    let mut prefix = Signature::new();
    let entry = sig.entries().iter().find(|e| {
        prefix.push(e.name.clone(), e.classifier.clone());
        canonicalize_signature(&prefix).is_err()
    })?;
    text.lines().position(|l| {
        l.trim_start()
            .strip_prefix(&*entry.name)
            .is_some_and(|rest| rest.trim_start().starts_with(':'))
    })
    .map(|i| i + 1)
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let r = match &cli.command {
        Command::Check { file } => load(file, err).map(|sig| {
            let _ = writeln!(out, "ok ({} declarations)", sig.len());
            EXIT_OK
        }),
        Command::Analyze { file } => load(file, err).map(|sig| {
            for e in sig.entries().iter().filter(|e| e.sort == Sort::Type) {
                let _ = writeln!(out, "{}", guard_plan(&e.name, &e.classifier).report());
            }
            EXIT_OK
        }),
        Command::Translate { file, mode } => load(file, err).map(|sig| {
            let _ = write!(out, "{}", print_clauses(&translate(&sig, (*mode).into())));
            EXIT_OK
        }),
        Command::Solve { file, query, mode, all, search } => load(file, err).map(|sig| {
            let mut limits = search.limits(DEFAULT_DEPTH, Strategy::IterativeDeepening);
            if *all {
                limits.max_solutions = usize::MAX;
            }
            cmd_solve(&sig, query, (*mode).into(), &limits, out, err)
        }),
        Command::Bench { sizes, mode, search, format, search_args } => {
            let strategy = if *search { Strategy::IterativeDeepening } else { Strategy::DepthFirst };
            Ok(cmd_bench(sizes, &mode.modes(), *search, *format, &search_args.limits(DEFAULT_DEPTH, strategy), out, err))
        }
        Command::Compare { file, query, seed, count, search } => {
            let limits = search.limits(COMPARE_DEPTH, Strategy::DepthFirst);
            match (file, query, seed) {
                (Some(file), Some(q), _) => load(file, err).map(|sig| cmd_compare(&sig, q, &limits, out, err)),
                (None, None, Some(seed)) => Ok(cmd_compare_generated(*seed, *count, &limits, out, err)),
                _ => {
                    let _ = writeln!(err, "error: compare needs FILE and --query, or --seed");
                    Err(EXIT_INPUT)
                }
            }
        }
    };
    r.unwrap_or_else(|code| code)
}

fn counters_line(run: &QueryRun) -> String {
    let c = run.report.counters;
    format!(
        "% backchain_steps={} unify_calls={} top_steps={} status={}",
        c.backchain_steps, c.unify_calls, c.top_steps, run.report.status
    )
}

/// Exit code and message for a search without answers.
fn no_answer(run: &QueryRun, limits: &Limits) -> (i32, String) {
    match run.report.status {
        Status::BudgetExceeded => {
            (EXIT_RESOURCE, format!("budget exceeded after {} unification steps", run.report.counters.unify_calls))
        }
        Status::DepthCutoff => {
            (EXIT_RESOURCE, format!("no solution within depth {} (depth limit reached)", limits.depth))
        }
        Status::Exhausted | Status::Stopped => (EXIT_OK, format!("no solution within depth {}", limits.depth)),
    }
}

fn finalize_failure(e: &FinalizeError) -> i32 {
    match e {
        FinalizeError::Uninhabited(_) => EXIT_RESOURCE,
        FinalizeError::Decode(_) | FinalizeError::IllTyped(_) => EXIT_INTERNAL,
    }
}

pub fn cmd_solve(sig: &Signature, query: &str, mode: Mode, limits: &Limits, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let pq = match prepare_query(sig, query) {
        Ok(q) => q,
        Err(e) => {
            let _ = writeln!(err, "query: {}", e);
            return EXIT_INPUT;
        }
    };
    let program = translate(sig, mode);
    let run = run_query(sig, &program, &pq, limits);
    if run.report.non_pattern {
        let _ = writeln!(err, "note: some branches failed on non-pattern unification problems");
    }
    let mut code = EXIT_OK;
    for (i, (ans, sol)) in run.answers.iter().zip(&run.report.solutions).enumerate() {
        if i > 0 {
            let _ = writeln!(out);
        }
        if limits.trace {
            for line in &sol.trace {
                let _ = writeln!(out, "% {}", line);
            }
        }
        match ans {
            Ok(a) => {
                let _ = write!(out, "{}", a.to_lf(limits.trace));
                if let CertStatus::Rejected(r) = &a.status {
                    let _ = writeln!(err, "internal error: kernel rejected a search answer: {}", r);
                    code = code.max(EXIT_INTERNAL);
                }
            }
            Err(e) => {
                let _ = writeln!(err, "error: {}", e);
                code = code.max(finalize_failure(e));
            }
        }
    }
    if run.answers.is_empty() {
        let (c, msg) = no_answer(&run, limits);
        let _ = writeln!(out, "{}", msg);
        code = c;
    } else if run.report.status == Status::BudgetExceeded {
        code = code.max(EXIT_RESOURCE);
    }
    let _ = writeln!(out, "{}", counters_line(&run));
    code
}

/// One bench measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub n: usize,
    pub mode: Mode,
    pub backchain_steps: u64,
    pub unify_calls: u64,
    pub wall_ns: u128,
}

/// Runs the `append` bench query of size `n` and certifies the answer.
pub fn bench_cell(sig: &Signature, n: usize, mode: Mode, search: bool, limits: &Limits) -> Result<BenchRow, String> {
    let pq = prepare_query(sig, &bench_query(n, search)).map_err(|e| e.to_string())?;
    let program = translate(sig, mode);
    let start = Instant::now();
    let (qg, sorts) = pq.goal(mode);
    let report = crate::hhf_prover::solve(&program, &qg.goal, &sorts, limits);
    let wall_ns = start.elapsed().as_nanos();
    let sol = report.solutions.first().ok_or_else(|| format!("n={} {}: {}", n, mode, report.status))?;
    let fin = crate::reconstruct::finalize_metavars(sig, &program, &pq, sol, limits).map_err(|e| e.to_string())?;
    let ans = crate::reconstruct::certify(sig, &fin);
    if let CertStatus::Rejected(r) = ans.status {
        return Err(format!("n={} {}: kernel rejected the answer: {}", n, mode, r));
    }
    Ok(BenchRow {
        n,
        mode,
        backchain_steps: report.counters.backchain_steps,
        unify_calls: report.counters.unify_calls,
        wall_ns,
    })
}

pub fn cmd_bench(
    sizes: &[usize],
    modes: &[Mode],
    search: bool,
    format: Format,
    limits: &Limits,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let sig = parse_signature(crate::corpus::APPEND_LF).expect("built-in signature parses");
    let mut code = EXIT_OK;
    match format {
        Format::Csv => {
            let _ = writeln!(out, "n,mode,backchain_steps,unify_calls,wall_ns");
        }
        Format::Text => {
            let _ = writeln!(out, "{:>6} {:>10} {:>16} {:>12} {:>14}", "n", "mode", "backchain_steps", "unify_calls", "wall_ns");
        }
    }
    for &n in sizes {
        for &mode in modes {
            match bench_cell(&sig, n, mode, search, limits) {
                Ok(r) => {
                    let _ = match format {
                        Format::Csv => writeln!(out, "{},{},{},{},{}", r.n, r.mode, r.backchain_steps, r.unify_calls, r.wall_ns),
                        Format::Text => writeln!(
                            out,
                            "{:>6} {:>10} {:>16} {:>12} {:>14}",
                            r.n, r.mode, r.backchain_steps, r.unify_calls, r.wall_ns
                        ),
                    };
                }
                Err(e) => {
                    let _ = writeln!(err, "error: {}", e);
                    code = code.max(if e.contains("rejected") { EXIT_INTERNAL } else { EXIT_RESOURCE });
                }
            }
        }
    }
    code
}

/// Both modes on one query, with the agreement verdict.
#[derive(Clone, Debug)]
pub struct ModeComparison {
    pub naive: QueryRun,
    pub optimized: QueryRun,
}

impl ModeComparison {
    fn first_answer(run: &QueryRun) -> Option<&Result<crate::reconstruct::CertifiedAnswer, FinalizeError>> {
        run.answers.first()
    }

    pub fn naive_succeeds(&self) -> bool {
        !self.naive.answers.is_empty()
    }

    pub fn optimized_succeeds(&self) -> bool {
        !self.optimized.answers.is_empty()
    }

    /// Every answer produced was certified.
    pub fn all_certified(&self) -> bool {
        [&self.naive, &self.optimized]
            .iter()
            .all(|r| r.answers.iter().all(|a| matches!(a, Ok(a) if a.is_certified())))
    }

    /// Either both searches fail or both first answers are certified and
    /// α-equal (proof and query bindings).
    pub fn agree(&self) -> bool {
        match (Self::first_answer(&self.naive), Self::first_answer(&self.optimized)) {
            (None, None) => true,
            (Some(Ok(a)), Some(Ok(b))) => {
                a.is_certified() && b.is_certified() && a.lf_proof == b.lf_proof && a.bindings == b.bindings
            }
            _ => false,
        }
    }

    /// Neither run was cut off by the budget.
    pub fn conclusive(&self) -> bool {
        self.naive.report.status != Status::BudgetExceeded && self.optimized.report.status != Status::BudgetExceeded
    }
}

pub fn compare_modes(sig: &Signature, pq: &PreparedQuery, limits: &Limits) -> ModeComparison {
    ModeComparison {
        naive: run_query(sig, &translate(sig, Mode::Naive), pq, limits),
        optimized: run_query(sig, &translate(sig, Mode::Optimized), pq, limits),
    }
}

fn describe(run: &QueryRun) -> String {
    match run.answers.first() {
        None => format!("no solution ({})", run.report.status),
        Some(Err(e)) => format!("error: {}", e),
        Some(Ok(a)) => format!(
            "depth {}, {} backchain steps, {}: {}",
            run.report.solutions[0].depth,
            run.report.counters.backchain_steps,
            a.status,
            pretty_print(&a.lf_proof)
        ),
    }
}

pub fn cmd_compare(sig: &Signature, query: &str, limits: &Limits, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let pq = match prepare_query(sig, query) {
        Ok(q) => q,
        Err(e) => {
            let _ = writeln!(err, "query: {}", e);
            return EXIT_INPUT;
        }
    };
    let c = compare_modes(sig, &pq, limits);
    let _ = writeln!(out, "naive:     {}", describe(&c.naive));
    let _ = writeln!(out, "optimized: {}", describe(&c.optimized));
    let agree = c.agree();
    let _ = writeln!(out, "agreement: {}", if agree { "yes" } else { "no" });
    if !c.conclusive() {
        EXIT_RESOURCE
    } else if !agree || !c.all_certified() {
        EXIT_INTERNAL
    } else {
        EXIT_OK
    }
}

pub fn cmd_compare_generated(seed: u64, count: usize, limits: &Limits, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (mut total, mut agreed, mut inconclusive) = (0, 0, 0);
    let mut code = EXIT_OK;
    for (i, g) in random_signatures(seed, count).iter().enumerate() {
        let sig = match parse_signature(&g.text).map_err(|e| e.to_string()).and_then(|s| {
            canonicalize_signature(&s).map(|(c, _)| c).map_err(|e| e.to_string())
        }) {
            Ok(s) => s,
            Err(e) => {
                let _ = writeln!(err, "internal error: generated signature {} is ill-formed: {}", i, e);
                code = EXIT_INTERNAL;
                continue;
            }
        };
        let mut sig_agreed = 0;
        for q in &g.queries {
            total += 1;
            let Ok(pq) = prepare_query(&sig, q) else {
                let _ = writeln!(err, "internal error: generated query {} is ill-formed", q);
                code = EXIT_INTERNAL;
                continue;
            };
            let c = compare_modes(&sig, &pq, limits);
            if !c.conclusive() {
                inconclusive += 1;
                let _ = writeln!(out, "signature {}: {}: budget exceeded", i, q);
                code = code.max(EXIT_RESOURCE);
            } else if c.agree() && c.all_certified() {
                sig_agreed += 1;
            } else {
                let _ = writeln!(out, "signature {}: {}: disagreement", i, q);
                let _ = writeln!(out, "  naive:     {}", describe(&c.naive));
                let _ = writeln!(out, "  optimized: {}", describe(&c.optimized));
                code = EXIT_INTERNAL;
            }
        }
        agreed += sig_agreed;
        let _ = writeln!(out, "signature {}: {}/{} queries agree", i, sig_agreed, g.queries.len());
    }
    let _ = writeln!(out, "total: {}/{} agree, {} inconclusive", agreed, total, inconclusive);
    code
}
