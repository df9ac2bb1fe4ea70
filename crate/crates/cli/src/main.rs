use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use unitfrac_core::bounds::{bounds_report, construct_p2};
use unitfrac_core::enumerator::{enumerate, exists};
use unitfrac_core::numtheory::{alpha_cap_at_most, is_prime};
use unitfrac_core::{verify, Params, SolutionGrid};
use unitfrac_cli::crosscheck::{cross_check, CrossCheckRange};
use unitfrac_cli::format::{parse_records, to_json_list, to_tableau_list, SolutionRecord};
use unitfrac_cli::scan::scan_q;

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

/// Decompositions of 1 into unit fractions with denominators of the form p^a q^b.
#[derive(Parser)]
#[command(name = "unitfrac", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every solution.
    Enumerate(Instance),
    /// Count solutions.
    Count(Instance),
    /// Report whether any solution exists.
    Exists(Instance),
    /// Check solutions read from a JSON file.
    Verify {
        #[arg(long)]
        seedfile: String,
    },
    /// Upper bounds on q and threshold verdicts.
    Bounds {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: Option<u32>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Tableau)]
        format: Format,
    },
    /// Explicit p = 2 solution for odd q.
    Construct {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: u32,
        #[arg(long, value_enum, default_value_t = Format::Tableau)]
        format: Format,
    },
    /// Existence and counts for every q up to the best bound.
    Scan {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: Option<u32>,
        #[arg(long)]
        primes_only: bool,
        /// Also count solutions for each q.
        #[arg(long)]
        counts: bool,
        #[arg(long, value_enum, default_value_t = Format::Tableau)]
        format: Format,
    },
    /// Compare the row search with the brute-force oracle.
    CrossCheck {
        /// Comma-separated primes.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u64>,
        /// Comma-separated q values.
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        /// Largest n (n runs from 2).
        #[arg(long)]
        n: u64,
        /// Largest alpha_p.
        #[arg(long)]
        alpha: u32,
    },
}

#[derive(Args)]
struct Instance {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: u64,
    /// Largest p-exponent (default: the Sylvester cap).
    #[arg(long)]
    alpha: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Tableau)]
    format: Format,
    /// Keep only solutions with pairwise distinct denominators.
    #[arg(long)]
    distinct: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tableau,
    Json,
    Count,
}

struct Failure {
    code: u8,
    message: String,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(err: E) -> Self {
        Failure { code: EXIT_USAGE, message: err.to_string() }
    }
}

macro_rules! out {
    ($($arg:tt)*) => {
        emit(format_args!($($arg)*))?
    };
}

fn emit(args: std::fmt::Arguments) -> Result<(), Failure> {
    match writeln!(io::stdout().lock(), "{args}") {
        Err(err) if err.kind() == io::ErrorKind::BrokenPipe => Err(Failure { code: 0, message: String::new() }),
        other => Ok(other?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {err}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}

fn default_alpha(p: u64, n: u64) -> u32 {
    let mut fits = 0;
    while p.checked_pow(fits + 1).is_some() {
        fits += 1;
    }
    alpha_cap_at_most(p, n.min(u32::MAX as u64) as u32, fits)
}

fn params(p: u64, q: u64, n: u64, alpha: Option<u32>) -> Result<Params, Failure> {
    let alpha = alpha.unwrap_or_else(|| default_alpha(p, n));
    let params = Params::new(p, q, n, alpha)?;
    if !is_prime(q) {
        eprintln!("warning: q = {q} is not prime");
    }
    Ok(params)
}

fn print_grids(grids: &[SolutionGrid], format: Format) -> Result<(), Failure> {
    match format {
        Format::Tableau => {
            if !grids.is_empty() {
                out!("{}", to_tableau_list(grids));
            }
        }
        Format::Json => out!("{}", to_json_list(grids)),
        Format::Count => out!("{}", grids.len()),
    }
    Ok(())
}

fn solutions(inst: &Instance) -> Result<Vec<SolutionGrid>, Failure> {
    let params = params(inst.p, inst.q, inst.n, inst.alpha)?;
    let mut grids = enumerate(&params)?;
    if inst.distinct {
        grids.retain(SolutionGrid::is_distinct);
    }
    Ok(grids)
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Enumerate(inst) => print_grids(&solutions(&inst)?, inst.format)?,
        Command::Count(inst) => out!("{}", solutions(&inst)?.len()),
        Command::Exists(inst) => {
            let found = if inst.distinct {
                !solutions(&inst)?.is_empty()
            } else {
                exists(&params(inst.p, inst.q, inst.n, inst.alpha)?)?
            };
            out!("{found}");
        }
        Command::Verify { seedfile } => verify_file(&seedfile)?,
        Command::Bounds { p, n, alpha, q, format } => {
            let alpha = alpha.unwrap_or_else(|| default_alpha(p, n));
            let report = bounds_report(p, alpha, n, q)?;
            let notes = report.notes.as_ref();
            if format == Format::Json {
                let per_k: serde_json::Map<_, _> =
                    report.per_k.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
                let value = json!({
                    "p": p, "alpha_p": alpha, "n": n, "q": q,
                    "q_basic": report.q_basic, "q_best": report.q_best, "per_k": per_k,
                    "construction_guarantees": notes.and_then(|n| n.construction_guarantees),
                    "converse_excludes": notes.map(|n| n.converse_excludes),
                    "cns_verdict": notes.and_then(|n| n.cns_verdict),
                    "alpha2_verdict": notes.and_then(|n| n.alpha2_verdict),
                });
                out!("{}", serde_json::to_string_pretty(&value)?);
            } else {
                out!("p = {p}, alpha_p = {alpha}, n = {n}");
                out!("q_basic (strict) = {}", report.q_basic);
                for (k, v) in &report.per_k {
                    out!("q_bound k = {k}: {v}");
                }
                out!("q_best = {}", report.q_best);
                if let (Some(q), Some(notes)) = (q, notes) {
                    out!("q = {q}");
                    out!("  construction guarantees: {:?}", notes.construction_guarantees);
                    for (k, (applies, threshold)) in &notes.converse {
                        out!("  converse k = {k}: applies {applies}, threshold {threshold}");
                    }
                    out!("  converse excludes: {}", notes.converse_excludes);
                    out!("  large-q criterion: {:?}", notes.cns_verdict);
                    out!("  alpha = 2 criterion: {:?}", notes.alpha2_verdict);
                }
            }
        }
        Command::Construct { p, q, n, alpha, format } => {
            if p != 2 {
                return Err(Failure { code: EXIT_USAGE, message: "construct requires p = 2".into() });
            }
            print_grids(&[construct_p2(alpha, q, n)?], format)?;
        }
        Command::Scan { p, n, alpha, primes_only, counts, format } => {
            let alpha = alpha.unwrap_or_else(|| default_alpha(p, n));
            let report = scan_q(p, alpha, n, primes_only, counts)?;
            if format == Format::Json {
                out!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                out!("p = {p}, alpha_p = {alpha}, n = {n}, q_best = {}", report.q_best);
                for r in &report.records {
                    if format == Format::Count || r.exists {
                        let flag = if r.contradiction { "  CONTRADICTION" } else { "" };
                        match r.count {
                            Some(c) => out!("q = {:>4}  count = {c}{flag}", r.q),
                            None => out!("q = {:>4}  exists = {}{flag}", r.q, r.exists),
                        }
                    }
                }
                let present: Vec<String> = report.present().map(|q| q.to_string()).collect();
                out!("present: {}", present.join(" "));
                let gaps: Vec<String> = report.gaps.iter().map(|q| q.to_string()).collect();
                out!("gaps: {}", gaps.join(" "));
            }
        }
        Command::CrossCheck { p, q, n, alpha } => {
            let range = CrossCheckRange { ps: p, qs: q, n_max: n, alpha_max: alpha };
            let summary = cross_check(&range)?;
            match summary.mismatch {
                None => out!(
                    "pass: {} instances, {} solutions",
                    summary.instances, summary.solutions
                ),
                Some(m) => {
                    out!("mismatch at {}", m.params);
                    for g in &m.missing {
                        out!("missing:\n{g}");
                    }
                    for g in &m.extra {
                        out!("extra:\n{g}");
                    }
                    return Err(Failure { code: EXIT_MISMATCH, message: "cross-check failed".into() });
                }
            }
        }
    }
    Ok(())
}

fn verify_file(path: &str) -> Result<(), Failure> {
    let text = fs::read_to_string(path)?;
    let records = parse_records(&text)?;
    let mut bad = 0;
    for (i, record) in records.iter().enumerate() {
        let report = verify(&record.to_grid()?);
        if report.is_valid {
            let derived = SolutionRecord::from_grid(&record.to_grid()?);
            if derived != *record {
                out!("#{i}: valid (stored kind/alpha_q/height differ: {}, {}, {})",
                    derived.kind, derived.alpha_q, derived.height);
            } else {
                out!("#{i}: valid");
            }
        } else {
            bad += 1;
            let codes: Vec<&str> = report.failures.iter().map(|f| f.code()).collect();
            out!("#{i}: invalid ({}; sum = {})", codes.join(", "), report.sum);
        }
    }
    if bad > 0 {
        return Err(Failure { code: EXIT_VERIFY, message: format!("{bad} of {} records invalid", records.len()) });
    }
    Ok(())
}
