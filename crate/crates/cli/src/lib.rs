//! Workflows behind the `chowvol` binary.
//!
//! Every command returns a [`RunReport`]; stdout carries the rendered
//! report, stderr carries diagnostics and timings. Exit codes: 1 for invalid
//! input, 2 for a disagreement or failed invariant, 3 when no generic choice
//! was found within the retry budget.

mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use chowvol::corpus::{random_matroids, uniform_matroids, CorpusEntry};
use chowvol::io::{parse_matroid, parse_vol, vol_to_json};
use chowvol::mixedvol::{
    brion_volume, cross_validate, deletion_volume, generic_vectors_with, verify_volume, Genericity,
};
use chowvol::{Error, Matroid};

pub use report::{verification_checks, Check, Entry, RunReport};

/// Largest ground set accepted by `corpus`.
pub const CORPUS_LIMIT: usize = 7;

#[derive(Debug, Parser)]
#[command(name = "chowvol", version, about = "Exact mixed volumes of matroid Chow rings")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Retries when a random choice is degenerate.
    #[arg(long, global = true, env = "CHOWVOL_RETRY_BUDGET")]
    pub retry_budget: Option<usize>,

    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Brion,
    Deletion,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute Vol_M and write it as JSON.
    Compute {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Print the polynomial in human-readable form.
        #[arg(long)]
        pretty: bool,
    },
    /// Check a volume polynomial against the relations it must satisfy.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Polynomial JSON; computed by deletion when absent.
        #[arg(long)]
        vol: Option<PathBuf>,
        #[arg(long)]
        rank_checks: bool,
    },
    /// Brion sums under several seeds against the deletion recursion.
    Compare {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        /// First seed; the others follow consecutively.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Cross-validate uniform and random matroids.
    Corpus {
        #[arg(long, default_value_t = 6)]
        max_elements: usize,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// A failed run and its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    /// Report to print despite the failure, if one was produced.
    pub report: Option<RunReport>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
            report: None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GenericityExhausted(_) => 3,
            Error::LiftInvariant(_)
            | Error::VariableUniverse(_)
            | Error::Verification(_)
            | Error::StaleCertificate => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
            report: None,
        }
    }
}

pub type Outcome = Result<(RunReport, String), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_matroid(path: &Path) -> Result<Matroid, Failure> {
    parse_matroid(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn entry(name: &str, m: &Matroid) -> Entry {
    Entry {
        name: name.to_string(),
        elements: m.len(),
        rank: m.rank(),
        methods: Vec::new(),
        seeds: Vec::new(),
        polynomial: None,
        pretty: None,
        checks: Vec::new(),
    }
}

fn timed<T>(timings: &mut Vec<(String, std::time::Duration)>, label: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    timings.push((label.to_string(), start.elapsed()));
    out
}

fn finish(mut report: RunReport, text: String) -> Outcome {
    report.passed = report.entries.iter().all(Entry::passed);
    if report.passed {
        Ok((report, text))
    } else {
        Err(Failure {
            code: 2,
            message: format!("{} failed", report.command),
            report: Some(report),
        })
    }
}

pub fn cmd_compute(
    input: &Path,
    method: MethodArg,
    seed: u64,
    output: Option<&Path>,
    pretty: bool,
    policy: &Genericity,
) -> Outcome {
    let m = load_matroid(input)?;
    let mut timings = Vec::new();
    let mut e = entry(&input.display().to_string(), &m);
    let brion = if method != MethodArg::Deletion {
        e.methods.push("brion".into());
        e.seeds.push(seed);
        Some(timed(&mut timings, "brion", || {
            brion_volume(&m, &generic_vectors_with(&m, seed, policy)?)
        })?)
    } else {
        None
    };
    let deletion = if method != MethodArg::Brion {
        e.methods.push("deletion".into());
        Some(timed(&mut timings, "deletion", || deletion_volume(&m))?)
    } else {
        None
    };
    let vol = match (&brion, &deletion) {
        (Some(b), Some(d)) => {
            let same = b == d;
            e.checks.push(Check::new("brion = deletion", same, ""));
            if !same {
                let mut report = RunReport::new("compute", vec![e]);
                report.timings = timings;
                return Err(Failure {
                    code: 2,
                    message: format!("methods disagree:\n  brion:    {b}\n  deletion: {d}"),
                    report: Some(report),
                });
            }
            d
        }
        (Some(v), None) | (None, Some(v)) => v,
        (None, None) => unreachable!("at least one method runs"),
    };
    let json = vol_to_json(vol, true);
    if let Some(path) = output {
        fs::write(path, format!("{json}\n"))
            .map_err(|err| Failure::input(format!("{}: {err}", path.display())))?;
    }
    let text = if pretty { format!("{vol}\n") } else { format!("{json}\n") };
    e.set_volume(vol);
    let mut report = RunReport::new("compute", vec![e]);
    report.timings = timings;
    finish(report, text)
}

pub fn cmd_verify(input: &Path, vol: Option<&Path>, rank_checks: bool) -> Outcome {
    let m = load_matroid(input)?;
    let mut timings = Vec::new();
    let mut e = entry(&input.display().to_string(), &m);
    let candidate = match vol {
        Some(path) => {
            e.methods.push("input".into());
            parse_vol(&read(path)?).map_err(|err| Failure::input(format!("{}: {err}", path.display())))?
        }
        None => {
            e.methods.push("deletion".into());
            timed(&mut timings, "deletion", || deletion_volume(&m))?
        }
    };
    if candidate.degree != m.dim() {
        e.checks.push(Check::new(
            "degree matches rank - 1",
            false,
            format!("document degree {}, expected {}", candidate.degree, m.dim()),
        ));
    }
    let v = timed(&mut timings, "verify", || verify_volume(&m, &candidate.poly, rank_checks))?;
    e.checks.extend(verification_checks(&v));
    e.set_volume(&candidate);
    let mut report = RunReport::new("verify", vec![e]);
    report.timings = timings;
    let text = report.to_text();
    finish(report, text)
}

pub fn cmd_compare(input: &Path, count: u64, first: u64, policy: &Genericity) -> Outcome {
    if count == 0 {
        return Err(Failure::input("need at least one seed"));
    }
    let m = load_matroid(input)?;
    let seeds: Vec<u64> = (first..first + count).collect();
    let mut timings = Vec::new();
    let cross = timed(&mut timings, "compare", || cross_validate(&m, &seeds, policy))?;
    let mut e = entry(&input.display().to_string(), &m);
    e.methods = vec!["brion".into(), "deletion".into()];
    e.seeds = seeds.clone();
    for (s, b) in seeds.iter().zip(&cross.brion) {
        e.checks.push(Check::new(format!("brion(seed={s}) = deletion"), *b == cross.deletion, ""));
    }
    if let Some(d) = &cross.divergence {
        e.checks.push(Check::new(
            "first divergence",
            false,
            format!(
                "only in {}: {}; only in {}: {}",
                d.left,
                d.only_left.pretty(),
                d.right,
                d.only_right.pretty()
            ),
        ));
    }
    e.checks.extend(verification_checks(&cross.verification));
    e.set_volume(&cross.deletion);
    let mut report = RunReport::new("compare", vec![e]);
    report.timings = timings;
    let text = report.to_text();
    finish(report, text)
}

fn corpus_entry(c: &CorpusEntry, seeds: &[u64], policy: &Genericity) -> Result<Entry, Error> {
    let cross = cross_validate(&c.matroid, seeds, policy)?;
    let mut e = entry(&c.name, &c.matroid);
    e.methods = vec!["brion".into(), "deletion".into()];
    e.seeds = seeds.to_vec();
    let agree = cross.divergence.is_none();
    let detail = cross
        .divergence
        .as_ref()
        .map(|d| format!("{} and {} differ", d.left, d.right))
        .unwrap_or_default();
    e.checks.push(Check::new("methods agree", agree, detail));
    e.checks.extend(verification_checks(&cross.verification));
    e.set_volume(&cross.deletion);
    Ok(e)
}

pub fn cmd_corpus(max_elements: usize, count: usize, seed: u64, policy: &Genericity) -> Outcome {
    if max_elements == 0 || max_elements > CORPUS_LIMIT {
        return Err(Failure::input(format!("--max-elements must be in 1..={CORPUS_LIMIT}")));
    }
    let mut list = uniform_matroids(max_elements)?;
    list.extend(random_matroids(count, max_elements, seed)?);
    let seeds = [seed, seed.wrapping_add(1)];
    let mut timings = Vec::new();
    let entries = timed(&mut timings, "corpus", || {
        list.par_iter()
            .map(|c| corpus_entry(c, &seeds, policy))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut report = RunReport::new("corpus", entries);
    report.timings = timings;
    let text = report.to_table();
    finish(report, text)
}

fn policy(budget: Option<usize>) -> Genericity {
    budget.map_or_else(Genericity::default, Genericity::with_retries)
}

pub fn execute(cli: &Cli) -> Outcome {
    let policy = policy(cli.retry_budget);
    match &cli.command {
        Command::Compute {
            input,
            method,
            seed,
            output,
            pretty,
        } => cmd_compute(input, *method, *seed, output.as_deref(), *pretty, &policy),
        Command::Verify {
            input,
            vol,
            rank_checks,
        } => cmd_verify(input, vol.as_deref(), *rank_checks),
        Command::Compare { input, seeds, seed } => cmd_compare(input, *seeds, *seed, &policy),
        Command::Corpus {
            max_elements,
            count,
            seed,
        } => cmd_corpus(*max_elements, *count, *seed, &policy),
    }
}

fn print_timings(report: &RunReport, err: &mut dyn Write) {
    for (label, t) in &report.timings {
        let _ = writeln!(err, "time {label}: {:.3}s", t.as_secs_f64());
    }
}

/// Parses arguments, runs the command, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            let _ = writeln!(err, "warning: {e}");
        }
    }
    let render = |report: &RunReport, text: &str| {
        if cli.json {
            format!("{}\n", report.to_json())
        } else {
            text.to_string()
        }
    };
    match execute(&cli) {
        Ok((report, text)) => {
            let _ = out.write_all(render(&report, &text).as_bytes());
            print_timings(&report, err);
            0
        }
        Err(f) => {
            if let Some(report) = &f.report {
                let text = match report.command.as_str() {
                    "corpus" => report.to_table(),
                    _ => report.to_text(),
                };
                let _ = out.write_all(render(report, &text).as_bytes());
                print_timings(report, err);
            }
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
