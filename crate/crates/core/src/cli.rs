//! Command-line front end. Exit codes are the machine contract (CLI.md);
//! everything written to stderr is for humans.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::acceptance::{evaluate, parse_rules, AcceptanceRule, Verdict};
use crate::comparison::compare;
use crate::merger::merge;
use crate::model::{ComparisonMode, ComparisonReport, Policy};
use crate::parser::{parse_policy, ParseDiagnostic};
use crate::render::render_policy;

pub mod exit {
    pub const OK: u8 = 0;
    /// I/O failure or bad command line.
    pub const IO: u8 = 1;
    /// A policy file has ERROR diagnostics.
    pub const PARSE: u8 = 2;
    /// The acceptance rules rejected policy B.
    pub const REJECTED: u8 = 3;
    /// The rules file is malformed or names an unknown section.
    pub const RULES: u8 = 4;
}

#[derive(Debug, Parser)]
#[command(
    name = "cpcompat",
    version,
    about = "Compare and merge standardized certificate policies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Merge,
    Acquire,
}

impl From<Mode> for ComparisonMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Merge => ComparisonMode::Merge,
            Mode::Acquire => ComparisonMode::Acquire,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a policy file and report diagnostics.
    Validate { file: PathBuf },
    /// Score policy B against policy A and print the JSON report.
    Compare {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, value_enum, default_value = "merge")]
        mode: Mode,
        /// Acceptance rules; when given the exit status carries the verdict.
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare, evaluate the rules and write the unified policy on acceptance.
    Merge {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, value_enum, default_value = "merge")]
        mode: Mode,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::IO } else { exit::OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            code
        }
    }
}

struct Failure(u8, String);

fn execute(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Validate { file } => {
            load_policy(&file)?;
            Ok(exit::OK)
        }
        Command::Compare {
            file_a,
            file_b,
            mode,
            rules,
            report,
        } => {
            let a = load_policy(&file_a)?;
            let b = load_policy(&file_b)?;
            let rules = rules.as_deref().map(load_rules).transpose()?;
            let result = compare(&a, &b, mode.into());
            let json = result.to_json();
            match report {
                Some(path) => fs::write(&path, json + "\n").map_err(|e| {
                    Failure(exit::IO, format!("cannot write {}: {e}", path.display()))
                })?,
                None => {
                    let mut stdout = std::io::stdout().lock();
                    writeln!(stdout, "{json}")
                        .map_err(|e| Failure(exit::IO, format!("cannot write report: {e}")))?;
                }
            }
            print_summary(&result);
            match rules {
                None => Ok(exit::OK),
                Some(rules) => {
                    let verdict = judge(&result, &rules)?;
                    Ok(if verdict.accepted {
                        exit::OK
                    } else {
                        exit::REJECTED
                    })
                }
            }
        }
        Command::Merge {
            file_a,
            file_b,
            mode,
            rules,
            out,
        } => {
            let a = load_policy(&file_a)?;
            let b = load_policy(&file_b)?;
            let rules = load_rules(&rules)?;
            let mode = ComparisonMode::from(mode);
            let result = compare(&a, &b, mode);
            print_summary(&result);
            let verdict = judge(&result, &rules)?;
            if !verdict.accepted {
                eprintln!("not merged: {} was rejected", b.name);
                return Ok(exit::REJECTED);
            }
            let merged = merge(&a, &b, &result, &verdict, mode)
                .map_err(|e| Failure(exit::REJECTED, e.to_string()))?;
            fs::write(&out, render_policy(&merged))
                .map_err(|e| Failure(exit::IO, format!("cannot write {}: {e}", out.display())))?;
            Ok(exit::OK)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure(exit::IO, format!("cannot read {}: {e}", path.display())))
}

fn load_policy(path: &Path) -> Result<Policy, Failure> {
    let source = read(path)?;
    let name = path.display().to_string();
    match parse_policy(&source, &name) {
        Ok(parsed) => {
            print_diagnostics(&name, &parsed.diagnostics);
            Ok(parsed.policy)
        }
        Err(e) => {
            print_diagnostics(&name, &e.diagnostics);
            Err(Failure(exit::PARSE, e.to_string()))
        }
    }
}

fn load_rules(path: &Path) -> Result<Vec<AcceptanceRule>, Failure> {
    let source = read(path)?;
    parse_rules(&source).map_err(|e| Failure(exit::RULES, format!("{}: {e}", path.display())))
}

fn judge(report: &ComparisonReport, rules: &[AcceptanceRule]) -> Result<Verdict, Failure> {
    let verdict = evaluate(report, rules).map_err(|e| Failure(exit::RULES, e.to_string()))?;
    for o in &verdict.rule_outcomes {
        let mark = if o.passed { "pass" } else { "FAIL" };
        eprintln!("{mark}  {}  (observed {})", o.rule, fmt_score(o.observed));
    }
    eprintln!(
        "verdict: {}",
        if verdict.accepted {
            "ACCEPTED"
        } else {
            "REJECTED"
        }
    );
    Ok(verdict)
}

fn print_diagnostics(name: &str, diagnostics: &[ParseDiagnostic]) {
    for d in diagnostics {
        eprintln!("{name}: {d}");
    }
}

fn print_summary(report: &ComparisonReport) {
    eprintln!(
        "{} vs {} ({} mode)",
        report.policy_a_name, report.policy_b_name, report.mode
    );
    eprintln!("{:<12} {:>9} {:>4}  status", "path", "S_i", "W_i");
    for s in &report.paragraph_scores {
        eprintln!(
            "{:<12} {:>9} {:>4}  {}",
            s.path.to_string(),
            fmt_score(s.combined_score),
            s.weight,
            s.match_status.as_str()
        );
    }
    eprintln!(
        "overall weighted {}  unweighted {}",
        fmt_score(report.overall_weighted),
        fmt_score(report.overall_unweighted)
    );
    for d in &report.diagnostics {
        eprintln!("note: {}: {}", d.path, d.message);
    }
}

/// Up to four decimals, trailing zeros dropped: `32.5`, `43.3333`, `100`.
pub fn fmt_score(x: f64) -> String {
    let s = format!("{x:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
