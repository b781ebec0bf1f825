#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod error;
mod model;
mod output;

use error::CliError;
use output::{to_json, Table};

#[derive(Debug, Parser)]
#[command(name = "blaschke", version, about = "Experiments with Blaschke products on the unit disk")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
struct Global {
    /// Seed for the ChaCha8 generator used by randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Record wall time in the JSON run record (breaks byte-identical output).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
enum Command {
    /// Evaluate a model at points of the disk.
    Eval(commands::EvalArgs),
    /// Check the level-set conditions characterizing indestructibility.
    Certify(commands::CertifyArgs),
    /// Singular mass of Frostman shifts over a grid of shifts.
    Probe(commands::ProbeArgs),
    /// Certify compositions of random finite products.
    Theorem1(commands::Theorem1Args),
    /// Check the composition identities for one case.
    CaseCheck(commands::CaseArgs),
    /// Radial log-integrals and the Blaschke verdict.
    Criteria(commands::CriteriaArgs),
    /// Solve for the maximal product with a given critical set.
    Maximal(commands::MaximalArgs),
}

/// What every command returns: a JSON report, its CSV view, and an exit code.
pub struct Outcome {
    pub report: serde_json::Value,
    pub table: Table,
    pub code: u8,
}

#[derive(Serialize)]
struct RunRecord<'a> {
    tool: &'static str,
    version: &'static str,
    prng: &'static str,
    config: &'a Cli,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_s: Option<f64>,
    exit_code: u8,
    report: serde_json::Value,
}

impl Serialize for Cli {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Config", 2)?;
        st.serialize_field("global", &self.global)?;
        st.serialize_field("command", &self.command)?;
        st.end()
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let seed = cli.global.seed;
    match &cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Certify(a) => commands::certify(a),
        Command::Probe(a) => commands::probe(a),
        Command::Theorem1(a) => commands::theorem1(a, seed),
        Command::CaseCheck(a) => commands::case_check(a, seed),
        Command::Criteria(a) => commands::criteria(a),
        Command::Maximal(a) => commands::maximal(a),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.global.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let start = Instant::now();
    let outcome = match run(&cli) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = match cli.global.format {
        Format::Csv => outcome.table.to_csv(),
        Format::Json => to_json(&RunRecord {
            tool: "blaschke",
            version: env!("CARGO_PKG_VERSION"),
            prng: "ChaCha8",
            config: &cli,
            wall_time_s: cli.global.timing.then(|| start.elapsed().as_secs_f64()),
            exit_code: outcome.code,
            report: outcome.report,
        }),
    };
    if let Err(e) = emit(&cli, &text) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    ExitCode::from(outcome.code)
}
