use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use darboux::monomialize::StrategyKind;
use darboux::pipeline::{run, Command};
use darboux::problem::{parse_script, Problem};
use darboux::report::Report;
use darboux::verify::verify_report;

/// Exact monomialization and unit elimination for Darboux-type foliations.
#[derive(Debug, Parser)]
#[command(name = "darboux", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Jet order N; power-series identities are certified modulo degree N+1.
    #[arg(long, global = true, value_name = "N")]
    jet_order: Option<u32>,

    /// Maximum number of blow-ups along any chart path.
    #[arg(long, global = true, value_name = "D")]
    max_depth: Option<usize>,

    /// Center selection strategy.
    #[arg(long, global = true, value_enum)]
    strategy: Option<StrategyArg>,

    /// Center script, one `<chart-id> <var> <var>...` per line (implies manual).
    #[arg(long, global = true, value_name = "FILE")]
    script: Option<PathBuf>,

    /// Also write the machine-readable report to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Print only the machine-readable report.
    #[arg(long, global = true)]
    machine: bool,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// One-form, wedge coefficients and integrating-factor check.
    Foliation { problem: PathBuf },
    /// Blow up until every factor is monomial times unit.
    Monomialize { problem: PathBuf },
    /// Monomialize, then exponent-matrix rank, resonance and generator field.
    Analyze { problem: PathBuf },
    /// Analyze, then eliminate units and push the generator forward.
    Eliminate { problem: PathBuf },
    /// Every stage and every verification.
    Full { problem: PathBuf },
    /// Re-check every identity of a machine-readable report.
    VerifyReport { report: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Manual,
    AutoOrigin,
    AutoCoordinate,
}

impl From<StrategyArg> for StrategyKind {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Manual => StrategyKind::Manual,
            StrategyArg::AutoOrigin => StrategyKind::AutoOrigin,
            StrategyArg::AutoCoordinate => StrategyKind::AutoCoordinate,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_problem(cli: &Cli, path: &Path) -> Result<Problem> {
    let mut problem = Problem::from_toml(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    if let Some(n) = cli.jet_order {
        if n == 0 {
            bail!("--jet-order must be positive");
        }
        problem.jet_order = n;
    }
    if let Some(d) = cli.max_depth {
        if d == 0 {
            bail!("--max-depth must be at least 1");
        }
        problem.strategy.max_depth = d;
    }
    if let Some(script) = &cli.script {
        problem.strategy.script = parse_script(&read(script)?).with_context(|| format!("in {}", script.display()))?;
        problem.strategy.kind = StrategyKind::Manual;
    }
    if let Some(s) = cli.strategy {
        problem.strategy.kind = s.into();
    }
    Ok(problem)
}

fn emit(cli: &Cli, json: &str, text: &str) -> Result<()> {
    if let Some(path) = &cli.output {
        fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
    }
    print!("{}", if cli.machine { json } else { text });
    Ok(())
}

fn execute(cli: &Cli) -> Result<i32> {
    let (command, path) = match &cli.command {
        Cmd::Foliation { problem } => (Command::Foliation, problem),
        Cmd::Monomialize { problem } => (Command::Monomialize, problem),
        Cmd::Analyze { problem } => (Command::Analyze, problem),
        Cmd::Eliminate { problem } => (Command::Eliminate, problem),
        Cmd::Full { problem } => (Command::Full, problem),
        Cmd::VerifyReport { report } => {
            let parsed = Report::from_json(&read(report)?).with_context(|| format!("parsing {}", report.display()))?;
            let outcome = verify_report(&parsed)?;
            emit(cli, &outcome.to_json(), &outcome.to_text())?;
            return Ok(outcome.exit_code());
        }
    };
    let problem = load_problem(cli, path)?;
    let report = run(&problem, command)?;
    emit(cli, &report.to_json(), &report.to_text())?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
