mod build;
mod generate;
mod input;
mod invlim;
mod pipelines;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use input::{CmdResult, Fail};
use report::Report;

/// Exact constructions and certificates on finite metric spaces.
///
/// Every command prints a JSON report. Exit status: 0 when all checks pass,
/// 1 when a check or a mathematical precondition fails, 2 on unreadable or
/// malformed input.
#[derive(Parser, Debug)]
#[command(name = "metrize", version)]
struct Cli {
    /// Seed for randomized steps (member shuffles, generators).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Re-run an independent brute-force computation and compare.
    #[arg(long, global = true)]
    oracle: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Audit a distance matrix against the metric axioms.
    Check {
        file: String,
        /// Allow distinct points at distance zero.
        #[arg(long)]
        pseudo: bool,
    },
    /// Build a quotient or geometric construction with its certificates.
    Build {
        #[arg(value_enum)]
        kind: BuildKind,
        file: String,
        /// Comma-separated parameter grid, e.g. `0,1/2,1`.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Scale inputs down when they exceed the diameter a construction needs.
        #[arg(long)]
        rescale: bool,
    },
    /// Metrize a fundamental sequence of covers.
    Metrize { file: String },
    /// Embed a space into sequence space.
    Embed {
        file: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long)]
        rescale: bool,
    },
    /// Analyse a truncated inverse sequence or a ladder between two.
    Invlim {
        #[arg(value_enum)]
        action: InvlimAction,
        file: String,
        /// Comma-separated scales; defaults depend on the action.
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<String>,
    },
    /// Print a random input object for the other commands.
    Generate {
        #[arg(value_enum)]
        kind: generate::Kind,
        /// Number of points (or levels, for sequences).
        #[arg(long, default_value_t = 5)]
        size: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BuildKind {
    Cone,
    Join,
    Cylinder,
    Adjunction,
    Amalgam,
    Quotient,
    Telescope,
    EuclideanCone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InvlimAction {
    Threads,
    Ml,
    Converge,
    Cauchy,
    Separate,
    Perturb,
}

/// Options shared by the report-producing commands.
pub struct Ctx {
    pub seed: Option<u64>,
    pub oracle: bool,
}

fn run(cli: &Cli, ctx: &Ctx, report: &mut Report) -> CmdResult {
    match &cli.command {
        Command::Check { file, pseudo } => pipelines::check(report, file, *pseudo),
        Command::Build { kind, file, grid, rescale } => build::run(ctx, report, *kind, file, grid.as_deref(), *rescale),
        Command::Metrize { file } => pipelines::metrize(ctx, report, file),
        Command::Embed { file, depth, rescale } => pipelines::embed(report, file, *depth, *rescale),
        Command::Invlim { action, file, epsilon } => invlim::run(ctx, report, *action, file, epsilon.as_deref()),
        Command::Generate { .. } => unreachable!("handled before reports are built"),
    }
}

/// The arguments minus `--out`, so the destination does not change the report.
fn echo(args: impl Iterator<Item = String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            out.push(a);
        }
    }
    out
}

fn emit(text: &str, out: Option<&str>) -> Result<(), Fail> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Fail::input(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Generate { kind, size } = &cli.command {
        let text = generate::run(*kind, cli.seed.unwrap_or(0), *size);
        return match emit(&text, cli.out.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }

    let ctx = Ctx { seed: cli.seed, oracle: cli.oracle };
    let mut report = Report::new(echo(std::env::args().skip(1)), cli.seed);
    let outcome = run(&cli, &ctx, &mut report);
    let report = report.finish(outcome.err().map(|f| (f.code, f.message)));
    if let Some(msg) = &report.error {
        eprintln!("error: {msg}");
    }
    if let Err(e) = emit(&report.to_json(), cli.out.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code as u8)
}
