//! `cpi`: entailment, propagation, maximum entropy and Dempster-Shafer
//! commands over a knowledge-base file.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cpi_core::rational::parse_rational;
use cpi_core::Rational;

#[derive(Debug, Parser)]
#[command(name = "cpi", version, about = "Interval-valued probabilistic entailment over possible worlds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tightest interval for every `query` line.
    Entail(Options),
    /// Local interval propagation over the axiom and query sentences.
    Propagate(Options),
    /// Maximum-entropy distribution and precision report.
    Maxent(Options),
    /// Dempster-Shafer operations.
    Ds {
        #[command(subcommand)]
        op: DsOp,
    },
    /// Consistency check with a minimal conflicting axiom set.
    Check(Options),
    /// Brute-force oracle bounds for auditing.
    #[command(hide = true)]
    Oracle(Options),
}

#[derive(Debug, Subcommand)]
enum DsOp {
    /// Combine the `mass` sources with Dempster's rule.
    Combine(Options),
    /// Entailed lower envelope over the frame.
    Envelope(Options),
    /// Whether the entailed envelope is a belief function.
    Representable(Options),
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Knowledge-base file, or `-` for standard input.
    pub input: PathBuf,
    /// Emit a JSON document instead of text.
    #[arg(long)]
    pub json: bool,
    /// Add the maximum-entropy point to each query.
    #[arg(long)]
    pub maxent: bool,
    /// Rule families for propagation, comma separated
    /// (negation, frechet, frechet_conj, frechet_disj, chain, fuzzy, sound).
    #[arg(long, value_name = "RULES", num_args = 0..=1, default_missing_value = "sound")]
    pub propagate: Option<String>,
    /// Compare propagated intervals with the entailed ones.
    #[arg(long)]
    pub judge: bool,
    /// Branch-and-bound gap tolerance, e.g. `1/1000000` or `0.001`.
    #[arg(long, value_parser = parse_tolerance)]
    pub tolerance: Option<Rational>,
    /// Branch-and-bound node cap per bound.
    #[arg(long, default_value_t = cpi_core::augmented::DEFAULT_NODE_CAP)]
    pub node_cap: usize,
    /// Largest number of atoms accepted.
    #[arg(long, default_value_t = cpi_core::DEFAULT_ATOM_CAP)]
    pub atom_cap: usize,
    /// Worker threads for independent queries.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    /// Decimal places in rendered numbers.
    #[arg(long, default_value_t = 6)]
    pub precision: u32,
}

fn parse_tolerance(text: &str) -> Result<Rational, String> {
    let v = parse_rational(text).map_err(|e| e.to_string())?;
    if v <= Rational::from_integer(0.into()) {
        return Err("tolerance must be positive".into());
    }
    Ok(v)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (opts, outcome) = match &cli.command {
        Command::Entail(o) => (o, commands::entail(o)),
        Command::Propagate(o) => (o, commands::propagate(o)),
        Command::Maxent(o) => (o, commands::maxent(o)),
        Command::Check(o) => (o, commands::check(o)),
        Command::Oracle(o) => (o, commands::oracle(o)),
        Command::Ds { op } => match op {
            DsOp::Combine(o) => (o, commands::ds_combine(o)),
            DsOp::Envelope(o) => (o, commands::ds_envelope(o)),
            DsOp::Representable(o) => (o, commands::ds_representable(o)),
        },
    };
    match outcome {
        Ok(out) => {
            print!("{}", out.render(opts));
            ExitCode::from(out.code)
        }
        Err(e) => {
            if opts.json {
                println!("{}", e.to_json());
            }
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
