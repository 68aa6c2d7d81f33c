//! Command implementations behind the `invinf` binary, exposed as a
//! library so integration tests can drive them in-process.

pub mod commands;
pub mod config;
pub mod error;
pub mod formula;
pub mod manifest;
pub mod report;

use clap::{Parser, Subcommand};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "invinf",
    version,
    about = "Involved/informational stylometry over paper and patent abstracts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score documents: feature counts, rates, and ratio per kept abstract
    Analyze(commands::analyze::AnalyzeArgs),
    /// Pair female- and male-authored documents within (field, year) strata
    Match(commands::matchcmd::MatchArgs),
    /// Fit OLS models with fixed effects and robust errors over a table
    Regress(commands::regress::RegressArgs),
    /// Decompose incoming citations by citing-author gender
    Cite(commands::cite::CiteArgs),
    /// Emit figures: ratio histogram by gender, or a coefficient dot plot
    Report(commands::report::ReportArgs),
    /// Generate a synthetic corpus with a known-truth sidecar
    Gen(commands::gen::GenArgs),
    /// Resolve author and lawyer genders from names
    Gender(commands::gender::GenderArgs),
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze(args) => commands::analyze::run(args),
        Command::Match(args) => commands::matchcmd::run(args),
        Command::Regress(args) => commands::regress::run(args),
        Command::Cite(args) => commands::cite::run(args),
        Command::Report(args) => commands::report::run(args),
        Command::Gen(args) => commands::gen::run(args),
        Command::Gender(args) => commands::gender::run(args),
    }
}
