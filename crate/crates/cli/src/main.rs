//! `gcm`: generate correlated configuration-model graphs, measure their
//! degree correlation, and analyze node percolation.
//!
//! Exit codes: 0 success, 1 runtime failure or failed reproduction check,
//! 2 invalid configuration.

mod analyze;
mod config;
mod generate;
mod output;
mod percolate;
mod reproduce;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "gcm", version, about = "Generalized configuration model experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build one graph and write it as an edge list plus JSON metadata
    Generate(generate::GenerateArgs),
    /// Analytic and empirical degree correlation over a q grid, or of a graph file
    Analyze(analyze::AnalyzeArgs),
    /// Percolation thresholds and giant-component curves
    Percolate(percolate::PercolateArgs),
    /// Regenerate a published table or figure and check it
    Reproduce(reproduce::ReproduceArgs),
}

/// How a command failed, which fixes the exit code.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
    /// Reproduction finished but some entries missed their targets.
    Mismatch(String),
}

pub type Outcome = Result<(), Failure>;

pub trait Stage<T> {
    fn config(self) -> Result<T, Failure>;
    fn runtime(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Stage<T> for Result<T, E> {
    fn config(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Config(e.into()))
    }

    fn runtime(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Runtime(e.into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate::run(args),
        Command::Analyze(args) => analyze::run(args),
        Command::Percolate(args) => percolate::run(args),
        Command::Reproduce(args) => reproduce::run(args),
    };
    let (code, kind, message) = match result {
        Ok(()) => return ExitCode::SUCCESS,
        Err(Failure::Config(e)) => (2, "config", format!("{e:#}")),
        Err(Failure::Runtime(e)) => (1, "runtime", format!("{e:#}")),
        Err(Failure::Mismatch(m)) => (1, "mismatch", m),
    };
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::from(code)
}
