//! Command-line front end for `cvqkd-core`: single-point key rates, sweeps,
//! threshold curves, reduction checks and simulated sessions.
//!
//! Data goes to stdout (CSV or JSON), diagnostics to stderr. Exit codes are
//! 0 on success, 1 when `verify` finds a deviation, 2 for usage errors and 3
//! for domain errors such as a singular channel.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod record;

use std::io::Write;

use args::{Cli, Command};
use config::Config;
use error::CliResult;

/// Merges the config file (if any) into the parsed flags and runs the
/// command, writing its data to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let mut command = cli.command;
    match &mut command {
        Command::Rate(a) => a.merge(&mut cfg)?,
        Command::Sweep(a) => a.merge(&mut cfg)?,
        Command::Threshold(a) => a.merge(&mut cfg)?,
        Command::Verify(a) => a.merge(&mut cfg)?,
        Command::Simulate(a) => a.merge(&mut cfg)?,
    }
    cfg.finish()?;
    match &command {
        Command::Rate(a) => commands::rate::run(a, out),
        Command::Sweep(a) => commands::sweep::run(a, out),
        Command::Threshold(a) => commands::threshold::run(a, out),
        Command::Verify(a) => commands::verify::run(a, out),
        Command::Simulate(a) => commands::simulate::run(a, out),
    }
}
