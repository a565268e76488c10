//! The `hyperlab` experiment runner.
//!
//! ```text
//! hyperlab compute <quantity> --p <prime> [--A spec] [--H spec] ...
//! hyperlab verify <suite> [--p prime] [--trials n] [--seed s]
//! hyperlab scan [--quantity mk,sigma] [--family ap:8,16,32,64] ...
//! ```
//!
//! Exit codes: 0 when every exact-constant check held and nothing failed,
//! 1 on a violated check, 2 on an error.

pub mod compute;
pub mod config;
pub mod emit;
pub mod scan;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use crate::config::{Cli, Command};
use crate::verify::VerifyParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Clean,
    Violations,
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<Status> {
    match &cli.command {
        Command::Compute { quantity, args } => {
            let opts = args.options()?;
            let inst = args.instance()?;
            let reports = compute::compute(quantity.quantity(), &inst, &opts)?;
            let text = emit::render_reports(&reports, opts.format)?;
            emit::write_output(&text, opts.out.as_deref(), stdout)?;
            Ok(if reports.iter().any(|r| r.is_violation()) {
                Status::Violations
            } else {
                Status::Clean
            })
        }
        Command::Verify { suite, args } => {
            let opts = args.options()?;
            let params = VerifyParams {
                p: args.prime()?,
                seed: opts.seed,
                trials: opts.trials,
                count: opts.count,
            };
            let outcome = verify::run_suite(*suite, &params)?;
            emit::write_output(&outcome.render(), opts.out.as_deref(), stdout)?;
            Ok(if outcome.passed() {
                Status::Clean
            } else {
                Status::Violations
            })
        }
        Command::Scan {
            quantity,
            family,
            args,
        } => {
            let opts = args.options()?;
            let entries = scan::family(family, args.prime()?, opts.seed)?;
            let quantities: Vec<_> = quantity.iter().map(|q| q.quantity()).collect();
            let rows = scan::scan(&quantities, &entries, &opts);
            let text = emit::render_rows(&rows, opts.format)?;
            emit::write_output(&text, opts.out.as_deref(), stdout)?;
            let failed = rows.iter().any(|r| match r {
                emit::Row::Failed { .. } => true,
                emit::Row::Report(r) => r.is_violation(),
            });
            Ok(if failed { Status::Violations } else { Status::Clean })
        }
    }
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(&cli, &mut stdout) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Violations) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
