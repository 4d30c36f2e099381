//! Command-line frontend for the `proxdist` solvers.
//!
//! [`run`] maps an argument vector to an exit code: 0 on success, 1 on
//! malformed input or usage, 2 when the solver fails.

// `!(x > 0.0)` style checks reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod selftest;

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::Parser;
use rayon::prelude::*;
use serde_json::json;

use args::{Cli, Command, SolverArgs};
use commands::{Outcome, Output};
use error::CliError;

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Metric(a) => replicate(&a.solver, |s| commands::metric(a, s)),
        Command::Cvxreg(a) => replicate(&a.solver, |s| commands::cvxreg(a, s)),
        Command::Cluster(a) => replicate(&a.solver, |s| commands::cluster(a, s)),
        Command::Denoise(a) => replicate(&a.solver, |s| commands::denoise(a, s)),
        Command::Condnum(a) => replicate(&a.solver, |s| commands::condnum(a, s)),
        Command::Selftest(a) => {
            let checks = selftest::run(a.seed);
            for c in &checks {
                println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            match checks.iter().filter(|c| !c.passed).count() {
                0 => Ok(()),
                n => Err(CliError::Solver(proxdist::Error::Contract(format!("{n} self-test checks failed")))),
            }
        }
    }
}

/// Runs `job` for seeds `seed..seed + replicates` in parallel. Files are
/// written for the first replicate; the summary lists every replicate.
fn replicate<F>(args: &SolverArgs, job: F) -> Result<(), CliError>
where
    F: Fn(u64) -> Result<Outcome, CliError> + Sync,
{
    let n = args.replicates.max(1) as u64;
    let mut outcomes = (0..n)
        .into_par_iter()
        .map(|i| job(args.seed.wrapping_add(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let first = outcomes.remove(0);
    if let Some(path) = &args.trace {
        fs::write(path, first.trace.to_csv_string()).map_err(|e| CliError::io(path, e))?;
    }
    if let Some(path) = &args.out {
        match &first.output {
            Output::Matrix(m) => io::write_matrix_csv(path, m)?,
            Output::Text(t) => fs::write(path, t).map_err(|e| CliError::io(path, e))?,
            Output::Image(img) => io::write_pgm(path, img)?,
        }
    }
    let summary = if n == 1 {
        serde_json::to_value(&first.summary)
    } else {
        let mut all = vec![first.summary];
        all.extend(outcomes.into_iter().map(|o| o.summary));
        let problem = all[0].problem;
        Ok(json!({ "schema": 1, "problem": problem, "replicates": all }))
    }
    .expect("summary serializes");
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    match &args.summary {
        Some(path) => fs::write(path, text + "\n").map_err(|e| CliError::io(path, e)),
        None => {
            // a closed pipe downstream is not an error
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}
