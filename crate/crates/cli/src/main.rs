//! `rsplit` runs one experiment driver (or a sweep over one parameter) and
//! writes its trace, plot columns and a JSON summary into `--out`.
//!
//! Exit status: 0 converged, 2 ran but did not converge, 1 usage, input or
//! write errors. Nothing is written unless the computation finished.

mod args;
mod drivers;
mod output;
mod sweep;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Driver};
use output::{CliError, Outcome};

fn common(cmd: &Command) -> &args::Common {
    match cmd {
        Command::Lad(c)
        | Command::Phase(c)
        | Command::PhaseTrimmed(c)
        | Command::Sslr(c)
        | Command::Ssp(c)
        | Command::Cluster(c)
        | Command::Rpca(c)
        | Command::Continuation(c)
        | Command::AdmmCompare(c) => c,
        Command::Sweep(s) => &s.common,
    }
}

fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    if common(cmd).out.is_none() {
        return Err(CliError::Usage("--out is required".into()));
    }
    match cmd {
        Command::Lad(c) => drivers::run(Driver::Lad, c),
        Command::Phase(c) => drivers::run(Driver::Phase, c),
        Command::PhaseTrimmed(c) => drivers::run(Driver::PhaseTrimmed, c),
        Command::Sslr(c) => drivers::run(Driver::Sslr, c),
        Command::Ssp(c) => drivers::run(Driver::Ssp, c),
        Command::Cluster(c) => drivers::run(Driver::Cluster, c),
        Command::Rpca(c) => drivers::run(Driver::Rpca, c),
        Command::Continuation(c) => drivers::run(Driver::Continuation, c),
        Command::AdmmCompare(c) => drivers::run_admm_compare(c),
        Command::Sweep(s) => sweep::run(s),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("rsplit: {e}");
            return ExitCode::from(1);
        }
    };
    let common = common(&cli.command);
    let out = common.out.as_deref().expect("checked in execute");
    if let Err(e) = outcome.write(out, common.trace_out.as_deref()) {
        eprintln!("rsplit: {e}");
        return ExitCode::from(1);
    }
    log::info!("{}: {} iterations, converged {}", outcome.driver, outcome.iterations, outcome.converged);
    if outcome.converged {
        ExitCode::SUCCESS
    } else {
        eprintln!("rsplit: {} did not converge", outcome.driver);
        ExitCode::from(2)
    }
}
