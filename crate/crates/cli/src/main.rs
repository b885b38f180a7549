mod args;
mod commands;
mod csvio;
mod report;
mod svg;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;

use args::Cli;
use report::{RunReport, Usage};

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match err.downcast_ref::<depcorr::Error>() {
        Some(depcorr::Error::InvalidParameter(_)) => 2,
        _ => 1,
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let start = Instant::now();
    let out = commands::run(&cli.command)?;
    let elapsed = start.elapsed().as_secs_f64();
    if out.suppress_report {
        return Ok(());
    }
    let report = RunReport {
        command: out.command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        input: out.input,
        parameters: out.parameters,
        results: out.results,
        seed: out.seed,
        threads: depcorr::par::current_threads(),
        parallel: depcorr::par::is_parallel(),
        duration_secs: if cli.no_timing { None } else { Some(elapsed) },
    };
    let json = report.to_json();
    match &out.report_to {
        Some(path) => std::fs::write(path, json).with_context(|| format!("cannot write {}", path.display()))?,
        None => std::io::stdout().lock().write_all(json.as_bytes())?,
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn with_threads(threads: usize, f: impl FnOnce() -> Result<()> + Send) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
fn with_threads(_threads: usize, f: impl FnOnce() -> Result<()> + Send) -> Result<()> {
    f()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_threads(cli.threads, || execute(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
