//! Command-line front end: run named experiment suites over d-adic tree
//! groups and emit deterministic CSV/JSON reports.
//!
//! Exit codes: 0 all checks pass; 1 assertion failures or runtime errors;
//! 2 configuration errors; 3 enumeration capacity exceeded.

mod config;
mod suites;

use std::path::Path;

use clap::{Parser, Subcommand};

use adictree::report::ReportFormat;
use config::{Config, Overrides};
use suites::{checks_json, run_suite, SuiteError, SuiteOutput, SUITE_NAMES};

#[derive(Parser)]
#[command(
    name = "adictree",
    version,
    about = "Exact experiments with groups acting on the d-adic rooted tree"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment suite and print one line per check.
    Suite {
        /// One of: lemma-theorem, affine-unicritical, gh-algebra,
        /// martingale, hdim.
        name: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// List the available suites.
    Suites,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = Cli::parse();
    match cli.command {
        Command::Suites => {
            for name in SUITE_NAMES {
                println!("{name}");
            }
            0
        }
        Command::Suite { name, overrides } => {
            let cfg = match Config::resolve(&overrides) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("{e}");
                    return 2;
                }
            };
            match run_suite(&name, &cfg) {
                Ok(output) => finish(&name, &cfg, output),
                Err(SuiteError::Config(msg)) => {
                    eprintln!("config error: {msg}");
                    2
                }
                Err(SuiteError::Capacity(msg)) => {
                    eprintln!("capacity error: {msg}");
                    3
                }
                Err(SuiteError::Run(msg)) => {
                    eprintln!("error: {msg}");
                    1
                }
            }
        }
    }
}

fn finish(suite: &str, cfg: &Config, output: SuiteOutput) -> i32 {
    for check in &output.checks {
        let status = if check.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {suite}/{}: expected {} got {} (tolerance {})",
            check.name, check.expected, check.actual, check.tolerance
        );
    }
    if let Some(dir) = &cfg.out {
        if let Err(e) = write_reports(suite, cfg, &output, dir) {
            eprintln!("{e}");
            return 1;
        }
    }
    if output.all_pass() {
        0
    } else {
        1
    }
}

fn write_reports(
    suite: &str,
    cfg: &Config,
    output: &SuiteOutput,
    dir: &Path,
) -> Result<(), String> {
    std::fs::create_dir_all(dir)
        .map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let emit = |name: &str, content: &str| -> Result<(), String> {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
    };
    emit(
        &format!("{suite}-checks.json"),
        &checks_json(suite, cfg, &output.checks),
    )?;
    for (stem, csv, json) in &output.reports {
        match cfg.format {
            ReportFormat::Csv => emit(&format!("{stem}.csv"), csv)?,
            ReportFormat::Json => emit(&format!("{stem}.json"), json)?,
        }
    }
    Ok(())
}
