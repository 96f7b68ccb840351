use std::process::ExitCode;

use clap::Parser;

use harq_scaling::cli::{self, Args};

fn main() -> ExitCode {
    let outcome = Args::parse().resolve().and_then(|config| {
        let report = cli::run(&config)?;
        cli::emit(&config, &report)?;
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            if report.skipped > 0 {
                eprintln!(
                    "warning: skipped {} grid point(s) that did not evaluate",
                    report.skipped
                );
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
