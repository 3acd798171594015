use std::process::ExitCode;

use clap::Parser;
use lexprobe::cli::{self, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let name = config.command.name();

    let workers = match cli::workers_from_env() {
        Ok(w) => w,
        Err(e) => {
            eprintln!("{}", cli::error_line(name, &e));
            return ExitCode::FAILURE;
        }
    };
    if let Some(n) = workers {
        // only fails if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }

    match cli::run(&config) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", cli::error_line(name, &e));
            ExitCode::FAILURE
        }
    }
}
