use std::fs;
use std::process::ExitCode;

use clap::Parser;
use subtag_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SUBTAG_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = run(cli).and_then(|(json, out)| match out {
        Some(path) => fs::write(&path, json).map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display())),
        None => {
            print!("{json}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
