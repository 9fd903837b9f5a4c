use std::process::ExitCode;

use clap::Parser;
use framecurve::cli::{render_text, run, Cli};
use framecurve::config::JobConfig;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = JobConfig::from_env().and_then(|base| run(&cli, base));
    match result {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", render_text(&report));
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
