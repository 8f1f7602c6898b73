use std::path::PathBuf;
use std::process::ExitCode;

use breadth_granger::config::load_config;
use breadth_granger::fixture::generate_fixture;
use breadth_granger::pipeline::run;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "breadth-granger", version, about = "Breadth sentiment indicators, VAR fits and Granger-causality reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline for every market in a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write the synthetic two-market fixture and a matching config.json.
    Fixture {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests print and succeed; usage mistakes are
            // reported with the configuration exit code.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let code = match cli.command {
        Command::Run { config } => match load_config(&config).and_then(|c| run(&c)) {
            Ok(summary) => {
                for outcome in &summary.markets {
                    match &outcome.error {
                        None => eprintln!("{}: wrote {} files", outcome.label, outcome.files.len()),
                        Some(e) => eprintln!("{}: error: {e}", outcome.label),
                    }
                }
                summary.exit_code()
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.kind().exit_code()
            }
        },
        Command::Fixture { seed, out } => match generate_fixture(seed, &out) {
            Ok(files) => {
                for f in files {
                    eprintln!("wrote {}", f.display());
                }
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.kind().exit_code()
            }
        },
    };
    ExitCode::from(code as u8)
}
