use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mpsbeam_cli::{experiments, init_threads, render, write_output, CliError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "mpsbeam", version, about = "Multi-polarization superposition beamforming simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a scenario file or a previous output file
    Run {
        config: PathBuf,
        /// Output path; overrides `output` in the config. Stdout if neither is set.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a scenario file and its input files without running it
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mpsbeam: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            experiments::check_inputs(&cfg)?;
            println!("ok: {} ({})", cfg.scenario, cfg.experiment.name());
            Ok(())
        }
        Command::Run { config, output } => {
            let cfg = ScenarioConfig::load(&config)?;
            init_threads(std::env::var("MPSBEAM_THREADS").ok().as_deref())?;
            let text = render(&cfg)?;
            match output.or_else(|| cfg.output.clone()) {
                Some(path) => write_output(&path, &text),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    message: e.to_string(),
                }),
            }
        }
    }
}
