//! Scenario-file driven experiments for the mpsbeam simulator.

pub mod config;
pub mod error;
pub mod experiments;

use std::path::Path;

pub use config::{ScenarioConfig, EMBED_MARKER};
pub use error::CliError;

/// Full output file: resolved config block followed by the experiment body.
pub fn render(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let body = experiments::run_experiment(cfg)?;
    Ok(format!("{}{body}", cfg.header_comment()))
}

/// Writes via a sibling temp file so a failed write never leaves a partial output.
pub fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

/// Applies `MPSBEAM_THREADS` (0 or unset: one thread per core).
pub fn init_threads(value: Option<&str>) -> Result<(), CliError> {
    let n = match value.map(str::trim) {
        None | Some("") => 0,
        Some(v) => v
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("MPSBEAM_THREADS must be a non-negative integer, got `{v}`")))?,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}
