mod args;
mod bench;
mod error;
mod simulate;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use rdcnn::config::InitMode;
use rdcnn::imagery::{load_grayscale, GrayImage};
use rdcnn::RunConfig;

use args::{Cli, Command};
use error::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => simulate::run(a),
        Command::Bench(a) => bench::run(a),
        Command::Sweep(a) => sweep::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// `--out`, or `./out/<unix-seconds>` when absent. Created if missing.
pub(crate) fn out_dir(out: &Option<PathBuf>) -> Result<PathBuf, CliError> {
    let dir = match out {
        Some(d) => d.clone(),
        None => {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            Path::new("out").join(secs.to_string())
        }
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

/// Loads and resamples the input image for image mode.
pub(crate) fn load_input(config: &RunConfig) -> Result<Option<GrayImage>, CliError> {
    if config.init_mode != InitMode::Image {
        return Ok(None);
    }
    let path = config
        .image_path
        .as_ref()
        .ok_or_else(|| CliError::Validation("image init mode (typ=3) requires an image path".into()))?;
    let image = load_grayscale(path, None).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    if (image.rows(), image.cols()) == (config.rows, config.cols) {
        Ok(Some(image))
    } else {
        if config.rows < rdcnn::grid::MIN_SIDE || config.cols < rdcnn::grid::MIN_SIDE {
            return Err(CliError::Validation(format!(
                "invalid lattice size {}x{}",
                config.rows, config.cols
            )));
        }
        Ok(Some(image.resample(config.rows, config.cols)))
    }
}

/// Machine label used when `--hardware` is not given.
pub(crate) fn default_hardware() -> String {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!("cpu-{threads}t")
}
