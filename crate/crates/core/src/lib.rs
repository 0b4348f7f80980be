//! Simulation engine for two-layer reaction-diffusion cellular nonlinear
//! networks (FitzHugh-Nagumo cells on a toroidal lattice).
//!
//! The crate is organized bottom-up:
//!
//! * [`gene`], [`config`], [`manifest`], [`grid`] - shared domain types.
//! * [`model`] - pointwise reaction terms behind the [`CellModel`] trait.
//! * [`kernels`] and [`run`] - double-buffered stepping on four CPU
//!   backends, snapshot schedule and blow-up detection.
//! * [`init`] - seeded initial states.
//! * [`imagery`] - PGM/PNG input and output, frame normalization, montages.
//! * [`bench`] - throughput metrics and benchmark tables.
//! * [`sweep`] - two-parameter sweeps and regime classification.

pub mod bench;
pub mod config;
pub mod gene;
pub mod grid;
pub mod imagery;
pub mod init;
pub mod kernels;
pub mod manifest;
pub mod model;
pub mod run;
pub mod sweep;

pub use config::{validate_config, ConfigError, ConfigErrors, InitMode, Precision, RunConfig};
pub use gene::{Gene, GeneField};
pub use grid::{checksum_hex, GridState, Layer, Real};
pub use kernels::{Backend, StepBuffers, Stepper};
pub use manifest::Manifest;
pub use model::{CellModel, FitzHughNagumo};
pub use run::{run, RunError, RunOutcome, SnapshotBuffer};

/// Builds the initial state a config describes. `image` must be given for
/// image mode (already resized to the grid if needed).
pub fn initial_state<T: Real>(
    config: &RunConfig,
    gene: &Gene,
    image: Option<&imagery::GrayImage>,
) -> Result<GridState<T>, init::InitError> {
    match config.init_mode {
        InitMode::CenterSquare => init::init_center_square(config.rows, config.cols, config.seed),
        InitMode::FullRandom => init::init_full_random(config.rows, config.cols, config.seed),
        InitMode::Image => {
            let image = image.expect("image mode needs an image");
            init::init_from_image(image, gene)
        }
    }
}
