//! Run configuration and its validation.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::gene::{Gene, GeneField};
use crate::grid::MIN_SIDE;
use crate::init::SEED_BLOCK;
use crate::kernels::Backend;

/// Floating-point width of a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Single,
    Double,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::Single => "single",
            Precision::Double => "double",
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "single" | "f32" => Ok(Precision::Single),
            "double" | "f64" => Ok(Precision::Double),
            other => Err(format!("unknown precision `{other}` (expected single|double)")),
        }
    }
}

/// How the initial state is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum InitMode {
    /// typ=1: random 11x11 block in the middle of an all-zero lattice.
    #[default]
    CenterSquare,
    /// typ=2: every cell random.
    FullRandom,
    /// typ=3: both layers set from a grayscale image scaled by `ka`.
    Image,
}

impl InitMode {
    pub fn typ(self) -> u8 {
        match self {
            InitMode::CenterSquare => 1,
            InitMode::FullRandom => 2,
            InitMode::Image => 3,
        }
    }

    pub fn from_typ(typ: u8) -> Option<Self> {
        match typ {
            1 => Some(InitMode::CenterSquare),
            2 => Some(InitMode::FullRandom),
            3 => Some(InitMode::Image),
            _ => None,
        }
    }
}

/// Everything needed to reproduce one run, apart from the gene.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub init_mode: InitMode,
    pub rows: usize,
    pub cols: usize,
    /// Required iff `init_mode` is [`InitMode::Image`].
    pub image_path: Option<PathBuf>,
    pub iter_max: usize,
    pub nssp: usize,
    pub seed: u64,
    pub backend: Backend,
    pub precision: Precision,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            init_mode: InitMode::CenterSquare,
            rows: 512,
            cols: 512,
            image_path: None,
            iter_max: 10_000,
            nssp: 5,
            seed: 0,
            backend: Backend::Parallel { threads: 0 },
            precision: Precision::Single,
        }
    }
}

impl RunConfig {
    /// Square `n x n` lattice with the remaining fields at their defaults.
    pub fn square(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            ..Self::default()
        }
    }

    /// Iterations between consecutive snapshots.
    pub fn snapshot_interval(&self) -> usize {
        self.iter_max / self.nssp.max(1)
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

/// One violated configuration invariant.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid lattice size {rows}x{cols}: both sides must be at least {min}")]
    InvalidSize { rows: usize, cols: usize, min: usize },
    #[error("invalid snapshot schedule: {0}")]
    InvalidSchedule(String),
    #[error("image init mode (typ=3) requires an image path")]
    MissingImage,
    #[error("gene parameter {field} is not finite")]
    NonFiniteGene { field: GeneField },
    #[error("gene parameter {field} must not be negative")]
    NegativeGene { field: GeneField },
    #[error("invalid backend: {0}")]
    InvalidBackend(String),
}

/// Every violation found by [`validate_config`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

impl ConfigErrors {
    pub fn contains(&self, pred: impl Fn(&ConfigError) -> bool) -> bool {
        self.0.iter().any(pred)
    }
}

/// Checks every invariant of `config` and `gene`, reporting all violations.
///
/// The image dimensions are only known after loading, so for image mode the
/// size fields are not checked here.
pub fn validate_config(config: RunConfig, gene: &Gene) -> Result<RunConfig, ConfigErrors> {
    let mut errs = Vec::new();

    let min_side = match config.init_mode {
        InitMode::CenterSquare => SEED_BLOCK,
        _ => MIN_SIDE,
    };
    if config.init_mode != InitMode::Image && (config.rows < min_side || config.cols < min_side) {
        errs.push(ConfigError::InvalidSize {
            rows: config.rows,
            cols: config.cols,
            min: min_side,
        });
    }

    if config.iter_max == 0 {
        errs.push(ConfigError::InvalidSchedule("iter_max must be at least 1".into()));
    }
    if config.nssp == 0 {
        errs.push(ConfigError::InvalidSchedule("nssp must be at least 1".into()));
    } else if config.nssp > config.iter_max {
        errs.push(ConfigError::InvalidSchedule(format!(
            "nssp={} exceeds iter_max={}",
            config.nssp, config.iter_max
        )));
    } else if !config.iter_max.is_multiple_of(config.nssp) {
        errs.push(ConfigError::InvalidSchedule(format!(
            "nssp={} does not divide iter_max={}",
            config.nssp, config.iter_max
        )));
    }

    if config.init_mode == InitMode::Image && config.image_path.is_none() {
        errs.push(ConfigError::MissingImage);
    }

    if let Err(msg) = config.backend.check() {
        errs.push(ConfigError::InvalidBackend(msg));
    }

    for (field, why) in gene.violations() {
        errs.push(match why {
            "negative" => ConfigError::NegativeGene { field },
            _ => ConfigError::NonFiniteGene { field },
        });
    }

    if errs.is_empty() {
        Ok(config)
    } else {
        Err(ConfigErrors(errs))
    }
}
