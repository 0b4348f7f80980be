use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rdcnn::config::{InitMode, Precision};
use rdcnn::kernels::Backend;
use rdcnn::{Gene, GeneField, Manifest};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "rdcnn", version, about = "FitzHugh-Nagumo reaction-diffusion CNN simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation and write its montage and final frames.
    Simulate(SimulateArgs),
    /// Time backends across lattice sizes.
    Bench(BenchArgs),
    /// Sweep two gene parameters over a grid of values.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Default)]
pub struct GeneArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub du: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub dv: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub ka: Option<f64>,
}

impl GeneArgs {
    pub fn apply(&self, gene: &mut Gene) {
        let pairs = [
            (GeneField::A, self.a),
            (GeneField::B, self.b),
            (GeneField::Eps, self.eps),
            (GeneField::C, self.c),
            (GeneField::Du, self.du),
            (GeneField::Dv, self.dv),
            (GeneField::Dt, self.dt),
            (GeneField::Ka, self.ka),
        ];
        for (field, value) in pairs {
            if let Some(v) = value {
                gene.set(field, v);
            }
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct BackendArgs {
    /// reference | shift | blocked | parallel
    #[arg(long)]
    pub backend: Option<String>,
    /// Worker threads for the parallel backend (0 = all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub tile_rows: Option<usize>,
    #[arg(long)]
    pub tile_cols: Option<usize>,
}

impl BackendArgs {
    fn tuned(&self) -> bool {
        self.threads.is_some() || self.tile_rows.is_some() || self.tile_cols.is_some()
    }

    /// Resolves the backend, starting from `base` when no name is given.
    pub fn resolve(&self, base: Backend) -> Result<Backend, CliError> {
        let resolved = match (&self.backend, base) {
            (Some(name), _) => Backend::from_parts(name, self.tile_rows, self.tile_cols, self.threads),
            (None, _) if !self.tuned() => Ok(base),
            (None, Backend::Blocked { tile_rows, tile_cols }) if self.threads.is_none() => {
                Backend::from_parts(
                    "blocked",
                    Some(self.tile_rows.unwrap_or(tile_rows)),
                    Some(self.tile_cols.unwrap_or(tile_cols)),
                    None,
                )
            }
            (None, other) => Backend::from_parts(other.name(), self.tile_rows, self.tile_cols, self.threads),
        };
        resolved.map_err(CliError::Validation)
    }

    /// Applies tuning to each backend it fits; used for backend lists.
    pub fn tune(&self, backend: Backend) -> Backend {
        match backend {
            Backend::Blocked { tile_rows, tile_cols } => Backend::Blocked {
                tile_rows: self.tile_rows.unwrap_or(tile_rows),
                tile_cols: self.tile_cols.unwrap_or(tile_cols),
            },
            Backend::Parallel { threads } => Backend::Parallel {
                threads: self.threads.unwrap_or(threads),
            },
            other => other,
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Initial state: 1 = random 11x11 center square, 2 = fully random, 3 = image.
    #[arg(long)]
    pub typ: Option<u8>,
    /// Square lattice side (N x N).
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    /// Grayscale PGM or PNG input for --typ 3.
    #[arg(long)]
    pub image: Option<PathBuf>,
    #[arg(long)]
    pub iters: Option<usize>,
    /// Number of snapshots after the initial state.
    #[arg(long)]
    pub nssp: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// single | double
    #[arg(long)]
    pub precision: Option<String>,
    /// Start from a saved manifest; other flags override its values.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub gene: GeneArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
}

impl RunArgs {
    /// Defaults, then the manifest if given, then explicit flags.
    pub fn resolve(&self) -> Result<Manifest, CliError> {
        let mut m = match &self.manifest {
            Some(path) => Manifest::read(path).map_err(|e| match e {
                rdcnn::manifest::ManifestError::Io(io) => {
                    CliError::Io(format!("{}: {io}", path.display()))
                }
                other => CliError::Validation(format!("{}: {other}", path.display())),
            })?,
            None => Manifest::new(Gene::default(), rdcnn::RunConfig::default()),
        };
        self.gene.apply(&mut m.gene);
        let c = &mut m.config;
        if let Some(typ) = self.typ {
            c.init_mode = InitMode::from_typ(typ)
                .ok_or_else(|| CliError::Validation(format!("--typ must be 1, 2 or 3, got {typ}")))?;
        }
        if let Some(n) = self.size {
            c.rows = n;
            c.cols = n;
        }
        if let Some(r) = self.rows {
            c.rows = r;
        }
        if let Some(k) = self.cols {
            c.cols = k;
        }
        if let Some(path) = &self.image {
            c.image_path = Some(path.clone());
        }
        if let Some(it) = self.iters {
            c.iter_max = it;
        }
        if let Some(n) = self.nssp {
            c.nssp = n;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(p) = &self.precision {
            c.precision = p.parse::<Precision>().map_err(CliError::Validation)?;
        }
        c.backend = self.backend.resolve(c.backend)?;
        Ok(m)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Output directory (default ./out/<unix-time>).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print wall time and throughput in the montage caption.
    #[arg(long)]
    pub montage_timing: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated backend names.
    #[arg(long, value_delimiter = ',', default_value = "reference,shift,blocked,parallel")]
    pub backends: Vec<String>,
    /// Comma-separated lattice sides.
    #[arg(long, value_delimiter = ',', default_value = "128,256,512,1024,2048,4096")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "single")]
    pub precision: String,
    /// Free-form label for the machine, used to key table rows.
    #[arg(long)]
    pub hardware: Option<String>,
    /// Timed repetitions per cell (median reported).
    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
    /// Skip cells whose N*N*iters exceeds this budget.
    #[arg(long)]
    pub max_cell_iters: Option<u64>,
    /// Write bench.json next to bench.csv.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub tile_rows: Option<usize>,
    #[arg(long)]
    pub tile_cols: Option<usize>,
    #[command(flatten)]
    pub gene: GeneArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Horizontal axis, e.g. `du:0.3,0.5,0.7`.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// Vertical axis, e.g. `dv:0.8,1.0`.
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Give cell k (row-major) the seed `seed + k`.
    #[arg(long)]
    pub per_cell_seed: bool,
    /// Run cells in parallel.
    #[arg(long)]
    pub concurrent: bool,
    /// Largest panel tile side in pixels; bigger frames are subsampled.
    #[arg(long, default_value_t = 256)]
    pub tile_max: usize,
    #[arg(long)]
    pub homogeneity: Option<f64>,
    #[arg(long)]
    pub floor: Option<f64>,
    #[arg(long)]
    pub activity: Option<f64>,
    #[arg(long)]
    pub growth: Option<f64>,
    #[arg(long)]
    pub dip: Option<f64>,
}
