//! Time stepping over the toroidal lattice.
//!
//! Every step is a Jacobi update: all cells read the front buffer and write
//! the back buffer, then the two are swapped. Four interchangeable CPU
//! backends implement the step:
//!
//! * `reference` - plain double loop, neighbor wrap resolved by branches.
//! * `shift` - whole-layer arithmetic on cyclically shifted copies of the
//!   layers. Sums the stencil in a different order, so it agrees with the
//!   others to rounding only.
//! * `blocked` - cache tiles with interior/border splitting.
//! * `parallel` - contiguous row bands on a worker pool.
//!
//! `reference`, `blocked` and `parallel` evaluate the identical per-cell
//! expression and produce bit-identical states.

mod blocked;
mod parallel;
mod reference;
mod shift;
mod span;

use std::fmt;
use std::str::FromStr;

use crate::gene::Gene;
use crate::grid::{GridState, Real};
use crate::model::{CellModel, FitzHughNagumo};

pub use reference::laplacian5;

pub const DEFAULT_TILE: usize = 64;

/// Stepping strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Reference,
    Shift,
    Blocked { tile_rows: usize, tile_cols: usize },
    /// `threads == 0` uses the hardware default.
    Parallel { threads: usize },
}

impl Backend {
    pub const NAMES: [&'static str; 4] = ["reference", "shift", "blocked", "parallel"];

    pub fn blocked() -> Self {
        Backend::Blocked {
            tile_rows: DEFAULT_TILE,
            tile_cols: DEFAULT_TILE,
        }
    }

    pub fn parallel() -> Self {
        Backend::Parallel { threads: 0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Reference => "reference",
            Backend::Shift => "shift",
            Backend::Blocked { .. } => "blocked",
            Backend::Parallel { .. } => "parallel",
        }
    }

    /// Whether the backend evaluates the canonical per-cell expression order.
    pub fn is_exact_order(&self) -> bool {
        !matches!(self, Backend::Shift)
    }

    /// Builds a backend from its name and optional tuning keys. Tuning keys
    /// that do not apply to the named backend are rejected.
    pub fn from_parts(
        name: &str,
        tile_rows: Option<usize>,
        tile_cols: Option<usize>,
        threads: Option<usize>,
    ) -> Result<Self, String> {
        let backend = match name.trim().to_ascii_lowercase().as_str() {
            "reference" => Backend::Reference,
            "shift" => Backend::Shift,
            "blocked" => Backend::Blocked {
                tile_rows: tile_rows.unwrap_or(DEFAULT_TILE),
                tile_cols: tile_cols.unwrap_or(DEFAULT_TILE),
            },
            "parallel" => Backend::Parallel {
                threads: threads.unwrap_or(0),
            },
            other => {
                return Err(format!(
                    "unknown backend `{other}` (expected reference|shift|blocked|parallel)"
                ))
            }
        };
        if !matches!(backend, Backend::Blocked { .. }) && (tile_rows.is_some() || tile_cols.is_some())
        {
            return Err(format!("tile size given for the {} backend", backend.name()));
        }
        if !matches!(backend, Backend::Parallel { .. }) && threads.is_some() {
            return Err(format!("thread count given for the {} backend", backend.name()));
        }
        backend.check()?;
        Ok(backend)
    }

    pub fn check(&self) -> Result<(), String> {
        match *self {
            Backend::Blocked { tile_rows, tile_cols } if tile_rows == 0 || tile_cols == 0 => {
                Err(format!("tile must be at least 1x1, got {tile_rows}x{tile_cols}"))
            }
            _ => Ok(()),
        }
    }

    /// Label used in reports, including tuning.
    pub fn label(&self) -> String {
        match *self {
            Backend::Blocked { tile_rows, tile_cols } => format!("blocked({tile_rows}x{tile_cols})"),
            Backend::Parallel { threads: 0 } => "parallel".into(),
            Backend::Parallel { threads } => format!("parallel({threads})"),
            _ => self.name().into(),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Backend::from_parts(s, None, None, None)
    }
}

/// Front and back lattices of a double-buffered step.
#[derive(Debug, Clone)]
pub struct StepBuffers<T> {
    front: GridState<T>,
    back: GridState<T>,
}

impl<T: Real> StepBuffers<T> {
    pub fn new(initial: GridState<T>) -> Self {
        let back = GridState::zeros(initial.rows(), initial.cols());
        Self {
            front: initial,
            back,
        }
    }

    /// Current state.
    pub fn front(&self) -> &GridState<T> {
        &self.front
    }

    pub fn into_front(self) -> GridState<T> {
        self.front
    }

    /// Replaces the current state, keeping the allocation of the back buffer.
    pub fn reset(&mut self, state: &GridState<T>) {
        assert_eq!(state.shape(), self.front.shape());
        self.front.u.copy_from_slice(&state.u);
        self.front.v.copy_from_slice(&state.v);
    }

    pub(crate) fn split(&mut self) -> (&GridState<T>, &mut GridState<T>) {
        (&self.front, &mut self.back)
    }

    pub(crate) fn swap(&mut self) {
        std::mem::swap(&mut self.front, &mut self.back);
    }
}

#[derive(Debug, thiserror::Error)]
pub enum KernelError {
    #[error("invalid backend: {0}")]
    InvalidBackend(String),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// A backend with whatever per-run state it needs (scratch layers, a worker
/// pool). One stepper drives one run at a time.
pub struct Stepper<T> {
    backend: Backend,
    shift: Option<shift::Scratch<T>>,
    pool: Option<rayon::ThreadPool>,
}

impl<T: Real> Stepper<T> {
    pub fn new(backend: Backend) -> Result<Self, KernelError> {
        backend.check().map_err(KernelError::InvalidBackend)?;
        let pool = match backend {
            Backend::Parallel { threads } => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .thread_name(|k| format!("rdcnn-band-{k}"))
                    .build()?,
            ),
            _ => None,
        };
        Ok(Self {
            backend,
            shift: None,
            pool,
        })
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Worker count of the parallel backend, 1 otherwise.
    pub fn workers(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.current_num_threads())
    }

    /// Advances `buffers` by one iteration and swaps front and back.
    pub fn step<M: CellModel<T>>(&mut self, buffers: &mut StepBuffers<T>, model: &M) {
        let (front, back) = buffers.split();
        match self.backend {
            Backend::Reference => reference::step(front, back, model),
            Backend::Shift => {
                let scratch = self
                    .shift
                    .get_or_insert_with(|| shift::Scratch::new(front.rows(), front.cols()));
                scratch.step(front, back, model);
            }
            Backend::Blocked { tile_rows, tile_cols } => {
                blocked::step(front, back, model, tile_rows, tile_cols)
            }
            Backend::Parallel { .. } => {
                let pool = self.pool.as_ref().expect("parallel stepper has a pool");
                parallel::step(pool, front, back, model)
            }
        }
        buffers.swap();
    }
}

/// Advances `buffers` one FitzHugh-Nagumo iteration on `backend`.
///
/// Convenience for single steps; runs should hold a [`Stepper`].
pub fn step<T: Real>(
    buffers: &mut StepBuffers<T>,
    gene: &Gene,
    backend: Backend,
) -> Result<(), KernelError> {
    let model = FitzHughNagumo::<T>::new(gene);
    Stepper::new(backend)?.step(buffers, &model);
    Ok(())
}

/// Evolves `state` for `iterations` steps without snapshots or blow-up
/// checks.
pub fn evolve<T: Real>(
    state: GridState<T>,
    gene: &Gene,
    backend: Backend,
    iterations: usize,
) -> Result<GridState<T>, KernelError> {
    let model = FitzHughNagumo::<T>::new(gene);
    let mut stepper = Stepper::new(backend)?;
    let mut buffers = StepBuffers::new(state);
    for _ in 0..iterations {
        stepper.step(&mut buffers, &model);
    }
    Ok(buffers.into_front())
}
