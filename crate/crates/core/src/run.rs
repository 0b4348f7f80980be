//! The simulation loop: stepping, snapshot capture and blow-up detection.

use std::time::Instant;

use crate::config::RunConfig;
use crate::gene::Gene;
use crate::grid::{GridState, Layer, Real};
use crate::kernels::{KernelError, StepBuffers, Stepper};
use crate::model::{CellModel, FitzHughNagumo};

/// Iterations between finiteness checks. A non-finite entry never becomes
/// finite again under the update, so a failed check is resolved by replaying
/// from the last good checkpoint one step at a time.
const CHECK_EVERY: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("blow-up at iteration {iteration}: {layer}[{row},{col}] is not finite")]
    BlowUp {
        iteration: usize,
        layer: Layer,
        row: usize,
        col: usize,
    },
    #[error("initial state contains non-finite values")]
    NonFiniteInitial,
    #[error("snapshot count {nssp} must be between 1 and iter_max={iter_max} and divide it")]
    Schedule { iter_max: usize, nssp: usize },
    #[error("initial state is {got:?}, config expects {want:?}")]
    ShapeMismatch {
        got: (usize, usize),
        want: (usize, usize),
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl RunError {
    /// Iteration of a blow-up, if this is one.
    pub fn blow_up_iteration(&self) -> Option<usize> {
        match self {
            RunError::BlowUp { iteration, .. } => Some(*iteration),
            _ => None,
        }
    }
}

/// Initial state plus `nssp` evenly spaced captures.
#[derive(Debug, Clone)]
pub struct SnapshotBuffer<T> {
    labels: Vec<usize>,
    frames: Vec<GridState<T>>,
}

impl<T: Real> SnapshotBuffer<T> {
    pub fn new(initial: GridState<T>) -> Self {
        Self {
            labels: vec![0],
            frames: vec![initial],
        }
    }

    /// Appends a frame; labels must increase strictly.
    pub fn push(&mut self, iteration: usize, state: GridState<T>) {
        assert!(
            iteration > *self.labels.last().unwrap(),
            "snapshot labels must increase"
        );
        assert_eq!(state.shape(), self.frames[0].shape());
        self.labels.push(iteration);
        self.frames.push(state);
    }

    /// Iteration index of every frame; the first is 0.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn frames(&self) -> &[GridState<T>] {
        &self.frames
    }

    pub fn frame(&self, k: usize) -> &GridState<T> {
        &self.frames[k]
    }

    pub fn frame_u(&self, k: usize) -> &[T] {
        &self.frames[k].u
    }

    pub fn frame_v(&self, k: usize) -> &[T] {
        &self.frames[k].v
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.frames[0].shape()
    }

    pub fn last(&self) -> &GridState<T> {
        self.frames.last().unwrap()
    }

    /// Keeps only the initial and final frames.
    pub fn first_and_last(mut self) -> Self {
        if self.frames.len() > 2 {
            let n = self.frames.len();
            self.frames.drain(1..n - 1);
            self.labels.drain(1..n - 1);
        }
        self
    }

    /// Applies `f` to every value of every frame (used for rescaling checks).
    pub fn map_values(&self, f: impl Fn(T) -> T) -> Self {
        let frames = self
            .frames
            .iter()
            .map(|g| {
                GridState::from_layers(
                    g.rows(),
                    g.cols(),
                    g.u.iter().map(|&x| f(x)).collect(),
                    g.v.iter().map(|&x| f(x)).collect(),
                )
            })
            .collect();
        Self {
            labels: self.labels.clone(),
            frames,
        }
    }
}

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct RunOutcome<T> {
    pub final_state: GridState<T>,
    pub snapshots: SnapshotBuffer<T>,
    /// Wall time of the iteration loop only.
    pub seconds: f64,
    /// Elapsed loop time at each captured snapshot after the initial one.
    pub snapshot_seconds: Vec<f64>,
}

/// Snapshot iteration labels for a schedule: `0, k, 2k, ..., iter_max` with
/// `k = iter_max / nssp`.
pub fn snapshot_labels(iter_max: usize, nssp: usize) -> Result<Vec<usize>, RunError> {
    if nssp == 0 || nssp > iter_max || !iter_max.is_multiple_of(nssp) {
        return Err(RunError::Schedule { iter_max, nssp });
    }
    let k = iter_max / nssp;
    Ok((0..=nssp).map(|j| j * k).collect())
}

/// Runs `config.iter_max` FitzHugh-Nagumo iterations from `initial`.
pub fn run<T: Real>(
    config: &RunConfig,
    gene: &Gene,
    initial: GridState<T>,
) -> Result<RunOutcome<T>, RunError> {
    run_model(config, &FitzHughNagumo::<T>::new(gene), initial)
}

/// Runs any [`CellModel`] on the configured backend and schedule.
pub fn run_model<T: Real, M: CellModel<T>>(
    config: &RunConfig,
    model: &M,
    initial: GridState<T>,
) -> Result<RunOutcome<T>, RunError> {
    let labels = snapshot_labels(config.iter_max, config.nssp)?;
    let want = (config.rows, config.cols);
    if initial.shape() != want {
        return Err(RunError::ShapeMismatch {
            got: initial.shape(),
            want,
        });
    }
    if !initial.is_finite() {
        return Err(RunError::NonFiniteInitial);
    }

    let mut stepper = Stepper::new(config.backend)?;
    let test_mod = labels[1];
    let mut snapshots = SnapshotBuffer::new(initial.clone());
    let mut snapshot_seconds = Vec::with_capacity(config.nssp);
    let mut checkpoint = initial.clone();
    let mut checkpoint_iter = 0;
    let mut buffers = StepBuffers::new(initial);

    let timer = Instant::now();
    for iter in 1..=config.iter_max {
        stepper.step(&mut buffers, model);
        let snapshot_due = iter % test_mod == 0;
        if iter % CHECK_EVERY != 0 && !snapshot_due {
            continue;
        }
        if !buffers.front().is_finite() {
            buffers.reset(&checkpoint);
            return Err(locate_blow_up(
                &mut stepper,
                &mut buffers,
                model,
                checkpoint_iter,
                iter,
            ));
        }
        checkpoint.u.copy_from_slice(&buffers.front().u);
        checkpoint.v.copy_from_slice(&buffers.front().v);
        checkpoint_iter = iter;
        if snapshot_due {
            snapshots.push(iter, buffers.front().clone());
            snapshot_seconds.push(timer.elapsed().as_secs_f64());
        }
    }
    let seconds = timer.elapsed().as_secs_f64();

    Ok(RunOutcome {
        final_state: buffers.into_front(),
        snapshots,
        seconds,
        snapshot_seconds,
    })
}

/// Replays from the checkpoint at `from` until the first non-finite state.
fn locate_blow_up<T: Real, M: CellModel<T>>(
    stepper: &mut Stepper<T>,
    buffers: &mut StepBuffers<T>,
    model: &M,
    from: usize,
    to: usize,
) -> RunError {
    for iter in from + 1..=to {
        stepper.step(buffers, model);
        if let Some((layer, row, col)) = buffers.front().first_non_finite() {
            return RunError::BlowUp {
                iteration: iter,
                layer,
                row,
                col,
            };
        }
    }
    unreachable!("stepping is deterministic; replay must reproduce the blow-up")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gene::GeneField;
    use crate::init::{init_center_square, init_full_random};
    use crate::kernels::Backend;

    fn cfg(n: usize, iter_max: usize, nssp: usize, backend: Backend) -> RunConfig {
        RunConfig {
            iter_max,
            nssp,
            backend,
            ..RunConfig::square(n)
        }
    }

    #[test]
    fn schedule_labels() {
        assert_eq!(snapshot_labels(200, 5).unwrap(), [0, 40, 80, 120, 160, 200]);
        assert_eq!(
            snapshot_labels(10_000, 5).unwrap(),
            [0, 2000, 4000, 6000, 8000, 10_000]
        );
        assert_eq!(snapshot_labels(7, 1).unwrap(), [0, 7]);
        assert!(snapshot_labels(10, 3).is_err());
        assert!(snapshot_labels(3, 5).is_err());
        assert!(snapshot_labels(3, 0).is_err());
    }

    #[test]
    fn run_fills_buffer_and_final_matches_last_frame() {
        let c = cfg(32, 200, 5, Backend::Reference);
        let init = init_center_square::<f32>(32, 32, 1).unwrap();
        let out = run(&c, &Gene::default(), init.clone()).unwrap();
        assert_eq!(out.snapshots.labels(), [0, 40, 80, 120, 160, 200]);
        assert_eq!(out.snapshots.frame(0), &init);
        assert_eq!(out.snapshots.last().checksum(), out.final_state.checksum());
        assert_eq!(out.snapshot_seconds.len(), 5);
        assert!(out.seconds >= *out.snapshot_seconds.last().unwrap());
    }

    #[test]
    fn run_matches_plain_evolution() {
        let g = Gene::default();
        let init = init_full_random::<f64>(24, 20, 4).unwrap();
        let c = RunConfig {
            rows: 24,
            cols: 20,
            ..cfg(24, 130, 10, Backend::blocked())
        };
        let out = run(&c, &g, init.clone()).unwrap();
        let direct = crate::kernels::evolve(init.clone(), &g, Backend::Reference, 130).unwrap();
        assert_eq!(out.final_state, direct);
        let mid = crate::kernels::evolve(init, &g, Backend::Reference, 65).unwrap();
        assert_eq!(out.snapshots.frame(5), &mid);
    }

    #[test]
    fn blow_up_reports_exact_iteration() {
        let g = Gene::default().with(GeneField::Dt, 100.0);
        let init = init_center_square::<f32>(32, 32, 42).unwrap();
        let c = cfg(32, 1000, 1, Backend::Reference);
        let err = run(&c, &g, init.clone()).unwrap_err();
        let k = err.blow_up_iteration().expect("blow-up");
        assert!(k >= 1);

        // the state after k-1 plain steps is finite, after k it is not
        let before = crate::kernels::evolve(init.clone(), &g, Backend::Reference, k - 1).unwrap();
        assert!(before.is_finite());
        let after = crate::kernels::evolve(init.clone(), &g, Backend::Reference, k).unwrap();
        assert!(!after.is_finite());

        // deterministic, and identical across exact-order backends
        let again = run(&c, &g, init.clone()).unwrap_err();
        assert_eq!(again.blow_up_iteration(), Some(k));
        let par = run(&cfg(32, 1000, 1, Backend::Parallel { threads: 2 }), &g, init).unwrap_err();
        assert_eq!(par.blow_up_iteration(), Some(k));
    }

    #[test]
    fn rejects_bad_schedule_and_shape() {
        let init = GridState::<f32>::zeros(16, 16);
        let err = run(&cfg(16, 10, 3, Backend::Reference), &Gene::default(), init.clone());
        assert!(matches!(err, Err(RunError::Schedule { .. })));
        let err = run(&cfg(17, 10, 1, Backend::Reference), &Gene::default(), init);
        assert!(matches!(err, Err(RunError::ShapeMismatch { .. })));
    }

    #[test]
    fn first_and_last_keeps_endpoints() {
        let c = cfg(16, 40, 4, Backend::Reference);
        let init = init_full_random::<f32>(16, 16, 2).unwrap();
        let out = run(&c, &Gene::default(), init).unwrap();
        let s = out.snapshots.clone().first_and_last();
        assert_eq!(s.labels(), [0, 40]);
        assert_eq!(s.last(), out.snapshots.last());
    }
}
