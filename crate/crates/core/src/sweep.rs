//! Two-parameter sweeps over the gene and a heuristic regime classifier.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::{validate_config, ConfigErrors, RunConfig};
use crate::gene::{Gene, GeneField, UnknownField};
use crate::grid::{checksum_hex, layer_range, GridState, Layer, Real};
use crate::imagery::{normalize_frame, text_width, write_gray8, Canvas, GrayImage, ImageError, GLYPH};
use crate::init::InitError;
use crate::run::{run, RunError, SnapshotBuffer};

/// One swept parameter and its ordered values.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub field: GeneField,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AxisError {
    #[error(transparent)]
    UnknownField(#[from] UnknownField),
    #[error("axis `{0}` must look like `name:v1,v2,...`")]
    Syntax(String),
    #[error("axis value `{0}` is not a finite number")]
    BadValue(String),
}

impl FromStr for Axis {
    type Err = AxisError;

    /// Parses `du:0.3,0.5,0.7`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, list) = s.split_once(':').ok_or_else(|| AxisError::Syntax(s.into()))?;
        let field: GeneField = name.trim().parse()?;
        let values = list
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(AxisError::BadValue(v.into())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err(AxisError::Syntax(s.into()));
        }
        Ok(Self { field, values })
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let values: Vec<String> = self.values.iter().map(f64::to_string).collect();
        write!(f, "{}:{}", self.field.name(), values.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedMode {
    /// Every cell uses the base seed.
    #[default]
    Shared,
    /// Cell `k` (row-major) uses `seed + k`.
    PerCell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnapshotPolicy {
    #[default]
    FinalOnly,
    Full,
}

/// Tunable classifier constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierThresholds {
    /// Final u range below `homogeneity * max(global range, floor)` is homogeneous.
    pub homogeneity: f64,
    pub floor: f64,
    /// A cell is active when `|u - median| > activity * final range`.
    pub activity: f64,
    /// Final active count must reach `growth` times the initial count.
    pub growth: f64,
    /// Largest tolerated relative drop of the active count below its running maximum.
    pub dip: f64,
}

impl Default for ClassifierThresholds {
    fn default() -> Self {
        Self {
            homogeneity: 0.01,
            floor: 0.01,
            activity: 0.1,
            growth: 3.0,
            dip: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub x: Axis,
    pub y: Axis,
    pub gene: Gene,
    pub config: RunConfig,
    pub policy: SnapshotPolicy,
    pub seed_mode: SeedMode,
    /// Run cells in parallel. Not for timing work.
    pub concurrent: bool,
    pub thresholds: ClassifierThresholds,
}

impl SweepSpec {
    pub fn new(x: Axis, y: Axis, gene: Gene, config: RunConfig) -> Self {
        Self {
            x,
            y,
            gene,
            config,
            policy: SnapshotPolicy::default(),
            seed_mode: SeedMode::default(),
            concurrent: false,
            thresholds: ClassifierThresholds::default(),
        }
    }

    /// Gene of panel cell `(row, col)`: `y[row]`, `x[col]` over the base.
    pub fn cell_gene(&self, row: usize, col: usize) -> Gene {
        self.gene
            .with(self.x.field, self.x.values[col])
            .with(self.y.field, self.y.values[row])
    }

    pub fn cell_seed(&self, row: usize, col: usize) -> u64 {
        match self.seed_mode {
            SeedMode::Shared => self.config.seed,
            SeedMode::PerCell => self
                .config
                .seed
                .wrapping_add((row * self.x.values.len() + col) as u64),
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if self.x.field == self.y.field {
            return Err(SweepError::SameAxis(self.x.field.name()));
        }
        if self.x.values.is_empty() || self.y.values.is_empty() {
            return Err(SweepError::EmptyAxis);
        }
        for row in 0..self.y.values.len() {
            for col in 0..self.x.values.len() {
                validate_config(self.config.clone(), &self.cell_gene(row, col))
                    .map_err(|errors| SweepError::Config { row, col, errors })?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("both axes sweep `{0}`")]
    SameAxis(&'static str),
    #[error("sweep axes need at least one value")]
    EmptyAxis,
    #[error("cell ({row},{col}): {errors}")]
    Config {
        row: usize,
        col: usize,
        errors: ConfigErrors,
    },
    #[error("image mode needs an input image")]
    MissingImage,
    #[error(transparent)]
    Init(#[from] InitError),
    #[error("cell ({row},{col}): {source}")]
    Run {
        row: usize,
        col: usize,
        #[source]
        source: RunError,
    },
    #[error(transparent)]
    Image(#[from] ImageError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Homogeneous,
    Patterned,
    Growing,
    BlowUp,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Homogeneous => "Homogeneous",
            Regime::Patterned => "Patterned",
            Regime::Growing => "Growing",
            Regime::BlowUp => "BlowUp",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A regime plus the statistics it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeLabel {
    pub regime: Regime,
    /// Final u max - min; `NaN` for blow-ups.
    pub final_range: f64,
    /// u max - min over every frame together.
    pub global_range: f64,
    /// Active-cell fraction per frame.
    pub active_fractions: Vec<f64>,
    pub blow_up_iteration: Option<usize>,
}

impl RegimeLabel {
    pub fn blow_up(iteration: usize) -> Self {
        Self {
            regime: Regime::BlowUp,
            final_range: f64::NAN,
            global_range: f64::NAN,
            active_fractions: Vec::new(),
            blow_up_iteration: Some(iteration),
        }
    }

    pub fn final_active_fraction(&self) -> Option<f64> {
        self.active_fractions.last().copied()
    }
}

fn median(layer: &[f64]) -> f64 {
    let mut v = layer.to_vec();
    let mid = v.len() / 2;
    let (_, &mut upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    if v.len() % 2 == 1 {
        upper
    } else {
        let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

fn active_count(layer: &[f64], threshold: f64) -> usize {
    let m = median(layer);
    layer.iter().filter(|&&x| (x - m).abs() > threshold).count()
}

/// Per frame, the number of cells with `|u - spatial median| > threshold`.
pub fn growth_curve<T: Real>(snapshots: &SnapshotBuffer<T>, threshold: f64) -> Vec<usize> {
    (0..snapshots.len())
        .map(|k| {
            let u: Vec<f64> = snapshots.frame_u(k).iter().map(|x| x.as_f64()).collect();
            active_count(&u, threshold)
        })
        .collect()
}

/// Whether counts rise overall, never falling more than `dip` below their
/// running maximum, and end at least `growth` times the first count.
fn is_growing(counts: &[usize], thr: &ClassifierThresholds) -> bool {
    let (first, last) = (counts[0] as f64, *counts.last().unwrap() as f64);
    let mut peak = 0f64;
    for &c in counts {
        let c = c as f64;
        if c < (1.0 - thr.dip) * peak {
            return false;
        }
        peak = peak.max(c);
    }
    last > 0.0 && last >= thr.growth * first
}

/// Labels a completed run from its u frames.
pub fn classify_outcome<T: Real>(snapshots: &SnapshotBuffer<T>, thr: &ClassifierThresholds) -> RegimeLabel {
    let (lo, hi) = layer_range(&snapshots.last().u);
    let final_range = (hi - lo).as_f64();
    let global_range = snapshots
        .frames()
        .iter()
        .map(|f| {
            let (lo, hi) = layer_range(&f.u);
            (lo.as_f64(), hi.as_f64())
        })
        .fold(None, |acc: Option<(f64, f64)>, (lo, hi)| match acc {
            None => Some((lo, hi)),
            Some((a, b)) => Some((a.min(lo), b.max(hi))),
        })
        .map_or(0.0, |(lo, hi)| hi - lo);

    let cells = snapshots.last().len() as f64;
    let counts = growth_curve(snapshots, thr.activity * final_range);
    let active_fractions = counts.iter().map(|&c| c as f64 / cells).collect();

    let regime = if final_range < thr.homogeneity * global_range.max(thr.floor) {
        Regime::Homogeneous
    } else if is_growing(&counts, thr) {
        Regime::Growing
    } else {
        Regime::Patterned
    };
    RegimeLabel {
        regime,
        final_range,
        global_range,
        active_fractions,
        blow_up_iteration: None,
    }
}

#[derive(Debug, Clone)]
pub enum CellOutcome<T> {
    Completed {
        final_state: GridState<T>,
        /// Present under [`SnapshotPolicy::Full`].
        snapshots: Option<SnapshotBuffer<T>>,
    },
    BlowUp {
        iteration: usize,
        layer: Layer,
        row: usize,
        col: usize,
    },
}

#[derive(Debug, Clone)]
pub struct SweepCell<T> {
    pub row: usize,
    pub col: usize,
    pub x_value: f64,
    pub y_value: f64,
    pub gene: Gene,
    pub seed: u64,
    pub outcome: CellOutcome<T>,
    pub label: RegimeLabel,
}

impl<T: Real> SweepCell<T> {
    pub fn final_state(&self) -> Option<&GridState<T>> {
        match &self.outcome {
            CellOutcome::Completed { final_state, .. } => Some(final_state),
            CellOutcome::BlowUp { .. } => None,
        }
    }

    pub fn checksum(&self) -> Option<u64> {
        self.final_state().map(GridState::checksum)
    }
}

/// Results in row-major order: row `r` is `y[r]`, column `c` is `x[c]`.
#[derive(Debug, Clone)]
pub struct SweepResult<T> {
    pub spec: SweepSpec,
    pub cells: Vec<SweepCell<T>>,
}

/// Runs every cell of the sweep. Blow-ups are recorded per cell.
pub fn sweep_grid<T: Real>(spec: &SweepSpec, image: Option<&GrayImage>) -> Result<SweepResult<T>, SweepError> {
    spec.validate()?;
    if spec.config.init_mode == crate::config::InitMode::Image && image.is_none() {
        return Err(SweepError::MissingImage);
    }
    let (ny, nx) = (spec.y.values.len(), spec.x.values.len());
    let job = |k: usize| run_cell::<T>(spec, image, k / nx, k % nx);
    let cells = if spec.concurrent {
        (0..ny * nx).into_par_iter().map(job).collect::<Result<Vec<_>, _>>()?
    } else {
        (0..ny * nx).map(job).collect::<Result<Vec<_>, _>>()?
    };
    Ok(SweepResult {
        spec: spec.clone(),
        cells,
    })
}

fn run_cell<T: Real>(
    spec: &SweepSpec,
    image: Option<&GrayImage>,
    row: usize,
    col: usize,
) -> Result<SweepCell<T>, SweepError> {
    let gene = spec.cell_gene(row, col);
    let seed = spec.cell_seed(row, col);
    let config = RunConfig {
        seed,
        ..spec.config.clone()
    };
    let initial = crate::initial_state::<T>(&config, &gene, image)?;
    let (outcome, label) = match run(&config, &gene, initial) {
        Ok(out) => {
            let label = classify_outcome(&out.snapshots, &spec.thresholds);
            let snapshots = (spec.policy == SnapshotPolicy::Full).then_some(out.snapshots);
            (
                CellOutcome::Completed {
                    final_state: out.final_state,
                    snapshots,
                },
                label,
            )
        }
        Err(RunError::BlowUp {
            iteration,
            layer,
            row: r,
            col: c,
        }) => (
            CellOutcome::BlowUp {
                iteration,
                layer,
                row: r,
                col: c,
            },
            RegimeLabel::blow_up(iteration),
        ),
        Err(source) => return Err(SweepError::Run { row, col, source }),
    };
    Ok(SweepCell {
        row,
        col,
        x_value: spec.x.values[col],
        y_value: spec.y.values[row],
        gene,
        seed,
        outcome,
        label,
    })
}

/// Header of `labels.csv`.
pub const LABELS_HEADER: &str = "x_value,y_value,label,final_range,final_active_fraction,checksum";

impl<T: Real> SweepResult<T> {
    pub fn shape(&self) -> (usize, usize) {
        (self.spec.y.values.len(), self.spec.x.values.len())
    }

    pub fn cell(&self, row: usize, col: usize) -> &SweepCell<T> {
        &self.cells[row * self.spec.x.values.len() + col]
    }

    pub fn regimes(&self) -> Vec<Vec<Regime>> {
        let (ny, nx) = self.shape();
        (0..ny)
            .map(|r| (0..nx).map(|c| self.cell(r, c).label.regime).collect())
            .collect()
    }

    /// One line per cell, row-major; blow-up cells leave the numeric fields empty.
    pub fn labels_csv(&self) -> String {
        let mut out = String::from(LABELS_HEADER);
        out.push('\n');
        for cell in &self.cells {
            let line = match cell.checksum() {
                Some(sum) => format!(
                    "{},{},{},{},{},{}",
                    cell.x_value,
                    cell.y_value,
                    cell.label.regime,
                    cell.label.final_range,
                    cell.label.final_active_fraction().unwrap_or(0.0),
                    checksum_hex(sum)
                ),
                None => format!("{},{},{},,,", cell.x_value, cell.y_value, cell.label.regime),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn panel_layout(&self, max_tile: usize) -> PanelLayout {
        let (rows, cols) = self.spec.config.shape();
        PanelLayout::new(&self.spec.x, &self.spec.y, rows, cols, max_tile)
    }

    /// One final-u frame per cell, `y` down the side and `x` across the top.
    pub fn render_panel(&self, max_tile: usize) -> Canvas {
        let layout = self.panel_layout(max_tile);
        let mut canvas = Canvas::new(layout.width, layout.height, PANEL_BACKGROUND);
        let (rows, cols) = self.spec.config.shape();
        canvas.text(PANEL_MARGIN, PANEL_MARGIN, &layout.title);
        for (c, label) in layout.x_labels.iter().enumerate() {
            let (x, _) = layout.origin(0, c);
            canvas.text(x, PANEL_MARGIN + PANEL_LINE, label);
        }
        for (r, label) in layout.y_labels.iter().enumerate() {
            let (_, y) = layout.origin(r, 0);
            canvas.text(PANEL_MARGIN, y + layout.tile_rows / 2, label);
        }
        for cell in &self.cells {
            if let Some(state) = cell.final_state() {
                let (x, y) = layout.origin(cell.row, cell.col);
                canvas.blit(&normalize_frame(&state.u, rows, cols), layout.stride, x, y);
            }
        }
        canvas
    }

    /// Writes `panel.png`, `labels.csv` and one `cell_<x>_<y>.pgm` per
    /// completed cell into `dir`.
    pub fn write_dir(&self, dir: &Path, max_tile: usize) -> Result<(), ImageError> {
        std::fs::create_dir_all(dir)?;
        self.render_panel(max_tile).save(&dir.join("panel.png"))?;
        std::fs::write(dir.join("labels.csv"), self.labels_csv())?;
        let (rows, cols) = self.spec.config.shape();
        for cell in &self.cells {
            if let Some(state) = cell.final_state() {
                let name = format!("cell_{}_{}.pgm", cell.x_value, cell.y_value);
                crate::imagery::save_frame(&state.u, rows, cols, &dir.join(name))?;
            }
        }
        Ok(())
    }
}

const PANEL_MARGIN: usize = 8;
const PANEL_GAP: usize = 4;
const PANEL_LINE: usize = GLYPH + 4;
const PANEL_BACKGROUND: u8 = 40;

/// Pixel geometry of a sweep panel.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelLayout {
    pub width: usize,
    pub height: usize,
    pub stride: usize,
    pub tile_rows: usize,
    pub tile_cols: usize,
    pub title: String,
    pub x_labels: Vec<String>,
    pub y_labels: Vec<String>,
    left: usize,
    top: usize,
    pitch_x: usize,
    pitch_y: usize,
}

impl PanelLayout {
    pub fn new(x: &Axis, y: &Axis, rows: usize, cols: usize, max_tile: usize) -> Self {
        let stride = rows.max(cols).div_ceil(max_tile.max(1)).max(1);
        let (tile_rows, tile_cols) = (rows.div_ceil(stride), cols.div_ceil(stride));
        let x_labels: Vec<String> = x.values.iter().map(|v| format!("{}={v}", x.field.name())).collect();
        let y_labels: Vec<String> = y.values.iter().map(|v| format!("{}={v}", y.field.name())).collect();
        let title = format!("x: {}  y: {}", x.field.name(), y.field.name());

        let left = PANEL_MARGIN + y_labels.iter().map(|l| text_width(l)).max().unwrap_or(0) + PANEL_GAP;
        let top = PANEL_MARGIN + 2 * PANEL_LINE;
        let pitch_x = tile_cols.max(x_labels.iter().map(|l| text_width(l)).max().unwrap_or(0)) + PANEL_GAP;
        let pitch_y = tile_rows + PANEL_GAP;
        let width = (left + x.values.len() * pitch_x + PANEL_MARGIN).max(2 * PANEL_MARGIN + text_width(&title));
        let height = top + y.values.len() * pitch_y + PANEL_MARGIN;
        Self {
            width,
            height,
            stride,
            tile_rows,
            tile_cols,
            title,
            x_labels,
            y_labels,
            left,
            top,
            pitch_x,
            pitch_y,
        }
    }

    /// Top-left pixel of the tile for `(y[row], x[col])`.
    pub fn origin(&self, row: usize, col: usize) -> (usize, usize) {
        (self.left + col * self.pitch_x, self.top + row * self.pitch_y)
    }
}

/// Saves a sweep panel to `path` (`.png` or `.pgm`).
pub fn save_panel<T: Real>(result: &SweepResult<T>, max_tile: usize, path: &Path) -> Result<(), ImageError> {
    let canvas = result.render_panel(max_tile);
    write_gray8(path, canvas.height, canvas.width, &canvas.pixels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::InitMode;
    use crate::kernels::Backend;
    use proptest::prelude::*;

    fn small_config(n: usize, iters: usize) -> RunConfig {
        RunConfig {
            iter_max: iters,
            nssp: 4,
            seed: 9,
            backend: Backend::Reference,
            ..RunConfig::square(n)
        }
    }

    fn buffer(frames: Vec<Vec<f64>>, n: usize) -> SnapshotBuffer<f64> {
        let mut it = frames.into_iter();
        let first = it.next().unwrap();
        let mut b = SnapshotBuffer::new(GridState::from_layers(n, n, first.clone(), first));
        for (k, f) in it.enumerate() {
            b.push(k + 1, GridState::from_layers(n, n, f.clone(), f));
        }
        b
    }

    #[test]
    fn axis_parsing() {
        let a: Axis = "du:0.3,0.5,0.7".parse().unwrap();
        assert_eq!(a.field, GeneField::Du);
        assert_eq!(a.values, [0.3, 0.5, 0.7]);
        assert_eq!(a.to_string(), "du:0.3,0.5,0.7");
        assert!(matches!("zz:1".parse::<Axis>(), Err(AxisError::UnknownField(_))));
        assert!(matches!("du".parse::<Axis>(), Err(AxisError::Syntax(_))));
        assert!(matches!("du:".parse::<Axis>(), Err(AxisError::Syntax(_))));
        assert!(matches!("du:x".parse::<Axis>(), Err(AxisError::BadValue(_))));
        assert!(matches!("du:inf".parse::<Axis>(), Err(AxisError::BadValue(_))));
    }

    #[test]
    fn same_axis_rejected() {
        let spec = SweepSpec::new(
            "du:0.3".parse().unwrap(),
            "du:0.5".parse().unwrap(),
            Gene::default(),
            small_config(16, 8),
        );
        assert!(matches!(spec.validate(), Err(SweepError::SameAxis("du"))));
    }

    #[test]
    fn invalid_cell_gene_rejected() {
        let spec = SweepSpec::new(
            "du:0.3,-1".parse().unwrap(),
            "dv:1".parse().unwrap(),
            Gene::default(),
            small_config(16, 8),
        );
        assert!(matches!(spec.validate(), Err(SweepError::Config { row: 0, col: 1, .. })));
    }

    #[test]
    fn uniform_frames_are_homogeneous() {
        let b = buffer(vec![vec![0.7; 16]; 3], 4);
        let l = classify_outcome(&b, &ClassifierThresholds::default());
        assert_eq!(l.regime, Regime::Homogeneous);
        assert_eq!(l.final_range, 0.0);
        assert_eq!(growth_curve(&b, 0.0), [0, 0, 0]);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn spreading_activity_is_growing() {
        let n = 10;
        let frame = |k: usize| -> Vec<f64> { (0..n * n).map(|i| if i < k { 1.0 } else { 0.0 }).collect() };
        let b = buffer(vec![frame(2), frame(8), frame(15), frame(30)], n);
        let l = classify_outcome(&b, &ClassifierThresholds::default());
        assert_eq!(l.regime, Regime::Growing);
        assert_eq!(l.active_fractions, [0.02, 0.08, 0.15, 0.30]);

        // a dip of more than 10% breaks monotonic growth
        let b = buffer(vec![frame(2), frame(20), frame(15), frame(30)], n);
        assert_eq!(classify_outcome(&b, &ClassifierThresholds::default()).regime, Regime::Patterned);
        // too little growth
        let b = buffer(vec![frame(12), frame(16), frame(22), frame(30)], n);
        assert_eq!(classify_outcome(&b, &ClassifierThresholds::default()).regime, Regime::Patterned);
    }

    #[test]
    fn seed_activity_fits_the_block() {
        let init = crate::init::init_center_square::<f32>(64, 64, 3).unwrap();
        let b = SnapshotBuffer::new(init);
        assert!(growth_curve(&b, 0.05)[0] <= 121);
    }

    proptest! {
        #[test]
        fn classification_ignores_affine_rescaling(
            seed in 0u64..1000,
            alpha in 1.0f64..20.0,
            beta in -5.0f64..5.0,
        ) {
            let mut rng = crate::init::SeededRng::new(seed);
            let frames: Vec<Vec<f64>> = (0..3)
                .map(|k| (0..64).map(|i| if i < 8 * (k + 1) { 2.0 * rng.next_unit() as f64 } else { 0.0 }).collect())
                .collect();
            let b = buffer(frames, 8);
            let thr = ClassifierThresholds::default();
            let plain = classify_outcome(&b, &thr);
            prop_assume!(plain.global_range >= 1.0);
            let scaled = classify_outcome(&b.map_values(|x| alpha * x + beta), &thr);
            prop_assert_eq!(plain.regime, scaled.regime);
        }
    }

    #[test]
    fn sweep_cells_match_standalone_runs() {
        let cfg = small_config(20, 40);
        let spec = SweepSpec::new(
            "du:0.1,0.3".parse().unwrap(),
            "dv:0.8,1".parse().unwrap(),
            Gene::default(),
            cfg.clone(),
        );
        let res = sweep_grid::<f32>(&spec, None).unwrap();
        assert_eq!(res.cells.len(), 4);
        for r in 0..2 {
            for c in 0..2 {
                let cell = res.cell(r, c);
                assert_eq!(cell.gene.du, [0.1, 0.3][c]);
                assert_eq!(cell.gene.dv, [0.8, 1.0][r]);
                let init = crate::init::init_center_square::<f32>(20, 20, 9).unwrap();
                let alone = run(&cfg, &cell.gene, init).unwrap();
                assert_eq!(cell.checksum(), Some(alone.final_state.checksum()));
            }
        }
        let again = sweep_grid::<f32>(&SweepSpec { concurrent: true, ..spec }, None).unwrap();
        assert_eq!(res.regimes(), again.regimes());
        let sums: Vec<_> = again.cells.iter().map(SweepCell::checksum).collect();
        assert_eq!(sums, res.cells.iter().map(SweepCell::checksum).collect::<Vec<_>>());
    }

    #[test]
    fn per_cell_seeds_differ() {
        let spec = SweepSpec {
            seed_mode: SeedMode::PerCell,
            ..SweepSpec::new(
                "du:0.3,0.3".parse().unwrap(),
                "dv:1".parse().unwrap(),
                Gene::default(),
                small_config(16, 4),
            )
        };
        let res = sweep_grid::<f32>(&spec, None).unwrap();
        assert_eq!((res.cell(0, 0).seed, res.cell(0, 1).seed), (9, 10));
        assert_ne!(res.cell(0, 0).checksum(), res.cell(0, 1).checksum());
    }

    #[test]
    fn blow_up_cells_are_recorded() {
        let spec = SweepSpec::new(
            "dt:0.1,100".parse().unwrap(),
            "du:0.06".parse().unwrap(),
            Gene::default(),
            RunConfig {
                iter_max: 400,
                nssp: 1,
                ..small_config(16, 400)
            },
        );
        let res = sweep_grid::<f32>(&spec, None).unwrap();
        assert_ne!(res.cell(0, 0).label.regime, Regime::BlowUp);
        let bad = res.cell(0, 1);
        assert_eq!(bad.label.regime, Regime::BlowUp);
        assert!(bad.label.blow_up_iteration.is_some());
        let csv = res.labels_csv();
        assert!(csv.lines().nth(2).unwrap().ends_with(",BlowUp,,,"), "{csv}");

        let dir = tempfile::tempdir().unwrap();
        res.write_dir(dir.path(), 64).unwrap();
        assert!(dir.path().join("cell_0.1_0.06.pgm").exists());
        assert!(!dir.path().join("cell_100_0.06.pgm").exists());
    }

    #[test]
    fn panel_cells_follow_axes() {
        // dt = 0 keeps every cell at its initial state, so each tile must be
        // the initial frame of that cell's seed
        let spec = SweepSpec {
            seed_mode: SeedMode::PerCell,
            ..SweepSpec::new(
                "du:0.1,0.2,0.3".parse().unwrap(),
                "dt:0".parse().unwrap(),
                Gene::default(),
                RunConfig {
                    init_mode: InitMode::FullRandom,
                    ..small_config(12, 4)
                },
            )
        };
        let res = sweep_grid::<f32>(&spec, None).unwrap();
        let canvas = res.render_panel(256);
        let layout = res.panel_layout(256);
        for c in 0..3 {
            let init = crate::init::init_full_random::<f32>(12, 12, spec.cell_seed(0, c)).unwrap();
            let want = normalize_frame(&init.u, 12, 12);
            let (x, y) = layout.origin(0, c);
            for r in 0..12 {
                let at = (y + r) * canvas.width + x;
                assert_eq!(&canvas.pixels[at..at + 12], &want.pixels[r * 12..(r + 1) * 12]);
            }
        }
    }

    #[test]
    fn results_directory_contents() {
        let spec = SweepSpec::new(
            "a:-0.3".parse().unwrap(),
            "b:1.3".parse().unwrap(),
            Gene::default(),
            small_config(16, 8),
        );
        let res = sweep_grid::<f32>(&spec, None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        res.write_dir(dir.path(), 512).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("labels.csv")).unwrap();
        assert_eq!(csv.lines().next().unwrap(), LABELS_HEADER);
        assert_eq!(csv.lines().count(), 2);
        assert!(dir.path().join("panel.png").exists());
        let frame = crate::imagery::load_grayscale(&dir.path().join("cell_-0.3_1.3.pgm"), None).unwrap();
        assert_eq!((frame.rows(), frame.cols()), (16, 16));
    }
}
