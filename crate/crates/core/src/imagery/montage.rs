//! Snapshot montage: u frames on the first row, v frames on the second,
//! columns ordered by iteration, with a caption band listing the run.

use std::path::Path;

use super::text::{draw_text, text_width, GLYPH};
use super::{normalize_frame, normalize_frame_fixed, write_gray8, Frame8, ImageError};
use crate::config::RunConfig;
use crate::gene::Gene;
use crate::grid::Real;
use crate::run::SnapshotBuffer;

const MARGIN: usize = 8;
const GAP: usize = 4;
const LINE: usize = GLYPH + 4;
const ROW_LABEL: usize = 2 * GLYPH;
const BACKGROUND: u8 = 40;
const INK: u8 = 255;

/// Loop timing printed in the caption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub seconds: f64,
    pub ns_per_cell: f64,
    pub mcells_per_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MontageOptions {
    /// Wall-clock figures for the caption. Leave unset for byte-reproducible
    /// output.
    pub timing: Option<Timing>,
    /// Map every frame against one `[min, max]` instead of its own range.
    pub fixed_range: Option<(f64, f64)>,
    /// Frames larger than this (per side) are subsampled by an integer stride.
    pub max_tile: usize,
}

impl Default for MontageOptions {
    fn default() -> Self {
        Self {
            timing: None,
            fixed_range: None,
            max_tile: 512,
        }
    }
}

/// An 8-bit grayscale raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Canvas {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Canvas {
    pub fn new(width: usize, height: usize, fill: u8) -> Self {
        Self {
            width,
            height,
            pixels: vec![fill; width * height],
        }
    }

    /// Copies `frame` subsampled by `stride` with its top-left at `(x, y)`.
    pub fn blit(&mut self, frame: &Frame8, stride: usize, x: usize, y: usize) {
        for (dy, r) in (0..frame.rows).step_by(stride).enumerate() {
            let dst = (y + dy) * self.width + x;
            let src = &frame.pixels[r * frame.cols..(r + 1) * frame.cols];
            for (dx, &p) in src.iter().step_by(stride).enumerate() {
                self.pixels[dst + dx] = p;
            }
        }
    }

    pub fn text(&mut self, x: usize, y: usize, s: &str) {
        draw_text(&mut self.pixels, self.width, x, y, s, INK);
    }

    pub fn save(&self, path: &Path) -> Result<(), ImageError> {
        write_gray8(path, self.height, self.width, &self.pixels)
    }
}

fn caption<T: Real>(
    snapshots: &SnapshotBuffer<T>,
    gene: &Gene,
    config: &RunConfig,
    backend_label: &str,
    timing: Option<Timing>,
) -> Vec<String> {
    let (rows, cols) = snapshots.shape();
    let mut lines = vec![
        format!(
            "a={} b={} eps={} c={} Du={} Dv={} dt={} ka={}",
            gene.a, gene.b, gene.eps, gene.c, gene.du, gene.dv, gene.dt, gene.ka
        ),
        format!(
            "typ={} {}x{} iter_max={} nssp={} seed={} precision={}",
            config.init_mode.typ(),
            rows,
            cols,
            config.iter_max,
            config.nssp,
            config.seed,
            config.precision
        ),
        format!("simulator: {backend_label}"),
    ];
    if let Some(t) = timing {
        lines.push(format!(
            "time: {:.3} s  per cell: {:.4} ns  speed: {:.2} Mcells/s",
            t.seconds, t.ns_per_cell, t.mcells_per_s
        ));
    }
    let last = snapshots.last();
    let (ulo, uhi) = last.u_range();
    let (vlo, vhi) = crate::grid::layer_range(&last.v);
    lines.push(format!(
        "final max-min: u={:.6} v={:.6}",
        (uhi - ulo).as_f64(),
        (vhi - vlo).as_f64()
    ));
    lines
}

/// Pixel geometry of a montage.
#[derive(Debug, Clone, PartialEq)]
pub struct MontageLayout {
    pub width: usize,
    pub height: usize,
    pub stride: usize,
    pub tile_rows: usize,
    pub tile_cols: usize,
    /// One column per snapshot label.
    pub columns: usize,
    pitch: usize,
    grid_top: usize,
    text_top: usize,
}

impl MontageLayout {
    /// Top-left pixel of the tile of `layer_row` (0 = u, 1 = v) at column `col`.
    pub fn origin(&self, layer_row: usize, col: usize) -> (usize, usize) {
        (
            MARGIN + ROW_LABEL + col * self.pitch,
            self.grid_top + layer_row * (self.tile_rows + GAP),
        )
    }
}

fn layout(labels: &[String], lines: &[String], rows: usize, cols: usize, max_tile: usize) -> MontageLayout {
    let stride = rows.max(cols).div_ceil(max_tile.max(1)).max(1);
    let (tile_rows, tile_cols) = (rows.div_ceil(stride), cols.div_ceil(stride));
    let columns = labels.len();
    let col_width = tile_cols.max(labels.iter().map(|l| text_width(l)).max().unwrap_or(0));
    let grid_w = ROW_LABEL + columns * col_width + columns.saturating_sub(1) * GAP;
    let text_w = lines.iter().map(|l| text_width(l)).max().unwrap_or(0);
    let grid_top = MARGIN + LINE;
    let text_top = grid_top + 2 * tile_rows + 3 * GAP;
    MontageLayout {
        width: 2 * MARGIN + grid_w.max(text_w),
        height: text_top + lines.len() * LINE + MARGIN,
        stride,
        tile_rows,
        tile_cols,
        columns,
        pitch: col_width + GAP,
        grid_top,
        text_top,
    }
}

fn labels_of<T: Real>(snapshots: &SnapshotBuffer<T>) -> Vec<String> {
    snapshots.labels().iter().map(|l| l.to_string()).collect()
}

/// Geometry [`montage_canvas`] uses for the same inputs.
pub fn montage_layout<T: Real>(
    snapshots: &SnapshotBuffer<T>,
    gene: &Gene,
    config: &RunConfig,
    backend_label: &str,
    opts: &MontageOptions,
) -> MontageLayout {
    let (rows, cols) = snapshots.shape();
    let lines = caption(snapshots, gene, config, backend_label, opts.timing);
    layout(&labels_of(snapshots), &lines, rows, cols, opts.max_tile)
}

/// Lays out the montage in memory. A pure function of its inputs.
pub fn montage_canvas<T: Real>(
    snapshots: &SnapshotBuffer<T>,
    gene: &Gene,
    config: &RunConfig,
    backend_label: &str,
    opts: &MontageOptions,
) -> Canvas {
    let (rows, cols) = snapshots.shape();
    let lines = caption(snapshots, gene, config, backend_label, opts.timing);
    let labels = labels_of(snapshots);
    let geo = layout(&labels, &lines, rows, cols, opts.max_tile);

    let mut canvas = Canvas::new(geo.width, geo.height, BACKGROUND);
    let render = |layer: &[T]| match opts.fixed_range {
        Some((lo, hi)) => normalize_frame_fixed(layer, rows, cols, lo, hi),
        None => normalize_frame(layer, rows, cols),
    };
    for (k, label) in labels.iter().enumerate() {
        let (x, y_u) = geo.origin(0, k);
        let (_, y_v) = geo.origin(1, k);
        canvas.text(x, MARGIN, label);
        canvas.blit(&render(snapshots.frame_u(k)), geo.stride, x, y_u);
        canvas.blit(&render(snapshots.frame_v(k)), geo.stride, x, y_v);
    }
    let (_, y_u) = geo.origin(0, 0);
    let (_, y_v) = geo.origin(1, 0);
    canvas.text(MARGIN, y_u + geo.tile_rows / 2, "A");
    canvas.text(MARGIN, y_v + geo.tile_rows / 2, "B");
    for (k, line) in lines.iter().enumerate() {
        canvas.text(MARGIN, geo.text_top + k * LINE, line);
    }
    canvas
}

/// Renders the montage and writes it to `out_path` (`.png` or `.pgm`).
pub fn render_montage<T: Real>(
    snapshots: &SnapshotBuffer<T>,
    gene: &Gene,
    config: &RunConfig,
    backend_label: &str,
    opts: &MontageOptions,
    out_path: &Path,
) -> Result<Canvas, ImageError> {
    if snapshots.frames().iter().any(|f| !f.is_finite()) {
        return Err(ImageError::NonFinite);
    }
    let canvas = montage_canvas(snapshots, gene, config, backend_label, opts);
    canvas.save(out_path)?;
    Ok(canvas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridState;
    use crate::init::init_center_square;
    use crate::kernels::Backend;
    use crate::run::run;

    fn snaps(iter_max: usize, nssp: usize) -> (SnapshotBuffer<f32>, RunConfig) {
        let cfg = RunConfig {
            iter_max,
            nssp,
            backend: Backend::Reference,
            seed: 5,
            ..RunConfig::square(24)
        };
        let init = init_center_square(24, 24, 5).unwrap();
        (run(&cfg, &Gene::default(), init).unwrap().snapshots, cfg)
    }

    fn tile(c: &Canvas, geo: &MontageLayout, row: usize, col: usize) -> Vec<u8> {
        let (x, y) = geo.origin(row, col);
        (0..geo.tile_rows)
            .flat_map(|r| c.pixels[(y + r) * c.width + x..(y + r) * c.width + x + geo.tile_cols].to_vec())
            .collect()
    }

    fn check_tiles(s: &SnapshotBuffer<f32>, cfg: &RunConfig) -> MontageLayout {
        let opts = MontageOptions::default();
        let c = montage_canvas(s, &Gene::default(), cfg, "reference", &opts);
        let geo = montage_layout(s, &Gene::default(), cfg, "reference", &opts);
        assert_eq!((c.width, c.height), (geo.width, geo.height));
        for k in 0..geo.columns {
            assert_eq!(tile(&c, &geo, 0, k), normalize_frame(s.frame_u(k), 24, 24).pixels);
            assert_eq!(tile(&c, &geo, 1, k), normalize_frame(s.frame_v(k), 24, 24).pixels);
        }
        geo
    }

    #[test]
    fn six_columns_for_five_snapshots() {
        let (s, cfg) = snaps(200, 5);
        assert_eq!(check_tiles(&s, &cfg).columns, 6);
    }

    #[test]
    fn two_columns_for_one_snapshot() {
        let (s, cfg) = snaps(10, 1);
        assert_eq!(s.labels(), [0, 10]);
        assert_eq!(check_tiles(&s, &cfg).columns, 2);
    }

    #[test]
    fn rendering_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let (s, cfg) = snaps(40, 4);
        let opts = MontageOptions::default();
        let a = dir.path().join("a.png");
        let b = dir.path().join("b.png");
        render_montage(&s, &Gene::default(), &cfg, "reference", &opts, &a).unwrap();
        let (s2, _) = snaps(40, 4);
        render_montage(&s2, &Gene::default(), &cfg, "reference", &opts, &b).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }

    #[test]
    fn large_frames_are_subsampled() {
        let init = init_center_square::<f32>(40, 40, 1).unwrap();
        let s = SnapshotBuffer::new(init);
        let opts = MontageOptions {
            max_tile: 16,
            ..MontageOptions::default()
        };
        let geo = montage_layout(&s, &Gene::default(), &RunConfig::square(40), "x", &opts);
        assert_eq!((geo.stride, geo.tile_rows, geo.tile_cols), (3, 14, 14));
    }

    #[test]
    fn non_finite_frames_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let mut bad = GridState::<f32>::zeros(4, 4);
        bad.u[5] = f32::INFINITY;
        let s = SnapshotBuffer::new(bad);
        let path = dir.path().join("m.png");
        let err = render_montage(&s, &Gene::default(), &RunConfig::square(4), "x", &MontageOptions::default(), &path);
        assert!(matches!(err, Err(ImageError::NonFinite)));
        assert!(!path.exists());
    }
}
