//! Grayscale images: loading, per-frame normalization, and file output.
//!
//! PGM (binary `P5`, maxval up to 255) is the canonical format; 8-bit PNG is
//! supported for reading and writing as well. The output format is chosen by
//! file extension.

mod montage;
mod pgm;
mod png_io;
mod text;

use std::path::Path;

use crate::grid::{layer_range, Real};

pub use montage::{montage_canvas, montage_layout, render_montage, Canvas, MontageLayout, MontageOptions, Timing};
pub use text::{draw_text, text_width, GLYPH};

#[derive(Debug, thiserror::Error)]
pub enum ImageError {
    #[error("cannot decode image: {0}")]
    Decode(String),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("refusing to write non-finite values")]
    NonFinite,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Grayscale raster with values in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, ImageError> {
        if data.len() != rows * cols {
            return Err(ImageError::Decode(format!(
                "{} values for a {rows}x{cols} image",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_u8(rows: usize, cols: usize, pixels: &[u8], maxval: u16) -> Self {
        let scale = maxval as f64;
        Self {
            rows,
            cols,
            data: pixels.iter().map(|&p| p as f64 / scale).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    /// Nearest-neighbor resample to `rows x cols`: output `(i, j)` samples
    /// input `(floor(i*H/rows), floor(j*W/cols))`.
    pub fn resample(&self, rows: usize, cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let si = i * self.rows / rows;
            for j in 0..cols {
                let sj = j * self.cols / cols;
                data.push(self.at(si, sj));
            }
        }
        Self { rows, cols, data }
    }
}

/// Loads a PGM or PNG file as grayscale in `[0, 1]`, optionally resampled
/// to `target_size x target_size`.
pub fn load_grayscale(path: &Path, target_size: Option<usize>) -> Result<GrayImage, ImageError> {
    let bytes = std::fs::read(path)?;
    let image = if bytes.starts_with(b"P5") {
        pgm::decode(&bytes)?
    } else if bytes.starts_with(png_io::SIGNATURE) {
        png_io::decode(&bytes)?
    } else {
        return Err(ImageError::UnsupportedFormat(format!(
            "{} is neither binary PGM nor PNG",
            path.display()
        )));
    };
    Ok(match target_size {
        Some(n) if (n, n) != (image.rows, image.cols) => image.resample(n, n),
        _ => image,
    })
}

/// 8-bit rendering of a layer plus the source range used to produce it.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame8 {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
    pub min: f64,
    pub max: f64,
}

/// Level used for every pixel of a constant layer.
pub const FLAT_LEVEL: u8 = 128;

/// Per-frame min-max map onto `0..=255`; a constant layer maps to 128.
pub fn normalize_frame<T: Real>(layer: &[T], rows: usize, cols: usize) -> Frame8 {
    assert_eq!(layer.len(), rows * cols);
    let (lo, hi) = layer_range(layer);
    normalize_with_range(layer, rows, cols, lo.as_f64(), hi.as_f64())
}

/// Like [`normalize_frame`] but against a fixed `[min, max]`, clamping values
/// outside it. Keeps several frames on one intensity scale.
pub fn normalize_frame_fixed<T: Real>(
    layer: &[T],
    rows: usize,
    cols: usize,
    min: f64,
    max: f64,
) -> Frame8 {
    assert_eq!(layer.len(), rows * cols);
    normalize_with_range(layer, rows, cols, min, max)
}

fn normalize_with_range<T: Real>(layer: &[T], rows: usize, cols: usize, lo: f64, hi: f64) -> Frame8 {
    let span = hi - lo;
    let pixels = if span > 0.0 {
        layer
            .iter()
            .map(|&x| (255.0 * (x.as_f64() - lo) / span).round().clamp(0.0, 255.0) as u8)
            .collect()
    } else {
        vec![FLAT_LEVEL; layer.len()]
    };
    Frame8 {
        rows,
        cols,
        pixels,
        min: lo,
        max: hi,
    }
}

/// Writes raw 8-bit gray pixels; `.png` selects PNG, `.pgm` binary PGM.
pub fn write_gray8(path: &Path, rows: usize, cols: usize, pixels: &[u8]) -> Result<(), ImageError> {
    assert_eq!(pixels.len(), rows * cols);
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let bytes = match ext.as_deref() {
        Some("pgm") => pgm::encode(rows, cols, pixels),
        Some("png") => png_io::encode(rows, cols, pixels)?,
        _ => {
            return Err(ImageError::UnsupportedFormat(format!(
                "{}: expected a .pgm or .png extension",
                path.display()
            )))
        }
    };
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Normalizes a layer and writes it as an 8-bit grayscale file.
pub fn save_frame<T: Real>(
    layer: &[T],
    rows: usize,
    cols: usize,
    path: &Path,
) -> Result<Frame8, ImageError> {
    if layer.iter().any(|x| !x.is_finite()) {
        return Err(ImageError::NonFinite);
    }
    let frame = normalize_frame(layer, rows, cols);
    write_gray8(path, rows, cols, &frame.pixels)?;
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_layer_is_mid_gray() {
        let f = normalize_frame(&[2.5f32; 12], 3, 4);
        assert!(f.pixels.iter().all(|&p| p == 128));
        assert_eq!((f.min, f.max), (2.5, 2.5));
    }

    #[test]
    fn endpoints_map_to_black_and_white() {
        let f = normalize_frame(&[0.0f64, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0], 3, 3);
        assert_eq!(f.pixels, [0, 255, 255, 0, 0, 255, 255, 0, 255]);
    }

    #[test]
    fn affine_pixel_value() {
        let f = normalize_frame(&[-1.6f64, 0.0, 1.65], 1, 3);
        assert_eq!(f.pixels, [0, 126, 255]);
    }

    #[test]
    fn fixed_range_clamps() {
        let f = normalize_frame_fixed(&[-5.0f32, 0.5, 5.0], 1, 3, 0.0, 1.0);
        assert_eq!(f.pixels, [0, 128, 255]);
    }

    #[test]
    fn resample_takes_every_second_pixel() {
        let n = 1024;
        let data: Vec<f64> = (0..n * n).map(|k| (k % 997) as f64 / 997.0).collect();
        let img = GrayImage::new(n, n, data).unwrap();
        let half = img.resample(512, 512);
        for i in (0..512).step_by(37) {
            for j in (0..512).step_by(41) {
                assert_eq!(half.at(i, j), img.at(2 * i, 2 * j));
            }
        }
    }

    #[test]
    fn unknown_extension_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let err = write_gray8(&dir.path().join("x.bmp"), 1, 1, &[0]).unwrap_err();
        assert!(matches!(err, ImageError::UnsupportedFormat(_)));
    }

    #[test]
    fn non_finite_never_written() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.pgm");
        let err = save_frame(&[0.0f32, f32::NAN, 1.0], 1, 3, &path).unwrap_err();
        assert!(matches!(err, ImageError::NonFinite));
        assert!(!path.exists());
    }

    #[test]
    fn garbage_file_is_unsupported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.pgm");
        std::fs::write(&path, b"GIF89a....").unwrap();
        assert!(matches!(
            load_grayscale(&path, None),
            Err(ImageError::UnsupportedFormat(_))
        ));
    }

    proptest! {
        #[test]
        fn normalization_ignores_positive_affine_maps(
            vals in proptest::collection::vec(-1000i32..1000, 12),
            alpha in 1i32..50,
            beta in -1000i32..1000,
        ) {
            // integer-valued inputs keep every intermediate exact
            let layer: Vec<f64> = vals.iter().map(|&x| x as f64).collect();
            let mapped: Vec<f64> = vals.iter().map(|&x| (alpha * x + beta) as f64).collect();
            prop_assert_eq!(
                normalize_frame(&layer, 3, 4).pixels,
                normalize_frame(&mapped, 3, 4).pixels
            );
        }

        #[test]
        fn save_then_load_within_quantization(
            vals in proptest::collection::vec(-3f64..3.0, 20),
            png in any::<bool>(),
        ) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join(if png { "f.png" } else { "f.pgm" });
            let frame = save_frame(&vals, 4, 5, &path).unwrap();
            let back = load_grayscale(&path, None).unwrap();
            prop_assert_eq!((back.rows(), back.cols()), (4, 5));
            let span = frame.max - frame.min;
            for (x, y) in vals.iter().zip(back.data()) {
                let expect = if span > 0.0 { (x - frame.min) / span } else { 128.0 / 255.0 };
                prop_assert!((expect - y).abs() <= 1.0 / 255.0, "{} vs {}", expect, y);
            }
        }
    }
}
