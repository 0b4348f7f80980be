//! Initial lattice states.
//!
//! Random values come from [`SeededRng`]: ChaCha8 seeded through
//! `seed_from_u64`, each value built from one 32-bit output as
//! `(x >> 8) * 2^-24`, uniform on `[0, 1)` with 24-bit resolution. That value
//! is exact in both precisions, so single and double runs start from the
//! same state. The stream fills the u layer row-major first, then v.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gene::Gene;
use crate::grid::{GridState, Real, MIN_SIDE};
use crate::imagery::GrayImage;

/// Side of the random seed block of [`init_center_square`].
pub const SEED_BLOCK: usize = 11;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InitError {
    #[error("grid {rows}x{cols} is smaller than the {min}x{min} seed block")]
    GridTooSmall { rows: usize, cols: usize, min: usize },
    #[error("image {rows}x{cols} is smaller than {min}x{min}")]
    ImageTooSmall { rows: usize, cols: usize, min: usize },
}

/// Platform-independent uniform generator with a fixed stream order.
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Next value, uniform on `[0, 1)`.
    #[inline]
    pub fn next_unit(&mut self) -> f32 {
        const SCALE: f32 = 1.0 / (1u32 << 24) as f32;
        (self.0.next_u32() >> 8) as f32 * SCALE
    }

    fn fill<T: Real>(&mut self, out: &mut [T]) {
        for x in out {
            *x = T::from_f64(self.next_unit() as f64);
        }
    }
}

/// Every cell of u, then every cell of v, drawn uniform on `[0, 1)`.
pub fn init_full_random<T: Real>(
    rows: usize,
    cols: usize,
    seed: u64,
) -> Result<GridState<T>, InitError> {
    if rows < MIN_SIDE || cols < MIN_SIDE {
        return Err(InitError::GridTooSmall {
            rows,
            cols,
            min: MIN_SIDE,
        });
    }
    let mut rng = SeededRng::new(seed);
    let mut state = GridState::zeros(rows, cols);
    rng.fill(&mut state.u);
    rng.fill(&mut state.v);
    Ok(state)
}

/// Top-left corner of the centered seed block.
pub fn seed_block_origin(rows: usize, cols: usize) -> (usize, usize) {
    ((rows - SEED_BLOCK) / 2, (cols - SEED_BLOCK) / 2)
}

/// Zero lattice with a random 11x11 block, floor-centered. The block of u
/// is drawn row-major first, then the block of v.
pub fn init_center_square<T: Real>(
    rows: usize,
    cols: usize,
    seed: u64,
) -> Result<GridState<T>, InitError> {
    if rows < SEED_BLOCK || cols < SEED_BLOCK {
        return Err(InitError::GridTooSmall {
            rows,
            cols,
            min: SEED_BLOCK,
        });
    }
    let (r0, c0) = seed_block_origin(rows, cols);
    let mut rng = SeededRng::new(seed);
    let mut state = GridState::zeros(rows, cols);
    for layer in [&mut state.u, &mut state.v] {
        for r in r0..r0 + SEED_BLOCK {
            rng.fill(&mut layer[r * cols + c0..r * cols + c0 + SEED_BLOCK]);
        }
    }
    Ok(state)
}

/// Both layers set to `ka * x` for a grayscale image `x` in `[0, 1]`.
pub fn init_from_image<T: Real>(image: &GrayImage, gene: &Gene) -> Result<GridState<T>, InitError> {
    let (rows, cols) = (image.rows(), image.cols());
    if rows < MIN_SIDE || cols < MIN_SIDE {
        return Err(InitError::ImageTooSmall {
            rows,
            cols,
            min: MIN_SIDE,
        });
    }
    let u: Vec<T> = image
        .data()
        .iter()
        .map(|&x| T::from_f64(gene.ka * x))
        .collect();
    let v = u.clone();
    Ok(GridState::from_layers(rows, cols, u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gene::GeneField;

    #[test]
    fn full_random_is_reproducible() {
        let a = init_full_random::<f32>(16, 16, 42).unwrap();
        let b = init_full_random::<f32>(16, 16, 42).unwrap();
        assert_eq!(a.checksum(), b.checksum());
        let c = init_full_random::<f32>(16, 16, 1).unwrap();
        let d = init_full_random::<f32>(16, 16, 2).unwrap();
        assert_ne!(c.checksum(), d.checksum());
    }

    #[test]
    fn full_random_range_and_mean() {
        let s = init_full_random::<f32>(512, 512, 7).unwrap();
        assert!(s.u.iter().chain(&s.v).all(|&x| (0.0..1.0).contains(&x)));
        let mean = s.u.iter().map(|&x| x as f64).sum::<f64>() / s.len() as f64;
        assert!((0.45..=0.55).contains(&mean), "{mean}");
    }

    #[test]
    fn precisions_share_values() {
        let a = init_full_random::<f32>(8, 9, 5).unwrap();
        let b = init_full_random::<f64>(8, 9, 5).unwrap();
        assert_eq!(a.cast::<f64>(), b);
        assert_ne!(a.checksum(), b.checksum());
    }

    #[test]
    fn center_square_block_placement() {
        let s = init_center_square::<f32>(512, 512, 3).unwrap();
        assert_eq!(seed_block_origin(512, 512), (250, 250));
        for r in 0..512 {
            for c in 0..512 {
                let inside = (250..261).contains(&r) && (250..261).contains(&c);
                if !inside {
                    assert_eq!(s.u_at(r, c).to_bits(), 0);
                    assert_eq!(s.v_at(r, c).to_bits(), 0);
                }
            }
        }
        let nonzero = s.u.iter().filter(|&&x| x != 0.0).count();
        assert!(nonzero <= 121 && nonzero > 100, "{nonzero}");
    }

    #[test]
    fn center_square_on_minimal_grid_is_full_random() {
        let a = init_center_square::<f64>(11, 11, 8).unwrap();
        let b = init_full_random::<f64>(11, 11, 8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn center_square_rejects_small_grid() {
        assert_eq!(
            init_center_square::<f32>(10, 512, 0).unwrap_err(),
            InitError::GridTooSmall {
                rows: 10,
                cols: 512,
                min: 11
            }
        );
    }

    #[test]
    fn image_init_scales_both_layers() {
        let checker: Vec<f64> = (0..16).map(|k| ((k / 4 + k % 4) % 2) as f64).collect();
        let img = GrayImage::new(4, 4, checker).unwrap();
        let g = Gene::default().with(GeneField::Ka, 0.5);
        let s = init_from_image::<f32>(&img, &g).unwrap();
        assert_eq!(s.u, s.v);
        assert!(s.u.iter().all(|&x| x == 0.0 || x == 0.5));

        let white = GrayImage::new(5, 3, vec![1.0; 15]).unwrap();
        let s = init_from_image::<f64>(&white, &Gene::default()).unwrap();
        assert!(s.u.iter().chain(&s.v).all(|&x| x == 1.0));

        let g0 = Gene::default().with(GeneField::Ka, 0.0);
        let s = init_from_image::<f64>(&img, &g0).unwrap();
        assert!(s.u.iter().chain(&s.v).all(|&x| x == 0.0));

        let tiny = GrayImage::new(2, 8, vec![0.0; 16]).unwrap();
        assert!(matches!(
            init_from_image::<f32>(&tiny, &Gene::default()),
            Err(InitError::ImageTooSmall { .. })
        ));
    }
}
