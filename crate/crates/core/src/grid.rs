//! Lattice state: the paired u/v layers of a toroidal grid.

use std::fmt::{Debug, Display};

use num_traits::Float;

use crate::config::Precision;

/// Floating-point element type of a lattice layer.
pub trait Real: Float + Default + Debug + Display + Send + Sync + 'static {
    const PRECISION: Precision;
    /// Width of the raw bit pattern in bytes.
    const BYTES: usize;

    fn from_f64(x: f64) -> Self;
    fn as_f64(self) -> f64;
    /// Raw bit pattern, zero-extended to 64 bits.
    fn raw_bits(self) -> u64;
}

impl Real for f32 {
    const PRECISION: Precision = Precision::Single;
    const BYTES: usize = 4;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
    #[inline]
    fn raw_bits(self) -> u64 {
        self.to_bits() as u64
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::Double;
    const BYTES: usize = 8;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
    #[inline]
    fn raw_bits(self) -> u64 {
        self.to_bits()
    }
}

/// Smallest lattice side for which the five stencil points are distinct.
pub const MIN_SIDE: usize = 3;

/// Both layers of an `rows x cols` toroidal lattice, stored row-major.
///
/// `u` is the activator layer (array A), `v` the recovery layer (array B).
#[derive(Clone, PartialEq)]
pub struct GridState<T> {
    rows: usize,
    cols: usize,
    pub u: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Debug> Debug for GridState<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridState")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish_non_exhaustive()
    }
}

impl<T: Real> GridState<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, T::zero(), T::zero())
    }

    pub fn filled(rows: usize, cols: usize, u: T, v: T) -> Self {
        Self {
            rows,
            cols,
            u: vec![u; rows * cols],
            v: vec![v; rows * cols],
        }
    }

    /// Wraps existing row-major buffers. Panics if either length is not
    /// `rows * cols`.
    pub fn from_layers(rows: usize, cols: usize, u: Vec<T>, v: Vec<T>) -> Self {
        assert_eq!(u.len(), rows * cols, "u layer has wrong length");
        assert_eq!(v.len(), rows * cols, "v layer has wrong length");
        Self { rows, cols, u, v }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn precision(&self) -> Precision {
        T::PRECISION
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    #[inline]
    pub fn u_at(&self, row: usize, col: usize) -> T {
        self.u[self.index(row, col)]
    }

    #[inline]
    pub fn v_at(&self, row: usize, col: usize) -> T {
        self.v[self.index(row, col)]
    }

    /// True when every entry of both layers is finite.
    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }

    /// Row-major index of the first non-finite entry across u then v.
    pub fn first_non_finite(&self) -> Option<(Layer, usize, usize)> {
        for (layer, data) in [(Layer::U, &self.u), (Layer::V, &self.v)] {
            if let Some(k) = data.iter().position(|x| !x.is_finite()) {
                return Some((layer, k / self.cols, k % self.cols));
            }
        }
        None
    }

    /// `(min, max)` of the u layer.
    pub fn u_range(&self) -> (T, T) {
        layer_range(&self.u)
    }

    /// Cyclic shift of both layers: the entry at `(r, c)` moves to
    /// `((r + dr) mod rows, (c + dc) mod cols)`.
    pub fn cyclic_shift(&self, dr: isize, dc: isize) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            u: shift_layer(&self.u, self.rows, self.cols, dr, dc),
            v: shift_layer(&self.v, self.rows, self.cols, dr, dc),
        }
    }

    /// 64-bit digest of the raw bit patterns of u then v, row-major.
    ///
    /// FNV-1a over the little-endian bytes of every entry, seeded with the
    /// grid shape so that equal digests imply equal shape and contents.
    pub fn checksum(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write(&(self.rows as u64).to_le_bytes());
        h.write(&(self.cols as u64).to_le_bytes());
        for x in self.u.iter().chain(&self.v) {
            h.write(&x.raw_bits().to_le_bytes()[..T::BYTES]);
        }
        h.finish()
    }

    /// Converts every entry to another precision.
    pub fn cast<S: Real>(&self) -> GridState<S> {
        GridState {
            rows: self.rows,
            cols: self.cols,
            u: self.u.iter().map(|x| S::from_f64(x.as_f64())).collect(),
            v: self.v.iter().map(|x| S::from_f64(x.as_f64())).collect(),
        }
    }
}

/// Which layer of a [`GridState`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    U,
    V,
}

impl Display for Layer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Layer::U => "u",
            Layer::V => "v",
        })
    }
}

pub(crate) fn layer_range<T: Real>(data: &[T]) -> (T, T) {
    data.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}

fn shift_layer<T: Copy>(src: &[T], rows: usize, cols: usize, dr: isize, dc: isize) -> Vec<T> {
    let dr = dr.rem_euclid(rows as isize) as usize;
    let dc = dc.rem_euclid(cols as isize) as usize;
    let mut out = Vec::with_capacity(src.len());
    for r in 0..rows {
        let src_row = (r + rows - dr) % rows;
        let row = &src[src_row * cols..(src_row + 1) * cols];
        // out[r][c] = row[(c - dc) mod cols]
        out.extend_from_slice(&row[cols - dc..]);
        out.extend_from_slice(&row[..cols - dc]);
    }
    out
}

struct Fnv1a(u64);

impl Fnv1a {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;

    fn new() -> Self {
        Self(Self::OFFSET)
    }

    #[inline]
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(Self::PRIME);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Formats a checksum the way it appears in CSV and log output.
pub fn checksum_hex(digest: u64) -> String {
    format!("{digest:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(rows: usize, cols: usize) -> GridState<f32> {
        let u = (0..rows * cols).map(|k| k as f32).collect();
        let v = (0..rows * cols).map(|k| -(k as f32) * 0.5).collect();
        GridState::from_layers(rows, cols, u, v)
    }

    #[test]
    fn shift_moves_entries_forward() {
        let g = ramp(4, 5);
        let s = g.cyclic_shift(1, 2);
        for r in 0..4 {
            for c in 0..5 {
                assert_eq!(s.u_at((r + 1) % 4, (c + 2) % 5), g.u_at(r, c));
                assert_eq!(s.v_at((r + 1) % 4, (c + 2) % 5), g.v_at(r, c));
            }
        }
        assert_eq!(s.cyclic_shift(-1, -2), g);
        assert_eq!(g.cyclic_shift(4, 10), g);
    }

    #[test]
    fn shifted_state_has_other_digest_but_same_values() {
        let g = ramp(16, 16);
        let s = g.cyclic_shift(7, 13);
        assert_ne!(g.checksum(), s.checksum());
        let sorted = |xs: &[f32]| {
            let mut xs = xs.to_vec();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            xs
        };
        assert_eq!(sorted(&g.u), sorted(&s.u));
        assert_eq!(sorted(&g.v), sorted(&s.v));
    }

    #[test]
    fn digest_depends_on_precision() {
        let g = ramp(8, 8);
        assert_ne!(g.checksum(), g.cast::<f64>().checksum());
        assert_eq!(g.checksum(), g.cast::<f64>().cast::<f32>().checksum());
    }

    #[test]
    fn digest_distinguishes_signed_zero() {
        let a = GridState::<f64>::zeros(3, 3);
        let mut b = a.clone();
        b.v[4] = -0.0;
        assert_ne!(a.checksum(), b.checksum());
    }

    #[test]
    fn finds_first_non_finite() {
        let mut g = GridState::<f32>::zeros(3, 4);
        assert!(g.is_finite());
        g.v[6] = f32::NAN;
        assert_eq!(g.first_non_finite(), Some((Layer::V, 1, 2)));
        g.u[11] = f32::INFINITY;
        assert_eq!(g.first_non_finite(), Some((Layer::U, 2, 3)));
    }
}
