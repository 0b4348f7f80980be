//! Whole-layer arithmetic on cyclically shifted copies.
//!
//! The Laplacian of a layer `A` is formed as
//! `roll(A,-1,rows) + roll(A,1,rows) + roll(A,-1,cols) + roll(A,1,cols) - 4A`,
//! one full-layer operation at a time, and the reaction update is applied
//! elementwise afterwards. The stencil sum order differs from the canonical
//! per-cell order, so results match the other backends to rounding only.

use crate::grid::{GridState, Real};
use crate::model::CellModel;

pub(super) struct Scratch<T> {
    rows: usize,
    cols: usize,
    lap_u: Vec<T>,
    lap_v: Vec<T>,
    rolled: Vec<T>,
}

/// `dst[r][c] = src[(r - dr) mod rows][(c - dc) mod cols]`.
pub(crate) fn roll_into<T: Copy>(
    dst: &mut [T],
    src: &[T],
    rows: usize,
    cols: usize,
    dr: isize,
    dc: isize,
) {
    let dr = dr.rem_euclid(rows as isize) as usize;
    let dc = dc.rem_euclid(cols as isize) as usize;
    for (r, out) in dst.chunks_exact_mut(cols).enumerate() {
        let s = (r + rows - dr) % rows;
        let row = &src[s * cols..(s + 1) * cols];
        out[..dc].copy_from_slice(&row[cols - dc..]);
        out[dc..].copy_from_slice(&row[..cols - dc]);
    }
}

impl<T: Real> Scratch<T> {
    pub(super) fn new(rows: usize, cols: usize) -> Self {
        let n = rows * cols;
        Self {
            rows,
            cols,
            lap_u: vec![T::zero(); n],
            lap_v: vec![T::zero(); n],
            rolled: vec![T::zero(); n],
        }
    }

    fn laplacian(&mut self, src: &[T], which_u: bool) {
        let (rows, cols) = (self.rows, self.cols);
        let lap = if which_u { &mut self.lap_u } else { &mut self.lap_v };
        roll_into(lap, src, rows, cols, -1, 0);
        for (dr, dc) in [(1, 0), (0, -1), (0, 1)] {
            roll_into(&mut self.rolled, src, rows, cols, dr, dc);
            for (acc, &x) in lap.iter_mut().zip(&self.rolled) {
                *acc = *acc + x;
            }
        }
        let four = T::from_f64(4.0);
        for (acc, &x) in lap.iter_mut().zip(src) {
            *acc = *acc - four * x;
        }
    }

    pub(super) fn step<M: CellModel<T>>(
        &mut self,
        front: &GridState<T>,
        back: &mut GridState<T>,
        model: &M,
    ) {
        assert_eq!(front.shape(), (self.rows, self.cols), "scratch shape mismatch");
        self.laplacian(&front.u, true);
        self.laplacian(&front.v, false);
        let cells = front
            .u
            .iter()
            .zip(&front.v)
            .zip(self.lap_u.iter().zip(&self.lap_v));
        for ((out_u, out_v), ((&u, &v), (&lu, &lv))) in
            back.u.iter_mut().zip(back.v.iter_mut()).zip(cells)
        {
            let (a, b) = model.cell_update(u, v, lu, lv);
            *out_u = a;
            *out_v = b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roll_matches_grid_shift() {
        let rows = 5;
        let cols = 7;
        let u: Vec<f64> = (0..35).map(f64::from).collect();
        let g = GridState::from_layers(rows, cols, u.clone(), u.clone());
        for (dr, dc) in [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1), (3, -9)] {
            let mut dst = vec![0.0; 35];
            roll_into(&mut dst, &u, rows, cols, dr, dc);
            assert_eq!(dst, g.cyclic_shift(dr, dc).u, "({dr},{dc})");
        }
    }
}
