//! Plain double loop, one cell at a time.

use super::span::stencil;
use crate::grid::{GridState, Real};
use crate::model::CellModel;

/// 5-point toroidal Laplacian of `layer` (row-major, `rows x cols`) at
/// `(i, j)`: `(i,j+1) + (i,j-1) + (i-1,j) + (i+1,j) - 4*(i,j)`, summed in
/// that order.
pub fn laplacian5<T: Real>(layer: &[T], rows: usize, cols: usize, i: usize, j: usize) -> T {
    debug_assert_eq!(layer.len(), rows * cols);
    let i_up = if i == 0 { rows - 1 } else { i - 1 };
    let i_down = if i == rows - 1 { 0 } else { i + 1 };
    let j_left = if j == 0 { cols - 1 } else { j - 1 };
    let j_right = if j == cols - 1 { 0 } else { j + 1 };
    let at = |r: usize, c: usize| layer[r * cols + c];
    stencil(
        at(i, j_right),
        at(i, j_left),
        at(i_up, j),
        at(i_down, j),
        at(i, j),
        T::from_f64(4.0),
    )
}

pub(super) fn step<T: Real, M: CellModel<T>>(
    front: &GridState<T>,
    back: &mut GridState<T>,
    model: &M,
) {
    let (rows, cols) = front.shape();
    for i in 0..rows {
        for j in 0..cols {
            let lu = laplacian5(&front.u, rows, cols, i, j);
            let lv = laplacian5(&front.v, rows, cols, i, j);
            let k = i * cols + j;
            let (u, v) = model.cell_update(front.u[k], front.v[k], lu, lv);
            back.u[k] = u;
            back.v[k] = v;
        }
    }
}
