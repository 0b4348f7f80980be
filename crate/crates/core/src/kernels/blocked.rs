//! Cache-tiled traversal.

use super::span::update_span;
use crate::grid::{GridState, Real};
use crate::model::CellModel;

pub(super) fn step<T: Real, M: CellModel<T>>(
    front: &GridState<T>,
    back: &mut GridState<T>,
    model: &M,
    tile_rows: usize,
    tile_cols: usize,
) {
    let (rows, cols) = front.shape();
    for r0 in (0..rows).step_by(tile_rows) {
        let r1 = (r0 + tile_rows).min(rows);
        for c0 in (0..cols).step_by(tile_cols) {
            let c1 = (c0 + tile_cols).min(cols);
            for r in r0..r1 {
                let span = r * cols + c0..r * cols + c1;
                update_span(
                    model,
                    front,
                    r,
                    c0,
                    c1,
                    &mut back.u[span.clone()],
                    &mut back.v[span],
                );
            }
        }
    }
}
