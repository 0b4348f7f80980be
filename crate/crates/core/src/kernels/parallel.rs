//! Row bands on a worker pool, one band per worker.

use rayon::prelude::*;

use super::span::update_span;
use crate::grid::{GridState, Real};
use crate::model::CellModel;

pub(super) fn step<T: Real, M: CellModel<T>>(
    pool: &rayon::ThreadPool,
    front: &GridState<T>,
    back: &mut GridState<T>,
    model: &M,
) {
    let (rows, cols) = front.shape();
    let band_rows = rows.div_ceil(pool.current_num_threads().max(1));
    let chunk = band_rows * cols;
    let GridState { u, v, .. } = back;
    pool.install(|| {
        u.par_chunks_mut(chunk)
            .zip(v.par_chunks_mut(chunk))
            .enumerate()
            .for_each(|(band, (bu, bv))| {
                let first = band * band_rows;
                for (k, (ru, rv)) in bu.chunks_mut(cols).zip(bv.chunks_mut(cols)).enumerate() {
                    update_span(model, front, first + k, 0, cols, ru, rv);
                }
            });
    });
}
