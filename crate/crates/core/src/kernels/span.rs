//! Row-span kernel shared by the blocked and parallel backends.

use crate::grid::{GridState, Real};
use crate::model::CellModel;

/// Canonical 5-point sum: `(r,c+1) + (r,c-1) + (r-1,c) + (r+1,c) - 4*(r,c)`,
/// accumulated left to right.
#[inline(always)]
pub(crate) fn stencil<T: Real>(east: T, west: T, north: T, south: T, center: T, four: T) -> T {
    east + west + north + south - four * center
}

#[inline(always)]
pub(crate) fn wrap_prev(k: usize, n: usize) -> usize {
    if k == 0 {
        n - 1
    } else {
        k - 1
    }
}

#[inline(always)]
pub(crate) fn wrap_next(k: usize, n: usize) -> usize {
    if k == n - 1 {
        0
    } else {
        k + 1
    }
}

#[inline(always)]
fn row_of<T>(data: &[T], cols: usize, r: usize) -> &[T] {
    &data[r * cols..(r + 1) * cols]
}

/// Updates columns `c0..c1` of `row`, writing into `out_u`/`out_v`, which
/// hold exactly those columns of the back buffer.
///
/// Interior columns run through a branch-free loop over equal-length
/// slices; the first and last lattice columns take the wrapping path.
#[inline]
pub(crate) fn update_span<T: Real, M: CellModel<T>>(
    model: &M,
    front: &GridState<T>,
    row: usize,
    c0: usize,
    c1: usize,
    out_u: &mut [T],
    out_v: &mut [T],
) {
    let rows = front.rows();
    let cols = front.cols();
    debug_assert!(c0 < c1 && c1 <= cols);
    debug_assert_eq!(out_u.len(), c1 - c0);

    let four = T::from_f64(4.0);
    let (up, down) = (wrap_prev(row, rows), wrap_next(row, rows));
    let (ru, nu, su) = (row_of(&front.u, cols, row), row_of(&front.u, cols, up), row_of(&front.u, cols, down));
    let (rv, nv, sv) = (row_of(&front.v, cols, row), row_of(&front.v, cols, up), row_of(&front.v, cols, down));

    let edge = |c: usize, out_u: &mut [T], out_v: &mut [T]| {
        let (w, e) = (wrap_prev(c, cols), wrap_next(c, cols));
        let lu = stencil(ru[e], ru[w], nu[c], su[c], ru[c], four);
        let lv = stencil(rv[e], rv[w], nv[c], sv[c], rv[c], four);
        let (a, b) = model.cell_update(ru[c], rv[c], lu, lv);
        out_u[c - c0] = a;
        out_v[c - c0] = b;
    };

    if c0 == 0 {
        edge(0, out_u, out_v);
    }

    let lo = c0.max(1);
    let hi = c1.min(cols - 1);
    if lo < hi {
        let n = hi - lo;
        let cu = &ru[lo..lo + n];
        let eu = &ru[lo + 1..lo + 1 + n];
        let wu = &ru[lo - 1..lo - 1 + n];
        let nu = &nu[lo..lo + n];
        let su = &su[lo..lo + n];
        let cv = &rv[lo..lo + n];
        let ev = &rv[lo + 1..lo + 1 + n];
        let wv = &rv[lo - 1..lo - 1 + n];
        let nv = &nv[lo..lo + n];
        let sv = &sv[lo..lo + n];
        let ou = &mut out_u[lo - c0..lo - c0 + n];
        let ov = &mut out_v[lo - c0..lo - c0 + n];
        for k in 0..n {
            let lu = stencil(eu[k], wu[k], nu[k], su[k], cu[k], four);
            let lv = stencil(ev[k], wv[k], nv[k], sv[k], cv[k], four);
            let (a, b) = model.cell_update(cu[k], cv[k], lu, lv);
            ou[k] = a;
            ov[k] = b;
        }
    }

    if c1 == cols && cols > 1 {
        edge(cols - 1, out_u, out_v);
    }
}
