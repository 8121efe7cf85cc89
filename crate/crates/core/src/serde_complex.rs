//! `[re, im]` pair encoding shared by every file format.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub(crate) type Pair = [f64; 2];

pub(crate) fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub(crate) fn from_pair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub(crate) fn vec_to_pairs<'a>(zs: impl IntoIterator<Item = &'a Complex64>) -> Vec<Pair> {
    zs.into_iter().map(|z| to_pair(*z)).collect()
}

pub(crate) fn matrix_to_rows(m: &DMatrix<Complex64>) -> Vec<Vec<Pair>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| to_pair(m[(i, j)])).collect()).collect()
}

/// Row-major pairs to a matrix; `None` if the rows are ragged.
pub(crate) fn rows_to_matrix(rows: &[Vec<Pair>]) -> Option<DMatrix<Complex64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(DMatrix::from_fn(nrows, ncols, |i, j| from_pair(rows[i][j])))
}
