//! Dense complex linear algebra on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Rank cutoff shared by every nullspace and span computation.
pub const RANK_CUTOFF: f64 = 1e-8;

/// Singular values in descending order together with a full `n × n` set of
/// right singular vectors (columns of `V`, same order). Wide matrices are
/// padded with zero rows so that `V` is square; the padded singular values
/// are zero.
pub fn right_svd(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    if rows == 0 {
        return (vec![0.0; cols], CMatrix::identity(cols, cols));
    }
    let work = if rows < cols { m.clone().resize_vertically(cols, Complex64::new(0.0, 0.0)) } else { m.clone() };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    // nalgebra's singular values can be off by ~1e-6 inside large clusters
    // while the vectors are accurate to rounding; recompute σ_k = ‖M v_k‖.
    let v_all = v_t.adjoint();
    let mv = m * &v_all;
    let sigma: Vec<f64> = mv.column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let mut v = CMatrix::zeros(cols, cols);
    let mut sorted = Vec::with_capacity(cols);
    for (dst, &src) in order.iter().enumerate() {
        sorted.push(sigma[src]);
        v.set_column(dst, &v_all.column(src));
    }
    (sorted, v)
}

/// Singular values, descending, `min(rows, cols)` of them.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Orthonormal basis of `{x : ‖m x‖ ≈ 0}`: right singular vectors whose
/// singular value is at most `cutoff`.
pub fn nullspace(m: &CMatrix, cutoff: f64) -> CMatrix {
    let (sigma, v) = right_svd(m);
    let keep: Vec<usize> = (0..sigma.len()).filter(|&k| sigma[k] <= cutoff).collect();
    select_columns(&v, &keep)
}

/// Orthonormal basis of the column span, dropping directions with singular
/// value at most `cutoff`.
pub fn orthonormal_span(m: &CMatrix, cutoff: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let (sigma, v) = right_svd(&m.adjoint());
    let keep: Vec<usize> = (0..sigma.len()).filter(|&k| sigma[k] > cutoff).collect();
    select_columns(&v, &keep)
}

pub fn select_columns(m: &CMatrix, cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}

pub fn select_rows(m: &CMatrix, rows: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), m.ncols(), |r, c| m[(rows[r], c)])
}

/// Entrywise maximum modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest deviation of `bᴴ b` from the identity.
pub fn orthonormality_error(b: &CMatrix) -> f64 {
    let g = b.adjoint() * b;
    max_abs(&(g - CMatrix::identity(b.ncols(), b.ncols())))
}
