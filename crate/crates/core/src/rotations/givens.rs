use crate::block::{ComplexBlock, C64};
use crate::error::{Error, Result};
use crate::linalg::{eig_sym3, RealSym3};

use super::GivensParams;

/// `T = sum_j t_j t_j^T` with
/// `t_j = [(|y_pj|^2 - |y_qj|^2) / 2, Re(y_pj y_qj*), Im(y_pj y_qj*)]`.
pub fn givens_t_matrix(row_p: &[C64], row_q: &[C64]) -> RealSym3 {
    let mut t = RealSym3::zeros();
    for (yp, yq) in row_p.iter().zip(row_q) {
        let cross = yp * yq.conj();
        t.add_outer(&[0.5 * (yp.norm_sqr() - yq.norm_sqr()), cross.re, cross.im]);
    }
    t
}

/// CM-optimal Givens rotation for rows `(p, q)` of `block`.
///
/// The pair's CM cost is `2 v^T T v + const` over unit vectors
/// `v = [cos 2theta, sin 2theta cos alpha, sin 2theta sin alpha]`, so the
/// minimizer is the eigenvector of `T` for its smallest eigenvalue.
pub fn givens_params(block: &ComplexBlock, p: usize, q: usize) -> Result<GivensParams> {
    if p >= q || q >= block.rows() {
        return Err(Error::IndexOutOfRange(format!(
            "row pair ({p}, {q}) invalid for {} rows",
            block.rows()
        )));
    }
    let t = givens_t_matrix(block.row(p), block.row(q));
    givens_params_from_t(p, q, &t)
}

/// Rotation parameters from a precomputed `T`.
///
/// Among ties for the smallest eigenvalue the vector closest to `e1` (the
/// identity rotation) is used; the sign is fixed so that `v1 >= 0`, which
/// keeps `theta` in `[-pi/4, pi/4]`.
pub fn givens_params_from_t(p: usize, q: usize, t: &RealSym3) -> Result<GivensParams> {
    let eig = eig_sym3(t)?;
    let top = eig.values[2].abs().max(eig.values[0].abs());
    let tol = 1e-12 * top;
    let mut v = [0.0; 3];
    for (val, vec) in eig.values.iter().zip(&eig.vectors) {
        if *val - eig.values[0] <= tol {
            // projection of e1 onto the minimal eigenspace
            for i in 0..3 {
                v[i] += vec[0] * vec[i];
            }
        }
    }
    let mut n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n < 1e-12 {
        v = eig.vectors[0];
        n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    }
    for x in v.iter_mut() {
        *x /= n;
    }
    if v[0] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    let c = ((1.0 + v[0]) / 2.0).sqrt();
    let denom = (2.0 * (1.0 + v[0])).sqrt();
    let s = C64::new(v[1] / denom, v[2] / denom);
    Ok(GivensParams { p, q, c, s })
}
