//! Cyclic Jacobi eigendecomposition for small complex Hermitian matrices.

use crate::block::{ComplexBlock, C64};
use crate::error::{Error, Result};

/// `A = V diag(values) V^H`, eigenvalues ascending, eigenvectors as columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexBlock,
}

const TOL: f64 = 1e-15;
const MAX_SWEEPS: usize = 100;

pub fn eig_hermitian(a: &ComplexBlock) -> Result<HermitianEigen> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "Hermitian eigensolver needs a square matrix, got {:?}",
            a.shape()
        )));
    }
    if !a.is_finite() {
        return Err(Error::InvalidInput("non-finite matrix".into()));
    }
    let scale = a.frobenius_norm();
    for i in 0..n {
        for j in i..n {
            if (a[(i, j)] - a[(j, i)].conj()).norm() > 1e-10 * scale {
                return Err(Error::InvalidInput(format!("matrix not Hermitian at ({i}, {j})")));
            }
        }
    }

    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    let mut v = ComplexBlock::identity(n);
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= TOL * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut m, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.total_cmp(&m[(y, y)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = ComplexBlock::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// One Jacobi step zeroing `m[p][q]`: `m <- G^H m G`, `v <- v G` with
/// `G = diag(1, e^{-j phi}) * [[c, s], [-s, c]]` on the (p, q) plane.
fn rotate(m: &mut ComplexBlock, v: &mut ComplexBlock, p: usize, q: usize) {
    let h = m[(p, q)];
    let habs = h.norm();
    if habs == 0.0 {
        return;
    }
    let phase = h / habs;
    let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
    let theta = (aqq - app) / (2.0 * habs);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = m.rows();
    for k in 0..n {
        let (x, y) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = x * g_pp + y * g_qp;
        m[(k, q)] = x * g_pq + y * g_qq;
    }
    for k in 0..n {
        let (x, y) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = g_pp.conj() * x + g_qp.conj() * y;
        m[(q, k)] = g_pq.conj() * x + g_qq.conj() * y;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
    for k in 0..n {
        let (x, y) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = x * g_pp + y * g_qp;
        v[(k, q)] = x * g_pq + y * g_qq;
    }
}

/// Inverse of a Hermitian positive definite matrix; fails when the smallest
/// eigenvalue falls below `rel_floor` times the largest.
pub fn hermitian_pd_inverse(a: &ComplexBlock, rel_floor: f64) -> Result<ComplexBlock> {
    let eig = eig_hermitian(a)?;
    let largest = eig.values.last().copied().unwrap_or(0.0);
    let smallest = eig.values.first().copied().unwrap_or(0.0);
    if !(largest > 0.0) || smallest <= rel_floor * largest {
        return Err(Error::Singular(format!(
            "eigenvalue range [{smallest:e}, {largest:e}]"
        )));
    }
    let n = a.rows();
    let u = &eig.vectors;
    Ok(ComplexBlock::from_fn(n, n, |i, j| {
        (0..n).map(|k| u[(i, k)] * u[(j, k)].conj() / eig.values[k]).sum()
    }))
}
