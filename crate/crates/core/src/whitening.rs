//! Prewhitening: `B = Lambda_M^{-1/2} U_M^H` from the `M` dominant eigenpairs
//! of the sample covariance `(1/K) Y Y^H`, so that `B Y` has identity sample
//! covariance and the effective mixing matrix is close to unitary.

use crate::block::{ComplexBlock, C64};
use crate::error::{Error, Result};
use crate::linalg::eig_hermitian;

/// Eigenvalues at or below this fraction of the trace count as zero.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Whitener {
    /// `M x N` whitening matrix.
    pub b: ComplexBlock,
    /// Retained covariance eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// `M x N` orthonormal projection `U_M^H` onto the signal subspace.
    pub basis: ComplexBlock,
}

/// `(1/K) Y Y^H`.
pub fn sample_covariance(y: &ComplexBlock) -> ComplexBlock {
    let (n, k) = y.shape();
    let mut c = ComplexBlock::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: C64 = y.row(i).iter().zip(y.row(j)).map(|(a, b)| a * b.conj()).sum::<C64>() / k as f64;
            c[(i, j)] = v;
            c[(j, i)] = v.conj();
        }
    }
    c
}

pub fn fit_whitener(y: &ComplexBlock, m: usize) -> Result<Whitener> {
    let (n, k) = y.shape();
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!("cannot whiten {n} channels down to {m}")));
    }
    if k < m {
        return Err(Error::InvalidInput(format!("whitening needs k >= m, got k={k}, m={m}")));
    }
    if !y.is_finite() {
        return Err(Error::InvalidInput("non-finite observations".into()));
    }
    let cov = sample_covariance(y);
    let eig = eig_hermitian(&cov)?;
    let trace: f64 = eig.values.iter().sum();
    let found = eig.values.iter().filter(|&&v| v > RANK_TOL * trace).count();
    if !(trace > 0.0) || found < m {
        return Err(Error::DegenerateCovariance { found, needed: m });
    }
    let mut b = ComplexBlock::zeros(m, n);
    let mut basis = ComplexBlock::zeros(m, n);
    let mut eigenvalues = Vec::with_capacity(m);
    for r in 0..m {
        let idx = n - 1 - r;
        let lambda = eig.values[idx];
        let inv_sqrt = 1.0 / lambda.sqrt();
        for c in 0..n {
            let u = eig.vectors[(c, idx)].conj();
            basis[(r, c)] = u;
            b[(r, c)] = u * inv_sqrt;
        }
        eigenvalues.push(lambda);
    }
    Ok(Whitener { b, eigenvalues, basis })
}

/// `B Y`.
pub fn whiten(w: &Whitener, y: &ComplexBlock) -> Result<ComplexBlock> {
    w.b.matmul(y)
}
