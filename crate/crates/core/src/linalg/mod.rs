//! Numerical kernels sized for the two-row rotation problems: 3x3 (and 2x2)
//! symmetric eigensolvers, the generalized eigenproblem against a signature
//! matrix, shifted solves, degree <= 6 real root finding, and a small
//! Hermitian eigensolver for covariance work.

pub mod hermitian;
pub mod poly;
pub mod sym;

pub use hermitian::{eig_hermitian, hermitian_pd_inverse, HermitianEigen};
pub use poly::{real_roots, PolyReal, ROOT_CLUSTER_TOL};
pub use sym::{
    eig_sym, eig_sym3, gen_eig, invert, j2, j3, solve_shifted, GenEigPair, Matrix, RealSym2, RealSym3,
    Signature, SmallSym, SymEigen, Vector, SINGULAR_SHIFT_CONDITION,
};
