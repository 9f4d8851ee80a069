//! Small real-symmetric kernels (N = 2 or 3 in practice): cyclic Jacobi
//! eigendecomposition, the generalized eigenproblem against a signature
//! matrix, and shifted solves `(R + lambda J) u = r`.

use crate::error::{Error, Result};
use crate::linalg::poly::{real_roots, PolyReal};

pub type Vector<const N: usize> = [f64; N];
pub type Matrix<const N: usize> = [[f64; N]; N];

/// Symmetric `N x N` real matrix. Symmetry holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallSym<const N: usize> {
    m: Matrix<N>,
}

/// Accumulator for `T = sum t t^T` and `R = sum r r^T` over 3-vectors.
pub type RealSym3 = SmallSym<3>;
pub type RealSym2 = SmallSym<2>;

impl<const N: usize> Default for SmallSym<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> SmallSym<N> {
    pub fn zeros() -> Self {
        Self { m: [[0.0; N]; N] }
    }

    pub fn identity() -> Self {
        Self::diag([1.0; N])
    }

    pub fn diag(d: Vector<N>) -> Self {
        let mut m = [[0.0; N]; N];
        for i in 0..N {
            m[i][i] = d[i];
        }
        Self { m }
    }

    /// Builds from a full matrix, rejecting asymmetric or non-finite input.
    pub fn from_matrix(m: Matrix<N>) -> Result<Self> {
        for i in 0..N {
            for j in 0..N {
                if !m[i][j].is_finite() {
                    return Err(Error::InvalidInput("non-finite matrix entry".into()));
                }
                if m[i][j] != m[j][i] {
                    return Err(Error::InvalidInput(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { m })
    }

    /// Symmetrizes `m` as `(m + m^T) / 2`.
    pub fn symmetrize(m: Matrix<N>) -> Self {
        let mut out = [[0.0; N]; N];
        for i in 0..N {
            for j in 0..N {
                out[i][j] = 0.5 * (m[i][j] + m[j][i]);
            }
        }
        Self { m: out }
    }

    /// `self += v v^T`.
    pub fn add_outer(&mut self, v: &Vector<N>) {
        for i in 0..N {
            for j in i..N {
                let x = v[i] * v[j];
                self.m[i][j] += x;
                if i != j {
                    self.m[j][i] += x;
                }
            }
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn as_matrix(&self) -> &Matrix<N> {
        &self.m
    }

    pub fn mul_vec(&self, v: &Vector<N>) -> Vector<N> {
        mat_vec(&self.m, v)
    }

    /// Quadratic form `v^T M v`.
    pub fn quad(&self, v: &Vector<N>) -> f64 {
        dot(v, &self.mul_vec(v))
    }

    pub fn frobenius(&self) -> f64 {
        self.m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|x| x.is_finite())
    }

    /// `self + lambda * J`.
    pub fn shifted(&self, lambda: f64, j: &Signature<N>) -> Self {
        let mut m = self.m;
        for i in 0..N {
            m[i][i] += lambda * j.sign(i);
        }
        Self { m }
    }
}

/// Diagonal signature matrix with entries in {+1, -1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Signature<const N: usize> {
    signs: Vector<N>,
}

impl<const N: usize> Signature<N> {
    pub fn new(signs: [i8; N]) -> Result<Self> {
        let mut out = [0.0; N];
        for (o, s) in out.iter_mut().zip(signs) {
            *o = match s {
                1 => 1.0,
                -1 => -1.0,
                other => {
                    return Err(Error::InvalidInput(format!(
                        "signature entry {other} is not +1 or -1"
                    )))
                }
            };
        }
        Ok(Self { signs: out })
    }

    /// `diag(1, -1, ..., -1)`.
    pub fn lorentz() -> Self {
        let mut signs = [-1.0; N];
        signs[0] = 1.0;
        Self { signs }
    }

    #[inline]
    pub fn sign(&self, i: usize) -> f64 {
        self.signs[i]
    }

    pub fn apply(&self, v: &Vector<N>) -> Vector<N> {
        let mut out = *v;
        for (o, s) in out.iter_mut().zip(&self.signs) {
            *o *= s;
        }
        out
    }

    /// `v^T J v`.
    pub fn form(&self, v: &Vector<N>) -> f64 {
        v.iter().zip(&self.signs).map(|(x, s)| s * x * x).sum()
    }
}

/// `J3 = diag(1, -1, -1)`.
pub fn j3() -> Signature<3> {
    Signature::lorentz()
}

/// `J2 = diag(1, -1)`.
pub fn j2() -> Signature<2> {
    Signature::lorentz()
}

/// Eigen-decomposition of a symmetric matrix; eigenvalues ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEigen<const N: usize> {
    pub values: Vector<N>,
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: [Vector<N>; N],
}

/// Generalized eigenpairs of `(R, J)`: `R u_i = lambda_i J u_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenEigPair<const N: usize> {
    pub values: Vector<N>,
    /// `vectors[i]` is the (unit-norm) generalized eigenvector for `values[i]`.
    pub vectors: [Vector<N>; N],
}

impl<const N: usize> GenEigPair<N> {
    /// Column matrix `U` with the eigenvectors as columns.
    pub fn u_matrix(&self) -> Matrix<N> {
        let mut u = [[0.0; N]; N];
        for (c, v) in self.vectors.iter().enumerate() {
            for r in 0..N {
                u[r][c] = v[r];
            }
        }
        u
    }

    /// Products `a_i b_i` with `a = U^T r` and `b = U^{-1} J r`.
    ///
    /// These are invariant to eigenvector scaling and are all the secular
    /// polynomial needs.
    pub fn secular_weights(&self, r: &Vector<N>, j: &Signature<N>) -> Result<Vector<N>> {
        let u = self.u_matrix();
        let u_inv = invert(&u)?;
        let a = mat_t_vec(&u, r);
        let b = mat_vec(&u_inv, &j.apply(r));
        let mut w = [0.0; N];
        for i in 0..N {
            w[i] = a[i] * b[i];
        }
        Ok(w)
    }

    /// Max relative residual `||R u - lambda J u|| / ((||R|| + |lambda|) ||u||)`.
    pub fn residual(&self, r: &SmallSym<N>, j: &Signature<N>) -> f64 {
        let scale = r.frobenius();
        self.vectors
            .iter()
            .zip(&self.values)
            .map(|(v, &lam)| {
                let rv = r.mul_vec(v);
                let jv = j.apply(v);
                let res: f64 = (0..N).map(|i| (rv[i] - lam * jv[i]).powi(2)).sum::<f64>().sqrt();
                res / ((scale + lam.abs()).max(f64::MIN_POSITIVE) * norm(v))
            })
            .fold(0.0, f64::max)
    }
}

const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix.
pub fn eig_sym<const N: usize>(m: &SmallSym<N>) -> Result<SymEigen<N>> {
    if !m.is_finite() {
        return Err(Error::InvalidInput("non-finite symmetric matrix".into()));
    }
    let mut a = m.m;
    let mut v = identity::<N>();
    let scale = m.frobenius();
    if scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..N)
                .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum::<f64>()
                .sqrt();
            if off <= JACOBI_TOL * scale {
                break;
            }
            for p in 0..N {
                for q in p + 1..N {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&x, &y| a[x][x].total_cmp(&a[y][y]));
    let mut values = [0.0; N];
    let mut vectors = [[0.0; N]; N];
    for (slot, &idx) in order.iter().enumerate() {
        values[slot] = a[idx][idx];
        for r in 0..N {
            vectors[slot][r] = v[r][idx];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Eigen-decomposition of a 3x3 symmetric matrix, eigenvalues ascending.
pub fn eig_sym3(t: &RealSym3) -> Result<SymEigen<3>> {
    eig_sym(t)
}

fn jacobi_rotate<const N: usize>(a: &mut Matrix<N>, v: &mut Matrix<N>, p: usize, q: usize) {
    let apq = a[p][q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for row in a.iter_mut() {
        let (x, y) = (row[p], row[q]);
        row[p] = c * x - s * y;
        row[q] = s * x + c * y;
    }
    for k in 0..N {
        let (x, y) = (a[p][k], a[q][k]);
        a[p][k] = c * x - s * y;
        a[q][k] = s * x + c * y;
    }
    a[p][q] = 0.0;
    a[q][p] = 0.0;
    for row in v.iter_mut() {
        let (x, y) = (row[p], row[q]);
        row[p] = c * x - s * y;
        row[q] = s * x + c * y;
    }
}

/// Generalized eigendecomposition `R = J U diag(lambda) U^{-1}`.
///
/// Positive definite `R` goes through the congruence `L^T J L` (always real
/// spectrum); otherwise the characteristic polynomial of `J R` is solved and
/// eigenvectors are taken from the null space of `R - lambda J`. Complex or
/// defective pencils yield [`Error::DegeneratePencil`].
pub fn gen_eig<const N: usize>(r: &SmallSym<N>, j: &Signature<N>) -> Result<GenEigPair<N>> {
    if !r.is_finite() {
        return Err(Error::InvalidInput("non-finite pencil matrix".into()));
    }
    let pair = match cholesky(r) {
        Some(l) => gen_eig_definite(&l, j)?,
        None => gen_eig_indefinite(r, j)?,
    };
    let residual = pair.residual(r, j);
    if residual > 1e-10 {
        return Err(Error::DegeneratePencil(format!(
            "eigen-residual {residual:e} above tolerance"
        )));
    }
    Ok(pair)
}

fn gen_eig_definite<const N: usize>(l: &Matrix<N>, j: &Signature<N>) -> Result<GenEigPair<N>> {
    // C = L^T J L is symmetric; with C q = mu q, u = L^{-T} q solves R u = mu J u.
    let mut c = [[0.0; N]; N];
    for (a, row) in c.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            *entry = (0..N).map(|k| l[k][a] * j.sign(k) * l[k][b]).sum();
        }
    }
    let eig = eig_sym(&SmallSym::symmetrize(c))?;
    let mut vectors = [[0.0; N]; N];
    for (out, q) in vectors.iter_mut().zip(&eig.vectors) {
        let u = solve_upper_transposed(l, q);
        let n = norm(&u);
        for i in 0..N {
            out[i] = u[i] / n;
        }
    }
    Ok(GenEigPair {
        values: eig.values,
        vectors,
    })
}

fn gen_eig_indefinite<const N: usize>(r: &SmallSym<N>, j: &Signature<N>) -> Result<GenEigPair<N>> {
    let mut jr = r.m;
    for (i, row) in jr.iter_mut().enumerate() {
        for x in row.iter_mut() {
            *x *= j.sign(i);
        }
    }
    let charpoly = PolyReal::from_ascending(characteristic_poly(&jr))?;
    let roots = real_roots(&charpoly)?;
    let scale = r.frobenius().max(f64::MIN_POSITIVE);

    let mut values = Vec::with_capacity(N);
    let mut vectors: Vec<Vector<N>> = Vec::with_capacity(N);
    for &mu in &roots {
        let shifted = r.shifted(-mu, j);
        let eig = eig_sym(&shifted)?;
        let tol = 1e-8 * (scale + mu.abs());
        let mut by_size: Vec<usize> = (0..N).collect();
        by_size.sort_by(|&x, &y| eig.values[x].abs().total_cmp(&eig.values[y].abs()));
        for (rank, &idx) in by_size.iter().enumerate() {
            if rank > 0 && eig.values[idx].abs() > tol {
                break;
            }
            let v = eig.vectors[idx];
            // Rayleigh refinement separates nearly coincident eigenvalues that
            // the root collapse merged.
            let jform = j.form(&v);
            let refined = if jform.abs() > 1e-8 {
                r.quad(&v) / jform
            } else {
                mu
            };
            values.push(refined);
            vectors.push(v);
        }
    }
    if vectors.len() != N {
        return Err(Error::DegeneratePencil(format!(
            "found {} real eigenvectors, expected {N}",
            vectors.len()
        )));
    }
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut pair = GenEigPair {
        values: [0.0; N],
        vectors: [[0.0; N]; N],
    };
    for (slot, &idx) in order.iter().enumerate() {
        pair.values[slot] = values[idx];
        pair.vectors[slot] = vectors[idx];
    }
    if invert(&pair.u_matrix()).is_err() {
        return Err(Error::DegeneratePencil("eigenvectors are not independent".into()));
    }
    Ok(pair)
}

/// Coefficients (ascending) of `det(x I - A)` via Faddeev-LeVerrier.
fn characteristic_poly<const N: usize>(a: &Matrix<N>) -> Vec<f64> {
    let mut coeffs = vec![0.0; N + 1];
    coeffs[N] = 1.0;
    let mut m = [[0.0; N]; N];
    for k in 1..=N {
        // M_k = A M_{k-1} + c_{N-k+1} I
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[N - k + 1];
        }
        m = next;
        let am = mat_mul(a, &m);
        let trace: f64 = (0..N).map(|i| am[i][i]).sum();
        coeffs[N - k] = -trace / k as f64;
    }
    coeffs
}

/// Condition threshold above which a shifted system is treated as singular.
pub const SINGULAR_SHIFT_CONDITION: f64 = 1e12;

/// Solves `(R + lambda J) u = rhs`.
///
/// The condition number of the (symmetric) shifted matrix is estimated from
/// its eigenvalues; above [`SINGULAR_SHIFT_CONDITION`] the shift is rejected.
pub fn solve_shifted<const N: usize>(
    r: &SmallSym<N>,
    j: &Signature<N>,
    lambda: f64,
    rhs: &Vector<N>,
) -> Result<Vector<N>> {
    if !lambda.is_finite() || rhs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite shift or right-hand side".into()));
    }
    let m = r.shifted(lambda, j);
    let eig = eig_sym(&m)?;
    let max_abs = eig.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let min_abs = eig.values.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    let condition = if min_abs > 0.0 { max_abs / min_abs } else { f64::INFINITY };
    if !(condition <= SINGULAR_SHIFT_CONDITION) {
        return Err(Error::SingularShift { condition });
    }
    let apply_inverse = |b: &Vector<N>| {
        let mut out = [0.0; N];
        for (val, vec) in eig.values.iter().zip(&eig.vectors) {
            let coef = dot(vec, b) / val;
            for i in 0..N {
                out[i] += coef * vec[i];
            }
        }
        out
    };
    let mut u = apply_inverse(rhs);
    // one step of iterative refinement
    let mu = m.mul_vec(&u);
    let mut res = [0.0; N];
    for i in 0..N {
        res[i] = rhs[i] - mu[i];
    }
    let du = apply_inverse(&res);
    for i in 0..N {
        u[i] += du[i];
    }
    Ok(u)
}

/// Lower Cholesky factor, or `None` when the matrix is not comfortably
/// positive definite.
fn cholesky<const N: usize>(r: &SmallSym<N>) -> Option<Matrix<N>> {
    let max_diag = (0..N).map(|i| r.m[i][i]).fold(0.0_f64, f64::max);
    if max_diag <= 0.0 {
        return None;
    }
    let mut l = [[0.0; N]; N];
    for i in 0..N {
        for k in 0..=i {
            let s: f64 = (0..k).map(|p| l[i][p] * l[k][p]).sum();
            if i == k {
                let d = r.m[i][i] - s;
                if d <= 1e-10 * max_diag {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][k] = (r.m[i][k] - s) / l[k][k];
            }
        }
    }
    Some(l)
}

/// Solves `L^T x = b` for lower-triangular `L`.
fn solve_upper_transposed<const N: usize>(l: &Matrix<N>, b: &Vector<N>) -> Vector<N> {
    let mut x = [0.0; N];
    for i in (0..N).rev() {
        let s: f64 = (i + 1..N).map(|k| l[k][i] * x[k]).sum();
        x[i] = (b[i] - s) / l[i][i];
    }
    x
}

/// Gauss-Jordan inverse with partial pivoting; rejects matrices whose
/// 1-norm condition estimate exceeds [`SINGULAR_SHIFT_CONDITION`].
pub fn invert<const N: usize>(m: &Matrix<N>) -> Result<Matrix<N>> {
    let mut a = *m;
    let mut inv = identity::<N>();
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap_or(col);
        if a[pivot][col] == 0.0 {
            return Err(Error::Singular("zero pivot".into()));
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        for k in 0..N {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for row in 0..N {
            if row != col {
                let f = a[row][col];
                if f != 0.0 {
                    for k in 0..N {
                        a[row][k] -= f * a[col][k];
                        inv[row][k] -= f * inv[col][k];
                    }
                }
            }
        }
    }
    let condition = norm1(m) * norm1(&inv);
    if !(condition <= SINGULAR_SHIFT_CONDITION) {
        return Err(Error::Singular(format!("condition estimate {condition:e}")));
    }
    Ok(inv)
}

fn norm1<const N: usize>(m: &Matrix<N>) -> f64 {
    (0..N)
        .map(|c| (0..N).map(|r| m[r][c].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn identity<const N: usize>() -> Matrix<N> {
    let mut m = [[0.0; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub(crate) fn mat_mul<const N: usize>(a: &Matrix<N>, b: &Matrix<N>) -> Matrix<N> {
    let mut out = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..N {
            out[i][j] = (0..N).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub(crate) fn mat_vec<const N: usize>(a: &Matrix<N>, v: &Vector<N>) -> Vector<N> {
    let mut out = [0.0; N];
    for (o, row) in out.iter_mut().zip(a) {
        *o = dot(row, v);
    }
    out
}

fn mat_t_vec<const N: usize>(a: &Matrix<N>, v: &Vector<N>) -> Vector<N> {
    let mut out = [0.0; N];
    for (c, o) in out.iter_mut().enumerate() {
        *o = (0..N).map(|r| a[r][c] * v[r]).sum();
    }
    out
}

#[inline]
pub(crate) fn dot<const N: usize>(a: &Vector<N>, b: &Vector<N>) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm<const N: usize>(a: &Vector<N>) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym3(rng: &mut ChaCha8Rng) -> RealSym3 {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let x = rng.random_range(-10.0..10.0);
                m[i][j] = x;
                m[j][i] = x;
            }
        }
        RealSym3::from_matrix(m).unwrap()
    }

    #[test]
    fn eig_sym3_diagonal() {
        let e = eig_sym3(&RealSym3::diag([3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, [1.0, 2.0, 3.0]);
        let expected = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
        for (v, want) in e.vectors.iter().zip(&expected) {
            assert!((dot(v, want).abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn eig_sym3_zero_matrix() {
        let e = eig_sym3(&RealSym3::zeros()).unwrap();
        assert_eq!(e.values, [0.0; 3]);
        for a in 0..3 {
            for b in 0..3 {
                let d = dot(&e.vectors[a], &e.vectors[b]);
                assert!((d - if a == b { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn eig_sym3_rejects_nan() {
        let mut m = [[0.0; 3]; 3];
        m[1][1] = f64::NAN;
        assert!(RealSym3::from_matrix(m).is_err());
        let bad = SmallSym::<3> { m };
        assert!(matches!(eig_sym3(&bad), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn eig_sym3_random_residual_and_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst_res = 0.0_f64;
        let mut worst_orth = 0.0_f64;
        for _ in 0..10_000 {
            let t = random_sym3(&mut rng);
            let e = eig_sym3(&t).unwrap();
            assert!(e.values[0] <= e.values[1] && e.values[1] <= e.values[2]);
            let mut recon = [[0.0; 3]; 3];
            for (lam, v) in e.values.iter().zip(&e.vectors) {
                let tv = t.mul_vec(v);
                let res = (0..3).map(|i| (tv[i] - lam * v[i]).powi(2)).sum::<f64>().sqrt();
                worst_res = worst_res.max(res / (1.0 + t.frobenius()));
                for a in 0..3 {
                    for b in 0..3 {
                        recon[a][b] += lam * v[a] * v[b];
                    }
                }
            }
            for a in 0..3 {
                for b in 0..3 {
                    let d = dot(&e.vectors[a], &e.vectors[b]) - if a == b { 1.0 } else { 0.0 };
                    worst_orth = worst_orth.max(d.abs());
                    assert!((recon[a][b] - t.get(a, b)).abs() < 1e-10);
                }
            }
        }
        assert!(worst_res <= 1e-10, "residual {worst_res:e}");
        assert!(worst_orth <= 1e-12, "orthogonality {worst_orth:e}");
    }

    #[test]
    fn gen_eig_of_signature_itself() {
        let j = j3();
        let r = RealSym3::diag([1.0, -1.0, -1.0]);
        let pair = gen_eig(&r, &j).unwrap();
        for v in pair.values {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert!(pair.residual(&r, &j) < 1e-12);
    }

    #[test]
    fn gen_eig_diagonal_pencil() {
        let j = j3();
        let r = RealSym3::diag([2.0, 3.0, 5.0]);
        let pair = gen_eig(&r, &j).unwrap();
        let mut vals = pair.values.to_vec();
        vals.sort_by(f64::total_cmp);
        let want = [-5.0, -3.0, 2.0];
        for (a, b) in vals.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{vals:?}");
        }
        // eigenvectors are the coordinate axes up to sign
        for v in &pair.vectors {
            let big = v.iter().filter(|x| (x.abs() - 1.0).abs() < 1e-12).count();
            assert_eq!(big, 1);
        }
    }

    #[test]
    fn gen_eig_complex_spectrum_is_an_error() {
        // J R = [[0, 1], [-1, 0]] has eigenvalues +-i.
        let r = SmallSym::<2>::from_matrix([[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(matches!(gen_eig(&r, &j2()), Err(Error::DegeneratePencil(_))));
    }

    #[test]
    fn solve_shifted_examples() {
        let u = solve_shifted(&RealSym3::identity(), &j3(), 1.0, &[2.0, 0.0, 0.0]);
        // R + J3 = diag(2, 0, 0) is singular.
        assert!(matches!(u, Err(Error::SingularShift { .. })));

        let u = solve_shifted(&RealSym3::identity(), &j3(), 0.0, &[2.0, 0.0, 0.0]).unwrap();
        assert!((u[0] - 2.0).abs() < 1e-15 && u[1] == 0.0 && u[2] == 0.0);

        let r = RealSym3::diag([0.5, 0.0, 0.0]);
        assert!(matches!(
            solve_shifted(&r, &j3(), 0.0, &[1.0, 0.0, 0.0]),
            Err(Error::SingularShift { .. })
        ));
    }

    #[test]
    fn solve_shifted_identity_example() {
        // R = I3, J3, lambda = 1 on the first coordinate: (1 + 1) u1 = 2.
        let r = RealSym3::diag([1.0, 3.0, 3.0]);
        let u = solve_shifted(&r, &j3(), 1.0, &[2.0, 0.0, 0.0]).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-15 && u[1] == 0.0 && u[2] == 0.0);
    }

    #[test]
    fn solve_shifted_random_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let j = j3();
        let mut solved = 0;
        for _ in 0..2000 {
            let r = random_sym3(&mut rng);
            let lambda = rng.random_range(-5.0..5.0);
            let rhs = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let Ok(u) = solve_shifted(&r, &j, lambda, &rhs) else { continue };
            solved += 1;
            let m = r.shifted(lambda, &j);
            let mu = m.mul_vec(&u);
            let res = (0..3).map(|i| (mu[i] - rhs[i]).powi(2)).sum::<f64>().sqrt();
            let scale = m.frobenius() * norm(&u) + norm(&rhs);
            assert!(res <= 1e-10 * scale, "residual {res:e}");
        }
        assert!(solved > 1900);
    }

    #[test]
    fn invert_roundtrip_and_singular() {
        let m = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]];
        let inv = invert(&m).unwrap();
        let p = mat_mul(&m, &inv);
        for (i, row) in p.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert!((x - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!(invert(&[[1.0, 2.0], [2.0, 4.0]]).is_err());
    }

    #[test]
    fn characteristic_poly_of_diagonal() {
        let c = characteristic_poly(&[[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]]);
        // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
        assert_eq!(c, vec![-6.0, 11.0, -6.0, 1.0]);
    }
}
