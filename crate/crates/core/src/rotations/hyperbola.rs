use crate::error::{Error, Result};
use crate::linalg::sym::{dot, norm};
use crate::linalg::{eig_sym, gen_eig, real_roots, solve_shifted, GenEigPair, PolyReal, Signature, SmallSym, Vector};

/// Minimizer of `F(u) = u^T R u - 2 r^T u` on the upper sheet
/// `{u : u^T J u = 1, u_1 > 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolaMin<const N: usize> {
    pub u: Vector<N>,
    /// Lagrange multiplier `lambda` with `(R + lambda J) u = r`.
    pub multiplier: f64,
    pub objective: f64,
    /// The minimizer sits at a singular shift `lambda = -mu_i` and was found
    /// from the null space of `R + lambda J`.
    pub singular_branch: bool,
}

const CONSTRAINT_TOL: f64 = 1e-6;
const NEWTON_STEPS: usize = 4;

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Secular polynomial
/// `P(lambda) = prod_i (lambda + mu_i)^2 - sum_i a_i b_i prod_{k != i} (lambda + mu_k)^2`
/// built from the generalized eigenpairs of `(R, J)`; degree `2N`, monic.
///
/// Its real roots contain every multiplier of a stationary point of `F`
/// on the constraint surface.
pub fn secular_poly<const N: usize>(pair: &GenEigPair<N>, r: &Vector<N>, j: &Signature<N>) -> Result<PolyReal> {
    let w = pair.secular_weights(r, j)?;
    let squares: Vec<Vec<f64>> = pair
        .values
        .iter()
        .map(|&mu| vec![mu * mu, 2.0 * mu, 1.0])
        .collect();
    let mut full = vec![1.0];
    for s in &squares {
        full = poly_mul(&full, s);
    }
    for i in 0..N {
        let mut partial = vec![w[i]];
        for (k, s) in squares.iter().enumerate() {
            if k != i {
                partial = poly_mul(&partial, s);
            }
        }
        for (c, p) in full.iter_mut().zip(&partial) {
            *c -= p;
        }
    }
    PolyReal::from_ascending(full)
}

fn objective<const N: usize>(r_mat: &SmallSym<N>, r: &Vector<N>, u: &Vector<N>) -> f64 {
    r_mat.quad(u) - 2.0 * dot(r, u)
}

fn admissible<const N: usize>(j: &Signature<N>, u: &Vector<N>) -> bool {
    u.iter().all(|x| x.is_finite()) && u[0] > 0.0 && (j.form(u) - 1.0).abs() <= CONSTRAINT_TOL
}

/// Refines a multiplier by Newton steps on `g(lambda) = u^T J u - 1`,
/// `u = (R + lambda J)^{-1} r`. Returns the best `(lambda, u)` seen.
fn polish<const N: usize>(
    r_mat: &SmallSym<N>,
    j: &Signature<N>,
    r: &Vector<N>,
    lambda: f64,
    u: Vector<N>,
) -> (f64, Vector<N>) {
    let mut best = (lambda, u);
    let mut best_g = (j.form(&u) - 1.0).abs();
    for _ in 0..NEWTON_STEPS {
        if best_g == 0.0 {
            break;
        }
        let (lam, u) = best;
        let ju = j.apply(&u);
        let Ok(w) = solve_shifted(r_mat, j, lam, &ju) else {
            break;
        };
        let slope = -2.0 * dot(&ju, &w);
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = lam - (j.form(&u) - 1.0) / slope;
        let Ok(u_next) = solve_shifted(r_mat, j, next, r) else {
            break;
        };
        let g = (j.form(&u_next) - 1.0).abs();
        if g < best_g {
            best = (next, u_next);
            best_g = g;
        } else {
            break;
        }
    }
    best
}

/// Candidates at a singular shift `lambda` where `R + lambda J` has a
/// nontrivial null space and `r` lies in its range.
fn singular_candidates<const N: usize>(
    r_mat: &SmallSym<N>,
    j: &Signature<N>,
    r: &Vector<N>,
    lambda: f64,
) -> Result<Vec<Vector<N>>> {
    let m = r_mat.shifted(lambda, j);
    let eig = eig_sym(&m)?;
    let scale = eig.values.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(r_mat.frobenius());
    let tol = 1e-9 * scale.max(f64::MIN_POSITIVE);
    let mut u0 = [0.0; N];
    let mut null: Vec<Vector<N>> = Vec::new();
    for (val, vec) in eig.values.iter().zip(&eig.vectors) {
        if val.abs() <= tol {
            null.push(*vec);
        } else {
            let coef = dot(vec, r) / val;
            for i in 0..N {
                u0[i] += coef * vec[i];
            }
        }
    }
    if null.is_empty() || null.len() >= N {
        return Ok(Vec::new());
    }
    let mu0 = m.mul_vec(&u0);
    let res: f64 = (0..N).map(|i| (mu0[i] - r[i]).powi(2)).sum::<f64>().sqrt();
    if res > 1e-8 * (norm(r) + scale * norm(&u0)) {
        return Ok(Vec::new());
    }
    // One free direction. With a two-dimensional null space, take the
    // direction that leaves the last coordinate fixed.
    let mut d = null[0];
    if null.len() == 2 {
        let (a, b) = (null[0], null[1]);
        let mut cand = [0.0; N];
        for i in 0..N {
            cand[i] = a[i] * b[N - 1] - b[i] * a[N - 1];
        }
        let n = norm(&cand);
        if n > 1e-12 {
            for x in cand.iter_mut() {
                *x /= n;
            }
            d = cand;
        }
    }
    // (u0 + c d)^T J (u0 + c d) = 1
    let qa = j.form(&d);
    let jd = j.apply(&d);
    let qb = 2.0 * dot(&u0, &jd);
    let qc = j.form(&u0) - 1.0;
    let mut coefs = Vec::new();
    if qa.abs() <= 1e-12 {
        if qb.abs() > 1e-12 {
            coefs.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // stable form of the two roots
            let sign = if qb >= 0.0 { 1.0 } else { -1.0 };
            let t = -0.5 * (qb + sign * sq);
            if t != 0.0 {
                coefs.push(t / qa);
                coefs.push(qc / t);
            } else {
                coefs.push(0.0);
            }
        }
    }
    Ok(coefs
        .into_iter()
        .map(|c| {
            let mut u = u0;
            for i in 0..N {
                u[i] += c * d[i];
            }
            u
        })
        .collect())
}

/// Global minimizer of `u^T R u - 2 r^T u` subject to `u^T J u = 1`, `u_1 > 0`.
///
/// Stationary points satisfy `(R + lambda J) u = r`; the multipliers are the
/// real roots of [`secular_poly`]. Each root is solved, refined and screened
/// for admissibility, and the singular shifts `lambda = -mu_i` are examined
/// separately. `R = 0` gives `u = e1`.
pub fn minimize_on_hyperbola<const N: usize>(
    r_mat: &SmallSym<N>,
    r: &Vector<N>,
    j: &Signature<N>,
) -> Result<HyperbolaMin<N>> {
    if !r_mat.is_finite() || r.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite moments".into()));
    }
    let mut e1 = [0.0; N];
    e1[0] = 1.0;
    if r_mat.frobenius() == 0.0 {
        return Ok(HyperbolaMin {
            u: e1,
            multiplier: 0.0,
            objective: objective(r_mat, r, &e1),
            singular_branch: false,
        });
    }
    let pair = gen_eig(r_mat, j)?;
    let poly = secular_poly(&pair, r, j)?;
    let roots = real_roots(&poly)?;

    let mut best: Option<HyperbolaMin<N>> = None;
    let mut consider = |u: Vector<N>, lambda: f64, singular: bool| {
        if !admissible(j, &u) {
            return;
        }
        // compare candidates exactly on the constraint surface
        let scale = j.form(&u).sqrt();
        let u = u.map(|x| x / scale);
        let f = objective(r_mat, r, &u);
        if best.map_or(true, |b| f < b.objective) {
            best = Some(HyperbolaMin {
                u,
                multiplier: lambda,
                objective: f,
                singular_branch: singular,
            });
        }
    };

    for &lambda in &roots {
        match solve_shifted(r_mat, j, lambda, r) {
            Ok(u) => {
                let (lam, u) = polish(r_mat, j, r, lambda, u);
                consider(u, lam, false);
            }
            Err(Error::SingularShift { .. }) => {
                let delta = 1e-9 * (1.0 + lambda.abs());
                for shifted in [lambda - delta, lambda + delta] {
                    if let Ok(u) = solve_shifted(r_mat, j, shifted, r) {
                        let (_, u) = polish(r_mat, j, r, shifted, u);
                        consider(u, lambda, false);
                    }
                }
            }
            Err(e) => return Err(e),
        }
    }

    let scale = r_mat.frobenius();
    let mut shifts: Vec<f64> = pair.values.iter().map(|mu| -mu).collect();
    shifts.sort_by(f64::total_cmp);
    shifts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * scale.max(1.0));
    for lambda in shifts {
        for u in singular_candidates(r_mat, j, r, lambda)? {
            consider(u, lambda, true);
        }
    }

    best.ok_or_else(|| Error::DegeneratePencil("no admissible stationary point on the hyperbola".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{j2, j3, RealSym2, RealSym3};

    #[test]
    fn poly_mul_small() {
        assert_eq!(poly_mul(&[1.0, 1.0], &[-1.0, 1.0]), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn identity_pencil_with_axis_target() {
        // R = I, r = 2 e1: minimum at e1 with multiplier 1 (singular shift)
        let r_mat = RealSym3::identity();
        let m = minimize_on_hyperbola(&r_mat, &[2.0, 0.0, 0.0], &j3()).unwrap();
        assert!((m.u[0] - 1.0).abs() < 1e-9 && m.u[1].abs() < 1e-9 && m.u[2].abs() < 1e-9, "{m:?}");
        assert!((m.objective + 3.0).abs() < 1e-9);
    }

    #[test]
    fn decoupled_rows_reach_minus_two() {
        let r_mat = RealSym3::diag([0.5, 0.0, 0.0]);
        let m = minimize_on_hyperbola(&r_mat, &[1.0, 0.0, 0.0], &j3()).unwrap();
        assert!((m.objective + 2.0).abs() < 1e-9, "{m:?}");
        assert!((m.u[0] - 2.0).abs() < 1e-9);
        assert!((m.u[1].abs() - 3.0_f64.sqrt()).abs() < 1e-9);
        assert!(m.u[2].abs() < 1e-9);
        assert!(m.singular_branch);
    }

    #[test]
    fn zero_moments_give_identity() {
        let m = minimize_on_hyperbola(&RealSym2::zeros(), &[0.0, 0.0], &j2()).unwrap();
        assert_eq!(m.u, [1.0, 0.0]);
    }

    #[test]
    fn two_dim_matches_parametric_scan() {
        let r_mat = RealSym2::from_matrix([[2.0, 0.3], [0.3, 0.5]]).unwrap();
        let r = [1.5, -0.4];
        let m = minimize_on_hyperbola(&r_mat, &r, &j2()).unwrap();
        let best = (-40_000..=40_000)
            .map(|i| {
                let t = i as f64 * 1e-4;
                objective(&r_mat, &r, &[t.cosh(), t.sinh()])
            })
            .fold(f64::INFINITY, f64::min);
        assert!(m.objective <= best + 1e-9, "{} vs {}", m.objective, best);
        assert!(best - m.objective < 1e-6);
    }
}
