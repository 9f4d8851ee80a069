use crate::block::{ComplexBlock, C64};
use crate::error::{Error, Result};
use crate::linalg::{j2, j3, RealSym2, RealSym3, Vector};

use super::hyperbola::minimize_on_hyperbola;
use super::{ShearParams, ShearVariant};

/// Largest `|gamma|` the linear solver will return.
pub const GAMMA_MAX: f64 = 1.0;

/// Saturation bound on `tanh(2 gamma)` in the linear solver.
const TANH_LIMIT: f64 = 1.0 - 1e-9;

/// Second-order moments of a row pair:
/// `R = sum_j r_j r_j^T` and `r = sum_j r_j`, with
/// `r_j = [(|y_pj|^2 + |y_qj|^2) / 2, Re(y_pj y_qj*), Im(y_pj y_qj*)]`.
///
/// Under a Shear with `u = [cosh 2g, cos b sinh 2g, sin b sinh 2g]` the pair's
/// CM cost is `2 (u^T R u - 2 r^T u) + const`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearMoments {
    pub r_mat: RealSym3,
    pub r_vec: Vector<3>,
}

pub fn shear_moments(row_p: &[C64], row_q: &[C64]) -> ShearMoments {
    let mut r_mat = RealSym3::zeros();
    let mut r_vec = [0.0; 3];
    for (yp, yq) in row_p.iter().zip(row_q) {
        let cross = yp * yq.conj();
        let rj = [0.5 * (yp.norm_sqr() + yq.norm_sqr()), cross.re, cross.im];
        r_mat.add_outer(&rj);
        for i in 0..3 {
            r_vec[i] += rj[i];
        }
    }
    ShearMoments { r_mat, r_vec }
}

/// `u^T R u - 2 r^T u` for the Shear `h`.
pub fn shear_objective(m: &ShearMoments, h: &ShearParams) -> f64 {
    let ch2 = 2.0 * h.ch * h.ch - 1.0;
    // sinh(2g) e^{jb} = 2 cosh(g) sinh(g) e^{jb}
    let s2 = 2.0 * h.ch * h.sh;
    let u = [ch2, s2.re, s2.im];
    m.r_mat.quad(&u) - 2.0 * (0..3).map(|i| m.r_vec[i] * u[i]).sum::<f64>()
}

/// Result of a Shear solve, with the solver that actually produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearSolution {
    pub params: ShearParams,
    pub variant: ShearVariant,
    /// A more exact solver failed and a simpler one was used instead.
    pub fell_back: bool,
    /// The linear solver saturated `tanh(2 gamma)` or the `|gamma|` cap.
    pub clamped: bool,
    /// Lagrange multiplier, for the exact and semi-exact solvers.
    pub multiplier: Option<f64>,
}

fn check_pair(block: &ComplexBlock, p: usize, q: usize) -> Result<()> {
    if p >= q || q >= block.rows() {
        return Err(Error::IndexOutOfRange(format!(
            "row pair ({p}, {q}) invalid for {} rows",
            block.rows()
        )));
    }
    Ok(())
}

/// Phase `beta` from the linearized stationarity conditions:
/// `tan b = sum r3 (r1 - 1) / sum r2 (r1 - 1)`.
pub fn shear_beta(m: &ShearMoments) -> f64 {
    let num = m.r_mat.get(0, 2) - m.r_vec[2];
    let den = m.r_mat.get(0, 1) - m.r_vec[1];
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            std::f64::consts::FRAC_PI_2.copysign(num)
        }
    } else {
        (num / den).atan()
    }
}

/// Moments projected on the direction `beta`: `[r1, cos b r2 + sin b r3]`.
fn reduced_moments(m: &ShearMoments, beta: f64) -> (RealSym2, Vector<2>) {
    let (sb, cb) = beta.sin_cos();
    let r = &m.r_mat;
    let off = cb * r.get(0, 1) + sb * r.get(0, 2);
    let rho2 = cb * cb * r.get(1, 1) + 2.0 * cb * sb * r.get(1, 2) + sb * sb * r.get(2, 2);
    let mat = RealSym2::symmetrize([[r.get(0, 0), off], [off, rho2]]);
    (mat, [m.r_vec[0], cb * m.r_vec[1] + sb * m.r_vec[2]])
}

pub fn shear_linear(block: &ComplexBlock, p: usize, q: usize) -> Result<ShearSolution> {
    check_pair(block, p, q)?;
    Ok(shear_linear_from_moments(p, q, &shear_moments(block.row(p), block.row(q))))
}

/// `tanh(2 gamma) = sum rho (1 - r1) / sum (r1^2 - r1 + rho^2)` with
/// `rho = cos b r2 + sin b r3`, saturated at `1 - 1e-9` and `|gamma| <= GAMMA_MAX`.
pub fn shear_linear_from_moments(p: usize, q: usize, m: &ShearMoments) -> ShearSolution {
    let beta = shear_beta(m);
    let (mat, rv) = reduced_moments(m, beta);
    let num = rv[1] - mat.get(0, 1);
    let den = mat.get(0, 0) - rv[0] + mat.get(1, 1);
    let mut clamped = false;
    let ratio = if num == 0.0 {
        0.0
    } else if den == 0.0 {
        clamped = true;
        TANH_LIMIT.copysign(num)
    } else {
        let t = num / den;
        if t.abs() > TANH_LIMIT {
            clamped = true;
            TANH_LIMIT.copysign(t)
        } else {
            t
        }
    };
    let mut gamma = 0.5 * ratio.atanh();
    if gamma.abs() > GAMMA_MAX {
        clamped = true;
        gamma = GAMMA_MAX.copysign(gamma);
    }
    ShearSolution {
        params: ShearParams::from_gamma_beta(p, q, gamma, beta),
        variant: ShearVariant::Linear,
        fell_back: false,
        clamped,
        multiplier: None,
    }
}

pub fn shear_semi_exact(block: &ComplexBlock, p: usize, q: usize) -> Result<ShearSolution> {
    check_pair(block, p, q)?;
    Ok(shear_semi_exact_from_moments(p, q, &shear_moments(block.row(p), block.row(q))))
}

/// `beta` as in the linear solver, then the exact minimizer over `gamma`
/// on the two-dimensional hyperbola. Falls back to the linear solver when
/// the reduced problem has no admissible solution.
pub fn shear_semi_exact_from_moments(p: usize, q: usize, m: &ShearMoments) -> ShearSolution {
    let beta = shear_beta(m);
    let (mat, rv) = reduced_moments(m, beta);
    match minimize_on_hyperbola(&mat, &rv, &j2()) {
        Ok(min) => {
            let gamma = 0.5 * min.u[1].asinh();
            let params = ShearParams::from_gamma_beta(p, q, gamma, beta);
            if params.ch.is_finite() && params.sh.is_finite() {
                return ShearSolution {
                    params,
                    variant: ShearVariant::SemiExact,
                    fell_back: false,
                    clamped: false,
                    multiplier: Some(min.multiplier),
                };
            }
            fallback_linear(p, q, m)
        }
        Err(_) => fallback_linear(p, q, m),
    }
}

fn fallback_linear(p: usize, q: usize, m: &ShearMoments) -> ShearSolution {
    ShearSolution {
        fell_back: true,
        ..shear_linear_from_moments(p, q, m)
    }
}

pub fn shear_exact(block: &ComplexBlock, p: usize, q: usize) -> Result<ShearSolution> {
    check_pair(block, p, q)?;
    Ok(shear_exact_from_moments(p, q, &shear_moments(block.row(p), block.row(q))))
}

/// Global CM-optimal Shear for the pair. Falls back to the semi-exact
/// solver when the pencil is degenerate or no admissible root is found.
pub fn shear_exact_from_moments(p: usize, q: usize, m: &ShearMoments) -> ShearSolution {
    if let Ok(min) = minimize_on_hyperbola(&m.r_mat, &m.r_vec, &j3()) {
        let tail = min.u[1].hypot(min.u[2]);
        let gamma = 0.5 * tail.asinh();
        let phase = if tail == 0.0 { 0.0 } else { min.u[2].atan2(min.u[1]) };
        let params = ShearParams::from_gamma_beta(p, q, gamma, phase);
        // the identity is always admissible, so a valid minimizer cannot lose to it
        let identity_cost = shear_objective(m, &ShearParams::identity(p, q));
        let cost = shear_objective(m, &params);
        if params.ch.is_finite()
            && params.sh.is_finite()
            && cost <= identity_cost + 1e-9 * (1.0 + identity_cost.abs())
        {
            return ShearSolution {
                params,
                variant: ShearVariant::Exact,
                fell_back: false,
                clamped: false,
                multiplier: Some(min.multiplier),
            };
        }
    }
    ShearSolution {
        fell_back: true,
        ..shear_semi_exact_from_moments(p, q, m)
    }
}

impl ShearVariant {
    /// Solves rows `(p, q)` of `block` with this variant (and its fallbacks).
    pub fn solve(self, block: &ComplexBlock, p: usize, q: usize) -> Result<ShearSolution> {
        match self {
            ShearVariant::Exact => shear_exact(block, p, q),
            ShearVariant::SemiExact => shear_semi_exact(block, p, q),
            ShearVariant::Linear => shear_linear(block, p, q),
        }
    }
}
