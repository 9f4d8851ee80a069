//! Elementary two-row transforms and their CM-optimal parameter solvers.
//!
//! Every transform touches only rows `p < q` of a block, so it can be
//! applied to the data block and to the accumulated separator alike.

mod givens;
mod hyperbola;
mod norm;
mod shear;

pub use givens::{givens_params, givens_params_from_t, givens_t_matrix};
pub use hyperbola::{minimize_on_hyperbola, secular_poly, HyperbolaMin};
pub use norm::{apply_norm, norm_param, norm_params, scale_rows};
pub use shear::{
    shear_beta, shear_exact, shear_exact_from_moments, shear_linear, shear_linear_from_moments,
    shear_moments, shear_objective, shear_semi_exact, shear_semi_exact_from_moments, ShearMoments,
    ShearSolution, GAMMA_MAX,
};

use std::fmt;
use std::str::FromStr;

use crate::block::{ComplexBlock, C64};
use crate::error::{Error, Result};

/// Complex Givens rotation `[c, s; -s*, c]` on rows `(p, q)`, with
/// `c = cos(theta) >= 0` and `s = e^{j alpha} sin(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensParams {
    pub p: usize,
    pub q: usize,
    pub c: f64,
    pub s: C64,
}

impl GivensParams {
    pub fn identity(p: usize, q: usize) -> Self {
        Self {
            p,
            q,
            c: 1.0,
            s: C64::new(0.0, 0.0),
        }
    }

    /// From the angles `(theta, alpha)`.
    pub fn from_angles(p: usize, q: usize, theta: f64, alpha: f64) -> Self {
        Self {
            p,
            q,
            c: theta.cos(),
            s: C64::from_polar(theta.sin(), alpha),
        }
    }
}

/// Hermitian Shear rotation `[ch, sh; sh*, ch]` on rows `(p, q)`, with
/// `ch = cosh(gamma)` and `sh = e^{j beta} sinh(gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearParams {
    pub p: usize,
    pub q: usize,
    pub ch: f64,
    pub sh: C64,
}

impl ShearParams {
    pub fn identity(p: usize, q: usize) -> Self {
        Self::from_gamma_beta(p, q, 0.0, 0.0)
    }

    pub fn from_gamma_beta(p: usize, q: usize, gamma: f64, beta: f64) -> Self {
        Self {
            p,
            q,
            ch: gamma.cosh(),
            sh: C64::from_polar(1.0, beta) * gamma.sinh(),
        }
    }

    /// `(gamma, beta)` with `beta` in `[-pi/2, pi/2]`.
    pub fn gamma_beta(&self) -> (f64, f64) {
        let mag = self.sh.norm();
        if mag == 0.0 {
            return (0.0, 0.0);
        }
        let gamma = mag.asinh();
        let phase = self.sh.arg();
        let half_pi = std::f64::consts::FRAC_PI_2;
        if phase > half_pi {
            (-gamma, phase - std::f64::consts::PI)
        } else if phase < -half_pi {
            (-gamma, phase + std::f64::consts::PI)
        } else {
            (gamma, phase)
        }
    }

    /// The inverse Shear (`gamma -> -gamma`, same `beta`).
    pub fn inverse(&self) -> Self {
        Self {
            sh: -self.sh,
            ..*self
        }
    }

    /// `ch^2 - |sh|^2`, which is 1 for a valid Shear.
    pub fn determinant(&self) -> f64 {
        self.ch * self.ch - self.sh.norm_sqr()
    }
}

/// Row scaling `D_(pq)(lambda_p, lambda_q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParams {
    pub p: usize,
    pub q: usize,
    pub lambda_p: f64,
    pub lambda_q: f64,
}

/// A transform acting on two rows through a 2x2 matrix.
pub trait PairTransform {
    fn rows(&self) -> (usize, usize);
    /// `[[m_pp, m_pq], [m_qp, m_qq]]`.
    fn action(&self) -> [[C64; 2]; 2];
}

impl PairTransform for GivensParams {
    fn rows(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    fn action(&self) -> [[C64; 2]; 2] {
        let c = C64::new(self.c, 0.0);
        [[c, self.s], [-self.s.conj(), c]]
    }
}

impl PairTransform for ShearParams {
    fn rows(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    fn action(&self) -> [[C64; 2]; 2] {
        let ch = C64::new(self.ch, 0.0);
        [[ch, self.sh], [self.sh.conj(), ch]]
    }
}

/// Applies `t` in place to rows `p` and `q` of `block`.
pub fn apply_two_row<T: PairTransform>(t: &T, block: &mut ComplexBlock) -> Result<()> {
    let (p, q) = t.rows();
    let [[a, b], [c, d]] = t.action();
    let (row_p, row_q) = block.two_rows_mut(p, q)?;
    for (x, y) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = a * xp + b * yq;
        *y = c * xp + d * yq;
    }
    Ok(())
}

/// Which Shear parameter solver to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ShearVariant {
    /// Lagrange solution on the full 3-vector hyperbola (degree-6 secular equation).
    Exact,
    /// Linearized `beta`, Lagrange solution for `gamma` (degree-4 secular equation).
    SemiExact,
    /// Closed-form `beta` and `gamma` from the linearized stationarity condition.
    #[default]
    Linear,
}

impl ShearVariant {
    pub const ALL: [ShearVariant; 3] = [ShearVariant::Exact, ShearVariant::SemiExact, ShearVariant::Linear];

    pub fn name(self) -> &'static str {
        match self {
            ShearVariant::Exact => "exact",
            ShearVariant::SemiExact => "semi",
            ShearVariant::Linear => "linear",
        }
    }
}

impl fmt::Display for ShearVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShearVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ShearVariant::Exact),
            "semi" | "semi_exact" | "semi-exact" => Ok(ShearVariant::SemiExact),
            "linear" => Ok(ShearVariant::Linear),
            other => Err(Error::InvalidInput(format!("unknown shear variant '{other}'"))),
        }
    }
}
