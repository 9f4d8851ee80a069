//! Low-degree real polynomials and their real roots.
//!
//! Roots are isolated recursively: the real roots of `p'` split the
//! Cauchy-bounded search interval into monotone pieces, each piece with a
//! sign change holds exactly one root, which is then polished by a
//! safeguarded Newton/bisection iteration. Critical points where `p`
//! (numerically) vanishes are even-multiplicity roots and are kept as well.

use crate::error::{Error, Result};

/// Maximum supported degree.
pub const MAX_DEGREE: usize = 6;

/// Roots closer than this are reported once.
pub const ROOT_CLUSTER_TOL: f64 = 1e-7;

/// Real polynomial `c_0 + c_1 x + ... + c_d x^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyReal {
    coeffs: Vec<f64>,
}

impl PolyReal {
    /// Coefficients in ascending powers. Trailing zero coefficients are dropped.
    pub fn from_ascending(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite polynomial coefficient".into()));
        }
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::InvalidInput(format!(
                "degree {} exceeds {MAX_DEGREE}",
                coeffs.len() - 1
            )));
        }
        Ok(Self { coeffs })
    }

    /// Coefficients with the leading (highest-power) term first.
    pub fn from_descending(coeffs: &[f64]) -> Result<Self> {
        Self::from_ascending(coeffs.iter().rev().copied().collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs, x)
    }

    /// `|p(x)|` bound used as the acceptance tolerance for a root `x`.
    pub fn root_tolerance(&self, x: f64) -> f64 {
        1e-8 * self.max_abs_coeff() * x.abs().max(1.0).powi(self.degree() as i32)
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| a * i as f64)
        .collect()
}

/// All distinct real roots of `p`, ascending. Roots within
/// [`ROOT_CLUSTER_TOL`] of each other are collapsed.
pub fn real_roots(p: &PolyReal) -> Result<Vec<f64>> {
    if p.is_zero() {
        return Err(Error::InvalidInput("zero polynomial has no isolated roots".into()));
    }
    let mut c = p.coeffs.clone();
    // Drop negligible leading terms so the Cauchy bound stays meaningful.
    let max = p.max_abs_coeff();
    while c.len() > 1 && c.last().is_some_and(|l| l.abs() <= f64::EPSILON * max) {
        c.pop();
    }
    if c.len() == 1 {
        return Ok(Vec::new());
    }
    let lead = *c.last().unwrap();
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let bound = 1.0 + monic[..monic.len() - 1].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut roots = isolate(&monic, -bound - 1.0, bound + 1.0);
    roots.sort_by(f64::total_cmp);

    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    for x in roots {
        match out.last_mut() {
            Some(prev) if (x - *prev).abs() <= ROOT_CLUSTER_TOL => {
                if horner(&monic, x).abs() < horner(&monic, *prev).abs() {
                    *prev = x;
                }
            }
            _ => out.push(x),
        }
    }
    Ok(out)
}

fn isolate(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let degree = c.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    if degree == 1 {
        let x = -c[0] / c[1];
        return if x > lo && x < hi { vec![x] } else { Vec::new() };
    }
    let mut critical = isolate(&derivative(c), lo, hi);
    critical.sort_by(f64::total_cmp);
    critical.dedup();
    let mut roots = Vec::new();
    for &x in &critical {
        // a touching (even-multiplicity) root evaluates to rounding noise
        let magnitude = horner(&c.iter().map(|a| a.abs()).collect::<Vec<_>>(), x.abs());
        let touch = 32.0 * degree as f64 * f64::EPSILON * magnitude;
        if horner(c, x).abs() <= touch {
            roots.push(x);
        }
    }
    let mut points = Vec::with_capacity(critical.len() + 2);
    points.push(lo);
    points.extend(critical.iter().copied().filter(|&x| x > lo && x < hi));
    points.push(hi);
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (horner(c, a), horner(c, b));
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            roots.push(polish(c, a, b, fa));
        }
    }
    if horner(c, hi) == 0.0 {
        roots.push(hi);
    }
    roots
}

/// Safeguarded Newton iteration inside a sign-change bracket.
fn polish(c: &[f64], mut a: f64, mut b: f64, fa: f64) -> f64 {
    let dc = derivative(c);
    let sign_a = fa.signum();
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let fx = horner(c, x);
        if fx == 0.0 {
            return x;
        }
        if fx.signum() == sign_a {
            a = x;
        } else {
            b = x;
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            break;
        }
        let d = horner(&dc, x);
        let newton = if d != 0.0 { x - fx / d } else { f64::NAN };
        x = if newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
    }
    x
}
