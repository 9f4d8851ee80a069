//! Helpers shared by the integration tests: seeded random blocks, direct
//! pair-cost evaluation and a zooming grid search.

#![allow(dead_code)]

use hgcma::signal::{gen_sources, Constellation};
use hgcma::{ComplexBlock, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, std: f64) -> C64 {
    // Box-Muller, kept local so the oracles do not share code with the library
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt() * std / std::f64::consts::SQRT_2;
    C64::from_polar(r, 2.0 * std::f64::consts::PI * u2)
}

/// A random `2 x k` block: for even seeds a noisy 2x2 mixture of 8-PSK
/// sources, for odd seeds i.i.d. complex Gaussian entries.
pub fn random_pair_block(seed: u64, k: usize) -> ComplexBlock {
    let mut r = rng(seed);
    if seed % 2 == 0 {
        let s = gen_sources(2, k, Constellation::Psk8, seed).unwrap();
        let mix = ComplexBlock::from_fn(2, 2, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                gaussian(&mut r, 0.6)
            }
        });
        let mut y = mix.matmul(&s).unwrap();
        for z in y.as_mut_slice() {
            *z += gaussian(&mut r, 0.1);
        }
        y
    } else {
        ComplexBlock::from_fn(2, k, |_, _| gaussian(&mut r, 1.0))
    }
}

/// `sum_k (|z_pk|^2 - 1)^2 + (|z_qk|^2 - 1)^2` after `[a, b; c, d]` acts on rows `(0, 1)`.
pub fn pair_cost(y: &ComplexBlock, a: C64, b: C64, c: C64, d: C64) -> f64 {
    y.row(0)
        .iter()
        .zip(y.row(1))
        .map(|(&yp, &yq)| {
            let zp = a * yp + b * yq;
            let zq = c * yp + d * yq;
            (zp.norm_sqr() - 1.0).powi(2) + (zq.norm_sqr() - 1.0).powi(2)
        })
        .sum()
}

pub fn givens_cost(y: &ComplexBlock, theta: f64, alpha: f64) -> f64 {
    let c = C64::new(theta.cos(), 0.0);
    let s = C64::from_polar(theta.sin(), alpha);
    pair_cost(y, c, s, -s.conj(), c)
}

pub fn shear_cost(y: &ComplexBlock, gamma: f64, beta: f64) -> f64 {
    let ch = C64::new(gamma.cosh(), 0.0);
    let sh = C64::from_polar(gamma.sinh(), beta);
    pair_cost(y, ch, sh, sh.conj(), ch)
}

/// Minimum of `f` over a box by an `n0 x n1` grid followed by `levels`
/// rounds of 21x21 grids around the incumbent, each spanning two cells.
pub fn zoom_min2(f: impl Fn(f64, f64) -> f64, lo: [f64; 2], hi: [f64; 2], n: [usize; 2], levels: usize) -> (f64, [f64; 2]) {
    let mut best = (f64::INFINITY, [0.0, 0.0]);
    let span = |i: usize| if n[i] == 0 { 0.0 } else { (hi[i] - lo[i]) / n[i] as f64 };
    let mut step = [span(0), span(1)];
    for i in 0..=n[0] {
        for j in 0..=n[1] {
            let x = [lo[0] + i as f64 * step[0], lo[1] + j as f64 * step[1]];
            let v = f(x[0], x[1]);
            if v < best.0 {
                best = (v, x);
            }
        }
    }
    for _ in 0..levels {
        let centre = best.1;
        step = [step[0] / 5.0, step[1] / 5.0];
        for i in -10..=10 {
            for j in -10..=10 {
                let x = [centre[0] + i as f64 * step[0], centre[1] + j as f64 * step[1]];
                let v = f(x[0], x[1]);
                if v < best.0 {
                    best = (v, x);
                }
            }
        }
    }
    best
}

/// One-dimensional version of [`zoom_min2`].
pub fn zoom_min1(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize, levels: usize) -> (f64, f64) {
    let (v, x) = zoom_min2(|a, _| f(a), [lo, 0.0], [hi, 0.0], [n, 0], levels);
    (v, x[0])
}
