//! MIMO signal model `Y = A S + B` and the scores used to judge a separator:
//! CM cost, per-output SINR, ambiguity resolution and symbol error rate.
//!
//! Randomness comes from `ChaCha8Rng` with one stream per role (channel,
//! sources, noise), so a scenario is reproducible from its seed alone.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::block::{ComplexBlock, C64};
use crate::error::{Error, Result};
use crate::linalg::eig_hermitian;

/// RNG stream used for the channel draw.
pub const STREAM_CHANNEL: u64 = 1;
/// RNG stream used for the source symbols.
pub const STREAM_SOURCES: u64 = 2;
/// RNG stream used for the additive noise.
pub const STREAM_NOISE: u64 = 3;

/// A `ChaCha8Rng` seeded with `seed` and switched to `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Unit average power symbol alphabets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Constellation {
    #[default]
    Psk8,
    Qam16,
}

impl Constellation {
    pub fn points(self) -> Vec<C64> {
        match self {
            Constellation::Psk8 => (0..8)
                .map(|k| C64::from_polar(1.0, k as f64 * std::f64::consts::FRAC_PI_4))
                .collect(),
            Constellation::Qam16 => {
                let scale = 1.0 / 10.0_f64.sqrt();
                let levels = [-3.0, -1.0, 1.0, 3.0];
                levels
                    .iter()
                    .flat_map(|&re| levels.iter().map(move |&im| C64::new(re * scale, im * scale)))
                    .collect()
            }
        }
    }

    /// Index of the nearest point (smallest index on ties).
    pub fn decide(self, z: C64, points: &[C64]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    pub fn name(self) -> &'static str {
        match self {
            Constellation::Psk8 => "psk8",
            Constellation::Qam16 => "qam16",
        }
    }
}

impl fmt::Display for Constellation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Constellation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "psk8" | "8psk" => Ok(Constellation::Psk8),
            "qam16" | "16qam" => Ok(Constellation::Qam16),
            other => Err(Error::InvalidInput(format!("unknown constellation '{other}'"))),
        }
    }
}

/// `M x K` block of i.i.d. uniformly drawn constellation symbols.
pub fn gen_sources(m: usize, k: usize, constellation: Constellation, seed: u64) -> Result<ComplexBlock> {
    if m == 0 || k == 0 {
        return Err(Error::InvalidInput("sources need m >= 1 and k >= 1".into()));
    }
    let points = constellation.points();
    let mut rng = stream_rng(seed, STREAM_SOURCES);
    Ok(ComplexBlock::from_fn(m, k, |_, _| points[rng.random_range(0..points.len())]))
}

fn complex_gaussian(rng: &mut ChaCha8Rng, variance: f64) -> C64 {
    let sd = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(sd * re, sd * im)
}

/// Ratio of smallest to largest singular value of a tall matrix.
pub fn singular_value_ratio(a: &ComplexBlock) -> Result<f64> {
    let gram = a.adjoint().matmul(a)?;
    let eig = eig_hermitian(&gram)?;
    let hi = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let lo = eig.values[0].max(0.0);
    if hi == 0.0 {
        return Ok(0.0);
    }
    Ok((lo / hi).sqrt())
}

const MAX_CHANNEL_DRAWS: usize = 1000;

/// `N x M` channel with unit-variance circular Gaussian entries, redrawn until
/// its singular value ratio exceeds `1e-6`.
pub fn gen_channel(m: usize, n: usize, seed: u64) -> Result<ComplexBlock> {
    if m == 0 || n < m {
        return Err(Error::InvalidInput(format!("channel needs 1 <= m <= n, got m={m}, n={n}")));
    }
    let mut rng = stream_rng(seed, STREAM_CHANNEL);
    for _ in 0..MAX_CHANNEL_DRAWS {
        let a = ComplexBlock::from_fn(n, m, |_, _| complex_gaussian(&mut rng, 1.0));
        if singular_value_ratio(&a)? > 1e-6 {
            return Ok(a);
        }
    }
    Err(Error::Singular("no full-rank channel drawn".into()))
}

/// Noise variance for a target SNR: `M / 10^(snr_db / 10)`.
pub fn noise_var_from_snr(m: usize, snr_db: f64) -> f64 {
    m as f64 / 10.0_f64.powf(snr_db / 10.0)
}

/// A channel draw together with the parameters needed to regenerate a trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelScenario {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub a: ComplexBlock,
    pub noise_var: f64,
    pub constellation: Constellation,
    pub seed: u64,
}

impl ChannelScenario {
    pub fn generate(
        m: usize,
        n: usize,
        k: usize,
        snr_db: f64,
        constellation: Constellation,
        seed: u64,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be >= 1".into()));
        }
        Ok(Self {
            m,
            n,
            k,
            a: gen_channel(m, n, seed)?,
            noise_var: noise_var_from_snr(m, snr_db),
            constellation,
            seed,
        })
    }

    /// Replaces the channel (e.g. by the identity) keeping the other fields.
    pub fn with_channel(mut self, a: ComplexBlock) -> Result<Self> {
        if a.shape() != (self.n, self.m) {
            return Err(Error::DimensionMismatch(format!(
                "channel {:?}, expected {:?}",
                a.shape(),
                (self.n, self.m)
            )));
        }
        self.a = a;
        Ok(self)
    }

    pub fn sources(&self) -> Result<ComplexBlock> {
        gen_sources(self.m, self.k, self.constellation, self.seed)
    }
}

/// `Y = A S + B`, with `B` circular Gaussian of variance `noise_var` per entry.
pub fn observe(scenario: &ChannelScenario, s: &ComplexBlock) -> Result<ComplexBlock> {
    if s.rows() != scenario.m {
        return Err(Error::DimensionMismatch(format!(
            "sources have {} rows, scenario has m={}",
            s.rows(),
            scenario.m
        )));
    }
    let mut y = scenario.a.matmul(s)?;
    if scenario.noise_var > 0.0 {
        let mut rng = stream_rng(scenario.seed, STREAM_NOISE);
        for z in y.as_mut_slice() {
            *z += complex_gaussian(&mut rng, scenario.noise_var);
        }
    }
    Ok(y)
}

/// `sum_ij (|z_ij|^2 - 1)^2`.
pub fn cm_cost(z: &ComplexBlock) -> f64 {
    z.as_slice().iter().map(|v| (v.norm_sqr() - 1.0).powi(2)).sum()
}

/// CM deviation of a single row, `sum_j (|z_j|^2 - 1)^2`.
pub fn row_cm_cost(row: &[C64]) -> f64 {
    row.iter().map(|v| (v.norm_sqr() - 1.0).powi(2)).sum()
}

/// Assignment `perm` (row `k` -> column `perm[k]`) maximizing
/// `sum_k weights[k][perm[k]]`.
///
/// Exact (bitmask dynamic programming) up to 16 columns, greedy beyond.
pub fn best_assignment(weights: &[Vec<f64>]) -> Vec<usize> {
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    if n > 16 {
        return greedy_assignment(weights);
    }
    let full = 1usize << n;
    // value[mask]: best sum using rows 0..popcount(mask) on column set mask
    let mut value = vec![f64::NEG_INFINITY; full];
    let mut choice = vec![usize::MAX; full];
    value[0] = 0.0;
    for mask in 0..full {
        if value[mask] == f64::NEG_INFINITY {
            continue;
        }
        let row = mask.count_ones() as usize;
        if row == n {
            continue;
        }
        for col in 0..n {
            if mask & (1 << col) != 0 {
                continue;
            }
            let next = mask | (1 << col);
            let v = value[mask] + weights[row][col];
            if v > value[next] {
                value[next] = v;
                choice[next] = col;
            }
        }
    }
    let mut perm = vec![0; n];
    let mut mask = full - 1;
    for row in (0..n).rev() {
        let col = choice[mask];
        perm[row] = col;
        mask &= !(1 << col);
    }
    perm
}

fn greedy_assignment(weights: &[Vec<f64>]) -> Vec<usize> {
    let n = weights.len();
    let mut entries: Vec<(usize, usize)> = (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).collect();
    entries.sort_by(|a, b| weights[b.0][b.1].total_cmp(&weights[a.0][a.1]).then(a.cmp(b)));
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for (r, c) in entries {
        if perm[r] == usize::MAX && !used[c] {
            perm[r] = c;
            used[c] = true;
        }
    }
    perm
}

/// Per-output SINR of the global response `G = W A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrReport {
    /// Linear SINR of each output, in output order.
    pub per_output: Vec<f64>,
    /// Mean of `per_output` (`+inf` if any output is noise- and interference-free).
    pub average: f64,
    /// Source assigned to each output.
    pub assignment: Vec<usize>,
}

/// `SINR_k = |g_kl|^2 / (sum_{i != l} |g_ki|^2 + noise_var ||w_k||^2)` where `l`
/// is the source assigned to output `k` by maximizing the total share of
/// each output's power carried by its source.
pub fn sinr(w: &ComplexBlock, a: &ComplexBlock, noise_var: f64) -> Result<SinrReport> {
    if w.cols() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "W is {:?}, A is {:?}",
            w.shape(),
            a.shape()
        )));
    }
    if w.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "W has {} outputs for {} sources",
            w.rows(),
            a.cols()
        )));
    }
    let g = w.matmul(a)?;
    let m = g.rows();
    let noise: Vec<f64> = (0..m).map(|k| noise_var * w.row_norm_sqr(k)).collect();
    let weights: Vec<Vec<f64>> = (0..m)
        .map(|k| {
            let total = g.row_norm_sqr(k) + noise[k];
            g.row(k)
                .iter()
                .map(|x| if total > 0.0 { x.norm_sqr() / total } else { 0.0 })
                .collect()
        })
        .collect();
    let assignment = best_assignment(&weights);
    let per_output: Vec<f64> = (0..m)
        .map(|k| {
            let l = assignment[k];
            let num = g[(k, l)].norm_sqr();
            let den = g.row_norm_sqr(k) - num + noise[k];
            if den > 0.0 {
                num / den
            } else if num > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect();
    let average = per_output.iter().sum::<f64>() / m as f64;
    Ok(SinrReport {
        per_output,
        average,
        assignment,
    })
}

/// `10 log10(x)`; `+inf` maps to `+inf` and `0` to `-inf`.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Largest `|g_ki| / |g_k,perm[k]|` over off-assignment entries: zero for a
/// perfect permutation-times-diagonal response.
pub fn offdiag_residual(g: &ComplexBlock, assignment: &[usize]) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..g.rows() {
        let peak = g[(k, assignment[k])].norm();
        for (i, x) in g.row(k).iter().enumerate() {
            if i != assignment[k] {
                let ratio = if peak > 0.0 { x.norm() / peak } else { f64::INFINITY };
                worst = worst.max(ratio);
            }
        }
    }
    worst
}

/// Output permutation and complex scales relating separated rows to sources.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguityMap {
    /// `perm[k]` is the source matched to output row `k`.
    pub perm: Vec<usize>,
    /// Least-squares scale applied to output row `k`.
    pub scales: Vec<C64>,
}

/// Matches rows of `z` to rows of `s` maximizing the total normalized
/// correlation `|<z_k, s_l>| / (||z_k|| ||s_l||)`, scales each matched row by
/// `<s, z> / <z, z>`, and returns the rows reordered into source order.
/// A zero row of `z` gets scale 0.
pub fn resolve_ambiguity(z: &ComplexBlock, s: &ComplexBlock) -> Result<(AmbiguityMap, ComplexBlock)> {
    if z.shape() != s.shape() {
        return Err(Error::DimensionMismatch(format!("Z is {:?}, S is {:?}", z.shape(), s.shape())));
    }
    let m = z.rows();
    let inner = |zr: &[C64], sr: &[C64]| -> C64 { zr.iter().zip(sr).map(|(a, b)| a.conj() * b).sum() };
    let weights: Vec<Vec<f64>> = (0..m)
        .map(|k| {
            let nz = z.row_norm_sqr(k).sqrt();
            (0..m)
                .map(|l| {
                    let ns = s.row_norm_sqr(l).sqrt();
                    if nz > 0.0 && ns > 0.0 {
                        inner(z.row(k), s.row(l)).norm() / (nz * ns)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let perm = best_assignment(&weights);
    let mut aligned = ComplexBlock::zeros(m, z.cols());
    let mut scales = Vec::with_capacity(m);
    for k in 0..m {
        let l = perm[k];
        let energy = z.row_norm_sqr(k);
        let scale = if energy > 0.0 {
            inner(z.row(k), s.row(l)) / energy
        } else {
            C64::new(0.0, 0.0)
        };
        for (dst, src) in aligned.row_mut(l).iter_mut().zip(z.row(k)) {
            *dst = scale * src;
        }
        scales.push(scale);
    }
    Ok((AmbiguityMap { perm, scales }, aligned))
}

/// Fraction of entries of the aligned block decided to a different symbol
/// than the corresponding source entry.
pub fn ser(aligned: &ComplexBlock, s: &ComplexBlock, constellation: Constellation) -> Result<f64> {
    if aligned.shape() != s.shape() {
        return Err(Error::DimensionMismatch(format!(
            "aligned is {:?}, S is {:?}",
            aligned.shape(),
            s.shape()
        )));
    }
    let points = constellation.points();
    let errors = aligned
        .as_slice()
        .iter()
        .zip(s.as_slice())
        .filter(|(z, x)| constellation.decide(**z, &points) != constellation.decide(**x, &points))
        .count();
    Ok(errors as f64 / aligned.as_slice().len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn constellations_have_unit_power() {
        for cst in [Constellation::Psk8, Constellation::Qam16] {
            let pts = cst.points();
            let power = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / pts.len() as f64;
            assert!((power - 1.0).abs() < 1e-15, "{cst}");
        }
        assert!(Constellation::Psk8.points().iter().all(|p| (p.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn sources_are_deterministic_points() {
        let a = gen_sources(3, 100, Constellation::Psk8, 7).unwrap();
        let b = gen_sources(3, 100, Constellation::Psk8, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.as_slice().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        assert_ne!(a, gen_sources(3, 100, Constellation::Psk8, 8).unwrap());
    }

    #[test]
    fn qam_power_law_of_large_numbers() {
        let s = gen_sources(1, 100_000, Constellation::Qam16, 3).unwrap();
        let p = s.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / 1e5;
        assert!((p - 1.0).abs() < 0.02, "{p}");
    }

    #[test]
    fn channel_moments_and_determinism() {
        assert_eq!(gen_channel(5, 7, 11).unwrap(), gen_channel(5, 7, 11).unwrap());
        let scalar = gen_channel(1, 1, 2).unwrap();
        assert!(scalar[(0, 0)].norm() > 0.0);
        let mut sum = 0.0;
        let mut count = 0.0;
        for seed in 0..1000 {
            let a = gen_channel(5, 7, seed).unwrap();
            sum += a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
            count += 35.0;
        }
        let var = sum / count;
        assert!((var - 1.0).abs() < 0.1, "{var}");
        assert!(gen_channel(3, 2, 0).is_err());
    }

    #[test]
    fn noiseless_observation_is_exact_product() {
        let sc = ChannelScenario::generate(2, 3, 50, f64::INFINITY, Constellation::Psk8, 5).unwrap();
        assert_eq!(sc.noise_var, 0.0);
        let s = sc.sources().unwrap();
        assert_eq!(observe(&sc, &s).unwrap(), sc.a.matmul(&s).unwrap());
        let id = sc.clone().with_channel(ComplexBlock::identity(2));
        assert!(id.is_err());
        let sq = ChannelScenario::generate(2, 2, 50, f64::INFINITY, Constellation::Psk8, 5)
            .unwrap()
            .with_channel(ComplexBlock::identity(2))
            .unwrap();
        assert_eq!(observe(&sq, &s).unwrap(), s);
    }

    #[test]
    fn noise_power_matches_variance() {
        let mut sc = ChannelScenario::generate(3, 4, 100_000, 0.0, Constellation::Psk8, 1).unwrap();
        sc.noise_var = 0.1;
        let s = sc.sources().unwrap();
        let y = observe(&sc, &s).unwrap();
        let noise = y.sub(&sc.a.matmul(&s).unwrap()).unwrap();
        let per_entry = noise.frobenius_norm().powi(2) / (4.0 * 100_000.0);
        assert!((per_entry - 0.1).abs() < 0.1 * 0.05, "{per_entry}");
    }

    #[test]
    fn snr_convention() {
        assert!((noise_var_from_snr(5, 20.0) - 0.05).abs() < 1e-15);
        assert_eq!(noise_var_from_snr(5, 0.0), 5.0);
    }

    #[test]
    fn cm_cost_examples() {
        let unit = ComplexBlock::from_fn(2, 3, |i, j| C64::from_polar(1.0, (i + 2 * j) as f64));
        assert!(cm_cost(&unit) < 1e-28);
        assert_eq!(cm_cost(&ComplexBlock::zeros(1, 1)), 1.0);
        let two = ComplexBlock::from_vec(1, 1, vec![c(0.0, 2.0)]).unwrap();
        assert_eq!(cm_cost(&two), 9.0);
    }

    #[test]
    fn sinr_for_inverse_channel() {
        let a = ComplexBlock::from_rows(&[vec![c(2.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.5)]]).unwrap();
        let w = ComplexBlock::from_rows(&[vec![c(0.5, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, -2.0)]]).unwrap();
        let rep = sinr(&w, &a, 0.01).unwrap();
        assert_eq!(rep.assignment, vec![0, 1]);
        assert!((rep.per_output[0] - 1.0 / (0.01 * 0.25)).abs() < 1e-9);
        assert!((rep.per_output[1] - 1.0 / (0.01 * 4.0)).abs() < 1e-9);
        let zero = sinr(&ComplexBlock::zeros(2, 2), &a, 0.01).unwrap();
        assert_eq!(zero.average, 0.0);
        let noiseless = sinr(&w, &a, 0.0).unwrap();
        assert_eq!(noiseless.average, f64::INFINITY);
    }

    #[test]
    fn assignment_small_cases() {
        assert_eq!(best_assignment(&[vec![0.1, 0.9], vec![0.8, 0.2]]), vec![1, 0]);
        // greedy would take 0.9 first and lose
        let w = vec![vec![0.9, 0.8], vec![0.7, 0.0]];
        assert_eq!(best_assignment(&w), vec![1, 0]);
        assert_eq!(greedy_assignment(&w), vec![0, 1]);
    }

    #[test]
    fn ambiguity_identity_and_swap() {
        let s = gen_sources(2, 40, Constellation::Psk8, 4).unwrap();
        let (map, aligned) = resolve_ambiguity(&s, &s).unwrap();
        assert_eq!(map.perm, vec![0, 1]);
        assert!(map.scales.iter().all(|x| (x - c(1.0, 0.0)).norm() < 1e-12));
        assert!(aligned.sub(&s).unwrap().frobenius_norm() < 1e-12);

        let g = C64::from_polar(2.0, std::f64::consts::FRAC_PI_4);
        let z = ComplexBlock::from_fn(2, 40, |i, j| g * s[(1 - i, j)]);
        let (map, aligned) = resolve_ambiguity(&z, &s).unwrap();
        assert_eq!(map.perm, vec![1, 0]);
        let want = C64::from_polar(0.5, -std::f64::consts::FRAC_PI_4);
        assert!(map.scales.iter().all(|x| (x - want).norm() < 1e-12));
        assert!(aligned.sub(&s).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn ambiguity_zero_row_has_zero_scale() {
        let s = gen_sources(2, 10, Constellation::Psk8, 4).unwrap();
        let mut z = s.clone();
        z.row_mut(1).iter_mut().for_each(|x| *x = c(0.0, 0.0));
        let (map, _) = resolve_ambiguity(&z, &s).unwrap();
        assert_eq!(map.perm, vec![0, 1]);
        assert_eq!(map.scales[1], c(0.0, 0.0));
    }

    #[test]
    fn ser_examples() {
        let s = gen_sources(2, 200, Constellation::Psk8, 9).unwrap();
        assert_eq!(ser(&s, &s, Constellation::Psk8).unwrap(), 0.0);
        assert_eq!(ser(&s.scaled(c(-1.0, 0.0)), &s, Constellation::Psk8).unwrap(), 1.0);
        let noisy = ComplexBlock::from_fn(2, 200, |i, j| s[(i, j)] + c(1e-6, -1e-6));
        assert_eq!(ser(&noisy, &s, Constellation::Psk8).unwrap(), 0.0);
        let q = gen_sources(2, 200, Constellation::Qam16, 9).unwrap();
        assert_eq!(ser(&q, &q, Constellation::Qam16).unwrap(), 0.0);
    }
}
