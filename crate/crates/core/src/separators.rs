//! Batch separators: G-CMA (whitening + Givens sweeps), HG-CMA (Shear,
//! Givens and normalization per pair) and the LS-CMA baseline.
//!
//! Every transform is applied to the working block and to `W` alike, so
//! `work == W * Y` holds throughout a run.

use crate::block::{ComplexBlock, C64};
use crate::error::{Error, Result};
use crate::linalg::hermitian_pd_inverse;
use crate::rotations::{apply_norm, apply_two_row, givens_params, norm_params, ShearVariant};
use crate::signal::cm_cost;
use crate::whitening::fit_whitener;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatorConfig {
    pub sweeps: usize,
    pub shear: ShearVariant,
    /// Record the CM cost after every rotation (G-CMA) or pair update (HG-CMA).
    pub record_trace: bool,
    /// Stop once a sweep lowers the cost by less than this; 0 runs every sweep.
    pub epsilon: f64,
    /// Givens-only sweeps HG-CMA runs on the whitened block before its first
    /// Shear sweep. Not counted in `sweeps`.
    pub warmup_sweeps: usize,
}

impl Default for SeparatorConfig {
    fn default() -> Self {
        Self {
            sweeps: 10,
            shear: ShearVariant::Linear,
            record_trace: false,
            epsilon: 0.0,
            warmup_sweeps: 1,
        }
    }
}

impl SeparatorConfig {
    pub fn with_sweeps(self, sweeps: usize) -> Self {
        Self { sweeps, ..self }
    }

    pub fn with_shear(self, shear: ShearVariant) -> Self {
        Self { shear, ..self }
    }

    pub fn with_warmup(self, warmup_sweeps: usize) -> Self {
        Self { warmup_sweeps, ..self }
    }

    pub fn with_trace(self) -> Self {
        Self {
            record_trace: true,
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::InvalidInput("sweeps must be >= 1".into()));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidInput("epsilon must be >= 0".into()));
        }
        Ok(())
    }
}

/// Counters of Shear solver fallbacks and saturations during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ShearDiagnostics {
    pub fallbacks: usize,
    pub clamped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparatorState {
    /// `M x N` separator.
    pub w: ComplexBlock,
    /// `M x K` separated block, `W Y`.
    pub work: ComplexBlock,
    /// CM cost before the first update, then after each recorded update.
    pub cost_trace: Vec<f64>,
    /// Number of elementary updates (pair visits, or LS iterations).
    pub rotations: usize,
    pub sweeps_run: usize,
    pub shear: ShearDiagnostics,
}

impl SeparatorState {
    fn new(w: ComplexBlock, y: &ComplexBlock, record: bool) -> Result<Self> {
        let work = w.matmul(y)?;
        let cost_trace = if record { vec![cm_cost(&work)] } else { Vec::new() };
        Ok(Self {
            w,
            work,
            cost_trace,
            rotations: 0,
            sweeps_run: 0,
            shear: ShearDiagnostics::default(),
        })
    }

    pub fn final_cost(&self) -> f64 {
        cm_cost(&self.work)
    }
}

fn check_dims(y: &ComplexBlock, m: usize, min_k: usize) -> Result<()> {
    let (n, k) = y.shape();
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!("need 1 <= m <= n, got m={m}, n={n}")));
    }
    if k < min_k {
        return Err(Error::InvalidInput(format!("need k >= {min_k}, got k={k}")));
    }
    if !y.is_finite() {
        return Err(Error::InvalidInput("non-finite observations".into()));
    }
    Ok(())
}

fn givens_visit(st: &mut SeparatorState, p: usize, q: usize) -> Result<()> {
    let g = givens_params(&st.work, p, q)?;
    apply_two_row(&g, &mut st.work)?;
    apply_two_row(&g, &mut st.w)
}

fn sweep_loop(
    state: &mut SeparatorState,
    config: &SeparatorConfig,
    mut visit: impl FnMut(&mut SeparatorState, usize, usize) -> Result<()>,
) -> Result<()> {
    let m = state.work.rows();
    for _ in 0..config.sweeps {
        let before = if config.epsilon > 0.0 { cm_cost(&state.work) } else { 0.0 };
        for p in 0..m {
            for q in p + 1..m {
                visit(state, p, q)?;
                state.rotations += 1;
                if config.record_trace {
                    state.cost_trace.push(cm_cost(&state.work));
                }
            }
        }
        state.sweeps_run += 1;
        if config.epsilon > 0.0 && before - cm_cost(&state.work) < config.epsilon {
            break;
        }
    }
    Ok(())
}

/// G-CMA: whiten to `M` rows, then sweeps of CM-optimal Givens rotations over
/// all pairs `p < q` in lexicographic order. `W = V B`.
pub fn run_gcma(y: &ComplexBlock, m: usize, config: &SeparatorConfig) -> Result<SeparatorState> {
    config.validate()?;
    check_dims(y, m, m)?;
    let whitener = fit_whitener(y, m)?;
    let mut state = SeparatorState::new(whitener.b, y, config.record_trace)?;
    sweep_loop(&mut state, config, givens_visit)?;
    Ok(state)
}

/// HG-CMA: prewhitening (which also projects `N > M` observations onto the
/// signal subspace) and `warmup_sweeps` Givens-only sweeps, then per pair a
/// Shear (selected variant), a Givens rotation and a normalization of rows
/// `p, q`. The Shears undo what the finite-sample whitening leaves
/// non-unitary; the warm-up keeps the first Shears from pulling two
/// still-mixed outputs onto the same source.
pub fn run_hgcma(y: &ComplexBlock, m: usize, config: &SeparatorConfig) -> Result<SeparatorState> {
    config.validate()?;
    check_dims(y, m, m.max(2))?;
    let w0 = fit_whitener(y, m)?.b;
    let mut state = SeparatorState::new(w0, y, config.record_trace)?;
    let warmup = SeparatorConfig {
        sweeps: config.warmup_sweeps,
        epsilon: 0.0,
        ..*config
    };
    sweep_loop(&mut state, &warmup, givens_visit)?;
    state.sweeps_run = 0;
    let variant = config.shear;
    sweep_loop(&mut state, config, |st, p, q| {
        let h = variant.solve(&st.work, p, q)?;
        if h.fell_back {
            st.shear.fallbacks += 1;
        }
        if h.clamped {
            st.shear.clamped += 1;
        }
        apply_two_row(&h.params, &mut st.work)?;
        apply_two_row(&h.params, &mut st.w)?;
        let g = givens_params(&st.work, p, q)?;
        apply_two_row(&g, &mut st.work)?;
        apply_two_row(&g, &mut st.w)?;
        let d = norm_params(&st.work, p, q)?;
        apply_norm(&d, &mut st.work)?;
        apply_norm(&d, &mut st.w)
    })?;
    Ok(state)
}

/// Entrywise `z / |z|`, with zero entries kept at zero.
pub fn unit_modulus_projection(z: &ComplexBlock) -> ComplexBlock {
    ComplexBlock::from_fn(z.rows(), z.cols(), |i, j| {
        let v = z[(i, j)];
        let r = v.norm();
        if r > 0.0 {
            v / r
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Relative change of `W` below which LS-CMA stops.
pub const LSCMA_TOL: f64 = 1e-8;

/// LS-CMA: starting from the whitener, alternate the unit-modulus projection
/// `S = Z / |Z|` (zero entries stay zero) with the least-squares fit
/// `W = S Y^H (Y Y^H)^{-1}`.
pub fn run_lscma(y: &ComplexBlock, m: usize, iters: usize) -> Result<SeparatorState> {
    check_dims(y, m, m)?;
    let whitener = fit_whitener(y, m)?;
    let yh = y.adjoint();
    let gram = y.matmul(&yh)?;
    let gram_inv = hermitian_pd_inverse(&gram, 1e-12)?;
    let pinv = yh.matmul(&gram_inv)?;
    let mut state = SeparatorState::new(whitener.b, y, true)?;
    for _ in 0..iters {
        let target = unit_modulus_projection(&state.work);
        let w_next = target.matmul(&pinv)?;
        let change = w_next.sub(&state.w)?.frobenius_norm() / state.w.frobenius_norm().max(f64::MIN_POSITIVE);
        state.w = w_next;
        state.work = state.w.matmul(y)?;
        state.rotations += 1;
        state.cost_trace.push(cm_cost(&state.work));
        if change < LSCMA_TOL {
            break;
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{gen_sources, observe, resolve_ambiguity, ser, ChannelScenario, Constellation};

    fn consistent(state: &SeparatorState, y: &ComplexBlock) -> bool {
        let wy = state.w.matmul(y).unwrap();
        wy.sub(&state.work).unwrap().frobenius_norm() <= 1e-8 * state.work.frobenius_norm()
    }

    #[test]
    fn gcma_identity_channel_recovers_sources() {
        let s = gen_sources(2, 300, Constellation::Psk8, 1).unwrap();
        let st = run_gcma(&s, 2, &SeparatorConfig::default()).unwrap();
        let (_, aligned) = resolve_ambiguity(&st.work, &s).unwrap();
        assert_eq!(ser(&aligned, &s, Constellation::Psk8).unwrap(), 0.0);
        assert!(consistent(&st, &s));
    }

    #[test]
    fn gcma_trace_is_monotone() {
        let sc = ChannelScenario::generate(4, 5, 200, 15.0, Constellation::Psk8, 2).unwrap();
        let y = observe(&sc, &sc.sources().unwrap()).unwrap();
        let st = run_gcma(&y, 4, &SeparatorConfig::default().with_trace()).unwrap();
        assert_eq!(st.cost_trace.len(), 1 + 10 * 6);
        for w in st.cost_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0]));
        }
        assert!(consistent(&st, &y));
    }

    #[test]
    fn hgcma_fixed_point_on_separated_input() {
        // the whitener's eigenbasis may reorder rows, so W is a unit-modulus
        // generalized permutation rather than a diagonal
        let s = gen_sources(3, 100, Constellation::Psk8, 3).unwrap();
        for v in ShearVariant::ALL {
            let st = run_hgcma(&s, 3, &SeparatorConfig::default().with_shear(v)).unwrap();
            for i in 0..3 {
                let mut mags: Vec<f64> = st.w.row(i).iter().map(|x| x.norm()).collect();
                mags.sort_by(f64::total_cmp);
                assert!((mags[2] - 1.0).abs() < 1e-6, "{v} {mags:?}");
                assert!(mags[1] < 1e-6, "{v} {mags:?}");
            }
            let cols: std::collections::BTreeSet<usize> = (0..3)
                .map(|i| (0..3).max_by(|&a, &b| st.w[(i, a)].norm().total_cmp(&st.w[(i, b)].norm())).unwrap())
                .collect();
            assert_eq!(cols.len(), 3);
            assert!(st.final_cost() < 1e-12);
        }
    }

    #[test]
    fn hgcma_exact_trace_is_monotone_and_consistent() {
        let sc = ChannelScenario::generate(3, 4, 60, 20.0, Constellation::Psk8, 4).unwrap();
        let y = observe(&sc, &sc.sources().unwrap()).unwrap();
        let cfg = SeparatorConfig::default().with_shear(ShearVariant::Exact).with_trace();
        let st = run_hgcma(&y, 3, &cfg).unwrap();
        for w in st.cost_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9 * (1.0 + w[0]), "{} -> {}", w[0], w[1]);
        }
        assert!(consistent(&st, &y));
    }

    #[test]
    fn early_stop_cuts_sweeps() {
        let s = gen_sources(3, 100, Constellation::Psk8, 3).unwrap();
        let cfg = SeparatorConfig {
            epsilon: 1e-6,
            ..SeparatorConfig::default()
        };
        let st = run_hgcma(&s, 3, &cfg).unwrap();
        assert!(st.sweeps_run < 10);
        assert_eq!(st.rotations, 3 * (1 + st.sweeps_run));
        assert!(st.final_cost() < 1e-6);
    }

    #[test]
    fn lscma_fixed_point_on_orthogonal_cm_rows() {
        // DFT rows: unit modulus with sample covariance exactly I
        let k = 64;
        let s = ComplexBlock::from_fn(3, k, |i, j| {
            C64::from_polar(1.0, 2.0 * std::f64::consts::PI * ((i + 1) * j) as f64 / k as f64)
        });
        let w0 = fit_whitener(&s, 3).unwrap().b;
        let st = run_lscma(&s, 3, 20).unwrap();
        assert!(st.w.sub(&w0).unwrap().frobenius_norm() < 1e-10);
        assert_eq!(st.rotations, 1);
    }

    #[test]
    fn projection_keeps_zero_entries() {
        let z = ComplexBlock::from_vec(1, 3, vec![C64::new(0.0, 0.0), C64::new(3.0, 4.0), C64::new(0.0, -2.0)]).unwrap();
        let p = unit_modulus_projection(&z);
        assert_eq!(p[(0, 0)], C64::new(0.0, 0.0));
        assert!((p[(0, 1)] - C64::new(0.6, 0.8)).norm() < 1e-15);
        assert_eq!(p[(0, 2)], C64::new(0.0, -1.0));
    }

    #[test]
    fn lscma_separates_noiseless_mixture() {
        let sc = ChannelScenario::generate(2, 2, 500, f64::INFINITY, Constellation::Psk8, 6).unwrap();
        let s = sc.sources().unwrap();
        let y = observe(&sc, &s).unwrap();
        let st = run_lscma(&y, 2, 50).unwrap();
        let (_, aligned) = resolve_ambiguity(&st.work, &s).unwrap();
        assert_eq!(ser(&aligned, &s, Constellation::Psk8).unwrap(), 0.0);
        assert!(consistent(&st, &y));
    }

    #[test]
    fn rejects_bad_config() {
        let s = gen_sources(2, 10, Constellation::Psk8, 5).unwrap();
        assert!(run_gcma(&s, 2, &SeparatorConfig::default().with_sweeps(0)).is_err());
        assert!(run_gcma(&s, 3, &SeparatorConfig::default()).is_err());
        assert!(run_hgcma(&ComplexBlock::zeros(2, 1), 2, &SeparatorConfig::default()).is_err());
    }
}
