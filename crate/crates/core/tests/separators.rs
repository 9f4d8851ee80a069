//! End-to-end behaviour of the batch separators and the adaptive tracker on
//! simulated MIMO data.

use hgcma::adaptive::{adaptive_init, RotationStrategy};
use hgcma::separators::{run_gcma, run_hgcma, run_lscma, SeparatorConfig, SeparatorState};
use hgcma::signal::{
    gen_sources, observe, offdiag_residual, resolve_ambiguity, ser, sinr, ChannelScenario, Constellation,
};
use hgcma::rotations::ShearVariant;
use hgcma::{ComplexBlock, C64};
use std::time::Instant;

fn consistent(st: &SeparatorState, y: &ComplexBlock) -> bool {
    let wy = st.w.matmul(y).unwrap();
    wy.sub(&st.work).unwrap().frobenius_norm() <= 1e-8 * st.work.frobenius_norm()
}

#[test]
fn gcma_recovers_channel_with_long_blocks() {
    // the residual tracks the whitening error, which shrinks like 1/sqrt(K)
    let mut ok = 0;
    for t in 0..20 {
        let sc = ChannelScenario::generate(3, 3, 100_000, f64::INFINITY, Constellation::Psk8, 100 + t).unwrap();
        let y = observe(&sc, &sc.sources().unwrap()).unwrap();
        let st = run_gcma(&y, 3, &SeparatorConfig::default()).unwrap();
        let rep = sinr(&st.w, &sc.a, 0.0).unwrap();
        if offdiag_residual(&st.w.matmul(&sc.a).unwrap(), &rep.assignment) < 1e-2 {
            ok += 1;
        }
    }
    assert_eq!(ok, 20);
}

#[test]
fn gcma_is_scale_equivariant() {
    let sc = ChannelScenario::generate(3, 4, 300, 25.0, Constellation::Psk8, 11).unwrap();
    let s = sc.sources().unwrap();
    let y = observe(&sc, &s).unwrap();
    let cfg = SeparatorConfig::default();
    let (_, a) = resolve_ambiguity(&run_gcma(&y, 3, &cfg).unwrap().work, &s).unwrap();
    let (_, b) = resolve_ambiguity(&run_gcma(&y.scaled(C64::new(7.5, 0.0)), 3, &cfg).unwrap().work, &s).unwrap();
    assert!(a.sub(&b).unwrap().frobenius_norm() <= 1e-8 * a.frobenius_norm());
}

#[test]
fn hgcma_state_stays_consistent_for_every_variant() {
    let sc = ChannelScenario::generate(4, 6, 80, 15.0, Constellation::Qam16, 12).unwrap();
    let y = observe(&sc, &sc.sources().unwrap()).unwrap();
    for v in ShearVariant::ALL {
        let st = run_hgcma(&y, 4, &SeparatorConfig::default().with_shear(v)).unwrap();
        assert!(consistent(&st, &y), "{v}");
        assert_eq!(st.w.shape(), (4, 6));
        assert_eq!(st.rotations, 6 * 11);
    }
}

#[test]
fn hgcma_without_warmup_runs_the_plain_loop() {
    let sc = ChannelScenario::generate(3, 3, 60, 20.0, Constellation::Psk8, 13).unwrap();
    let y = observe(&sc, &sc.sources().unwrap()).unwrap();
    let st = run_hgcma(&y, 3, &SeparatorConfig::default().with_warmup(0).with_trace()).unwrap();
    assert_eq!(st.rotations, 30);
    assert_eq!(st.cost_trace.len(), 31);
    assert_eq!(st.sweeps_run, 10);
}

#[test]
fn hgcma_beats_gcma_on_short_blocks() {
    let (mut hg, mut g) = (0.0, 0.0);
    for t in 0..100 {
        let sc = ChannelScenario::generate(4, 6, 20, 25.0, Constellation::Psk8, 200 + t).unwrap();
        let y = observe(&sc, &sc.sources().unwrap()).unwrap();
        let cfg = SeparatorConfig::default();
        hg += sinr(&run_hgcma(&y, 4, &cfg).unwrap().w, &sc.a, sc.noise_var).unwrap().average.log10();
        g += sinr(&run_gcma(&y, 4, &cfg).unwrap().w, &sc.a, sc.noise_var).unwrap().average.log10();
    }
    assert!(hg > g, "{hg} vs {g}");
}

#[test]
fn lscma_separates_two_sources() {
    let mut ok = 0;
    for t in 0..100 {
        let sc = ChannelScenario::generate(2, 2, 500, f64::INFINITY, Constellation::Psk8, 300 + t).unwrap();
        let s = sc.sources().unwrap();
        let y = observe(&sc, &s).unwrap();
        let st = run_lscma(&y, 2, 50).unwrap();
        assert!(st.rotations <= 50);
        let (_, aligned) = resolve_ambiguity(&st.work, &s).unwrap();
        if ser(&aligned, &s, Constellation::Psk8).unwrap() == 0.0 {
            ok += 1;
        }
    }
    assert!(ok >= 90, "{ok}/100");
}

fn generalized_permutation_error(w: &ComplexBlock) -> f64 {
    // distance of |W| from a permutation matrix
    let m = w.rows();
    let mut err: f64 = 0.0;
    let mut used = vec![false; m];
    for i in 0..m {
        let j = (0..m).max_by(|&a, &b| w[(i, a)].norm().total_cmp(&w[(i, b)].norm())).unwrap();
        if used[j] {
            return f64::INFINITY;
        }
        used[j] = true;
        for c in 0..m {
            let want = if c == j { 1.0 } else { 0.0 };
            err = err.max((w[(i, c)].norm() - want).abs());
        }
    }
    err
}

#[test]
fn adaptive_keeps_separated_stream_fixed() {
    let s = gen_sources(4, 1000, Constellation::Psk8, 14).unwrap();
    for strategy in [RotationStrategy::FullSweep, RotationStrategy::SingleAuto, RotationStrategy::TwoMaxDeviation] {
        let mut st = adaptive_init(4, 8, strategy, None).unwrap();
        for t in 0..1000 {
            st.step(&s.column(t)).unwrap();
            assert!(generalized_permutation_error(st.w()) <= 1e-3, "{} at step {t}", strategy.name());
        }
    }
}

#[test]
fn adaptive_output_is_current_separator_applied_to_input() {
    let sc = ChannelScenario::generate(3, 3, 200, 30.0, Constellation::Psk8, 15).unwrap();
    let y = observe(&sc, &sc.sources().unwrap()).unwrap();
    let mut st = adaptive_init(3, 6, RotationStrategy::TwoMaxDeviation, None).unwrap();
    for t in 0..200 {
        let out = st.step(&y.column(t)).unwrap();
        let direct = st.w().mul_vec(&y.column(t)).unwrap();
        let diff: f64 = out.output.iter().zip(&direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff <= 1e-9 * (1.0 + direct.iter().map(|z| z.norm()).fold(0.0, f64::max)), "step {t}");
    }
}

fn time_steps(k: usize, y: &ComplexBlock) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..5 {
        let mut st = adaptive_init(5, k, RotationStrategy::TwoMaxDeviation, None).unwrap();
        let cols: Vec<Vec<C64>> = (0..y.cols()).map(|t| y.column(t)).collect();
        let start = Instant::now();
        for c in &cols {
            st.step(c).unwrap();
        }
        best = best.min(start.elapsed().as_secs_f64());
    }
    best
}

#[test]
fn adaptive_step_cost_is_linear_in_window() {
    let sc = ChannelScenario::generate(5, 5, 4000, 20.0, Constellation::Psk8, 16).unwrap();
    let y = observe(&sc, &sc.sources().unwrap()).unwrap();
    let short = time_steps(100, &y);
    let long = time_steps(200, &y);
    assert!(long <= 2.5 * short, "K=100: {short:.4}s, K=200: {long:.4}s");
}
