mod common;

use common::{cllr_direct, grid_minimize, objective_1d, small_overlapping_sets};
use llrcal::{
    apply, cllr, figure_config, model_to_affine, objective, sample_parallel, sample_scores,
    train_calibration, train_fusion, CalibrationWeights, Error, FigureId, LabeledScores, LlrSet,
    ParallelScores, TrainConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn calibrated(w: &CalibrationWeights, s: &LabeledScores) -> LlrSet {
    LlrSet {
        so: s.so.iter().map(|&x| w.apply(&[x]).unwrap()).collect(),
        do_: s.do_.iter().map(|&x| w.apply(&[x]).unwrap()).collect(),
    }
}

#[test]
fn recovers_figure4_and_figure7_maps() {
    let cases = [(FigureId::Fig4, 0.03), (FigureId::Fig7, 0.05)];
    for (id, tol) in cases {
        let cfg = figure_config(id);
        let s = sample_scores(&cfg.model, 200_000, 200_000, 2013).unwrap();
        let w = train_calibration(&s, &TrainConfig::default()).unwrap();
        assert!((w.alpha - cfg.expected_alpha).abs() < tol, "{id}: {w:?}");
        assert!((w.betas[0] - cfg.expected_beta).abs() < tol, "{id}: {w:?}");
    }
}

#[test]
fn training_is_deterministic() {
    let s = sample_scores(&figure_config(FigureId::Fig5).model, 500, 300, 9).unwrap();
    let a = train_calibration(&s, &TrainConfig::default()).unwrap();
    let b = train_calibration(&s, &TrainConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn ridge_solution_matches_grid_oracle() {
    let so = [1.0];
    let do_ = [-1.0];
    let (ga, gb) = grid_minimize(|a, b| objective_1d(a, b, &so, &do_, 0.001), (0.0, 0.0), 20.0);
    let w = train_calibration(
        &LabeledScores::new(so.to_vec(), do_.to_vec()).unwrap(),
        &TrainConfig::with_ridge(0.001),
    )
    .unwrap();
    assert!((w.alpha - ga).abs() < 1e-4, "{} vs {ga}", w.alpha);
    assert!((w.betas[0] - gb).abs() < 1e-4, "{} vs {gb}", w.betas[0]);
}

#[test]
fn unregularized_solutions_match_grid_oracle() {
    let m = figure_config(FigureId::Fig7).model;
    for s in small_overlapping_sets(&m, 5, 300) {
        let (ga, gb) = grid_minimize(|a, b| objective_1d(a, b, &s.so, &s.do_, 0.0), (0.0, 1.0), 20.0);
        let w = train_calibration(&s, &TrainConfig::default()).unwrap();
        assert!((w.alpha - ga).abs() < 1e-4 && (w.betas[0] - gb).abs() < 1e-4);
    }
}

#[test]
fn trained_weights_beat_random_perturbations() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let m = figure_config(FigureId::Fig4).model;
    for s in small_overlapping_sets(&m, 10, 1) {
        let data = ParallelScores::from(&s);
        let cfg = TrainConfig::default();
        let w = train_calibration(&s, &cfg).unwrap();
        let best = objective(&w, &data, &cfg).unwrap();
        for _ in 0..1000 {
            let scale = 10f64.powf(rng.random_range(-4.0..1.0));
            let p = CalibrationWeights::new(
                w.alpha + scale * rng.random_range(-1.0..1.0),
                vec![w.betas[0] + scale * rng.random_range(-1.0..1.0)],
            )
            .unwrap();
            assert!(objective(&p, &data, &cfg).unwrap() >= best);
        }
    }
}

#[test]
fn affine_equivariance() {
    let m = figure_config(FigureId::Fig5).model;
    let cfg = TrainConfig::default();
    for (i, s) in small_overlapping_sets(&m, 10, 50).into_iter().enumerate() {
        let a = 0.3 + i as f64 * 0.7;
        let b = -2.0 + i as f64 * 0.5;
        let t = LabeledScores::new(
            s.so.iter().map(|x| a * x + b).collect(),
            s.do_.iter().map(|x| a * x + b).collect(),
        )
        .unwrap();
        let w = train_calibration(&s, &cfg).unwrap();
        let wt = train_calibration(&t, &cfg).unwrap();
        assert!((wt.betas[0] - w.betas[0] / a).abs() < 1e-6);
        assert!((wt.alpha - (w.alpha - w.betas[0] * b / a)).abs() < 1e-6);
        for (x, xt) in s.so.iter().zip(&t.so) {
            assert!((w.apply(&[*x]).unwrap() - wt.apply(&[*xt]).unwrap()).abs() < 1e-6);
        }
    }
}

#[test]
fn recalibration_is_idempotent() {
    let m = figure_config(FigureId::Fig6).model;
    let cfg = TrainConfig::default();
    for s in small_overlapping_sets(&m, 10, 900) {
        let w = train_calibration(&s, &cfg).unwrap();
        let out = calibrated(&w, &s);
        let again = train_calibration(&LabeledScores::new(out.so, out.do_).unwrap(), &cfg).unwrap();
        assert!(again.alpha.abs() < 1e-4, "{again:?}");
        assert!((again.betas[0] - 1.0).abs() < 1e-4, "{again:?}");
    }
}

#[test]
fn cllr_equals_objective_over_ln2() {
    let m = figure_config(FigureId::Fig7).model;
    let cfg = TrainConfig::default();
    for s in small_overlapping_sets(&m, 100, 5000) {
        let w = train_calibration(&s, &cfg).unwrap();
        let out = calibrated(&w, &s);
        let c = cllr(&out).unwrap();
        let j = objective(&w, &ParallelScores::from(&s), &cfg).unwrap();
        assert!((c - j / std::f64::consts::LN_2).abs() < 1e-10);
        assert!((c - cllr_direct(&out.so, &out.do_)).abs() < 1e-12);
    }
}

#[test]
fn calibration_preserves_rank_order() {
    let s = sample_scores(&figure_config(FigureId::Fig4).model, 200, 200, 4).unwrap();
    let w = train_calibration(&s, &TrainConfig::default()).unwrap();
    assert!(w.betas[0] > 0.0);
    let mut xs: Vec<f64> = s.so.iter().chain(&s.do_).copied().collect();
    xs.sort_by(f64::total_cmp);
    for pair in xs.windows(2) {
        if pair[1] > pair[0] {
            assert!(w.apply(&[pair[1]]).unwrap() > w.apply(&[pair[0]]).unwrap());
        }
    }
}

#[test]
fn one_column_fusion_is_calibration() {
    let s = sample_scores(&figure_config(FigureId::Fig5).model, 300, 250, 11).unwrap();
    let cfg = TrainConfig::with_ridge(0.01);
    let a = train_calibration(&s, &cfg).unwrap();
    let b = train_fusion(&ParallelScores::from(&s), &cfg).unwrap();
    assert_eq!(a.alpha.to_bits(), b.alpha.to_bits());
    assert_eq!(a.betas[0].to_bits(), b.betas[0].to_bits());
}

#[test]
fn duplicated_column_splits_the_slope() {
    let s = sample_scores(&figure_config(FigureId::Fig7).model, 2000, 2000, 21).unwrap();
    let cfg = TrainConfig::with_ridge(1e-6);
    let single = train_calibration(&s, &cfg).unwrap();
    let dup = ParallelScores::new(
        s.so.iter().map(|&x| vec![x, x]).collect(),
        s.do_.iter().map(|&x| vec![x, x]).collect(),
    )
    .unwrap();
    let fused = train_fusion(&dup, &cfg).unwrap();
    assert!((fused.betas[0] - fused.betas[1]).abs() < 1e-6);
    let lo = s.so.iter().chain(&s.do_).copied().fold(f64::INFINITY, f64::min);
    let hi = s.so.iter().chain(&s.do_).copied().fold(f64::NEG_INFINITY, f64::max);
    for i in 0..=100 {
        let x = lo + (hi - lo) * i as f64 / 100.0;
        let a = apply(&single, &[x]).unwrap();
        let b = apply(&fused, &[x, x]).unwrap();
        assert!((a - b).abs() < 1e-3, "x={x}: {a} vs {b}");
    }
}

#[test]
fn fusion_weights_the_more_discriminating_system() {
    // much more overlap in dimension 1 than in dimension 2
    let data = sample_parallel(&[0.5, 2.5], 1000, 1000, 8).unwrap();
    let w = train_fusion(&data, &TrainConfig::default()).unwrap();
    assert!(w.betas[1].abs() > w.betas[0].abs(), "{w:?}");
    assert!(w.betas.iter().all(|&b| b > 0.0));
}

#[test]
fn fusion_handles_correlated_systems() {
    // second system is a noisy copy of the first: no decorrelation needed
    let base = sample_scores(&figure_config(FigureId::Fig4).model, 800, 800, 3).unwrap();
    let noise = sample_scores(&figure_config(FigureId::Fig4).model, 800, 800, 4).unwrap();
    let rows = |a: &[f64], n: &[f64]| a.iter().zip(n).map(|(&x, &e)| vec![x, x + 0.1 * e]).collect();
    let data = ParallelScores::new(rows(&base.so, &noise.so), rows(&base.do_, &noise.do_)).unwrap();
    let w = train_fusion(&data, &TrainConfig::default()).unwrap();
    assert!(w.betas.iter().all(|b| b.is_finite()));
}

#[test]
fn separation_is_reported_in_two_dimensions() {
    let data = ParallelScores::new(
        vec![vec![1.0, 2.0], vec![2.0, 1.5]],
        vec![vec![-1.0, 0.0], vec![0.0, -2.0]],
    )
    .unwrap();
    assert!(matches!(
        train_fusion(&data, &TrainConfig::default()),
        Err(Error::Separation { .. })
    ));
    assert!(train_fusion(&data, &TrainConfig::with_ridge(0.001)).is_ok());
}

#[test]
fn asymptotic_recovery_matches_pooled_gaussian_map() {
    for id in FigureId::ALL {
        let cfg = figure_config(id);
        let s = sample_scores(&cfg.model, 200_000, 200_000, 31).unwrap();
        let w = train_calibration(&s, &TrainConfig::default()).unwrap();
        let aff = model_to_affine(&cfg.model);
        assert!((w.alpha - aff.alpha).abs() < 0.05 && (w.betas[0] - aff.beta).abs() < 0.05, "{id}: {w:?}");
    }
}
