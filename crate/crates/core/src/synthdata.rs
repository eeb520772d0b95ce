//! Synthetic score configurations and seeded samplers.
//!
//! Samples come from `ChaCha8Rng` seeded with `seed_from_u64`, with normal
//! deviates from the ziggurat sampler in `rand_distr`. Both are portable and
//! value-stable for pinned crate versions, so fixtures reproduce exactly.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gaussian_map::{LabeledScores, ScoreGaussianModel};
use crate::logreg::ParallelScores;

/// The four analytic calibration configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    /// Already calibrated: identity map.
    Fig4,
    /// Scores shifted one unit left: add one.
    Fig5,
    /// Within-group variance doubled: halve.
    Fig6,
    /// Different-origin scores shifted one unit left: double and add one.
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [FigureId::Fig4, FigureId::Fig5, FigureId::Fig6, FigureId::Fig7];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig4" => Ok(FigureId::Fig4),
            "fig5" => Ok(FigureId::Fig5),
            "fig6" => Ok(FigureId::Fig6),
            "fig7" => Ok(FigureId::Fig7),
            other => Err(Error::InvalidParameter(format!("unknown figure id {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureConfig {
    pub figure_id: FigureId,
    pub model: ScoreGaussianModel,
    pub expected_alpha: f64,
    pub expected_beta: f64,
}

pub fn figure_config(figure_id: FigureId) -> FigureConfig {
    let (mu_so, mu_do, sigma, alpha, beta) = match figure_id {
        FigureId::Fig4 => (0.5, -0.5, 1.0, 0.0, 1.0),
        FigureId::Fig5 => (-0.5, -1.5, 1.0, 1.0, 1.0),
        FigureId::Fig6 => (0.5, -0.5, std::f64::consts::SQRT_2, 0.0, 0.5),
        FigureId::Fig7 => (0.5, -1.5, 1.0, 1.0, 2.0),
    };
    FigureConfig {
        figure_id,
        model: ScoreGaussianModel::new(mu_so, mu_do, sigma).expect("figure parameters are valid"),
        expected_alpha: alpha,
        expected_beta: beta,
    }
}

/// Draws `n_so` same-origin then `n_do` different-origin scores.
pub fn sample_scores(model: &ScoreGaussianModel, n_so: usize, n_do: usize, seed: u64) -> Result<LabeledScores> {
    if n_so == 0 || n_do == 0 {
        return Err(Error::InvalidParameter(
            "sample sizes must be at least 1 per class".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |mu: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                mu + model.sigma() * z
            })
            .collect()
    };
    let so = draw(model.mu_so(), n_so);
    let do_ = draw(model.mu_do(), n_do);
    Ok(LabeledScores { so, do_ })
}

/// Two-system parallel scores with independent unit-variance noise per
/// dimension; class means differ by `separation[d]` in dimension `d`.
pub fn sample_parallel(separation: &[f64], n_so: usize, n_do: usize, seed: u64) -> Result<ParallelScores> {
    if separation.is_empty() || n_so == 0 || n_do == 0 {
        return Err(Error::InvalidParameter(
            "need at least one dimension and one sample per class".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |sign: f64, n: usize| -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| {
                separation
                    .iter()
                    .map(|&d| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        sign * d / 2.0 + z
                    })
                    .collect()
            })
            .collect()
    };
    let so = draw(1.0, n_so);
    let do_ = draw(-1.0, n_do);
    Ok(ParallelScores { so, do_ })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian_map::{model_to_affine, train_score_gaussians};

    #[test]
    fn figure_configs_match_their_affine_maps() {
        for id in FigureId::ALL {
            let cfg = figure_config(id);
            let aff = model_to_affine(&cfg.model);
            assert!((aff.alpha - cfg.expected_alpha).abs() < 1e-12, "{id}");
            assert!((aff.beta - cfg.expected_beta).abs() < 1e-12, "{id}");
        }
        assert_eq!(figure_config(FigureId::Fig6).expected_beta, 0.5);
        assert_eq!(figure_config(FigureId::Fig7).expected_alpha, 1.0);
    }

    #[test]
    fn figure_ids_parse() {
        assert_eq!("Fig7".parse::<FigureId>().unwrap(), FigureId::Fig7);
        assert!("fig8".parse::<FigureId>().is_err());
        for id in FigureId::ALL {
            assert_eq!(id.to_string().parse::<FigureId>().unwrap(), id);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = figure_config(FigureId::Fig4).model;
        let a = sample_scores(&m, 50, 40, 7).unwrap();
        let b = sample_scores(&m, 50, 40, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_scores(&m, 50, 40, 8).unwrap();
        assert_ne!(a, c);

        let tiny = sample_scores(&m, 1, 1, 0).unwrap();
        assert_eq!((tiny.so.len(), tiny.do_.len()), (1, 1));
        assert!(sample_scores(&m, 0, 1, 0).is_err());
    }

    #[test]
    fn generator_output_is_pinned() {
        // ChaCha8 + ziggurat with the pinned crate versions
        let m = figure_config(FigureId::Fig4).model;
        let s = sample_scores(&m, 2, 1, 42).unwrap();
        assert_eq!(s.so, vec![0.9779812383510218, 1.8340706102318078]);
        assert_eq!(s.do_, vec![-0.7108666832710303]);
    }

    #[test]
    fn sample_mean_is_close() {
        let m = figure_config(FigureId::Fig4).model;
        let s = sample_scores(&m, 100_000, 10, 1).unwrap();
        let mean = s.so.iter().sum::<f64>() / s.so.len() as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean = {mean}");
    }

    #[test]
    fn pooled_fit_recovers_every_figure() {
        for (i, id) in FigureId::ALL.into_iter().enumerate() {
            let cfg = figure_config(id);
            let s = sample_scores(&cfg.model, 1_000_000, 1_000_000, 100 + i as u64).unwrap();
            let aff = model_to_affine(&train_score_gaussians(&s).unwrap());
            assert!((aff.alpha - cfg.expected_alpha).abs() < 0.01, "{id}: {aff:?}");
            assert!((aff.beta - cfg.expected_beta).abs() < 0.01, "{id}: {aff:?}");
        }
    }

    #[test]
    fn parallel_sampler_shapes() {
        let p = sample_parallel(&[0.5, 3.0], 10, 12, 3).unwrap();
        assert_eq!(p.dim().unwrap(), 2);
        assert_eq!((p.so.len(), p.do_.len()), (10, 12));
    }
}
