//! Equal-variance Gaussian score models and their affine log-odds form.
//!
//! Two Gaussians with a shared (pooled) standard deviation fitted to
//! same-origin and different-origin scores give a log likelihood ratio that
//! is exactly affine in the score: `ln LR(s) = alpha + beta * s`. This is the
//! analytic counterpart of equal-prior logistic-regression calibration.

use crate::error::{ensure_finite, Error, Result};
use crate::numeric::{normal_ln_pdf, sigmoid};

/// Same-origin and different-origin univariate scores.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledScores {
    pub so: Vec<f64>,
    pub do_: Vec<f64>,
}

impl LabeledScores {
    pub fn new(so: Vec<f64>, do_: Vec<f64>) -> Result<Self> {
        ensure_finite(&so, "same-origin scores")?;
        ensure_finite(&do_, "different-origin scores")?;
        Ok(Self { so, do_ })
    }

    pub fn validate_for_training(&self) -> Result<()> {
        if self.so.is_empty() {
            return Err(Error::EmptyClass("same-origin"));
        }
        if self.do_.is_empty() {
            return Err(Error::EmptyClass("different-origin"));
        }
        ensure_finite(&self.so, "same-origin scores")?;
        ensure_finite(&self.do_, "different-origin scores")
    }
}

/// Class means and pooled within-group standard deviation of scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreGaussianModel {
    mu_so: f64,
    mu_do: f64,
    sigma: f64,
}

impl ScoreGaussianModel {
    pub fn new(mu_so: f64, mu_do: f64, sigma: f64) -> Result<Self> {
        if !(mu_so.is_finite() && mu_do.is_finite() && sigma.is_finite()) {
            return Err(Error::NonFinite("score model parameters"));
        }
        if sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "pooled sigma must be positive, got {sigma}"
            )));
        }
        if mu_so <= mu_do {
            return Err(Error::Degenerate(format!(
                "same-origin mean {mu_so} does not exceed different-origin mean {mu_do}"
            )));
        }
        Ok(Self {
            mu_so,
            mu_do,
            sigma,
        })
    }

    pub fn mu_so(&self) -> f64 {
        self.mu_so
    }

    pub fn mu_do(&self) -> f64 {
        self.mu_do
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Intercept and slope of the natural-log LR as an affine function of score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub alpha: f64,
    pub beta: f64,
}

impl Affine {
    pub fn eval(&self, s: f64) -> f64 {
        self.alpha + self.beta * s
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Fits class means and the pooled variance with an (N_so + N_do - 2) denominator.
pub fn train_score_gaussians(scores: &LabeledScores) -> Result<ScoreGaussianModel> {
    scores.validate_for_training()?;
    let (n_so, n_do) = (scores.so.len(), scores.do_.len());
    if n_so < 2 || n_do < 2 {
        return Err(Error::Degenerate(format!(
            "need at least 2 scores per class, got {n_so} same-origin and {n_do} different-origin"
        )));
    }
    let mu_so = mean(&scores.so);
    let mu_do = mean(&scores.do_);
    let ss = |v: &[f64], m: f64| v.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    let pooled = (ss(&scores.so, mu_so) + ss(&scores.do_, mu_do)) / (n_so + n_do - 2) as f64;
    if pooled <= 0.0 {
        return Err(Error::Degenerate("pooled within-group variance is zero".into()));
    }
    ScoreGaussianModel::new(mu_so, mu_do, pooled.sqrt())
}

/// Exact affine form of the pooled-variance score-to-LR map.
pub fn model_to_affine(model: &ScoreGaussianModel) -> Affine {
    let var = model.sigma * model.sigma;
    Affine {
        alpha: (model.mu_do * model.mu_do - model.mu_so * model.mu_so) / (2.0 * var),
        beta: (model.mu_so - model.mu_do) / var,
    }
}

/// Natural-log LR of a score under the pooled-variance model.
pub fn score_llr(s: f64, model: &ScoreGaussianModel) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::NonFinite("score"));
    }
    Ok(model_to_affine(model).eval(s))
}

/// Ratio of the two class densities at `s`, evaluated as a log-pdf
/// difference rather than through the affine form.
pub fn score_llr_direct(s: f64, model: &ScoreGaussianModel) -> f64 {
    normal_ln_pdf(s, model.mu_so, model.sigma) - normal_ln_pdf(s, model.mu_do, model.sigma)
}

/// Equal-prior posterior probability of same origin.
pub fn posterior_prob(s: f64, model: &ScoreGaussianModel) -> Result<f64> {
    Ok(sigmoid(score_llr(s, model)?))
}

/// ln(p / (1 - p)) for p in (0, 1).
pub fn logit(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "logit needs a probability in (0, 1), got {p}"
        )));
    }
    Ok(p.ln() - (-p).ln_1p())
}

pub fn inverse_logit(z: f64) -> f64 {
    sigmoid(z)
}
