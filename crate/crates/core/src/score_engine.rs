//! Likelihood ratios computed directly from raw univariate measurements.
//!
//! A suspect model and a background (population) model are evaluated at an
//! offender measurement; the ratio of the two densities is the likelihood
//! ratio. Everything here works in natural-log units.

use crate::error::{ensure_finite, Error, Result};
use crate::numeric::{log_sum_exp, normal_ln_pdf};

/// Saturation bound on natural-log likelihood ratios from mixture models.
pub const LOG_LR_CAP: f64 = 200.0;

/// Tolerance on mixture weights summing to one.
const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A univariate normal density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    mean: f64,
    sd: f64,
}

impl GaussianParams {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        if !mean.is_finite() || !sd.is_finite() {
            return Err(Error::NonFinite("gaussian parameters"));
        }
        if sd <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "standard deviation must be positive, got {sd}"
            )));
        }
        Ok(Self { mean, sd })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        normal_ln_pdf(x, self.mean, self.sd)
    }
}

/// One weighted component of a [`Gmm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmmComponent {
    pub weight: f64,
    pub gaussian: GaussianParams,
}

/// A univariate Gaussian mixture. Weights are in (0, 1] and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Gmm {
    components: Vec<GmmComponent>,
}

impl Gmm {
    /// Builds a mixture from `(weight, mean, sd)` triples.
    pub fn new(components: &[(f64, f64, f64)]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter(
                "mixture needs at least one component".into(),
            ));
        }
        let mut built = Vec::with_capacity(components.len());
        for &(weight, mean, sd) in components {
            if !weight.is_finite() || weight <= 0.0 || weight > 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "mixture weight must lie in (0, 1], got {weight}"
                )));
            }
            built.push(GmmComponent {
                weight,
                gaussian: GaussianParams::new(mean, sd)?,
            });
        }
        let total: f64 = built.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { components: built })
    }

    /// A one-component mixture.
    pub fn single(gaussian: GaussianParams) -> Self {
        Self {
            components: vec![GmmComponent {
                weight: 1.0,
                gaussian,
            }],
        }
    }

    pub fn components(&self) -> &[GmmComponent] {
        &self.components
    }

    /// Log density via log-sum-exp over components.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        log_sum_exp(
            self.components
                .iter()
                .map(move |c| c.weight.ln() + c.gaussian.ln_pdf(x)),
        )
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }
}

/// Offender measurements x_1..x_N; non-empty and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct OffenderData {
    points: Vec<f64>,
}

impl OffenderData {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter(
                "offender data needs at least one point".into(),
            ));
        }
        ensure_finite(&points, "offender data")?;
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// Moment fit: arithmetic mean and unbiased (n - 1) standard deviation.
pub fn fit_gaussian(samples: &[f64]) -> Result<GaussianParams> {
    if samples.len() < 2 {
        return Err(Error::Degenerate(format!(
            "need at least 2 samples to fit a gaussian, got {}",
            samples.len()
        )));
    }
    ensure_finite(samples, "samples")?;
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
    let var = ss / (n - 1.0);
    if var <= 0.0 {
        return Err(Error::Degenerate("samples have zero variance".into()));
    }
    GaussianParams::new(mean, var.sqrt())
}

/// ln f(x | suspect) - ln f(x | background) for single-Gaussian models.
pub fn gaussian_lr(x: f64, suspect: &GaussianParams, background: &GaussianParams) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("raw-data value"));
    }
    Ok(suspect.ln_pdf(x) - background.ln_pdf(x))
}

/// Mixture density at x.
pub fn gmm_pdf(x: f64, model: &Gmm) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("raw-data value"));
    }
    Ok(model.pdf(x))
}

/// Natural-log LR between two mixtures, clamped to ±[`LOG_LR_CAP`].
pub fn gmm_lr(x: f64, suspect: &Gmm, background: &Gmm) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite("raw-data value"));
    }
    let num = suspect.ln_pdf(x);
    let den = background.ln_pdf(x);
    let llr = match (num == f64::NEG_INFINITY, den == f64::NEG_INFINITY) {
        (true, true) => 0.0,
        (true, false) => -LOG_LR_CAP,
        (false, true) => LOG_LR_CAP,
        (false, false) => num - den,
    };
    Ok(llr.clamp(-LOG_LR_CAP, LOG_LR_CAP))
}

/// Mean of the per-point natural-log LRs.
pub fn score_from_points(data: &OffenderData, suspect: &Gmm, background: &Gmm) -> Result<f64> {
    let mut total = 0.0;
    for &x in data.points() {
        total += gmm_lr(x, suspect, background)?;
    }
    Ok(total / data.points().len() as f64)
}

/// A bimodal suspect model against a unimodal background, with two offender
/// points on the suspect peaks whose midpoint lands in the suspect trough.
#[derive(Debug, Clone, PartialEq)]
pub struct BimodalDemo {
    pub suspect: Gmm,
    pub background: Gmm,
    pub x1: f64,
    pub x2: f64,
}

impl BimodalDemo {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.x1 + self.x2)
    }

    /// (LR at x1, LR at x2, LR at the midpoint), in linear units.
    pub fn likelihood_ratios(&self) -> (f64, f64, f64) {
        let lr = |x: f64| {
            gmm_lr(x, &self.suspect, &self.background)
                .expect("demo points are finite")
                .exp()
        };
        (lr(self.x1), lr(self.x2), lr(self.midpoint()))
    }
}

pub fn bimodal_demo() -> BimodalDemo {
    let suspect = Gmm::new(&[(0.5, -2.0, 0.8), (0.5, 2.0, 0.8)]).expect("valid demo mixture");
    let background = Gmm::single(GaussianParams::new(0.0, 2.0).expect("valid demo gaussian"));
    BimodalDemo {
        suspect,
        background,
        x1: -2.0,
        x2: 2.0,
    }
}
