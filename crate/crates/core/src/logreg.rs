//! Equal-prior logistic-regression calibration and fusion.
//!
//! Scores from one or more comparison systems are mapped to a natural-log
//! likelihood ratio `alpha + betas . s`. Training minimizes the
//! equal-prior-weighted cross entropy
//!
//! ```text
//! J = 1/(2 N_so) Σ_so softplus(-z) + 1/(2 N_do) Σ_do softplus(z) + λ/2 Σ β²
//! ```
//!
//! which is convex. The class weighting makes the result independent of the
//! class proportions of the training set, so the fitted log posterior odds
//! equal the log likelihood ratio. The ridge term touches slopes only.
//!
//! The optimizer is a damped Newton method started from all-zero weights
//! with Armijo backtracking; it stops once the gradient max-norm drops below
//! [`TrainConfig::grad_tolerance`]. Sums run in a fixed order so a given
//! input always produces the same weights.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::gaussian_map::LabeledScores;
use crate::numeric::{sigmoid, softplus};

/// Regularization weight recommended for data that may be separable.
pub const ROBUST_RIDGE_LAMBDA: f64 = 0.001;

/// Relative pivot size below which the Newton system is treated as singular.
const PIVOT_TOL: f64 = 1e-13;
const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-16;

/// Trained intercept and slopes with the counts and penalty used to fit them.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationWeights {
    pub alpha: f64,
    pub betas: Vec<f64>,
    pub n_so: usize,
    pub n_do: usize,
    pub ridge_lambda: f64,
}

impl CalibrationWeights {
    /// Weights without training provenance, e.g. for hand-specified maps.
    pub fn new(alpha: f64, betas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::InvalidParameter("at least one slope is required".into()));
        }
        if !alpha.is_finite() {
            return Err(Error::NonFinite("intercept"));
        }
        ensure_finite(&betas, "slopes")?;
        Ok(Self {
            alpha,
            betas,
            n_so: 0,
            n_do: 0,
            ridge_lambda: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.betas.len()
    }

    /// Natural-log LR for one score vector.
    pub fn apply(&self, scores: &[f64]) -> Result<f64> {
        apply(self, scores)
    }

    pub fn to_json(&self) -> String {
        let file = WeightsFile {
            alpha: self.alpha,
            betas: self.betas.clone(),
            log_base: "e".to_string(),
            trained_on: TrainedOn {
                n_so: self.n_so,
                n_do: self.n_do,
            },
            ridge_lambda: self.ridge_lambda,
        };
        let mut out = serde_json::to_string_pretty(&file).expect("weights serialize");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: WeightsFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("malformed weights document: {e}")))?;
        if file.log_base != "e" {
            return Err(Error::InvalidParameter(format!(
                "unsupported log_base {:?}, expected \"e\"",
                file.log_base
            )));
        }
        if !(file.ridge_lambda.is_finite() && file.ridge_lambda >= 0.0) {
            return Err(Error::InvalidParameter("ridge_lambda must be >= 0".into()));
        }
        let mut w = Self::new(file.alpha, file.betas)?;
        w.n_so = file.trained_on.n_so;
        w.n_do = file.trained_on.n_do;
        w.ridge_lambda = file.ridge_lambda;
        Ok(w)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TrainedOn {
    n_so: usize,
    n_do: usize,
}

/// On-disk form of [`CalibrationWeights`]. Field names are fixed.
#[derive(Debug, Serialize, Deserialize)]
struct WeightsFile {
    alpha: f64,
    betas: Vec<f64>,
    log_base: String,
    trained_on: TrainedOn,
    ridge_lambda: f64,
}

/// Parallel scores: one n-vector per comparison, grouped by class.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParallelScores {
    pub so: Vec<Vec<f64>>,
    pub do_: Vec<Vec<f64>>,
}

impl ParallelScores {
    pub fn new(so: Vec<Vec<f64>>, do_: Vec<Vec<f64>>) -> Result<Self> {
        let data = Self { so, do_ };
        data.dim()?;
        Ok(data)
    }

    /// Common row dimension. Fails on ragged rows, non-finite values or
    /// zero-width rows; an entirely empty set has dimension 0.
    pub fn dim(&self) -> Result<usize> {
        let mut rows = self.so.iter().chain(self.do_.iter());
        let Some(first) = rows.next() else {
            return Ok(0);
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::InvalidParameter("score rows must not be empty".into()));
        }
        ensure_finite(first, "scores")?;
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            ensure_finite(row, "scores")?;
        }
        Ok(n)
    }

    fn validate_for_training(&self) -> Result<usize> {
        let n = self.dim()?;
        if self.so.is_empty() {
            return Err(Error::EmptyClass("same-origin"));
        }
        if self.do_.is_empty() {
            return Err(Error::EmptyClass("different-origin"));
        }
        Ok(n)
    }
}

impl From<&LabeledScores> for ParallelScores {
    fn from(scores: &LabeledScores) -> Self {
        Self {
            so: scores.so.iter().map(|&s| vec![s]).collect(),
            do_: scores.do_.iter().map(|&s| vec![s]).collect(),
        }
    }
}

/// Optimizer settings. Equal priors are fixed and not configurable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub ridge_lambda: f64,
    pub grad_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            ridge_lambda: 0.0,
            grad_tolerance: 1e-8,
            max_iterations: 10_000,
        }
    }
}

impl TrainConfig {
    pub fn with_ridge(ridge_lambda: f64) -> Self {
        Self {
            ridge_lambda,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.ridge_lambda.is_finite() && self.ridge_lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ridge_lambda must be finite and >= 0, got {}",
                self.ridge_lambda
            )));
        }
        if !(self.grad_tolerance.is_finite() && self.grad_tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grad_tolerance must be positive, got {}",
                self.grad_tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// Training data packed row-major with a leading 1 for the intercept.
struct Design {
    dim: usize,
    so: Vec<f64>,
    do_: Vec<f64>,
    w_so: f64,
    w_do: f64,
    ridge: f64,
}

impl Design {
    fn new(data: &ParallelScores, n: usize, ridge: f64) -> Self {
        let pack = |rows: &[Vec<f64>]| {
            let mut out = Vec::with_capacity(rows.len() * (n + 1));
            for row in rows {
                out.push(1.0);
                out.extend_from_slice(row);
            }
            out
        };
        Self {
            dim: n + 1,
            so: pack(&data.so),
            do_: pack(&data.do_),
            w_so: 0.5 / data.so.len() as f64,
            w_do: 0.5 / data.do_.len() as f64,
            ridge,
        }
    }

    fn z(w: &[f64], x: &[f64]) -> f64 {
        w.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    fn penalty(&self, w: &[f64]) -> f64 {
        0.5 * self.ridge * w[1..].iter().map(|b| b * b).sum::<f64>()
    }

    fn value(&self, w: &[f64]) -> f64 {
        let so: f64 = self
            .so
            .chunks_exact(self.dim)
            .map(|x| softplus(-Self::z(w, x)))
            .sum();
        let do_: f64 = self
            .do_
            .chunks_exact(self.dim)
            .map(|x| softplus(Self::z(w, x)))
            .sum();
        self.w_so * so + self.w_do * do_ + self.penalty(w)
    }

    /// Objective, gradient and packed row-major Hessian.
    fn value_grad_hess(&self, w: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let d = self.dim;
        let mut grad = vec![0.0; d];
        let mut hess = vec![0.0; d * d];
        let mut total = 0.0;
        for (rows, class_weight, sign) in [(&self.so, self.w_so, 1.0), (&self.do_, self.w_do, -1.0)] {
            let mut loss = 0.0;
            let mut g = vec![0.0; d];
            let mut h = vec![0.0; d * d];
            for x in rows.chunks_exact(d) {
                // margin is positive when the row is on its own class side
                let margin = sign * Self::z(w, x);
                loss += softplus(-margin);
                let p_wrong = sigmoid(-margin);
                let curvature = p_wrong * sigmoid(margin);
                for i in 0..d {
                    g[i] -= sign * p_wrong * x[i];
                    let cx = curvature * x[i];
                    for j in 0..=i {
                        h[i * d + j] += cx * x[j];
                    }
                }
            }
            total += class_weight * loss;
            for i in 0..d {
                grad[i] += class_weight * g[i];
                for j in 0..=i {
                    hess[i * d + j] += class_weight * h[i * d + j];
                }
            }
        }
        for i in 1..d {
            grad[i] += self.ridge * w[i];
            hess[i * d + i] += self.ridge;
        }
        for i in 0..d {
            for j in 0..i {
                hess[j * d + i] = hess[i * d + j];
            }
        }
        (total + self.penalty(w), grad, hess)
    }

    /// True when the linear predictor puts every same-origin row at or above
    /// every different-origin row with a non-zero slope.
    fn separates(&self, w: &[f64]) -> bool {
        if w[1..].iter().all(|&b| b == 0.0) {
            return false;
        }
        let min_so = self
            .so
            .chunks_exact(self.dim)
            .map(|x| Self::z(w, x))
            .fold(f64::INFINITY, f64::min);
        let max_do = self
            .do_
            .chunks_exact(self.dim)
            .map(|x| Self::z(w, x))
            .fold(f64::NEG_INFINITY, f64::max);
        min_so >= max_do
    }
}

/// Solves `a x = b` for symmetric positive definite `a` by Cholesky.
/// Returns `None` when a pivot is non-positive relative to the diagonal scale.
fn cholesky_solve(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    if !(scale > 0.0 && scale.is_finite()) {
        return None;
    }
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= PIVOT_TOL * scale {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * n + k] * y[k];
        }
        y[i] = sum / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= l[k * n + i] * x[k];
        }
        x[i] = sum / l[i * n + i];
    }
    Some(x)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn pack_weights(weights: &CalibrationWeights) -> Vec<f64> {
    std::iter::once(weights.alpha)
        .chain(weights.betas.iter().copied())
        .collect()
}

/// Equal-prior-weighted cross entropy (natural-log units) plus ridge penalty.
pub fn objective(weights: &CalibrationWeights, data: &ParallelScores, config: &TrainConfig) -> Result<f64> {
    let n = data.validate_for_training()?;
    if n != weights.dim() {
        return Err(Error::DimensionMismatch {
            expected: weights.dim(),
            got: n,
        });
    }
    config.validate()?;
    Ok(Design::new(data, n, config.ridge_lambda).value(&pack_weights(weights)))
}

/// Univariate calibration; identical to [`train_fusion`] on one column.
pub fn train_calibration(scores: &LabeledScores, config: &TrainConfig) -> Result<CalibrationWeights> {
    train_fusion(&ParallelScores::from(scores), config)
}

/// Multivariate fusion of parallel scores.
pub fn train_fusion(data: &ParallelScores, config: &TrainConfig) -> Result<CalibrationWeights> {
    config.validate()?;
    let n = data.validate_for_training()?;
    let design = Design::new(data, n, config.ridge_lambda);
    let unpenalized = config.ridge_lambda == 0.0;

    let mut w = vec![0.0; n + 1];
    let mut grad_norm = f64::INFINITY;
    let mut growing_iters = 0usize;
    let mut last_norm = 0.0;

    for iteration in 0..config.max_iterations {
        let (f, g, h) = design.value_grad_hess(&w);
        grad_norm = max_abs(&g);
        if grad_norm < config.grad_tolerance {
            if unpenalized && design.separates(&w) {
                return Err(Error::Separation {
                    iterations: iteration,
                });
            }
            return Ok(CalibrationWeights {
                alpha: w[0],
                betas: w[1..].to_vec(),
                n_so: data.so.len(),
                n_do: data.do_.len(),
                ridge_lambda: config.ridge_lambda,
            });
        }

        let neg_g: Vec<f64> = g.iter().map(|x| -x).collect();
        let Some(step) = cholesky_solve(&h, &neg_g) else {
            if unpenalized && design.separates(&w) {
                return Err(Error::Separation {
                    iterations: iteration,
                });
            }
            return Err(Error::IllConditioned);
        };

        let slope: f64 = g.iter().zip(&step).map(|(a, b)| a * b).sum();
        let mut t = 1.0;
        let mut accepted = None;
        while t >= MIN_STEP {
            let trial: Vec<f64> = w.iter().zip(&step).map(|(a, d)| a + t * d).collect();
            let ft = design.value(&trial);
            if ft.is_finite() && ft <= f + ARMIJO_C * t * slope {
                accepted = Some(trial);
                break;
            }
            t *= 0.5;
        }
        let Some(next) = accepted else {
            // no further decrease representable in floating point
            break;
        };
        w = next;

        let current_norm = norm(&w);
        if current_norm > last_norm {
            growing_iters += 1;
        } else {
            growing_iters = 0;
        }
        last_norm = current_norm;
    }

    if unpenalized && (design.separates(&w) || growing_iters >= config.max_iterations.min(50)) {
        return Err(Error::Separation {
            iterations: config.max_iterations,
        });
    }
    Err(Error::NonConvergence {
        iterations: config.max_iterations,
        grad_norm,
    })
}

/// `alpha + Σ betas_i s_i`.
pub fn apply(weights: &CalibrationWeights, scores: &[f64]) -> Result<f64> {
    if scores.len() != weights.dim() {
        return Err(Error::DimensionMismatch {
            expected: weights.dim(),
            got: scores.len(),
        });
    }
    ensure_finite(scores, "scores")?;
    Ok(weights.alpha
        + weights
            .betas
            .iter()
            .zip(scores)
            .map(|(b, s)| b * s)
            .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(so: &[f64], do_: &[f64]) -> ParallelScores {
        ParallelScores::from(&LabeledScores::new(so.to_vec(), do_.to_vec()).unwrap())
    }

    #[test]
    fn objective_examples() {
        let data = one_d(&[1.0, 2.0, -0.3], &[-1.0, 0.4]);
        let zero = CalibrationWeights::new(0.0, vec![0.0]).unwrap();
        let j = objective(&zero, &data, &TrainConfig::default()).unwrap();
        assert!((j - 2f64.ln()).abs() < 1e-15);

        let pair = one_d(&[1.0], &[-1.0]);
        let unit = CalibrationWeights::new(0.0, vec![1.0]).unwrap();
        let j = objective(&unit, &pair, &TrainConfig::default()).unwrap();
        assert!((j - softplus(-1.0)).abs() < 1e-15);
        assert!((j - 0.313_262).abs() < 1e-6);

        let steep = CalibrationWeights::new(0.0, vec![1e4]).unwrap();
        assert!(objective(&steep, &pair, &TrainConfig::default()).unwrap() < 1e-300);

        let wide = CalibrationWeights::new(0.0, vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            objective(&wide, &pair, &TrainConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ridge_adds_half_lambda_beta_squared() {
        let data = one_d(&[1.0, 0.0], &[-1.0, 0.5]);
        let w = CalibrationWeights::new(0.3, vec![2.0]).unwrap();
        let base = objective(&w, &data, &TrainConfig::default()).unwrap();
        let pen = objective(&w, &data, &TrainConfig::with_ridge(0.1)).unwrap();
        assert!((pen - base - 0.05 * 4.0).abs() < 1e-15);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(matches!(
            ParallelScores::new(vec![vec![1.0, 2.0]], vec![vec![1.0]]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(ParallelScores::new(vec![vec![f64::NAN]], vec![vec![1.0]]).is_err());
    }

    #[test]
    fn empty_class_is_rejected() {
        let data = one_d(&[1.0], &[]);
        assert!(matches!(
            train_fusion(&data, &TrainConfig::default()),
            Err(Error::EmptyClass("different-origin"))
        ));
    }

    #[test]
    fn separated_pair_needs_ridge() {
        let data = LabeledScores::new(vec![1.0], vec![-1.0]).unwrap();
        let err = train_calibration(&data, &TrainConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Separation { .. }), "{err:?}");
        assert!(err.to_string().contains("separation"));

        let w = train_calibration(&data, &TrainConfig::with_ridge(ROBUST_RIDGE_LAMBDA)).unwrap();
        assert!(w.alpha.abs() < 1e-8);
        // stationarity: sigma(-beta) = lambda * beta
        assert!((sigmoid(-w.betas[0]) - 0.001 * w.betas[0]).abs() < 1e-8);
    }

    #[test]
    fn quasi_separated_data_is_flagged() {
        let data = LabeledScores::new(vec![1.0, 0.0], vec![0.0, -1.0]).unwrap();
        let err = train_calibration(&data, &TrainConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Separation { .. }), "{err:?}");
    }

    #[test]
    fn collinear_columns_without_ridge_are_ill_conditioned() {
        let rows = |v: &[f64]| v.iter().map(|&s| vec![s, s]).collect::<Vec<_>>();
        let data = ParallelScores::new(rows(&[1.0, -0.2, 0.5]), rows(&[-1.0, 0.3, 0.0])).unwrap();
        assert_eq!(
            train_fusion(&data, &TrainConfig::default()).unwrap_err(),
            Error::IllConditioned
        );
        assert!(train_fusion(&data, &TrainConfig::with_ridge(1e-6)).is_ok());
    }

    #[test]
    fn overlapping_data_trains() {
        let data = LabeledScores::new(vec![1.0, 2.0, -0.5], vec![-1.0, 0.5, -2.0]).unwrap();
        let w = train_calibration(&data, &TrainConfig::default()).unwrap();
        assert!(w.betas[0] > 0.0);
        assert_eq!((w.n_so, w.n_do), (3, 3));
    }

    #[test]
    fn apply_examples() {
        let fig7 = CalibrationWeights::new(1.0, vec![2.0]).unwrap();
        assert_eq!(apply(&fig7, &[-0.5]).unwrap(), 0.0);
        let identity = CalibrationWeights::new(0.0, vec![1.0]).unwrap();
        for x in [-3.2, 0.0, 17.5] {
            assert_eq!(apply(&identity, &[x]).unwrap(), x);
        }
        let fused = CalibrationWeights::new(-0.93, vec![0.97, 2.32]).unwrap();
        assert_eq!(apply(&fused, &[0.0, 0.0]).unwrap(), -0.93);
        assert!(apply(&fused, &[0.0]).is_err());
    }

    #[test]
    fn json_round_trip_and_field_names() {
        let mut w = CalibrationWeights::new(-0.25, vec![1.5, 0.125]).unwrap();
        w.n_so = 10;
        w.n_do = 7;
        w.ridge_lambda = 0.001;
        let text = w.to_json();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["log_base"], "e");
        assert_eq!(value["trained_on"]["n_so"], 10);
        assert_eq!(value["trained_on"]["n_do"], 7);
        assert_eq!(value["ridge_lambda"], 0.001);
        assert_eq!(value["betas"][1], 0.125);
        assert_eq!(CalibrationWeights::from_json(&text).unwrap(), w);

        let bad = text.replace("\"e\"", "\"10\"");
        assert!(CalibrationWeights::from_json(&bad).is_err());
        assert!(CalibrationWeights::from_json("{}").is_err());
    }

    #[test]
    fn cholesky_solves_small_system() {
        let a = [4.0, 2.0, 2.0, 3.0];
        let x = cholesky_solve(&a, &[2.0, 1.0]).unwrap();
        assert!((4.0 * x[0] + 2.0 * x[1] - 2.0).abs() < 1e-14);
        assert!((2.0 * x[0] + 3.0 * x[1] - 1.0).abs() < 1e-14);
        assert!(cholesky_solve(&[1.0, 1.0, 1.0, 1.0], &[1.0, 0.0]).is_none());
    }
}
