//! Python bindings for `llrcal`.
//!
//! Scores and log likelihood ratios cross the boundary as plain lists of
//! floats, natural-log units throughout. Numerical training failures raise
//! `llrcal.SeparationError` or `llrcal.TrainingError`; bad input raises
//! `ValueError`.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ::llrcal as core;
use core::{Error, FigureId, LabeledScores, LlrSet, ParallelScores, TrainConfig};

create_exception!(llrcal, TrainingError, PyRuntimeError);
create_exception!(llrcal, SeparationError, TrainingError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Separation { .. } => SeparationError::new_err(msg),
        Error::Fold { ref source, .. } if matches!(**source, Error::Separation { .. }) => {
            SeparationError::new_err(msg)
        }
        e if e.is_numerical() => TrainingError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn config(ridge: f64, grad_tolerance: f64, max_iterations: usize) -> TrainConfig {
    TrainConfig {
        ridge_lambda: ridge,
        grad_tolerance,
        max_iterations,
    }
}

fn gaussian(params: (f64, f64)) -> PyResult<core::GaussianParams> {
    core::GaussianParams::new(params.0, params.1).map_err(to_py)
}

fn gmm(components: Vec<(f64, f64, f64)>) -> PyResult<core::Gmm> {
    core::Gmm::new(&components).map_err(to_py)
}

fn figure(id: &str) -> PyResult<FigureId> {
    id.parse().map_err(to_py)
}

/// Equal-variance Gaussian model of same-origin and different-origin scores.
#[pyclass(name = "ScoreGaussianModel", module = "llrcal", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyScoreGaussianModel {
    inner: core::ScoreGaussianModel,
}

#[pymethods]
impl PyScoreGaussianModel {
    #[new]
    fn new(mu_so: f64, mu_do: f64, sigma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: core::ScoreGaussianModel::new(mu_so, mu_do, sigma).map_err(to_py)?,
        })
    }

    #[getter]
    fn mu_so(&self) -> f64 {
        self.inner.mu_so()
    }

    #[getter]
    fn mu_do(&self) -> f64 {
        self.inner.mu_do()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma()
    }

    /// (alpha, beta) with ln LR(s) = alpha + beta * s.
    fn affine(&self) -> (f64, f64) {
        let a = core::model_to_affine(&self.inner);
        (a.alpha, a.beta)
    }

    fn llr(&self, s: f64) -> PyResult<f64> {
        core::score_llr(s, &self.inner).map_err(to_py)
    }

    fn posterior(&self, s: f64) -> PyResult<f64> {
        core::posterior_prob(s, &self.inner).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "ScoreGaussianModel(mu_so={}, mu_do={}, sigma={})",
            self.inner.mu_so(),
            self.inner.mu_do(),
            self.inner.sigma()
        )
    }
}

/// Intercept and per-system slopes mapping scores to natural-log LRs.
#[pyclass(name = "CalibrationWeights", module = "llrcal", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCalibrationWeights {
    inner: core::CalibrationWeights,
}

#[pymethods]
impl PyCalibrationWeights {
    #[new]
    fn new(alpha: f64, betas: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: core::CalibrationWeights::new(alpha, betas).map_err(to_py)?,
        })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn betas(&self) -> Vec<f64> {
        self.inner.betas.clone()
    }

    #[getter]
    fn ridge_lambda(&self) -> f64 {
        self.inner.ridge_lambda
    }

    /// (n_so, n_do) of the training set.
    #[getter]
    fn trained_on(&self) -> (usize, usize) {
        (self.inner.n_so, self.inner.n_do)
    }

    fn apply(&self, scores: Vec<f64>) -> PyResult<f64> {
        self.inner.apply(&scores).map_err(to_py)
    }

    fn apply_many(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        rows.iter().map(|r| self.inner.apply(r).map_err(to_py)).collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: core::CalibrationWeights::from_json(text).map_err(to_py)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("CalibrationWeights(alpha={}, betas={:?})", self.inner.alpha, self.inner.betas)
    }
}

#[pyfunction]
fn fit_gaussian(samples: Vec<f64>) -> PyResult<(f64, f64)> {
    let g = core::fit_gaussian(&samples).map_err(to_py)?;
    Ok((g.mean(), g.sd()))
}

/// Natural-log LR under single Gaussians given as (mean, sd).
#[pyfunction]
fn gaussian_lr(x: f64, suspect: (f64, f64), background: (f64, f64)) -> PyResult<f64> {
    core::gaussian_lr(x, &gaussian(suspect)?, &gaussian(background)?).map_err(to_py)
}

/// Mixture density; components are (weight, mean, sd).
#[pyfunction]
fn gmm_pdf(x: f64, components: Vec<(f64, f64, f64)>) -> PyResult<f64> {
    core::gmm_pdf(x, &gmm(components)?).map_err(to_py)
}

#[pyfunction]
fn gmm_lr(x: f64, suspect: Vec<(f64, f64, f64)>, background: Vec<(f64, f64, f64)>) -> PyResult<f64> {
    core::gmm_lr(x, &gmm(suspect)?, &gmm(background)?).map_err(to_py)
}

#[pyfunction]
fn score_from_points(
    points: Vec<f64>,
    suspect: Vec<(f64, f64, f64)>,
    background: Vec<(f64, f64, f64)>,
) -> PyResult<f64> {
    let data = core::OffenderData::new(points).map_err(to_py)?;
    core::score_from_points(&data, &gmm(suspect)?, &gmm(background)?).map_err(to_py)
}

/// (x1, x2, LR(x1), LR(x2), LR(midpoint)) for the bimodal suspect model.
#[pyfunction]
fn bimodal_demo() -> (f64, f64, f64, f64, f64) {
    let demo = core::bimodal_demo();
    let (a, b, m) = demo.likelihood_ratios();
    (demo.x1, demo.x2, a, b, m)
}

#[pyfunction]
fn train_score_gaussians(so: Vec<f64>, do_: Vec<f64>) -> PyResult<PyScoreGaussianModel> {
    let scores = LabeledScores::new(so, do_).map_err(to_py)?;
    Ok(PyScoreGaussianModel {
        inner: core::train_score_gaussians(&scores).map_err(to_py)?,
    })
}

#[pyfunction]
fn logit(p: f64) -> PyResult<f64> {
    core::logit(p).map_err(to_py)
}

#[pyfunction]
fn inverse_logit(z: f64) -> f64 {
    core::inverse_logit(z)
}

#[pyfunction]
#[pyo3(signature = (so, do_, ridge=0.0, grad_tolerance=1e-8, max_iterations=10_000))]
fn train_calibration(
    so: Vec<f64>,
    do_: Vec<f64>,
    ridge: f64,
    grad_tolerance: f64,
    max_iterations: usize,
) -> PyResult<PyCalibrationWeights> {
    let scores = LabeledScores::new(so, do_).map_err(to_py)?;
    let inner = core::train_calibration(&scores, &config(ridge, grad_tolerance, max_iterations)).map_err(to_py)?;
    Ok(PyCalibrationWeights { inner })
}

#[pyfunction]
#[pyo3(signature = (so, do_, ridge=0.0, grad_tolerance=1e-8, max_iterations=10_000))]
fn train_fusion(
    so: Vec<Vec<f64>>,
    do_: Vec<Vec<f64>>,
    ridge: f64,
    grad_tolerance: f64,
    max_iterations: usize,
) -> PyResult<PyCalibrationWeights> {
    let data = ParallelScores::new(so, do_).map_err(to_py)?;
    let inner = core::train_fusion(&data, &config(ridge, grad_tolerance, max_iterations)).map_err(to_py)?;
    Ok(PyCalibrationWeights { inner })
}

/// Equal-prior training objective in nats for parallel scores.
#[pyfunction]
#[pyo3(signature = (weights, so, do_, ridge=0.0))]
fn objective(weights: &PyCalibrationWeights, so: Vec<Vec<f64>>, do_: Vec<Vec<f64>>, ridge: f64) -> PyResult<f64> {
    let data = ParallelScores::new(so, do_).map_err(to_py)?;
    core::objective(&weights.inner, &data, &TrainConfig::with_ridge(ridge)).map_err(to_py)
}

#[pyfunction]
fn cllr(so: Vec<f64>, do_: Vec<f64>) -> PyResult<f64> {
    core::cllr(&LlrSet::new(so, do_).map_err(to_py)?).map_err(to_py)
}

/// List of (threshold_log10lr, so_ge_proportion, do_ge_proportion).
#[pyfunction]
#[pyo3(signature = (so, do_, n_thresholds=201))]
fn tippett_curve(so: Vec<f64>, do_: Vec<f64>, n_thresholds: usize) -> PyResult<Vec<(f64, f64, f64)>> {
    let curve = core::tippett_curve(&LlrSet::new(so, do_).map_err(to_py)?, n_thresholds).map_err(to_py)?;
    Ok(curve
        .points
        .iter()
        .map(|p| (p.threshold, p.so_proportion, p.do_proportion))
        .collect())
}

/// Leave-one-pair-out calibration; returns held-out (so_llrs, do_llrs).
#[pyfunction]
#[pyo3(signature = (so_scores, do_scores, groups=None, ridge=0.0))]
fn crossval_calibrate(
    so_scores: Vec<f64>,
    do_scores: Vec<f64>,
    groups: Option<Vec<Option<String>>>,
    ridge: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    if so_scores.len() != do_scores.len() {
        return Err(PyValueError::new_err("so_scores and do_scores must have equal length"));
    }
    let groups = groups.unwrap_or_else(|| vec![None; so_scores.len()]);
    if groups.len() != so_scores.len() {
        return Err(PyValueError::new_err("groups must match the number of pairs"));
    }
    let pairs = so_scores
        .into_iter()
        .zip(do_scores)
        .zip(groups)
        .map(|((so_score, do_score), group)| core::ScorePair {
            so_score,
            do_score,
            group,
        })
        .collect();
    let db = core::PairedScoreDb::new(pairs).map_err(to_py)?;
    let llrs = core::crossval_calibrate(&db, &TrainConfig::with_ridge(ridge)).map_err(to_py)?;
    Ok((llrs.so, llrs.do_))
}

/// (model, expected_alpha, expected_beta) for "fig4".."fig7".
#[pyfunction]
fn figure_config(figure_id: &str) -> PyResult<(PyScoreGaussianModel, f64, f64)> {
    let cfg = core::figure_config(figure(figure_id)?);
    Ok((
        PyScoreGaussianModel { inner: cfg.model },
        cfg.expected_alpha,
        cfg.expected_beta,
    ))
}

#[pyfunction]
fn sample_scores(model: &PyScoreGaussianModel, n_so: usize, n_do: usize, seed: u64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let s = core::sample_scores(&model.inner, n_so, n_do, seed).map_err(to_py)?;
    Ok((s.so, s.do_))
}

#[pymodule]
#[pyo3(name = "llrcal")]
fn py_llrcal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LOG_LR_CAP", core::LOG_LR_CAP)?;
    m.add("TrainingError", m.py().get_type::<TrainingError>())?;
    m.add("SeparationError", m.py().get_type::<SeparationError>())?;
    m.add_class::<PyScoreGaussianModel>()?;
    m.add_class::<PyCalibrationWeights>()?;
    m.add_function(wrap_pyfunction!(fit_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_lr, m)?)?;
    m.add_function(wrap_pyfunction!(gmm_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(gmm_lr, m)?)?;
    m.add_function(wrap_pyfunction!(score_from_points, m)?)?;
    m.add_function(wrap_pyfunction!(bimodal_demo, m)?)?;
    m.add_function(wrap_pyfunction!(train_score_gaussians, m)?)?;
    m.add_function(wrap_pyfunction!(logit, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_logit, m)?)?;
    m.add_function(wrap_pyfunction!(train_calibration, m)?)?;
    m.add_function(wrap_pyfunction!(train_fusion, m)?)?;
    m.add_function(wrap_pyfunction!(objective, m)?)?;
    m.add_function(wrap_pyfunction!(cllr, m)?)?;
    m.add_function(wrap_pyfunction!(tippett_curve, m)?)?;
    m.add_function(wrap_pyfunction!(crossval_calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(figure_config, m)?)?;
    m.add_function(wrap_pyfunction!(sample_scores, m)?)?;
    Ok(())
}
