//! Calibration of forensic comparison scores to likelihood ratios.
//!
//! * [`score_engine`]: likelihood ratios from raw univariate data under
//!   Gaussian or Gaussian-mixture suspect and background models.
//! * [`gaussian_map`]: the pooled-variance Gaussian score model and its
//!   affine log-odds form.
//! * [`logreg`]: equal-prior logistic-regression calibration and fusion.
//! * [`evaluation`]: Cllr, Tippett curves and leave-one-pair-out
//!   cross-validation.
//! * [`synthdata`]: the four analytic score configurations and seeded
//!   samplers.
//! * [`io`] and [`cli`]: file formats and the `llrcal` command.
//!
//! All log likelihood ratios are natural-log internally; base 10 is used
//! only in files and reports meant for people.

pub mod cli;
pub mod error;
pub mod evaluation;
pub mod gaussian_map;
pub mod io;
pub mod logreg;
mod numeric;
pub mod plot;
pub mod score_engine;
pub mod synthdata;

pub use error::{Error, Result};
pub use evaluation::{
    cllr, crossval_calibrate, crossval_calibrate_detailed, fold_plan, tippett_curve,
    tippett_proportions_at, CrossValResult, Fold, LlrSet, PairedScoreDb, ScorePair, TippettCurve,
    TippettPoint,
};
pub use gaussian_map::{
    inverse_logit, logit, model_to_affine, posterior_prob, score_llr, train_score_gaussians, Affine,
    LabeledScores, ScoreGaussianModel,
};
pub use logreg::{
    apply, objective, train_calibration, train_fusion, CalibrationWeights, ParallelScores,
    TrainConfig,
};
pub use numeric::{sigmoid, softplus};
pub use score_engine::{
    bimodal_demo, fit_gaussian, gaussian_lr, gmm_lr, gmm_pdf, score_from_points, BimodalDemo,
    GaussianParams, Gmm, OffenderData, LOG_LR_CAP,
};
pub use synthdata::{figure_config, sample_parallel, sample_scores, FigureConfig, FigureId};
