//! Validity metrics for calibrated output: Cllr, Tippett curves and the
//! leave-one-pair-out calibration protocol.

use std::fmt::Write as _;
use std::f64::consts::{LN_10, LN_2};

use crate::error::{ensure_finite, Error, Result};
use crate::gaussian_map::LabeledScores;
use crate::logreg::{train_calibration, CalibrationWeights, TrainConfig};
use crate::numeric::softplus;

/// Default number of thresholds on a Tippett curve.
pub const DEFAULT_TIPPETT_THRESHOLDS: usize = 201;

pub const TIPPETT_CSV_HEADER: &str = "threshold_log10lr,so_ge_proportion,do_ge_proportion";

/// Natural-log LRs from same-origin and different-origin test comparisons.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LlrSet {
    pub so: Vec<f64>,
    pub do_: Vec<f64>,
}

impl LlrSet {
    pub fn new(so: Vec<f64>, do_: Vec<f64>) -> Result<Self> {
        ensure_finite(&so, "same-origin llrs")?;
        ensure_finite(&do_, "different-origin llrs")?;
        Ok(Self { so, do_ })
    }

    /// Builds a set from base-10 log LRs.
    pub fn from_log10(so: &[f64], do_: &[f64]) -> Result<Self> {
        Self::new(
            so.iter().map(|v| v * LN_10).collect(),
            do_.iter().map(|v| v * LN_10).collect(),
        )
    }
}

/// Log-likelihood-ratio cost in bits.
///
/// `½ [mean_so log2(1 + e^-llr) + mean_do log2(1 + e^llr)]`. Equals 1 for a
/// system that always outputs LR = 1; lower is better.
pub fn cllr(llrs: &LlrSet) -> Result<f64> {
    if llrs.so.is_empty() {
        return Err(Error::EmptyClass("same-origin"));
    }
    if llrs.do_.is_empty() {
        return Err(Error::EmptyClass("different-origin"));
    }
    ensure_finite(&llrs.so, "same-origin llrs")?;
    ensure_finite(&llrs.do_, "different-origin llrs")?;
    let so: f64 = llrs.so.iter().map(|&l| softplus(-l)).sum::<f64>() / llrs.so.len() as f64;
    let do_: f64 = llrs.do_.iter().map(|&l| softplus(l)).sum::<f64>() / llrs.do_.len() as f64;
    Ok(0.5 * (so + do_) / LN_2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TippettPoint {
    /// Base-10 log LR threshold.
    pub threshold: f64,
    /// Fraction of same-origin LLRs at or above the threshold.
    pub so_proportion: f64,
    /// Fraction of different-origin LLRs at or above the threshold.
    pub do_proportion: f64,
}

/// Survival curves of both classes over base-10 log LR.
#[derive(Debug, Clone, PartialEq)]
pub struct TippettCurve {
    pub points: Vec<TippettPoint>,
}

impl TippettCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.points.len() + 1));
        out.push_str(TIPPETT_CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            writeln!(out, "{},{},{}", p.threshold, p.so_proportion, p.do_proportion)
                .expect("write to string");
        }
        out
    }
}

fn sorted_log10(values: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().map(|x| x / LN_10).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Fraction of a sorted slice that is >= t.
fn survival(sorted: &[f64], t: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let below = sorted.partition_point(|&v| v < t);
    (sorted.len() - below) as f64 / sorted.len() as f64
}

/// Proportions of each class with base-10 log LR >= `threshold`.
pub fn tippett_proportions_at(llrs: &LlrSet, threshold: f64) -> (f64, f64) {
    (
        survival(&sorted_log10(&llrs.so), threshold),
        survival(&sorted_log10(&llrs.do_), threshold),
    )
}

/// Evenly spaced Tippett curve covering the pooled base-10 range plus a
/// margin on each side, so the first point has both proportions at 1 and the
/// last has both at 0.
pub fn tippett_curve(llrs: &LlrSet, n_thresholds: usize) -> Result<TippettCurve> {
    if n_thresholds < 2 {
        return Err(Error::InvalidParameter(format!(
            "a Tippett curve needs at least 2 thresholds, got {n_thresholds}"
        )));
    }
    if llrs.so.is_empty() && llrs.do_.is_empty() {
        return Err(Error::InvalidParameter("no llrs to plot".into()));
    }
    ensure_finite(&llrs.so, "same-origin llrs")?;
    ensure_finite(&llrs.do_, "different-origin llrs")?;
    let so = sorted_log10(&llrs.so);
    let do_ = sorted_log10(&llrs.do_);
    let lo = so.first().copied().unwrap_or(f64::INFINITY).min(do_.first().copied().unwrap_or(f64::INFINITY));
    let hi = so.last().copied().unwrap_or(f64::NEG_INFINITY).max(do_.last().copied().unwrap_or(f64::NEG_INFINITY));
    let margin = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    let (start, end) = (lo - margin, hi + margin);
    let step = (end - start) / (n_thresholds - 1) as f64;
    let points = (0..n_thresholds)
        .map(|i| {
            let threshold = if i == n_thresholds - 1 { end } else { start + i as f64 * step };
            TippettPoint {
                threshold,
                so_proportion: survival(&so, threshold),
                do_proportion: survival(&do_, threshold),
            }
        })
        .collect();
    Ok(TippettCurve { points })
}

/// One held-out comparison pair: a same-origin and a different-origin score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScorePair {
    pub so_score: f64,
    pub do_score: f64,
    pub group: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedScoreDb {
    pairs: Vec<ScorePair>,
}

impl PairedScoreDb {
    pub fn new(pairs: Vec<ScorePair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("paired score database is empty".into()));
        }
        for p in &pairs {
            if !(p.so_score.is_finite() && p.do_score.is_finite()) {
                return Err(Error::NonFinite("paired scores"));
            }
        }
        Ok(Self { pairs })
    }

    pub fn from_scores(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(so_score, do_score)| ScorePair {
                    so_score,
                    do_score,
                    group: None,
                })
                .collect(),
        )
    }

    pub fn pairs(&self) -> &[ScorePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Which pairs train the model that scores `held_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fold {
    pub held_out: usize,
    pub train: Vec<usize>,
}

/// Leave-one-pair-out folds. A pair with a group excludes every pair
/// sharing that group from its training set.
pub fn fold_plan(db: &PairedScoreDb) -> Vec<Fold> {
    let pairs = db.pairs();
    (0..pairs.len())
        .map(|k| {
            let group = pairs[k].group.as_deref();
            let train = (0..pairs.len())
                .filter(|&i| i != k)
                .filter(|&i| group.is_none() || pairs[i].group.as_deref() != group)
                .collect();
            Fold { held_out: k, train }
        })
        .collect()
}

/// Calibrated held-out outputs in input order, plus per-fold weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValResult {
    pub llrs: LlrSet,
    pub folds: Vec<Fold>,
    pub weights: Vec<CalibrationWeights>,
}

/// Leave-one-pair-out calibration. Each fold retrains from scratch.
pub fn crossval_calibrate(db: &PairedScoreDb, config: &TrainConfig) -> Result<LlrSet> {
    crossval_calibrate_detailed(db, config).map(|r| r.llrs)
}

pub fn crossval_calibrate_detailed(db: &PairedScoreDb, config: &TrainConfig) -> Result<CrossValResult> {
    if db.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "cross-validation needs at least 3 pairs, got {}",
            db.len()
        )));
    }
    let pairs = db.pairs();
    let folds = fold_plan(db);
    let mut so = Vec::with_capacity(pairs.len());
    let mut do_ = Vec::with_capacity(pairs.len());
    let mut weights = Vec::with_capacity(pairs.len());
    for fold in &folds {
        let wrap = |source: Error| Error::Fold {
            fold: fold.held_out,
            source: Box::new(source),
        };
        let training = LabeledScores {
            so: fold.train.iter().map(|&i| pairs[i].so_score).collect(),
            do_: fold.train.iter().map(|&i| pairs[i].do_score).collect(),
        };
        let w = train_calibration(&training, config).map_err(wrap)?;
        let held = &pairs[fold.held_out];
        so.push(w.apply(&[held.so_score]).map_err(wrap)?);
        do_.push(w.apply(&[held.do_score]).map_err(wrap)?);
        weights.push(w);
    }
    Ok(CrossValResult {
        llrs: LlrSet { so, do_ },
        folds,
        weights,
    })
}
