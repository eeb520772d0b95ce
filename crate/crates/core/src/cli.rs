//! The `llrcal` command-line front end.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical or separation failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::evaluation::{self, crossval_calibrate_detailed, tippett_curve, DEFAULT_TIPPETT_THRESHOLDS};
use crate::gaussian_map::model_to_affine;
use crate::io::{self, Label, ScoreBase};
use crate::logreg::{train_fusion, CalibrationWeights, ParallelScores, TrainConfig, ROBUST_RIDGE_LAMBDA};
use crate::plot::tippett_svg;
use crate::score_engine::{bimodal_demo, score_from_points, OffenderData};
use crate::synthdata::{figure_config, sample_scores, FigureId};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "llrcal", version, about = "Calibrate, fuse and evaluate forensic likelihood-ratio scores")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a one-column logistic-regression calibration model.
    CalibrateTrain(TrainArgs),
    /// Train an n-column logistic-regression fusion model.
    FuseTrain(TrainArgs),
    /// Convert scores to base-10 log likelihood ratios with a trained model.
    Apply(ApplyArgs),
    /// Report Cllr and Tippett curves for a file of log likelihood ratios.
    Evaluate(EvaluateArgs),
    /// Leave-one-pair-out calibration of a paired score database.
    Crossval(CrossvalArgs),
    /// Run a synthetic demo: fig4, fig5, fig6, fig7 or bimodal.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Scores CSV with header label,s1[,s2,...].
    scores: PathBuf,
    /// Ridge penalty on the slopes; 0.001 handles separable data.
    #[arg(long, default_value_t = 0.0)]
    ridge: f64,
    /// Log base of the input scores: e or 10.
    #[arg(long = "score-base", default_value = "e")]
    score_base: ScoreBase,
    /// Where to write the model JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ApplyArgs {
    /// Model JSON written by calibrate-train or fuse-train.
    model: PathBuf,
    /// Scores CSV with the same number of columns as the model.
    scores: PathBuf,
    /// Log base of the input scores: e or 10.
    #[arg(long = "score-base", default_value = "e")]
    score_base: ScoreBase,
    /// Output LLR CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// LLR CSV with header label,llr_log10.
    llrs: PathBuf,
    /// Where to write the Tippett curve CSV.
    #[arg(long)]
    tippett: Option<PathBuf>,
    /// Where to write the Tippett plot as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Number of Tippett thresholds.
    #[arg(long, default_value_t = DEFAULT_TIPPETT_THRESHOLDS)]
    thresholds: usize,
}

#[derive(Debug, Args)]
struct CrossvalArgs {
    /// Pairs CSV with header so_score,do_score[,group].
    pairs: PathBuf,
    /// Ridge penalty on the slopes; 0.001 handles separable data.
    #[arg(long, default_value_t = 0.0)]
    ridge: f64,
    /// Log base of the input scores: e or 10.
    #[arg(long = "score-base", default_value = "e")]
    score_base: ScoreBase,
    /// Output LLR CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Writes one line per fold listing the pairs it trained on.
    #[arg(long)]
    audit: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DemoArgs {
    /// fig4, fig5, fig6, fig7 or bimodal.
    id: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Samples per class for figure demos.
    #[arg(long, default_value_t = 200_000)]
    n: usize,
    /// Where to write the sampled scores CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let numerical = e.is_numerical();
        let mut msg = e.to_string();
        if matches!(e, Error::Separation { .. })
            || matches!(&e, Error::Fold { source, .. } if matches!(**source, Error::Separation { .. }))
        {
            write!(msg, "\nhint: rerun with --ridge {ROBUST_RIDGE_LAMBDA}").unwrap();
        }
        if numerical {
            CliError::Numerical(msg)
        } else {
            CliError::Input(msg)
        }
    }
}

impl From<io::FormatError> for CliError {
    fn from(e: io::FormatError) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Input(format!("cannot write output: {e}")))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            let code = e.exit_code();
            if code == 0 {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::CalibrateTrain(a) => train(a, true, out),
        Command::FuseTrain(a) => train(a, false, out),
        Command::Apply(a) => apply(a, out),
        Command::Evaluate(a) => evaluate(a, out),
        Command::Crossval(a) => crossval(a, out),
        Command::Demo(a) => demo(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn training_cllr(weights: &CalibrationWeights, data: &ParallelScores) -> CliResult<f64> {
    let outputs = |rows: &[Vec<f64>]| -> CliResult<Vec<f64>> {
        rows.iter().map(|r| Ok(weights.apply(r)?)).collect()
    };
    let set = evaluation::LlrSet {
        so: outputs(&data.so)?,
        do_: outputs(&data.do_)?,
    };
    Ok(evaluation::cllr(&set)?)
}

fn train(args: TrainArgs, single_column: bool, out: &mut dyn Write) -> CliResult<()> {
    let file = io::parse_scores(&read(&args.scores)?, args.score_base)?;
    if single_column && file.columns != 1 {
        return Err(CliError::Input(format!(
            "calibrate-train expects one score column, found {}; use fuse-train",
            file.columns
        )));
    }
    let data = file.parallel();
    let weights = train_fusion(&data, &TrainConfig::with_ridge(args.ridge))?;
    let cllr = training_cllr(&weights, &data)?;

    let mut report = format!("alpha = {}\n", weights.alpha);
    if weights.betas.len() == 1 {
        writeln!(report, "beta = {}", weights.betas[0]).unwrap();
    } else {
        for (i, b) in weights.betas.iter().enumerate() {
            writeln!(report, "beta{} = {b}", i + 1).unwrap();
        }
    }
    writeln!(report, "training Cllr = {cllr:.12}").unwrap();
    if let Some(path) = &args.out {
        write(path, &weights.to_json())?;
        writeln!(report, "model written to {}", path.display()).unwrap();
    }
    emit(out, &report)
}

fn apply(args: ApplyArgs, out: &mut dyn Write) -> CliResult<()> {
    let weights = CalibrationWeights::from_json(&read(&args.model)?)?;
    let file = io::parse_scores(&read(&args.scores)?, args.score_base)?;
    if file.columns != weights.dim() {
        return Err(CliError::Input(format!(
            "model expects {} score columns, file has {}",
            weights.dim(),
            file.columns
        )));
    }
    let rows = file
        .rows
        .iter()
        .map(|r| Ok((r.label, weights.apply(&r.scores)?)))
        .collect::<CliResult<Vec<(Label, f64)>>>()?;
    let text = io::write_llrs(&rows);
    match &args.out {
        Some(path) => write(path, &text),
        None => emit(out, &text),
    }
}

fn evaluate(args: EvaluateArgs, out: &mut dyn Write) -> CliResult<()> {
    let file = io::parse_llrs(&read(&args.llrs)?)?;
    let set = file.llr_set();
    let cllr = evaluation::cllr(&set)?;
    let mut report = format!("Cllr = {cllr:.12}\n");
    writeln!(
        report,
        "same-origin: {}  different-origin: {}",
        set.so.len(),
        set.do_.len()
    )
    .unwrap();
    if args.tippett.is_some() || args.svg.is_some() {
        let curve = tippett_curve(&set, args.thresholds)?;
        if let Some(path) = &args.tippett {
            write(path, &curve.to_csv())?;
            writeln!(report, "Tippett curve written to {}", path.display()).unwrap();
        }
        if let Some(path) = &args.svg {
            write(path, &tippett_svg(&curve))?;
            writeln!(report, "Tippett plot written to {}", path.display()).unwrap();
        }
    }
    emit(out, &report)
}

fn crossval(args: CrossvalArgs, out: &mut dyn Write) -> CliResult<()> {
    let db = io::parse_pairs(&read(&args.pairs)?, args.score_base)?;
    let result = crossval_calibrate_detailed(&db, &TrainConfig::with_ridge(args.ridge)).map_err(|e| match e {
        Error::Fold { fold, source } => {
            // data rows start on line 2
            let mut err = CliError::from(*source);
            let prefix = format!("fold for pair {fold} (line {}): ", fold + 2);
            match &mut err {
                CliError::Input(m) | CliError::Numerical(m) => m.insert_str(0, &prefix),
            }
            err
        }
        other => other.into(),
    })?;

    let rows: Vec<(Label, f64)> = result
        .llrs
        .so
        .iter()
        .zip(&result.llrs.do_)
        .flat_map(|(&s, &d)| [(Label::Ss, s), (Label::Ds, d)])
        .collect();
    let text = io::write_llrs(&rows);
    if let Some(path) = &args.audit {
        let mut audit = String::from("held_out,group,train_pairs\n");
        for fold in &result.folds {
            let group = db.pairs()[fold.held_out].group.as_deref().unwrap_or("");
            let train: Vec<String> = fold.train.iter().map(usize::to_string).collect();
            writeln!(audit, "{},{group},{}", fold.held_out, train.join(" ")).unwrap();
        }
        write(path, &audit)?;
    }
    let cllr = evaluation::cllr(&result.llrs)?;
    match &args.out {
        Some(path) => {
            write(path, &text)?;
            emit(out, &format!("Cllr = {cllr:.12}\n"))
        }
        None => emit(out, &format!("{text}Cllr = {cllr:.12}\n")),
    }
}

fn demo(args: DemoArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.id.eq_ignore_ascii_case("bimodal") {
        return demo_bimodal(out);
    }
    let id: FigureId = args
        .id
        .parse()
        .map_err(|_| CliError::Input(format!("unknown demo {:?}; expected fig4..fig7 or bimodal", args.id)))?;
    if args.n == 0 {
        return Err(CliError::Input("--n must be at least 1".into()));
    }
    let cfg = figure_config(id);
    let aff = model_to_affine(&cfg.model);
    let mut report = format!("figure: {id}\n");
    writeln!(
        report,
        "model: mu_so = {} mu_do = {} sigma = {}",
        cfg.model.mu_so(),
        cfg.model.mu_do(),
        cfg.model.sigma()
    )
    .unwrap();
    writeln!(report, "analytic: alpha = {} beta = {}", aff.alpha, aff.beta).unwrap();

    let sample = sample_scores(&cfg.model, args.n, args.n, args.seed)?;
    if let Some(path) = &args.out {
        write(path, &io::write_labeled_scores(&sample))?;
        writeln!(
            report,
            "sample: {} ss + {} ds scores (seed {}) written to {}",
            args.n,
            args.n,
            args.seed,
            path.display()
        )
        .unwrap();
    }
    let fitted = crate::logreg::train_calibration(&sample, &TrainConfig::default())?;
    writeln!(
        report,
        "logistic regression: alpha = {:.6} beta = {:.6}",
        fitted.alpha, fitted.betas[0]
    )
    .unwrap();
    emit(out, &report)
}

fn demo_bimodal(out: &mut dyn Write) -> CliResult<()> {
    let demo = bimodal_demo();
    let (lr1, lr2, lr_mid) = demo.likelihood_ratios();
    let mut report = String::from("point,x,lr,log10_lr\n");
    for (name, x, lr) in [
        ("x1", demo.x1, lr1),
        ("x2", demo.x2, lr2),
        ("midpoint", demo.midpoint(), lr_mid),
    ] {
        writeln!(report, "{name},{x},{lr:.6},{:.6}", lr.log10()).unwrap();
    }
    let points = OffenderData::new(vec![demo.x1, demo.x2])?;
    let score = score_from_points(&points, &demo.suspect, &demo.background)?;
    writeln!(
        report,
        "score from both points: {score:.6} (LR {:.6}); LR at the midpoint is lower than at either point: {}",
        score.exp(),
        lr_mid < lr1.min(lr2)
    )
    .unwrap();
    emit(out, &report)
}
