//! Test-only oracles. Nothing here calls into the optimizer.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use llrcal::{LabeledScores, ScoreGaussianModel};

/// ln(1 + e^t) written independently of the library.
pub fn softplus(t: f64) -> f64 {
    if t > 30.0 {
        t + (-t).exp()
    } else {
        t.exp().ln_1p()
    }
}

/// Equal-prior objective for one score column, straight from its definition.
pub fn objective_1d(alpha: f64, beta: f64, so: &[f64], do_: &[f64], ridge: f64) -> f64 {
    let so_term: f64 = so.iter().map(|s| softplus(-(alpha + beta * s))).sum::<f64>() / so.len() as f64;
    let do_term: f64 = do_.iter().map(|s| softplus(alpha + beta * s)).sum::<f64>() / do_.len() as f64;
    0.5 * (so_term + do_term) + 0.5 * ridge * beta * beta
}

/// Cllr in bits, straight from its definition.
pub fn cllr_direct(so: &[f64], do_: &[f64]) -> f64 {
    let so_term: f64 = so.iter().map(|l| (1.0 + (-l).exp()).log2()).sum::<f64>() / so.len() as f64;
    let do_term: f64 = do_.iter().map(|l| (1.0 + l.exp()).log2()).sum::<f64>() / do_.len() as f64;
    0.5 * (so_term + do_term)
}

/// Coarse-to-fine grid minimization of a convex function of (alpha, beta).
pub fn grid_minimize(f: impl Fn(f64, f64) -> f64, center: (f64, f64), span: f64) -> (f64, f64) {
    const STEPS: i32 = 40;
    let (mut ca, mut cb) = center;
    let mut half = span;
    while half > 1e-9 {
        let mut best = (f64::INFINITY, ca, cb);
        for i in -STEPS..=STEPS {
            for j in -STEPS..=STEPS {
                let a = ca + half * i as f64 / STEPS as f64;
                let b = cb + half * j as f64 / STEPS as f64;
                let v = f(a, b);
                if v < best.0 {
                    best = (v, a, b);
                }
            }
        }
        ca = best.1;
        cb = best.2;
        half /= 8.0;
    }
    (ca, cb)
}

/// Small overlapping datasets drawn from a Gaussian model with the given seed;
/// sets whose classes do not overlap are skipped so unregularized training
/// has a finite optimum.
pub fn small_overlapping_sets(model: &ScoreGaussianModel, count: usize, seed0: u64) -> Vec<LabeledScores> {
    let mut out = Vec::with_capacity(count);
    let mut seed = seed0;
    while out.len() < count {
        let n_so = 5 + (seed % 20) as usize;
        let n_do = 5 + ((seed / 20) % 25) as usize;
        let s = llrcal::sample_scores(model, n_so, n_do, seed).unwrap();
        seed += 1;
        let min_so = s.so.iter().copied().fold(f64::INFINITY, f64::min);
        let max_so = s.so.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min_do = s.do_.iter().copied().fold(f64::INFINITY, f64::min);
        let max_do = s.do_.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if min_so < max_do && min_do < max_so {
            out.push(s);
        }
    }
    out
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_llrcal")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("run llrcal")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

/// Value following `key = ` on some line of a report.
pub fn report_value(report: &str, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    report
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in report:\n{report}"))
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}
