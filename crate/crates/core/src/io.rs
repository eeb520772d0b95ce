//! CSV file formats used by the command-line tool.
//!
//! * scores: `label,s1[,s2,...,sn]` with labels `ss` / `ds`
//! * llrs:   `label,llr_log10`
//! * pairs:  `so_score,do_score[,group]`
//!
//! UTF-8, `.` decimal separator, LF or CRLF line endings.

use std::f64::consts::LN_10;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::evaluation::{LlrSet, PairedScoreDb, ScorePair};
use crate::gaussian_map::LabeledScores;
use crate::logreg::ParallelScores;

pub const LLR_CSV_HEADER: &str = "label,llr_log10";

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: u64,
    pub message: String,
}

impl FormatError {
    fn new(line: u64, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    /// Same source.
    Ss,
    /// Different source.
    Ds,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Ss => "ss",
            Label::Ds => "ds",
        }
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ss" => Ok(Label::Ss),
            "ds" => Ok(Label::Ds),
            other => Err(format!("unknown label {other:?}, expected ss or ds")),
        }
    }
}

/// Units of scores on ingest. Everything is converted to natural log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreBase {
    #[default]
    E,
    Ten,
}

impl ScoreBase {
    pub fn to_natural(self, v: f64) -> f64 {
        match self {
            ScoreBase::E => v,
            ScoreBase::Ten => v * LN_10,
        }
    }
}

impl FromStr for ScoreBase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "e" => Ok(ScoreBase::E),
            "10" => Ok(ScoreBase::Ten),
            other => Err(format!("unknown score base {other:?}, expected e or 10")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub label: Label,
    pub scores: Vec<f64>,
}

/// Labelled score rows in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreFile {
    pub columns: usize,
    pub rows: Vec<ScoreRow>,
}

impl ScoreFile {
    pub fn parallel(&self) -> ParallelScores {
        let pick = |label| {
            self.rows
                .iter()
                .filter(|r| r.label == label)
                .map(|r| r.scores.clone())
                .collect()
        };
        ParallelScores {
            so: pick(Label::Ss),
            do_: pick(Label::Ds),
        }
    }

    /// Single-column view; `None` when the file has several score columns.
    pub fn labeled(&self) -> Option<LabeledScores> {
        if self.columns != 1 {
            return None;
        }
        let pick = |label| {
            self.rows
                .iter()
                .filter(|r| r.label == label)
                .map(|r| r.scores[0])
                .collect()
        };
        Some(LabeledScores {
            so: pick(Label::Ss),
            do_: pick(Label::Ds),
        })
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn header(rdr: &mut csv::Reader<&[u8]>) -> Result<Vec<String>, FormatError> {
    let h = rdr
        .headers()
        .map_err(|e| FormatError::new(1, format!("unreadable header: {e}")))?;
    Ok(h.iter().map(|s| s.trim_start_matches('\u{feff}').to_string()).collect())
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_number(field: &str, line: u64, what: &str) -> Result<f64, FormatError> {
    let v: f64 = field
        .parse()
        .map_err(|_| FormatError::new(line, format!("{what}: {field:?} is not a number")))?;
    if !v.is_finite() {
        return Err(FormatError::new(line, format!("{what}: {field:?} is not finite")));
    }
    Ok(v)
}

fn records(rdr: csv::Reader<&[u8]>) -> impl Iterator<Item = Result<csv::StringRecord, FormatError>> + '_ {
    rdr.into_records().map(|r| {
        r.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            FormatError::new(line, e.to_string())
        })
    })
}

pub fn parse_scores(text: &str, base: ScoreBase) -> Result<ScoreFile, FormatError> {
    let mut rdr = reader(text);
    let head = header(&mut rdr)?;
    if head.first().map(String::as_str) != Some("label") || head.len() < 2 {
        return Err(FormatError::new(
            1,
            "scores header must be label,s1[,s2,...]",
        ));
    }
    let columns = head.len() - 1;
    let mut rows = Vec::new();
    for record in records(rdr) {
        let record = record?;
        let line = line_of(&record);
        if record.len() != columns + 1 {
            return Err(FormatError::new(
                line,
                format!("expected {} fields, found {}", columns + 1, record.len()),
            ));
        }
        let label = record[0].parse::<Label>().map_err(|m| FormatError::new(line, m))?;
        let scores = record
            .iter()
            .skip(1)
            .map(|f| parse_number(f, line, "score").map(|v| base.to_natural(v)))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(ScoreRow { label, scores });
    }
    Ok(ScoreFile { columns, rows })
}

/// Writes one-column scores, same-origin rows first.
pub fn write_labeled_scores(scores: &LabeledScores) -> String {
    let mut out = String::with_capacity(24 * (scores.so.len() + scores.do_.len() + 1));
    out.push_str("label,s1\n");
    for v in &scores.so {
        writeln!(out, "ss,{v}").expect("write to string");
    }
    for v in &scores.do_ {
        writeln!(out, "ds,{v}").expect("write to string");
    }
    out
}

pub fn write_parallel_scores(scores: &ParallelScores) -> String {
    let n = scores.so.first().or(scores.do_.first()).map_or(1, Vec::len);
    let mut out = String::from("label");
    for i in 1..=n {
        write!(out, ",s{i}").expect("write to string");
    }
    out.push('\n');
    for (label, rows) in [(Label::Ss, &scores.so), (Label::Ds, &scores.do_)] {
        for row in rows {
            out.push_str(label.as_str());
            for v in row {
                write!(out, ",{v}").expect("write to string");
            }
            out.push('\n');
        }
    }
    out
}

/// Natural-log LRs with their labels, in file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LlrFile {
    pub rows: Vec<(Label, f64)>,
}

impl LlrFile {
    pub fn llr_set(&self) -> LlrSet {
        let pick = |label| {
            self.rows
                .iter()
                .filter(|(l, _)| *l == label)
                .map(|&(_, v)| v)
                .collect()
        };
        LlrSet {
            so: pick(Label::Ss),
            do_: pick(Label::Ds),
        }
    }
}

pub fn parse_llrs(text: &str) -> Result<LlrFile, FormatError> {
    let mut rdr = reader(text);
    let head = header(&mut rdr)?;
    if head.join(",") != LLR_CSV_HEADER {
        return Err(FormatError::new(1, format!("llr header must be {LLR_CSV_HEADER}")));
    }
    let mut rows = Vec::new();
    for record in records(rdr) {
        let record = record?;
        let line = line_of(&record);
        if record.len() != 2 {
            return Err(FormatError::new(line, format!("expected 2 fields, found {}", record.len())));
        }
        let label = record[0].parse::<Label>().map_err(|m| FormatError::new(line, m))?;
        let v = parse_number(&record[1], line, "llr")?;
        rows.push((label, v * LN_10));
    }
    Ok(LlrFile { rows })
}

/// Writes natural-log LRs as base-10 values.
pub fn write_llrs(rows: &[(Label, f64)]) -> String {
    let mut out = String::with_capacity(24 * (rows.len() + 1));
    out.push_str(LLR_CSV_HEADER);
    out.push('\n');
    for (label, v) in rows {
        writeln!(out, "{},{}", label.as_str(), v / LN_10).expect("write to string");
    }
    out
}

pub fn parse_pairs(text: &str, base: ScoreBase) -> Result<PairedScoreDb, FormatError> {
    let mut rdr = reader(text);
    let head = header(&mut rdr)?;
    let grouped = match head.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["so_score", "do_score"] => false,
        ["so_score", "do_score", "group"] => true,
        _ => {
            return Err(FormatError::new(
                1,
                "pairs header must be so_score,do_score[,group]",
            ))
        }
    };
    let width = if grouped { 3 } else { 2 };
    let mut pairs = Vec::new();
    for record in records(rdr) {
        let record = record?;
        let line = line_of(&record);
        if record.len() != width {
            return Err(FormatError::new(line, format!("expected {width} fields, found {}", record.len())));
        }
        let so_score = base.to_natural(parse_number(&record[0], line, "so_score")?);
        let do_score = base.to_natural(parse_number(&record[1], line, "do_score")?);
        let group = if grouped && !record[2].is_empty() {
            Some(record[2].to_string())
        } else {
            None
        };
        pairs.push(ScorePair {
            so_score,
            do_score,
            group,
        });
    }
    PairedScoreDb::new(pairs).map_err(|e| FormatError::new(1, e.to_string()))
}
