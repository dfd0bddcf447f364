//! Precision, recall and F1 of a predicted DOCEL log against a gold one, at
//! the attribute-to-type matching level and at the row assignment level.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{AttributeValue, DocelLog, Match, MatchMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalLevel {
    Matching,
    Assignment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalMode {
    #[serde(rename = "propagate-fp")]
    PropagateFp,
    #[serde(rename = "no-propagate-fp")]
    NoPropagateFp,
    #[serde(rename = "n/a")]
    NotApplicable,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl EvalCounts {
    pub fn from_sets<T: Eq + std::hash::Hash>(predicted: &HashSet<T>, gold: &HashSet<T>) -> Self {
        let tp = predicted.intersection(gold).count();
        EvalCounts {
            tp,
            fp: predicted.len() - tp,
            fn_: gold.len() - tp,
        }
    }

    /// `None` when nothing was predicted.
    pub fn precision(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fp)
    }

    /// `None` when the gold standard is empty.
    pub fn recall(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> Option<f64> {
        let (p, r) = (self.precision()?, self.recall()?);
        Some(if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) })
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub level: EvalLevel,
    pub mode: EvalMode,
    #[serde(flatten)]
    pub counts: EvalCounts,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

impl EvalReport {
    pub fn new(level: EvalLevel, mode: EvalMode, counts: EvalCounts) -> Self {
        EvalReport {
            level,
            mode,
            counts,
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
        }
    }
}

/// The match set implied by a DOCEL log's dynamic-attribute registry.
pub fn registry_matches(log: &DocelLog) -> Vec<Match> {
    log.registry()
        .into_iter()
        .map(|(a, t)| Match::new(a, t, MatchMethod::UniqueCandidate))
        .collect()
}

/// Compares predicted (attribute, type) pairs with the gold registry. A right
/// attribute matched to the wrong type is both a false positive and a false
/// negative.
pub fn eval_matching(gold: &DocelLog, predicted: &[Match]) -> EvalReport {
    let gold_pairs: HashSet<(String, String)> = gold.registry().into_iter().collect();
    let pred_pairs: HashSet<(String, String)> = predicted
        .iter()
        .map(|m| (m.attr.clone(), m.object_type.clone()))
        .collect();
    EvalReport::new(
        EvalLevel::Matching,
        EvalMode::NotApplicable,
        EvalCounts::from_sets(&pred_pairs, &gold_pairs),
    )
}

type RowKey<'a> = (&'a str, &'a str, &'a str, &'a AttributeValue);

fn row_keys<'a>(log: &'a DocelLog, keep: impl Fn(&str, &str) -> bool) -> HashSet<RowKey<'a>> {
    log.dynamic_tables
        .iter()
        .filter(|(attr, table)| keep(attr, &table.object_type))
        .flat_map(|(attr, table)| {
            table
                .rows
                .iter()
                .map(move |r| (attr.as_str(), r.oid.as_str(), r.eid.as_str(), &r.value))
        })
        .collect()
}

/// Compares rows as (attribute, object, event, value) tuples; value ids are
/// ignored. Without fp propagation only tables whose (attribute, type) pair
/// is in the gold registry are counted.
pub fn eval_assignment(gold: &DocelLog, pred: &DocelLog, propagate_fp: bool) -> EvalReport {
    let registry: BTreeMap<String, String> = gold.registry();
    let gold_rows = row_keys(gold, |_, _| true);
    let pred_rows = row_keys(pred, |attr, t| {
        propagate_fp || registry.get(attr).is_some_and(|g| g == t)
    });
    let mode = if propagate_fp {
        EvalMode::PropagateFp
    } else {
        EvalMode::NoPropagateFp
    };
    EvalReport::new(
        EvalLevel::Assignment,
        mode,
        EvalCounts::from_sets(&pred_rows, &gold_rows),
    )
}

fn fmt_score(x: Option<f64>) -> String {
    x.map_or_else(|| "null".to_string(), |v| format!("{v:.2}"))
}

fn level_name(l: EvalLevel) -> &'static str {
    match l {
        EvalLevel::Matching => "matching",
        EvalLevel::Assignment => "assignment",
    }
}

fn mode_name(m: EvalMode) -> &'static str {
    match m {
        EvalMode::PropagateFp => "propagate-fp",
        EvalMode::NoPropagateFp => "no-propagate-fp",
        EvalMode::NotApplicable => "n/a",
    }
}

/// Plain-text table with one line per report.
pub fn render_table(reports: &[EvalReport]) -> String {
    let header = ["level", "mode", "tp", "fp", "fn", "precision", "recall", "f1"];
    let rows: Vec<[String; 8]> = reports
        .iter()
        .map(|r| {
            [
                level_name(r.level).to_string(),
                mode_name(r.mode).to_string(),
                r.counts.tp.to_string(),
                r.counts.fp.to_string(),
                r.counts.fn_.to_string(),
                fmt_score(r.precision),
                fmt_score(r.recall),
                fmt_score(r.f1),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i < 2 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(header.to_vec(), &mut out);
    for row in &rows {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

/// Attributes whose gold type was not predicted.
pub fn missed_attributes(gold: &DocelLog, predicted: &[Match]) -> BTreeSet<String> {
    let pred: HashSet<(&str, &str)> = predicted
        .iter()
        .map(|m| (m.attr.as_str(), m.object_type.as_str()))
        .collect();
    gold.registry()
        .into_iter()
        .filter(|(a, t)| !pred.contains(&(a.as_str(), t.as_str())))
        .map(|(a, _)| a)
        .collect()
}
