//! Mean and standard error over runs that differ only in the seed, aligned by
//! exploitability.
//!
//! For a threshold `e`, each run contributes its columns at the point where its
//! exploitability first reaches `e`. Between two checks the columns are interpolated
//! linearly in exploitability. Runs that never reach `e` are left out of that point.

use irabs_core::run::{RunTrace, TraceRow};
use thiserror::Error;

use crate::config::ExperimentConfig;

/// Aggregated columns, in this order.
pub const AGG_COLUMNS: [&str; 9] = [
    "iteration",
    "abstract_infoset_count",
    "mapping_words",
    "strategy_words",
    "regret_words",
    "aux_words",
    "cache_peak_words",
    "br_strategy_peak_words",
    "wall_seconds",
];

#[derive(Debug, Error, PartialEq)]
pub enum AggregateError {
    #[error("runs {0} and {1} use different configurations")]
    Mismatch(usize, usize),
    #[error("no runs to aggregate")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatePoint {
    pub exploitability: f64,
    /// Runs that reached this exploitability.
    pub runs: usize,
    pub mean: [f64; 9],
    pub stderr: [f64; 9],
}

fn columns(r: &TraceRow) -> [f64; 9] {
    [
        r.iteration as f64,
        r.abstract_infoset_count as f64,
        r.mapping_words as f64,
        r.strategy_words as f64,
        r.regret_words as f64,
        r.aux_words as f64,
        r.cache_peak_words as f64,
        r.br_strategy_peak_words as f64,
        r.wall_seconds,
    ]
}

/// Columns of `trace` where its exploitability first reaches `e`.
pub fn at_exploitability(trace: &RunTrace, e: f64) -> Option<[f64; 9]> {
    let j = trace.rows.iter().position(|r| r.exploitability_sum <= e)?;
    let hit = columns(&trace.rows[j]);
    if j == 0 {
        return Some(hit);
    }
    let (e0, e1) = (trace.rows[j - 1].exploitability_sum, trace.rows[j].exploitability_sum);
    let before = columns(&trace.rows[j - 1]);
    let w = if e0 > e1 { (e0 - e) / (e0 - e1) } else { 1.0 };
    let mut out = [0.0; 9];
    for k in 0..9 {
        out[k] = before[k] + w * (hit[k] - before[k]);
    }
    Some(out)
}

/// Successive new minima of the first trace's exploitability; the default thresholds.
pub fn default_thresholds(trace: &RunTrace) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for r in &trace.rows {
        if out.last().is_none_or(|&m| r.exploitability_sum < m) {
            out.push(r.exploitability_sum);
        }
    }
    out
}

/// Aggregates runs of one configuration at the given thresholds, or at the first run's
/// new minima when `thresholds` is empty.
pub fn aggregate(
    runs: &[(ExperimentConfig, RunTrace)],
    thresholds: &[f64],
) -> Result<Vec<AggregatePoint>, AggregateError> {
    let first = runs.first().ok_or(AggregateError::Empty)?;
    if let Some(j) = runs.iter().position(|(c, _)| !c.same_setup(&first.0)) {
        return Err(AggregateError::Mismatch(0, j));
    }
    let levels = if thresholds.is_empty() { default_thresholds(&first.1) } else { thresholds.to_vec() };
    let mut out = Vec::new();
    for e in levels {
        let vals: Vec<[f64; 9]> = runs.iter().filter_map(|(_, t)| at_exploitability(t, e)).collect();
        if vals.is_empty() {
            continue;
        }
        let n = vals.len() as f64;
        let mut mean = [0.0; 9];
        let mut stderr = [0.0; 9];
        for k in 0..9 {
            mean[k] = vals.iter().map(|v| v[k]).sum::<f64>() / n;
            if vals.len() > 1 {
                let var = vals.iter().map(|v| (v[k] - mean[k]).powi(2)).sum::<f64>() / (n - 1.0);
                stderr[k] = (var / n).sqrt();
            }
        }
        out.push(AggregatePoint { exploitability: e, runs: vals.len(), mean, stderr });
    }
    Ok(out)
}

/// CSV with `exploitability,runs`, then `<col>_mean,<col>_stderr` for each column.
pub fn to_csv(points: &[AggregatePoint]) -> String {
    let mut s = String::from("exploitability,runs");
    for c in AGG_COLUMNS {
        s.push_str(&format!(",{c}_mean,{c}_stderr"));
    }
    s.push('\n');
    for p in points {
        s.push_str(&format!("{},{}", p.exploitability, p.runs));
        for k in 0..9 {
            s.push_str(&format!(",{},{}", p.mean[k], p.stderr[k]));
        }
        s.push('\n');
    }
    s
}
