//! CSV traces: a header row, then one row per exploitability check.

use std::io::{Read, Write};

use irabs_core::run::{RunTrace, TraceRow};
use serde::{Deserialize, Serialize};

/// Column names, in file order.
pub const COLUMNS: [&str; 10] = [
    "iteration",
    "exploitability_sum",
    "abstract_infoset_count",
    "mapping_words",
    "strategy_words",
    "regret_words",
    "aux_words",
    "cache_peak_words",
    "br_strategy_peak_words",
    "wall_seconds",
];

#[derive(Serialize, Deserialize)]
struct Row {
    iteration: u64,
    exploitability_sum: f64,
    abstract_infoset_count: usize,
    mapping_words: usize,
    strategy_words: usize,
    regret_words: usize,
    aux_words: usize,
    cache_peak_words: usize,
    br_strategy_peak_words: usize,
    wall_seconds: f64,
}

impl From<&TraceRow> for Row {
    fn from(r: &TraceRow) -> Self {
        Row {
            iteration: r.iteration,
            exploitability_sum: r.exploitability_sum,
            abstract_infoset_count: r.abstract_infoset_count,
            mapping_words: r.mapping_words,
            strategy_words: r.strategy_words,
            regret_words: r.regret_words,
            aux_words: r.aux_words,
            cache_peak_words: r.cache_peak_words,
            br_strategy_peak_words: r.br_strategy_peak_words,
            wall_seconds: r.wall_seconds,
        }
    }
}

impl From<Row> for TraceRow {
    fn from(r: Row) -> Self {
        TraceRow {
            iteration: r.iteration,
            exploitability_sum: r.exploitability_sum,
            abstract_infoset_count: r.abstract_infoset_count,
            mapping_words: r.mapping_words,
            strategy_words: r.strategy_words,
            regret_words: r.regret_words,
            aux_words: r.aux_words,
            cache_peak_words: r.cache_peak_words,
            br_strategy_peak_words: r.br_strategy_peak_words,
            wall_seconds: r.wall_seconds,
        }
    }
}

pub fn write_trace<W: Write>(trace: &RunTrace, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if trace.rows.is_empty() {
        w.write_record(COLUMNS)?;
    }
    for r in &trace.rows {
        w.serialize(Row::from(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> csv::Result<RunTrace> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize::<Row>().map(|row| row.map(TraceRow::from)).collect::<csv::Result<Vec<_>>>()?;
    Ok(RunTrace { rows })
}

pub fn trace_to_string(trace: &RunTrace) -> String {
    let mut buf = Vec::new();
    write_trace(trace, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}
