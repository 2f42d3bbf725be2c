//! Iteration loop shared by all solvers, with per-checkpoint trace rows.

use alloc::vec::Vec;

use crate::abstraction::Abstraction;
use crate::strategy::{BehavioralStrategy, Exploitability};

/// Storage of a solver, in 32-bit words (one float or one integer each).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WordCounts {
    /// Explicit part of the abstraction mapping.
    pub mapping: usize,
    /// Average-strategy floats.
    pub strategy: usize,
    /// Regret and averaging accumulators.
    pub regret: usize,
    /// Other working tables.
    pub aux: usize,
    /// Largest best-response cache seen.
    pub cache_peak: usize,
    /// Largest best-response strategy seen.
    pub br_strategy_peak: usize,
}

impl WordCounts {
    pub fn total(&self) -> usize {
        self.mapping + self.strategy + self.regret + self.aux + self.cache_peak + self.br_strategy_peak
    }
}

pub trait Solver {
    /// Iterations completed so far.
    fn iteration(&self) -> u64;
    fn step(&mut self);
    /// Exploitability of the current average profile.
    fn exploitability(&self) -> Exploitability;
    fn abstract_infoset_count(&self) -> usize;
    fn words(&self) -> WordCounts;
    /// Average profile of both players translated to the original game.
    fn average_strategy(&self) -> BehavioralStrategy;
    /// Current abstraction, if the solver works on one.
    fn abstraction(&self) -> Option<&Abstraction> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: u64,
    pub exploitability_sum: f64,
    pub abstract_infoset_count: usize,
    pub mapping_words: usize,
    pub strategy_words: usize,
    pub regret_words: usize,
    pub aux_words: usize,
    pub cache_peak_words: usize,
    pub br_strategy_peak_words: usize,
    /// Solver time only; exploitability checks are excluded.
    pub wall_seconds: f64,
}

impl TraceRow {
    pub fn total_words(&self) -> usize {
        self.mapping_words
            + self.strategy_words
            + self.regret_words
            + self.aux_words
            + self.cache_peak_words
            + self.br_strategy_peak_words
    }
}

/// One row per exploitability check, in increasing iteration order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
}

impl RunTrace {
    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }
    /// First checked row at or below `epsilon`.
    pub fn first_below(&self, epsilon: f64) -> Option<&TraceRow> {
        self.rows.iter().find(|r| r.exploitability_sum <= epsilon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunLimits {
    pub epsilon: f64,
    pub max_iterations: u64,
    /// Exploitability is checked every this many iterations and at the end.
    pub check_interval: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub trace: RunTrace,
    pub converged: bool,
}

/// Monotone seconds source.
pub trait Clock {
    fn seconds(&mut self) -> f64;
}

/// Clock that never advances.
pub struct NoClock;

impl Clock for NoClock {
    fn seconds(&mut self) -> f64 {
        0.0
    }
}

fn row<S: Solver + ?Sized>(s: &S, e: f64, wall: f64) -> TraceRow {
    let w = s.words();
    TraceRow {
        iteration: s.iteration(),
        exploitability_sum: e,
        abstract_infoset_count: s.abstract_infoset_count(),
        mapping_words: w.mapping,
        strategy_words: w.strategy,
        regret_words: w.regret,
        aux_words: w.aux,
        cache_peak_words: w.cache_peak,
        br_strategy_peak_words: w.br_strategy_peak,
        wall_seconds: wall,
    }
}

/// Iterates until the exploitability sum is at most `epsilon` or the budget runs out.
/// The initial profile is checked too.
pub fn run<S: Solver + ?Sized, C: Clock>(solver: &mut S, limits: RunLimits, clock: &mut C) -> RunOutcome {
    let interval = limits.check_interval.max(1);
    let mut trace = RunTrace::default();
    let mut wall = 0.0;
    let e = solver.exploitability().sum;
    trace.rows.push(row(solver, e, wall));
    if e <= limits.epsilon {
        return RunOutcome { trace, converged: true };
    }
    let mut done = 0;
    while done < limits.max_iterations {
        let t0 = clock.seconds();
        solver.step();
        wall += clock.seconds() - t0;
        done += 1;
        if done % interval == 0 || done == limits.max_iterations {
            let e = solver.exploitability().sum;
            trace.rows.push(row(solver, e, wall));
            if e <= limits.epsilon {
                return RunOutcome { trace, converged: true };
            }
        }
    }
    RunOutcome { trace, converged: false }
}
