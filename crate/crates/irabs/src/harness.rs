//! Running experiments: one config at a time or a batch across worker threads.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use irabs_core::cfr::{CfrIraSolver, CfrOptions};
use irabs_core::domains::{pursuit, Domain};
use irabs_core::fpira::{FpOptions, FpSolver, FpiraSolver};
use irabs_core::run::{run, Clock, RunLimits, RunTrace, Solver};
use irabs_core::strategy::BehavioralStrategy;
use irabs_core::GameTree;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, BatchConfig, ExperimentConfig};
use crate::format;
use crate::trace;

/// Worker count for `bench` when the flag is not given.
pub const WORKERS_ENV: &str = "IRABS_WORKERS";

/// Seconds since construction.
pub struct WallClock(Instant);

impl WallClock {
    pub fn new() -> Self {
        WallClock(Instant::now())
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn seconds(&mut self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Builds the game a config names, reading the game or graph file if there is one.
pub fn load_game(cfg: &ExperimentConfig) -> Result<GameTree> {
    if cfg.is_game_file() {
        let text = fs::read_to_string(&cfg.domain).with_context(|| format!("reading {}", cfg.domain))?;
        return Ok(format::game_from_json(&text)?);
    }
    let domain: Domain = cfg.domain.parse()?;
    match (&domain, &cfg.graph) {
        (Domain::Pursuit(p), Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(pursuit(&format::parse_graph(&text, p.max_rounds)?))
        }
        _ => Ok(domain.build()),
    }
}

pub fn make_solver<'g>(game: &'g GameTree, cfg: &ExperimentConfig) -> Box<dyn Solver + 'g> {
    let cfr = CfrOptions {
        k_bound: cfg.k_b.unwrap_or(0),
        k_heuristic: cfg.k_h.unwrap_or(0),
        delay: cfg.delay,
        seed: cfg.seed,
        ..CfrOptions::default()
    };
    match cfg.algorithm {
        Algorithm::Fp => Box::new(FpSolver::new(game, FpOptions::default())),
        Algorithm::Fpira => Box::new(FpiraSolver::new(game, FpOptions::default())),
        Algorithm::CfrPlus => Box::new(CfrIraSolver::plain(game, cfr)),
        Algorithm::CfrIra => Box::new(CfrIraSolver::new(game, cfr)),
    }
}

pub struct ExperimentResult {
    pub trace: RunTrace,
    pub converged: bool,
    pub original_infosets: usize,
    pub strategy: BehavioralStrategy,
    /// Final abstraction as JSON, for solvers that keep one.
    pub mapping: Option<String>,
    pub strategy_json: String,
}

/// Runs one experiment. Writes the CSV trace when the config names an output path.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let game = load_game(cfg)?;
    let mut solver = make_solver(&game, cfg);
    let limits = RunLimits { epsilon: cfg.epsilon, max_iterations: cfg.max_iterations, check_interval: cfg.check_interval };
    let outcome = run(solver.as_mut(), limits, &mut WallClock::new());
    let strategy = solver.average_strategy();
    let result = ExperimentResult {
        strategy_json: format::strategy_to_json(&game, &strategy),
        mapping: solver.abstraction().map(format::mapping_to_json),
        trace: outcome.trace,
        converged: outcome.converged,
        original_infosets: game.num_infosets(),
        strategy,
    };
    if let Some(path) = &cfg.output {
        write_csv(path, &result.trace)?;
    }
    Ok(result)
}

pub fn write_csv(path: &Path, t: &RunTrace) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    trace::write_trace(t, f)?;
    Ok(())
}

/// One line of a batch's `index.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub config: ExperimentConfig,
    pub trace: PathBuf,
    pub converged: bool,
    pub iterations: u64,
    pub final_exploitability: f64,
    pub abstract_infoset_count: usize,
    pub original_infosets: usize,
}

/// Runs every expanded config of a batch on `workers` threads and writes `index.json`.
pub fn run_batch(batch: &BatchConfig, workers: usize) -> Result<Vec<IndexEntry>> {
    let runs = batch.expand()?;
    fs::create_dir_all(&batch.output_dir)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let entries: Vec<IndexEntry> = pool.install(|| {
        runs.par_iter()
            .map(|cfg| {
                let r = run_experiment(cfg)?;
                let last = r.trace.last().copied().expect("a run has its initial row");
                Ok(IndexEntry {
                    config: cfg.clone(),
                    trace: cfg.output.clone().expect("expanded configs have outputs"),
                    converged: r.converged,
                    iterations: last.iteration,
                    final_exploitability: last.exploitability_sum,
                    abstract_infoset_count: last.abstract_infoset_count,
                    original_infosets: r.original_infosets,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let index = batch.output_dir.join("index.json");
    fs::write(&index, serde_json::to_string_pretty(&entries)?)?;
    Ok(entries)
}

pub fn read_index(path: &Path) -> Result<Vec<IndexEntry>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}
