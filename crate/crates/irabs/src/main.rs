use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use irabs::aggregate::{aggregate, to_csv};
use irabs::config::{Algorithm, BatchConfig, ExperimentConfig};
use irabs::format::game_to_json;
use irabs::harness::{load_game, read_index, run_batch, run_experiment, WORKERS_ENV};
use irabs::trace::read_trace;

#[derive(Parser)]
#[command(name = "irabs", version, about = "Solve zero-sum games through refined imperfect-recall abstractions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one solver until the exploitability target or the iteration budget.
    /// Exits 0 when converged and 3 when the budget ran out.
    Solve {
        /// `P<b><r><c>`, `GS<n>`, `GP<x>`, a test game name, or a game JSON file.
        #[arg(long)]
        domain: String,
        #[arg(long, value_enum)]
        alg: Algorithm,
        /// Members sampled for the regret-bound update (cfr_ira only).
        #[arg(long)]
        kb: Option<usize>,
        /// Members sampled for the heuristic update (cfr_ira only).
        #[arg(long)]
        kh: Option<usize>,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Iterations before averaging starts (CFR+ variants).
        #[arg(long, default_value_t = 100)]
        delay: u64,
        #[arg(long, default_value_t = 100_000)]
        max_iter: u64,
        /// Iterations between exploitability checks.
        #[arg(long, default_value_t = 10)]
        check_interval: u64,
        /// Graph file for graph pursuit.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// CSV trace output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Final average strategies as JSON.
        #[arg(long)]
        strategy_out: Option<PathBuf>,
        /// Final abstraction as JSON.
        #[arg(long)]
        mapping_out: Option<PathBuf>,
    },
    /// Run a batch of experiments in parallel and write an index.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
    },
    /// Mean and standard error of the runs in a batch index, one CSV per configuration.
    Aggregate {
        #[arg(long)]
        index: PathBuf,
        /// Exploitability levels; defaults to the first run's successive minima.
        #[arg(long, value_delimiter = ',')]
        at: Vec<f64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Print size figures of a game.
    Info {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Write a game as JSON.
    Export {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn game_config(domain: String, graph: Option<PathBuf>) -> ExperimentConfig {
    ExperimentConfig { graph, ..ExperimentConfig::new(&domain, Algorithm::Fp) }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    match Cli::parse().cmd {
        Cmd::Solve {
            domain,
            alg,
            kb,
            kh,
            eps,
            seed,
            delay,
            max_iter,
            check_interval,
            graph,
            out,
            strategy_out,
            mapping_out,
        } => {
            let cfg = ExperimentConfig {
                domain,
                algorithm: alg,
                epsilon: eps,
                k_b: kb,
                k_h: kh,
                delay,
                seed,
                max_iterations: max_iter,
                check_interval,
                graph,
                output: out,
            };
            let r = run_experiment(&cfg)?;
            if let Some(p) = strategy_out {
                fs::write(p, &r.strategy_json)?;
            }
            if let (Some(p), Some(m)) = (mapping_out, &r.mapping) {
                fs::write(p, m)?;
            }
            let last = r.trace.last().expect("initial row");
            println!(
                "{} iterations, exploitability {:.6}, {} of {} sets ({:.1}%), {} words, {:.2}s",
                last.iteration,
                last.exploitability_sum,
                last.abstract_infoset_count,
                r.original_infosets,
                100.0 * last.abstract_infoset_count as f64 / r.original_infosets as f64,
                last.total_words(),
                last.wall_seconds
            );
            Ok(if r.converged { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }
        Cmd::Bench { config, workers } => {
            let batch: BatchConfig = serde_json::from_str(&fs::read_to_string(&config)?)?;
            let workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let entries = run_batch(&batch, workers)?;
            for e in &entries {
                println!(
                    "{}: {} iterations, exploitability {:.6}, {} sets, converged {}",
                    e.trace.display(),
                    e.iterations,
                    e.final_exploitability,
                    e.abstract_infoset_count,
                    e.converged
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Aggregate { index, at, out_dir } => {
            let entries = read_index(&index)?;
            if entries.is_empty() {
                bail!("index {} lists no runs", index.display());
            }
            let mut groups: Vec<Vec<(ExperimentConfig, irabs_core::run::RunTrace)>> = Vec::new();
            for e in entries {
                let t = read_trace(fs::File::open(&e.trace)?)?;
                match groups.iter_mut().find(|g| g[0].0.same_setup(&e.config)) {
                    Some(g) => g.push((e.config, t)),
                    None => groups.push(vec![(e.config, t)]),
                }
            }
            fs::create_dir_all(&out_dir)?;
            for g in &groups {
                let points = aggregate(g, &at)?;
                let name = g[0].0.run_name();
                let stem = name.rsplit_once("_s").map_or(name.as_str(), |(a, _)| a);
                let path = out_dir.join(format!("{stem}.csv"));
                fs::write(&path, to_csv(&points))?;
                println!("{} ({} runs)", path.display(), g.len());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Info { domain, graph } => {
            let g = load_game(&game_config(domain, graph))?;
            let m = g.metrics();
            println!("nodes {}", m.nodes);
            println!("terminals {}", m.terminals);
            println!("depth {}", m.depth);
            println!("infosets {} (first player {}, second player {})", g.num_infosets(), m.infosets[0], m.infosets[1]);
            println!("max actions {} / {}", m.a_max[0], m.a_max[1]);
            println!("max |utility| {}", m.u_max);
            println!("perfect recall {}", g.has_perfect_recall());
            let init = irabs_core::Abstraction::initial(&g);
            println!("initial abstraction {} sets", init.live_count());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Export { domain, graph, out } => {
            let g = load_game(&game_config(domain, graph))?;
            fs::write(out, game_to_json(&g))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
