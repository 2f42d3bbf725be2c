use irabs::aggregate::{aggregate, AGG_COLUMNS};
use irabs::config::{Algorithm, BatchConfig, BatchEntry, ExperimentConfig};
use irabs::format::{game_from_json, game_to_json};
use irabs::harness::{read_index, run_batch};
use irabs::trace::{read_trace, trace_to_string};
use irabs_core::domains::Domain;
use irabs_core::run::{RunTrace, TraceRow};
use proptest::prelude::*;

fn arb_row() -> impl Strategy<Value = TraceRow> {
    (any::<u32>(), 0.0f64..1e6, 0usize..1 << 30, 0usize..1 << 20, 0.0f64..1e5, proptest::array::uniform5(0usize..1 << 20)).prop_map(
        |(it, e, sets, map, wall, w)| TraceRow {
            iteration: it as u64,
            exploitability_sum: e,
            abstract_infoset_count: sets,
            mapping_words: map,
            strategy_words: w[0],
            regret_words: w[1],
            aux_words: w[2],
            cache_peak_words: w[3],
            br_strategy_peak_words: w[4],
            wall_seconds: wall,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_csv_round_trips(rows in proptest::collection::vec(arb_row(), 0..20)) {
        let t = RunTrace { rows };
        let text = trace_to_string(&t);
        prop_assert_eq!(read_trace(text.as_bytes()).unwrap(), t);
    }
}

fn sample_trace(scale: f64) -> RunTrace {
    let rows = (0..5)
        .map(|j| TraceRow {
            iteration: 10 * j,
            exploitability_sum: 1.0 / (1.0 + j as f64),
            abstract_infoset_count: (scale * (j + 1) as f64) as usize,
            mapping_words: 0,
            strategy_words: 0,
            regret_words: 0,
            aux_words: 0,
            cache_peak_words: 0,
            br_strategy_peak_words: 0,
            wall_seconds: 0.5 * j as f64,
        })
        .collect();
    RunTrace { rows }
}

#[test]
fn aggregate_of_one_run_is_the_run() {
    let cfg = ExperimentConfig::new("GS3", Algorithm::Fp);
    let t = sample_trace(10.0);
    let pts = aggregate(&[(cfg.clone(), t.clone())], &[]).unwrap();
    assert_eq!(pts.len(), t.rows.len());
    for (p, r) in pts.iter().zip(&t.rows) {
        assert_eq!(p.runs, 1);
        assert_eq!(p.mean[0], r.iteration as f64);
        assert_eq!(p.mean[1], r.abstract_infoset_count as f64);
        assert!(p.stderr.iter().all(|&s| s == 0.0));
    }
    let twice = aggregate(&[(cfg.clone(), t.clone()), (ExperimentConfig { seed: 9, ..cfg }, t)], &[]).unwrap();
    assert!(twice.iter().all(|p| p.runs == 2 && p.stderr.iter().all(|&s| s == 0.0)));
}

#[test]
fn aggregate_standard_error_of_two_runs() {
    let cfg = ExperimentConfig::new("GS3", Algorithm::Fp);
    let runs = [(cfg.clone(), sample_trace(10.0)), (ExperimentConfig { seed: 1, ..cfg }, sample_trace(20.0))];
    let p = &aggregate(&runs, &[0.5]).unwrap()[0];
    // Set counts 20 and 40 at exploitability 0.5: mean 30, sd 14.14, stderr 10.
    assert_eq!(p.mean[1], 30.0);
    assert!((p.stderr[1] - 10.0).abs() < 1e-12);
    assert_eq!(AGG_COLUMNS[1], "abstract_infoset_count");
}

#[test]
fn exported_domains_reload_identically() {
    for name in ["fig2_game", "GS3", "P111", "GP2"] {
        let g = name.parse::<Domain>().unwrap().build();
        let back = game_from_json(&game_to_json(&g)).unwrap();
        assert_eq!(back.to_raw(), g.to_raw(), "{name}");
    }
}

#[test]
fn batch_writes_traces_and_index() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfr = ExperimentConfig::new("GS2", Algorithm::CfrIra);
    cfr.k_b = Some(2);
    cfr.k_h = Some(3);
    cfr.max_iterations = 50;
    let batch = BatchConfig {
        output_dir: dir.path().to_path_buf(),
        experiments: vec![
            BatchEntry { config: cfr, seeds: Some(vec![1, 2]) },
            BatchEntry { config: ExperimentConfig::new("matching_pennies", Algorithm::Fp), seeds: None },
        ],
    };
    let entries = run_batch(&batch, 2).unwrap();
    assert_eq!(entries.len(), 3);
    let back = read_index(&dir.path().join("index.json")).unwrap();
    assert_eq!(back.len(), 3);
    for e in &back {
        let t = read_trace(std::fs::File::open(&e.trace).unwrap()).unwrap();
        assert_eq!(t.last().unwrap().iteration, e.iterations);
    }
    assert!(back[2].converged);
}
