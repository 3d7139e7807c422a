use std::path::Path;

use approx::assert_abs_diff_eq;

use super::*;
use crate::planner::{CostDriver, Preset};
use crate::world::{Scenario, TruthMode};

fn record(algorithm: &str, run: usize, step: u64, sq: f64) -> RunRecord {
    RunRecord {
        algorithm: algorithm.into(),
        run,
        step,
        sq_gospa: sq,
        loc_sq: sq,
        missed: 0,
        false_count: 0,
        plan_mode: PlanMode::Joint,
        truth_count: 1,
        estimate_count: 1,
        plan_seconds: 0.0,
    }
}

fn small_config(steps: u64, runs: usize) -> ExperimentConfig {
    let mut scenario = Scenario::obstacle_scenario(1.0);
    scenario.steps = steps;
    let mut config = ExperimentConfig::new(
        scenario,
        vec![AlgorithmSpec::preset(Preset::Myopic, CostDriver::Gospa), AlgorithmSpec::preset(Preset::Mcts1, CostDriver::Gospa)],
    );
    config.runs = runs;
    config.seed = 11;
    config
}

#[test]
fn summary_of_single_record() {
    let rows = summarise(&[record("A", 0, 0, 25.0)]);
    assert_eq!(rows.len(), 1);
    assert_abs_diff_eq!(rows[0].rms_gospa, 5.0, epsilon = 1e-12);
}

#[test]
fn summary_keeps_config_order() {
    let rows = summarise(&[record("Zeta", 0, 0, 1.0), record("Alpha", 0, 0, 4.0), record("Zeta", 1, 0, 9.0)]);
    let names: Vec<&str> = rows.iter().map(|r| r.algorithm.as_str()).collect();
    assert_eq!(names, ["Zeta", "Alpha"]);
    // sqrt((1 + 9) / 2).
    assert_abs_diff_eq!(rows[0].rms_gospa, 5f64.sqrt(), epsilon = 1e-12);
}

#[test]
fn empty_records_give_header_only_plot_files() {
    let dir = tempfile::tempdir().unwrap();
    emit_plot_data(&[], 80.0, dir.path()).unwrap();
    let rms = std::fs::read_to_string(dir.path().join(RMS_BY_STEP_FILE)).unwrap();
    assert_eq!(rms, "step,algorithm,rms_gospa\n");
    for f in [TARGET_COUNT_FILE, DECOMPOSITION_FILE] {
        assert_eq!(std::fs::read_to_string(dir.path().join(f)).unwrap().lines().count(), 1);
    }
}

#[test]
fn empty_scene_scores_only_false_estimates() {
    let mut config = small_config(1, 1);
    config.scenario.truth = TruthMode::Scripted(vec![]);
    config.scenario.sensor.clutter_rate = 0.0;
    config.algorithms.truncate(1);
    let result = run_experiment(&config).unwrap();
    assert_eq!(result.records.len(), 1);
    let r = &result.records[0];
    assert_eq!(r.truth_count, 0);
    let expected = 0.5 * 80.0 * 80.0 * r.estimate_count as f64;
    assert_abs_diff_eq!(r.sq_gospa, expected, epsilon = 1e-12);
    assert_eq!(r.estimate_count, 0);
}

#[test]
fn records_satisfy_decomposition_and_are_worker_independent() {
    let mut config = small_config(30, 2);
    config.workers = 1;
    let serial = run_experiment(&config).unwrap();
    config.workers = 3;
    let parallel = run_experiment(&config).unwrap();
    let strip = |r: &ExperimentResult| {
        r.records.iter().map(|x| RunRecord { plan_seconds: 0.0, ..x.clone() }).collect::<Vec<_>>()
    };
    assert_eq!(strip(&serial), strip(&parallel));
    assert_eq!(serial.trajectories, parallel.trajectories);
    assert_eq!(serial.records.len(), 2 * 2 * 30);
    for r in &serial.records {
        assert!(r.decomposition_residual(80.0).abs() < 1e-9 * r.sq_gospa.max(1.0));
    }
    // Ordered by algorithm, run, step.
    assert_eq!(serial.records[0].algorithm, "Myopic-GD");
    assert_eq!(serial.records[30].run, 1);
    assert_eq!(serial.records.last().unwrap().algorithm, "MCTS1-GD");
}

#[test]
fn ground_truth_shared_across_algorithms() {
    let config = small_config(40, 1);
    let result = run_experiment(&config).unwrap();
    let counts = |name: &str| -> Vec<usize> {
        result.records.iter().filter(|r| r.algorithm == name).map(|r| r.truth_count).collect()
    };
    assert_eq!(counts("Myopic-GD"), counts("MCTS1-GD"));
}

fn read(dir: &Path, f: &str) -> Vec<u8> {
    std::fs::read(dir.join(f)).unwrap()
}

#[test]
fn result_files_are_reproducible() {
    let mut config = small_config(15, 2);
    config.debug_planner = true;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_results(&run_experiment(&config).unwrap(), &config, a.path()).unwrap();
    config.workers = 2;
    let mut echo = config.clone();
    echo.workers = 0;
    write_results(&run_experiment(&config).unwrap(), &echo, b.path()).unwrap();
    for f in [RECORDS_FILE, SUMMARY_FILE, TRAJECTORIES_FILE, GROUND_TRUTH_FILE, RMS_BY_STEP_FILE, DECOMPOSITION_FILE, TARGET_COUNT_FILE, DEBUG_FILE] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f} differs");
    }
    let header = String::from_utf8(read(a.path(), RECORDS_FILE)).unwrap();
    assert!(header.starts_with("algorithm,run,step,sq_gospa,loc_sq,missed,false,plan_mode,truth_count,estimate_count\n"));
    let truth = String::from_utf8(read(a.path(), GROUND_TRUTH_FILE)).unwrap();
    assert!(truth.starts_with("run,step,target_id,px,vx,py,vy\n"));
    // Round trip through the reader.
    let records = read_records(a.path()).unwrap();
    assert_eq!(records.len(), 2 * 2 * 15);
    assert!(records.iter().all(|r| r.plan_seconds >= 0.0));
    assert_eq!(read_config(a.path()).unwrap().gospa_c, 80.0);
}

#[test]
fn decomposition_rows_sum_to_total() {
    let mut rows = vec![record("A", 0, 0, 3300.0), record("A", 1, 0, 100.0)];
    rows[0].loc_sq = 100.0;
    rows[0].missed = 1;
    let (_, rms, dec) = plot_tables(&rows, 80.0);
    assert_eq!(dec.len(), 1);
    let d = &dec[0];
    assert_abs_diff_eq!(d.loc_sq + d.missed_sq + d.false_sq, d.sq_gospa, epsilon = 1e-9);
    assert_abs_diff_eq!(rms[0].rms_gospa, 1700f64.sqrt(), epsilon = 1e-12);
}

const CONFIG: &str = r#"
runs = 3
seed = 5
steps = 20
clutter_rate = 0.1

[scenario]
builtin = "obstacle"

[[algorithm]]
preset = "myopic"

[[algorithm]]
preset = "mcts3"
driver = "kld"
lookahead = 4
"#;

#[test]
fn parses_experiment_config() {
    let c = ExperimentConfig::from_toml_str(CONFIG, "exp.toml", Path::new("/tmp")).unwrap();
    assert_eq!(c.runs, 3);
    assert_eq!(c.scenario.steps, 20);
    assert_eq!(c.scenario.sensor.clutter_rate, 0.1);
    assert_eq!(c.gospa_c, 80.0);
    let names: Vec<&str> = c.algorithms.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, ["Myopic-GD", "MCTS3-KLD"]);
    assert_eq!(c.algorithms[1].planner.lookahead, 4);
    assert_eq!(c.algorithms[1].planner.budget_joint, 200);
    assert_eq!(c.algorithms[0].planner.proximity, 120.0);
    assert_eq!(c.output_dir, Path::new("/tmp/results"));
}

#[test]
fn config_errors_name_the_line() {
    // Errors inside an algorithm table point at the table header.
    let bad = CONFIG.replace("preset = \"mcts3\"", "preset = \"mcts9\"");
    let err = ExperimentConfig::from_toml_str(&bad, "exp.toml", Path::new(".")).unwrap_err();
    assert!(matches!(err, crate::Error::Config(_)));
    assert!(err.to_string().contains("exp.toml:13:"), "{err}");

    let zero = CONFIG.replace("runs = 3", "runs = 0");
    let err = ExperimentConfig::from_toml_str(&zero, "exp.toml", Path::new(".")).unwrap_err();
    assert!(err.to_string().contains("exp.toml:2:"), "{err}");

    let unknown = format!("{CONFIG}\nbogus = 1\n");
    assert!(matches!(ExperimentConfig::from_toml_str(&unknown, "exp.toml", Path::new(".")), Err(crate::Error::Config(_))));
}

#[test]
fn shipped_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let quick = ExperimentConfig::load(dir.join("quick.toml")).unwrap();
    assert_eq!((quick.runs, quick.scenario.steps), (10, 100));
    let full = ExperimentConfig::load(dir.join("full.toml")).unwrap();
    assert_eq!((full.runs, full.scenario.steps, full.algorithms.len()), (50, 200, 10));
    assert_eq!(full.scenario.sensor.clutter_rate, 0.1);
    let scenario = Scenario::load(dir.join("obstacle.toml")).unwrap();
    assert_eq!(scenario, Scenario::obstacle_scenario(1.0));
}
