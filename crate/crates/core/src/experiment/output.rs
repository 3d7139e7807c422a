//! Result files: per-step records, summaries and plot-ready tables.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::run::{ground_truth, ExperimentResult, RunRecord};
use crate::{Error, Result};

fn io(path: &Path, source: std::io::Error) -> Error {
    Error::io(path, source)
}

pub const RECORDS_FILE: &str = "records.csv";
pub const TIMING_FILE: &str = "timing.csv";
pub const TRAJECTORIES_FILE: &str = "trajectories.csv";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMING_SUMMARY_FILE: &str = "timing_summary.json";
pub const CONFIG_FILE: &str = "config.json";
pub const DEBUG_FILE: &str = "planner_debug.jsonl";
pub const TARGET_COUNT_FILE: &str = "target_count.csv";
pub const RMS_BY_STEP_FILE: &str = "rms_by_step.csv";
pub const DECOMPOSITION_FILE: &str = "decomposition.csv";

/// Per-algorithm aggregate over all (run, step) rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub samples: usize,
    /// `sqrt(mean sq_gospa)`.
    pub rms_gospa: f64,
    pub mean_loc_sq: f64,
    pub mean_missed: f64,
    pub mean_false: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub algorithm: String,
    pub run: usize,
    pub step: u64,
    pub plan_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthRow {
    pub run: usize,
    pub step: u64,
    pub target_id: u64,
    pub px: f64,
    pub vx: f64,
    pub py: f64,
    pub vy: f64,
}

/// Every live target state of every run, ordered by run, step and target id.
pub fn ground_truth_rows(config: &ExperimentConfig) -> Vec<GroundTruthRow> {
    let mut rows = Vec::new();
    for run in 0..config.runs {
        let tracks = ground_truth(config, run);
        for step in 0..config.scenario.steps {
            for (target_id, x) in crate::world::alive_at(&tracks, step) {
                rows.push(GroundTruthRow { run, step, target_id, px: x[0], vx: x[1], py: x[2], vy: x[3] });
            }
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingSummaryRow {
    pub algorithm: String,
    pub mean_plan_seconds: f64,
    pub max_plan_seconds: f64,
}

/// Distinct algorithm names in order of first appearance.
pub fn algorithm_order(records: &[RunRecord]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for r in records {
        if !names.contains(&r.algorithm) {
            names.push(r.algorithm.clone());
        }
    }
    names
}

/// RMS-GOSPA per algorithm over every (run, step) squared error, in order of
/// first appearance.
pub fn summarise(records: &[RunRecord]) -> Vec<SummaryRow> {
    algorithm_order(records)
        .into_iter()
        .map(|name| {
            let rows: Vec<&RunRecord> = records.iter().filter(|r| r.algorithm == name).collect();
            let n = rows.len() as f64;
            let mean = |f: &dyn Fn(&RunRecord) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
            SummaryRow {
                samples: rows.len(),
                rms_gospa: mean(&|r| r.sq_gospa).sqrt(),
                mean_loc_sq: mean(&|r| r.loc_sq),
                mean_missed: mean(&|r| r.missed as f64),
                mean_false: mean(&|r| r.false_count as f64),
                algorithm: name,
            }
        })
        .collect()
}

pub fn summarise_timing(rows: &[TimingRow]) -> Vec<TimingSummaryRow> {
    let mut order: Vec<&str> = Vec::new();
    for r in rows {
        if !order.contains(&r.algorithm.as_str()) {
            order.push(&r.algorithm);
        }
    }
    order
        .into_iter()
        .map(|name| {
            let t: Vec<f64> = rows.iter().filter(|r| r.algorithm == name).map(|r| r.plan_seconds).collect();
            TimingSummaryRow {
                algorithm: name.to_string(),
                mean_plan_seconds: t.iter().sum::<f64>() / t.len() as f64,
                max_plan_seconds: t.iter().copied().fold(0.0, f64::max),
            }
        })
        .collect()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| io(path, e))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], headers: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(create(path)?);
    w.write_record(headers)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f).and_then(|_| f.flush()).map_err(|e| io(path, e))
}

const RECORD_HEADERS: [&str; 10] = [
    "algorithm", "run", "step", "sq_gospa", "loc_sq", "missed", "false", "plan_mode", "truth_count", "estimate_count",
];

/// Writes every result file into `dir` (created if missing).
pub fn write_results(result: &ExperimentResult, config: &ExperimentConfig, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    write_csv(&dir.join(RECORDS_FILE), &result.records, &RECORD_HEADERS)?;
    let timing: Vec<TimingRow> = result
        .records
        .iter()
        .map(|r| TimingRow { algorithm: r.algorithm.clone(), run: r.run, step: r.step, plan_seconds: r.plan_seconds })
        .collect();
    write_csv(&dir.join(TIMING_FILE), &timing, &["algorithm", "run", "step", "plan_seconds"])?;
    write_csv(&dir.join(TRAJECTORIES_FILE), &result.trajectories, &["algorithm", "run", "step", "sensor", "x", "y"])?;
    write_csv(&dir.join(GROUND_TRUTH_FILE), &ground_truth_rows(config), &["run", "step", "target_id", "px", "vx", "py", "vy"])?;
    write_json(&dir.join(SUMMARY_FILE), &summarise(&result.records))?;
    write_json(&dir.join(TIMING_SUMMARY_FILE), &summarise_timing(&timing))?;
    write_json(&dir.join(CONFIG_FILE), config)?;
    if config.debug_planner {
        let path = dir.join(DEBUG_FILE);
        let mut f = create(&path)?;
        for line in &result.debug {
            serde_json::to_writer(&mut f, line)?;
            writeln!(f).map_err(|e| io(&path, e))?;
        }
        f.flush().map_err(|e| io(&path, e))?;
    }
    emit_plot_data(&result.records, config.gospa_c, dir)
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(|e| io(path, e))?;
    csv::Reader::from_reader(file).deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Reads `records.csv` (and `timing.csv` when present) from a results directory.
pub fn read_records(dir: &Path) -> Result<Vec<RunRecord>> {
    let mut records: Vec<RunRecord> = read_csv(&dir.join(RECORDS_FILE))?;
    let timing_path = dir.join(TIMING_FILE);
    if timing_path.exists() {
        let timing: Vec<TimingRow> = read_csv(&timing_path)?;
        let lookup: BTreeMap<(&str, usize, u64), f64> =
            timing.iter().map(|t| ((t.algorithm.as_str(), t.run, t.step), t.plan_seconds)).collect();
        for r in &mut records {
            if let Some(&s) = lookup.get(&(r.algorithm.as_str(), r.run, r.step)) {
                r.plan_seconds = s;
            }
        }
    }
    Ok(records)
}

/// Reads the GOSPA cut-off from the echoed configuration.
pub fn read_config(dir: &Path) -> Result<ExperimentConfig> {
    let path = dir.join(CONFIG_FILE);
    let file = File::open(&path).map_err(|e| io(&path, e))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetCountRow {
    pub step: u64,
    pub algorithm: String,
    pub truth_count: f64,
    pub estimate_count: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmsByStepRow {
    pub step: u64,
    pub algorithm: String,
    pub rms_gospa: f64,
}

/// Mean squared GOSPA terms per step; `loc_sq + missed_sq + false_sq = sq_gospa`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRow {
    pub step: u64,
    pub algorithm: String,
    pub loc_sq: f64,
    pub missed_sq: f64,
    pub false_sq: f64,
    pub sq_gospa: f64,
}

/// Per-(step, algorithm) aggregates over runs, ordered by algorithm then step.
pub fn plot_tables(records: &[RunRecord], c: f64) -> (Vec<TargetCountRow>, Vec<RmsByStepRow>, Vec<DecompositionRow>) {
    let half = 0.5 * c * c;
    let mut counts = Vec::new();
    let mut rms = Vec::new();
    let mut decomposition = Vec::new();
    for name in algorithm_order(records) {
        let mut by_step: BTreeMap<u64, Vec<&RunRecord>> = BTreeMap::new();
        for r in records.iter().filter(|r| r.algorithm == name) {
            by_step.entry(r.step).or_default().push(r);
        }
        for (step, rows) in by_step {
            let n = rows.len() as f64;
            let mean = |f: &dyn Fn(&RunRecord) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
            counts.push(TargetCountRow {
                step,
                algorithm: name.clone(),
                truth_count: mean(&|r| r.truth_count as f64),
                estimate_count: mean(&|r| r.estimate_count as f64),
            });
            let sq = mean(&|r| r.sq_gospa);
            rms.push(RmsByStepRow { step, algorithm: name.clone(), rms_gospa: sq.sqrt() });
            decomposition.push(DecompositionRow {
                step,
                algorithm: name.clone(),
                loc_sq: mean(&|r| r.loc_sq),
                missed_sq: half * mean(&|r| r.missed as f64),
                false_sq: half * mean(&|r| r.false_count as f64),
                sq_gospa: sq,
            });
        }
    }
    (counts, rms, decomposition)
}

/// Writes `target_count.csv`, `rms_by_step.csv` and `decomposition.csv`.
pub fn emit_plot_data(records: &[RunRecord], c: f64, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let (counts, rms, decomposition) = plot_tables(records, c);
    write_csv(&dir.join(TARGET_COUNT_FILE), &counts, &["step", "algorithm", "truth_count", "estimate_count"])?;
    write_csv(&dir.join(RMS_BY_STEP_FILE), &rms, &["step", "algorithm", "rms_gospa"])?;
    write_csv(
        &dir.join(DECOMPOSITION_FILE),
        &decomposition,
        &["step", "algorithm", "loc_sq", "missed_sq", "false_sq", "sq_gospa"],
    )
}
