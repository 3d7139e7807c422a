//! The closed loop for one (algorithm, run) pair and the parallel driver.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{AlgorithmSpec, ExperimentConfig};
use crate::filter::{compute_marginals, estimate, predict, project_to_mb, reduce, update_sensor, MultiBernoulli};
use crate::gospa::{gospa, GospaParams, TargetSet};
use crate::planner::{plan_step, PlanContext, PlanDiagnostics};
use crate::rng::{derive_seed, stream};
use crate::world::{alive_at, generate_measurements, simulate_ground_truth, GroundTruthTrack, SensorPose};
use crate::{Error, Result};

const TRUTH_STREAM: u64 = 0;
const MEASUREMENT_STREAM: u64 = 1;
const PLANNER_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanMode {
    Joint,
    Individual,
}

/// One scored time step. The wall-clock time is kept out of serialised
/// records so that result files are reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub run: usize,
    pub step: u64,
    pub sq_gospa: f64,
    pub loc_sq: f64,
    pub missed: usize,
    #[serde(rename = "false")]
    pub false_count: usize,
    pub plan_mode: PlanMode,
    pub truth_count: usize,
    pub estimate_count: usize,
    #[serde(skip)]
    pub plan_seconds: f64,
}

impl RunRecord {
    /// `loc_sq + (c²/2)(missed + false) − sq_gospa`; zero up to rounding.
    pub fn decomposition_residual(&self, c: f64) -> f64 {
        self.loc_sq + 0.5 * c * c * (self.missed + self.false_count) as f64 - self.sq_gospa
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub algorithm: String,
    pub run: usize,
    pub step: u64,
    pub sensor: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerDebugLine {
    pub algorithm: String,
    pub run: usize,
    pub step: u64,
    pub groups: Vec<PlanDiagnostics>,
}

/// Everything produced by one (algorithm, run) job.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub records: Vec<RunRecord>,
    pub trajectories: Vec<TrajectoryRow>,
    pub debug: Vec<PlannerDebugLine>,
}

/// All outputs of an experiment, ordered by (algorithm config order, run, step).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentResult {
    pub algorithms: Vec<String>,
    pub records: Vec<RunRecord>,
    pub trajectories: Vec<TrajectoryRow>,
    pub debug: Vec<PlannerDebugLine>,
}

/// Ground truth of run `run`; identical for every algorithm.
pub fn ground_truth(config: &ExperimentConfig, run: usize) -> Vec<GroundTruthTrack> {
    let s = &config.scenario;
    let mut rng = stream(config.seed, &[TRUTH_STREAM, run as u64]);
    simulate_ground_truth(s.steps, &s.motion, &s.birth, s.script(), &mut rng)
}

/// Runs the closed loop plan → move → sense → filter → estimate → score.
pub fn run_single(
    config: &ExperimentConfig,
    algorithm: &AlgorithmSpec,
    run: usize,
    truth: &[GroundTruthTrack],
) -> Result<RunOutput> {
    let s = &config.scenario;
    let params = GospaParams::new(config.gospa_c)?;
    let ctx = PlanContext {
        workspace: &s.workspace,
        sensor: &s.sensor,
        motion: &s.motion,
        birth: &s.birth,
        config: &algorithm.planner,
    };
    let mut meas_rng = stream(config.seed, &[MEASUREMENT_STREAM, run as u64]);
    let mut state = MultiBernoulli::empty();
    let mut poses: Vec<SensorPose> = s.sensors.clone();
    let mut out = RunOutput::default();
    for step in 0..s.steps {
        let predicted = predict(&state, &s.motion, &s.birth);

        let started = Instant::now();
        let plan = plan_step(&ctx, &predicted.components, &poses, derive_seed(config.seed, &[PLANNER_STREAM, run as u64, step]))?;
        let plan_seconds = started.elapsed().as_secs_f64();
        for (pose, &a) in poses.iter_mut().zip(&plan.actions) {
            *pose = s.workspace.apply_action(pose, a)?;
        }

        let alive: Vec<_> = alive_at(truth, step).into_iter().map(|(_, x)| x).collect();
        let mut belief = predicted;
        for pose in &poses {
            let z = generate_measurements(pose, &s.sensor, &alive, &mut meas_rng);
            let mbm = update_sensor(&belief, &z, &s.sensor, &pose.position, &config.filter)?;
            let marginals = compute_marginals(&mbm, config.filter.association, &config.filter)?;
            belief = project_to_mb(&mbm, &marginals)?;
        }
        state = reduce(&belief, config.filter.prune_r, config.filter.merge_gate)?;

        let estimated = estimate(&state, &s.sensor.observation, config.filter.report_threshold);
        let truth_set = TargetSet(alive.iter().map(|x| s.sensor.observation * x).collect());
        let score = gospa(&truth_set, &estimated, &params)?;
        out.records.push(RunRecord {
            algorithm: algorithm.name.clone(),
            run,
            step,
            sq_gospa: score.sq_total,
            loc_sq: score.loc_sq,
            missed: score.missed_count,
            false_count: score.false_count,
            plan_mode: if plan.groups.iter().any(|g| g.len() > 1) { PlanMode::Joint } else { PlanMode::Individual },
            truth_count: truth_set.len(),
            estimate_count: estimated.len(),
            plan_seconds,
        });
        for (sensor, pose) in poses.iter().enumerate() {
            out.trajectories.push(TrajectoryRow {
                algorithm: algorithm.name.clone(),
                run,
                step,
                sensor,
                x: pose.position.x,
                y: pose.position.y,
            });
        }
        if config.debug_planner {
            out.debug.push(PlannerDebugLine { algorithm: algorithm.name.clone(), run, step, groups: plan.diagnostics });
        }
    }
    Ok(out)
}

/// Runs every (algorithm, run) pair on a worker pool. Results do not depend on
/// the number of workers.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", config.workers)))?;
    let truths: Vec<Vec<GroundTruthTrack>> = (0..config.runs).map(|r| ground_truth(config, r)).collect();
    let jobs: Vec<(usize, usize)> = (0..config.algorithms.len())
        .flat_map(|a| (0..config.runs).map(move |r| (a, r)))
        .collect();
    let outputs: Vec<Result<RunOutput>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(a, r)| {
                tracing::debug!(algorithm = %config.algorithms[a].name, run = r, "starting run");
                run_single(config, &config.algorithms[a], r, &truths[r])
            })
            .collect()
    });
    // `collect` on an indexed parallel iterator preserves job order.
    let mut result = ExperimentResult {
        algorithms: config.algorithms.iter().map(|a| a.name.clone()).collect(),
        ..ExperimentResult::default()
    };
    for output in outputs {
        let output = output?;
        result.records.extend(output.records);
        result.trajectories.extend(output.trajectories);
        result.debug.extend(output.debug);
    }
    Ok(result)
}
