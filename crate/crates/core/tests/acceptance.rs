//! Acceptance suite. Every criterion prints exactly one `PASS`/`FAIL` line on
//! stdout (bypassing the test harness capture) before asserting.
//!
//! Criterion 9 is a long full-scale run and is ignored by default:
//! `cargo test -p mstrack-core --test acceptance -- --ignored`.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use mstrack::experiment::{run_experiment, summarise, AlgorithmSpec, ExperimentConfig, ExperimentResult};
use mstrack::filter::{
    compute_marginals, moment_match, predict, project_to_mb, update_sensor, AssociationMode, Bernoulli, BirthModel,
    DetectionEvaluation, FilterConfig, Gaussian, MotionModel, MultiBernoulli,
};
use mstrack::gospa::{gospa, GospaParams, TargetSet};
use mstrack::linalg::{position_selector, MeasCov, MeasVec, StateCov, StateVec};
use mstrack::planner::{
    bernoulli_cost, bernoulli_cost_with_threshold, mcts_plan, merge_patterns, myopic_bound, optimal_threshold,
    ActionProfile, Branch, CostDriver, DetectionPattern, PlanContext, PlannerConfig, Preset,
};
use mstrack::world::{Scenario, SensorModel, SensorPose};

/// Closed-loop experiments: seed, horizon and run count.
const SEED: u64 = 7;
const STEPS: u64 = 100;
const RUNS: usize = 10;
/// A Myopic-GD sensor counts as having passed the wall when it ends more than
/// this much closer to the birth area than it started. The wall's far face is
/// about 40 m closer to the origin than the sensor start positions.
const MYOPIC_DISPLACEMENT_GATE: f64 = 50.0;

fn report(criterion: &str, pass: bool, detail: impl AsRef<str>) {
    let line = format!("{} criterion {criterion}: {}\n", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn verdict(criterion: &str, failures: &[String], detail: String) {
    report(criterion, failures.is_empty(), &detail);
    assert!(failures.is_empty(), "criterion {criterion}: {detail}\n{}", failures.join("\n"));
}

fn spd(rng: &mut ChaCha8Rng, scale: f64) -> StateCov {
    let a = Matrix4::from_fn(|_, _| rng.random_range(-1.0..1.0));
    (a * a.transpose() + StateCov::identity() * 0.05) * scale
}

fn normal4(rng: &mut ChaCha8Rng) -> StateVec {
    StateVec::from_fn(|_, _| StandardNormal.sample(rng))
}

// ---------------------------------------------------------------------------
// 1. GOSPA against exhaustive assignment.

/// Minimum over all partial injections of truth into estimate.
fn brute_force_sq(x: &[MeasVec], y: &[MeasVec], c: f64) -> f64 {
    fn recurse(i: usize, x: &[MeasVec], y: &[MeasVec], used: &mut Vec<bool>, c: f64) -> f64 {
        let half = 0.5 * c * c;
        if i == x.len() {
            return half * used.iter().filter(|u| !**u).count() as f64;
        }
        let mut best = half + recurse(i + 1, x, y, used, c);
        for j in 0..y.len() {
            if !used[j] {
                used[j] = true;
                let d2 = (x[i] - y[j]).norm_squared().min(c * c);
                best = best.min(d2 + recurse(i + 1, x, y, used, c));
                used[j] = false;
            }
        }
        best
    }
    recurse(0, x, y, &mut vec![false; y.len()], c)
}

#[test]
fn criterion_01_gospa_matches_brute_force() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let params = GospaParams::new(10.0).unwrap();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let set = |rng: &mut ChaCha8Rng| -> Vec<MeasVec> {
            (0..rng.random_range(0..=4)).map(|_| MeasVec::new(rng.random_range(-15.0..15.0), rng.random_range(-15.0..15.0))).collect()
        };
        let (x, y) = (set(&mut rng), set(&mut rng));
        let lib = gospa(&TargetSet(x.clone()), &TargetSet(y.clone()), &params).unwrap().sq_total;
        let oracle = brute_force_sq(&x, &y, 10.0);
        worst = worst.max((lib - oracle).abs());
        if (lib - oracle).abs() > 1e-9 {
            failures.push(format!("case {case}: library {lib} vs brute force {oracle}"));
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed >= 5.0 {
        failures.push(format!("took {elapsed:.2} s"));
    }
    verdict("1", &failures, format!("200 random pairs, max |Δ| = {worst:.1e}, {elapsed:.3} s"));
}

// ---------------------------------------------------------------------------
// 2. The optimal threshold minimises the per-Bernoulli cost.

#[test]
fn criterion_02_optimal_threshold() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = Vec::new();
    let mut worst_slack = f64::NEG_INFINITY;
    for case in 0..100 {
        let r = rng.random_range(0.0..=1.0);
        let c = rng.random_range(1.0..200.0);
        let trace = rng.random_range(0.0..1.5) * c * c;
        let cov = StateCov::identity() * (trace / 4.0);
        let at_optimum = bernoulli_cost(r, &cov, c);
        assert_eq!(at_optimum, bernoulli_cost_with_threshold(r, trace, c, optimal_threshold(trace, c)));
        for k in 0..=1000 {
            let gamma = k as f64 / 1000.0;
            let slack = at_optimum - bernoulli_cost_with_threshold(r, trace, c, gamma);
            worst_slack = worst_slack.max(slack);
            if slack > 1e-12 {
                failures.push(format!("case {case}: r={r} tr={trace} c={c} Γ={gamma} beats Γ* by {slack}"));
            }
        }
    }
    verdict("2", &failures, format!("100 cases × 1001 thresholds, worst slack {worst_slack:.1e}"));
}

// ---------------------------------------------------------------------------
// 3. Single certain target, certain detection: the filter is a Kalman filter.

#[test]
fn criterion_03_kalman_equivalence() {
    let motion = MotionModel::nearly_constant_velocity(1.0, 0.8, 1.0);
    let sensor = SensorModel::position_sensor(2.0, 0.999, 1.0, 40.0);
    let config = FilterConfig { detection: DetectionEvaluation::Constant(1.0), gate: f64::INFINITY, ..FilterConfig::default() };
    let h = position_selector();
    let noise = MeasCov::identity() * 2.0;
    let prior = Gaussian::new(StateVec::new(0.0, 0.1, 0.0, 0.1), StateCov::identity() * 6.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut state = MultiBernoulli::from_components([(1.0, prior.clone())]);
    let mut reference = prior;
    let mut truth = StateVec::new(0.0, 1.0, 0.0, -0.5);
    let (mut worst_mean, mut worst_cov): (f64, f64) = (0.0, 0.0);
    let mut failures = Vec::new();
    for step in 0..100 {
        truth = motion.transition * truth + motion.process_noise.cholesky().unwrap().l() * normal4(&mut rng);
        let v = MeasVec::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)) * 2f64.sqrt();
        let z = h * truth + v;

        state = predict(&state, &motion, &BirthModel::default());
        let mbm = update_sensor(&state, &[z], &sensor, &MeasVec::zeros(), &config).unwrap();
        let marginals = compute_marginals(&mbm, AssociationMode::Exact, &config).unwrap();
        state = project_to_mb(&mbm, &marginals).unwrap();

        let f = motion.transition;
        let m = f * reference.mean;
        let p = f * reference.cov * f.transpose() + motion.process_noise;
        let s = h * p * h.transpose() + noise;
        let k = p * h.transpose() * s.try_inverse().unwrap();
        reference = Gaussian::new(m + k * (z - h * m), (StateCov::identity() - k * h) * p);

        let b = &state.components[0];
        let dm = (b.density.mean - reference.mean).amax();
        let dp = (b.density.cov - reference.cov).amax();
        worst_mean = worst_mean.max(dm);
        worst_cov = worst_cov.max(dp);
        if state.len() != 1 || b.r != 1.0 || dm > 1e-9 || dp > 1e-9 {
            failures.push(format!("step {step}: r={} |Δm|={dm:.1e} |ΔP|={dp:.1e}", b.r));
        }
    }
    verdict("3", &failures, format!("100 steps, max |Δmean| = {worst_mean:.1e}, max |ΔP| = {worst_cov:.1e}"));
}

// ---------------------------------------------------------------------------
// 4. Moment matching of detection-pattern mixtures.

fn fuzzed_branches(rng: &mut ChaCha8Rng, mean_spread: f64, cov_scale: f64) -> Vec<Branch> {
    let n = rng.random_range(1..=8);
    (0..n)
        .map(|k| Branch {
            pattern: DetectionPattern::new(k as u32, 3),
            probability: rng.random_range(0.01..1.0),
            component: Bernoulli {
                id: 9,
                r: rng.random_range(0.05..=1.0),
                density: Gaussian::new(
                    StateVec::from_fn(|_, _| rng.random_range(-mean_spread..mean_spread)),
                    spd(rng, cov_scale),
                ),
            },
        })
        .collect()
}

/// Mixture moments through the raw second moment `E[xxᵀ] − E[x]E[x]ᵀ`.
fn algebraic_moments(branches: &[Branch]) -> (f64, StateVec, StateCov) {
    let weights: Vec<f64> = branches.iter().map(|b| b.probability * b.component.r).collect();
    let total: f64 = weights.iter().sum();
    let mut first = StateVec::zeros();
    let mut second = StateCov::zeros();
    for (w, b) in weights.iter().zip(branches) {
        let g = &b.component.density;
        first += g.mean * *w;
        second += (g.cov + g.mean * g.mean.transpose()) * *w;
    }
    let mean = first / total;
    (total, mean, second / total - mean * mean.transpose())
}

#[test]
fn criterion_04_moment_matching() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for case in 0..1000 {
        let branches = fuzzed_branches(&mut rng, 5.0, 2.0);
        let merged = merge_patterns(&branches).unwrap();
        let (r, mean, cov) = algebraic_moments(&branches);
        let err = (merged.r - r.min(1.0)).abs()
            .max((merged.density.mean - mean).amax())
            .max((merged.density.cov - cov).amax());
        worst = worst.max(err);
        if err > 1e-12 {
            failures.push(format!("mixture {case}: max deviation {err:.2e}"));
        }
    }

    let samples = 1_000_000;
    let mut worst_empirical: f64 = 0.0;
    for case in 0..10 {
        let branches = fuzzed_branches(&mut rng, 0.5, 0.1);
        let weights: Vec<(f64, &Gaussian)> =
            branches.iter().map(|b| (b.probability * b.component.r, &b.component.density)).collect();
        let matched = moment_match(weights.iter().copied()).unwrap();
        let total: f64 = weights.iter().map(|(w, _)| w).sum();
        let factors: Vec<StateCov> = weights.iter().map(|(_, g)| g.cov.cholesky().unwrap().l()).collect();
        let (mut sum, mut outer) = (StateVec::zeros(), StateCov::zeros());
        for _ in 0..samples {
            let mut u = rng.random_range(0.0..total);
            let k = weights.iter().position(|(w, _)| { u -= w; u < 0.0 }).unwrap_or(weights.len() - 1);
            let x = weights[k].1.mean + factors[k] * normal4(&mut rng);
            sum += x;
            outer += x * x.transpose();
        }
        let mean = sum / samples as f64;
        let cov = outer / samples as f64 - mean * mean.transpose();
        let err = (matched.mean - mean).amax().max((matched.cov - cov).amax());
        worst_empirical = worst_empirical.max(err);
        if err > 1e-2 {
            failures.push(format!("sampled case {case}: deviation {err:.2e}"));
        }
    }
    verdict(
        "4",
        &failures,
        format!("1000 mixtures max |Δ| = {worst:.1e}; 10 × 10⁶ samples max |Δ| = {worst_empirical:.1e}"),
    );
}

// ---------------------------------------------------------------------------
// 5. The planning cost bounds the true expected squared GOSPA.

/// Monte-Carlo squared GOSPA (full state, cut-off c) of one Bernoulli under
/// the measurement model the planning cost assumes: sensor `s` independently
/// returns one measurement with probability `r·p̄_s`, whose value is drawn from
/// the current predictive density `N(H·m, H·P·Hᵀ + R)` before a Kalman update;
/// there is no clutter. The target set is then drawn from the resulting
/// posterior Bernoulli, and the estimator reports the posterior mean iff the
/// posterior existence exceeds the optimal threshold.
fn monte_carlo_msgospa(
    prior: &Bernoulli,
    sensor: &SensorModel,
    pbar: &[f64],
    c: f64,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, f64) {
    let h = sensor.observation;
    let c2 = c * c;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let (mut r, mut mean, mut cov) = (prior.r, prior.density.mean, prior.density.cov);
        for &p in pbar {
            if rng.random::<f64>() < prior.r * p {
                let s = h * cov * h.transpose() + sensor.noise;
                let innovation = s.cholesky().unwrap().l() * MeasVec::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
                let k = cov * h.transpose() * s.try_inverse().unwrap();
                mean += k * innovation;
                cov = (StateCov::identity() - k * h) * cov;
                r = 1.0;
            } else {
                r = (1.0 - p) * r / (1.0 - r * p);
            }
        }
        let exists = rng.random::<f64>() < r;
        let x = mean + cov.cholesky().unwrap().l() * normal4(rng);
        let report = r > optimal_threshold(cov.trace(), c);
        let d2 = match (exists, report) {
            (true, true) => (x - mean).norm_squared().min(c2),
            (true, false) | (false, true) => 0.5 * c2,
            (false, false) => 0.0,
        };
        sum += d2;
        sum_sq += d2 * d2;
    }
    let n = samples as f64;
    let mean = sum / n;
    (mean, ((sum_sq / n - mean * mean) / n).sqrt())
}

#[test]
fn criterion_05_lemma_bound_dominates_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = 80.0;
    let sensor = SensorModel::position_sensor(2.0, 0.999, 1.0, 40.0);
    let mut failures = Vec::new();
    let mut tightest = f64::INFINITY;
    for case in 0..20 {
        let sensors = 1 + case % 2;
        let mean = StateVec::new(rng.random_range(-40.0..40.0), rng.random_range(-2.0..2.0), rng.random_range(-40.0..40.0), rng.random_range(-2.0..2.0));
        let scale = rng.random_range(0.5..400.0);
        let cov = spd(&mut rng, scale);
        let prior = Bernoulli { id: 0, r: rng.random_range(0.05..=1.0), density: Gaussian::new(mean, cov) };
        let positions: Vec<MeasVec> =
            (0..sensors).map(|_| MeasVec::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0))).collect();
        let pbar: Vec<f64> = positions
            .iter()
            .map(|p| sensor.expected_detection_probability(p, &prior.density, DetectionEvaluation::PredictedMean))
            .collect();
        let state = MultiBernoulli::from_components([(prior.r, prior.density.clone())]);
        let bound = myopic_bound(&state, &sensor, &positions, c, DetectionEvaluation::PredictedMean).unwrap();
        let (mc, se) = monte_carlo_msgospa(&prior, &sensor, &pbar, c, 100_000, &mut rng);
        tightest = tightest.min((bound - (mc - 3.0 * se)) / se.max(1e-12));
        if bound < mc - 3.0 * se {
            failures.push(format!("case {case} (S={sensors}): bound {bound:.3} < MC {mc:.3} − 3·{se:.3}"));
        }
    }
    verdict("5", &failures, format!("20 configurations, S ∈ {{1,2}}, smallest margin {tightest:.1} standard errors"));
}

// ---------------------------------------------------------------------------
// 6. One-step MCTS with the full budget is the myopic argmin.

#[test]
fn criterion_06_myopic_degeneracy() {
    let scenario = Scenario::obstacle_scenario(1.0);
    let config = PlannerConfig { lookahead: 1, ..PlannerConfig::preset(Preset::Myopic, CostDriver::Gospa) };
    let ctx = PlanContext {
        workspace: &scenario.workspace,
        sensor: &scenario.sensor,
        motion: &scenario.motion,
        birth: &scenario.birth,
        config: &config,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    for case in 0..50 {
        let state = MultiBernoulli::from_components((0..rng.random_range(1..6)).map(|_| {
            let mean = StateVec::new(rng.random_range(-120.0..120.0), rng.random_range(-2.0..2.0), rng.random_range(-200.0..60.0), rng.random_range(-2.0..2.0));
            let scale = rng.random_range(1.0..100.0);
            (rng.random_range(0.0..=1.0), Gaussian::new(mean, spd(&mut rng, scale)))
        }));
        // Half the cases start next to the wall, where some moves are blocked.
        let y = match case % 4 {
            0 | 2 => -125.0,
            1 => rng.random_range(-180.0..-120.0),
            _ => rng.random_range(-95.0..-60.0),
        };
        let poses = [
            SensorPose::new(rng.random_range(-40.0..0.0), y, 15.0),
            SensorPose::new(rng.random_range(0.0..40.0), y, 15.0),
        ];
        let mut best: Option<(f64, ActionProfile)> = None;
        for profile in ctx.feasible_profiles(&poses) {
            let positions: Vec<MeasVec> = ctx.apply(&poses, &profile).unwrap().iter().map(|p| p.position).collect();
            let v = myopic_bound(&state, &scenario.sensor, &positions, config.gospa_c, config.detection).unwrap();
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, profile));
            }
        }
        let (_, expected) = best.unwrap();
        let chosen = mcts_plan(&ctx, &state.components, &poses, config.budget_joint, &mut rng).unwrap().profile;
        if chosen != expected {
            failures.push(format!("state {case}: planner chose {:?}, myopic argmin {:?}", chosen.0, expected.0));
        }
    }
    verdict("6", &failures, format!("50 states, {} mismatches", failures.len()));
}

// ---------------------------------------------------------------------------
// Closed-loop experiments on the obstacle scenario.

/// Experiments are cached per clutter rate and run one at a time so that the
/// timing criterion is not measured under contention from the others.
static EXPERIMENTS: Mutex<BTreeMap<(u64, &'static str), Arc<ExperimentResult>>> = Mutex::new(BTreeMap::new());

fn obstacle_config(clutter: f64, steps: u64, runs: usize, algorithms: Vec<AlgorithmSpec>) -> ExperimentConfig {
    let mut scenario = Scenario::obstacle_scenario(clutter);
    scenario.steps = steps;
    let mut config = ExperimentConfig::new(scenario, algorithms);
    config.runs = runs;
    config.seed = SEED;
    config
}

fn experiment(key: &'static str, clutter: f64, build: impl FnOnce() -> ExperimentConfig) -> Arc<ExperimentResult> {
    let mut cache = EXPERIMENTS.lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry((clutter.to_bits(), key))
        .or_insert_with(|| Arc::new(run_experiment(&build()).expect("experiment runs")))
        .clone()
}

fn myopic_and_mcts3(clutter: f64) -> Arc<ExperimentResult> {
    experiment("obstacle", clutter, || {
        obstacle_config(
            clutter,
            STEPS,
            RUNS,
            vec![AlgorithmSpec::preset(Preset::Myopic, CostDriver::Gospa), AlgorithmSpec::preset(Preset::Mcts3, CostDriver::Gospa)],
        )
    })
}

fn rms(result: &ExperimentResult, algorithm: &str) -> f64 {
    summarise(&result.records).into_iter().find(|s| s.algorithm == algorithm).expect("algorithm present").rms_gospa
}

#[test]
fn criterion_07a_myopic_sensors_stay_behind_the_wall() {
    let result = myopic_and_mcts3(1.0);
    let start = Scenario::obstacle_scenario(1.0).sensors;
    let mut finals: BTreeMap<(usize, usize), MeasVec> = BTreeMap::new();
    for t in result.trajectories.iter().filter(|t| t.algorithm == "Myopic-GD") {
        finals.insert((t.run, t.sensor), MeasVec::new(t.x, t.y));
    }
    let mut failures = Vec::new();
    let mut largest: f64 = f64::NEG_INFINITY;
    for (&(run, sensor), end) in &finals {
        let displacement = start[sensor].position.norm() - end.norm();
        largest = largest.max(displacement);
        if displacement >= MYOPIC_DISPLACEMENT_GATE {
            failures.push(format!("run {run} sensor {sensor}: moved {displacement:.1} m toward the birth area"));
        }
    }
    assert_eq!(finals.len(), RUNS * start.len());
    verdict(
        "7a",
        &failures,
        format!("{} Myopic-GD sensors, largest displacement toward birth area {largest:.1} m (gate {MYOPIC_DISPLACEMENT_GATE} m)", finals.len()),
    );
}

#[test]
fn criterion_07b_mcts3_beats_myopic() {
    let result = myopic_and_mcts3(1.0);
    let (myopic, mcts) = (rms(&result, "Myopic-GD"), rms(&result, "MCTS3-GD"));
    let reduction = 1.0 - mcts / myopic;
    let failures = if mcts <= 0.8 * myopic { vec![] } else { vec![format!("reduction only {:.1}%", 100.0 * reduction)] };
    verdict("7b", &failures, format!("RMS-GOSPA Myopic-GD {myopic:.2}, MCTS3-GD {mcts:.2}, reduction {:.1}% (need ≥ 20%)", 100.0 * reduction));
}

#[test]
fn criterion_08_clutter_robustness() {
    let values: Vec<(f64, f64)> = [0.1, 1.0, 2.0].into_iter().map(|c| (c, rms(&myopic_and_mcts3(c), "MCTS3-GD"))).collect();
    let lo = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let hi = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo) / lo;
    let listing: Vec<String> = values.iter().map(|(c, v)| format!("λ={c}: {v:.2}")).collect();
    let failures = if spread < 0.15 { vec![] } else { vec![format!("spread {:.1}%", 100.0 * spread)] };
    verdict("8", &failures, format!("MCTS3-GD {}; spread (max−min)/min = {:.1}% (need < 15%)", listing.join(", "), 100.0 * spread));
}

#[test]
#[ignore = "full-scale run: 200 steps × 50 runs"]
fn criterion_09_full_scale_direction() {
    let result = experiment("full", 0.1, || {
        obstacle_config(
            0.1,
            200,
            50,
            vec![
                AlgorithmSpec::preset(Preset::Myopic, CostDriver::Gospa),
                AlgorithmSpec::preset(Preset::Mcts3, CostDriver::Gospa),
                AlgorithmSpec::preset(Preset::Mcts3, CostDriver::Kld),
            ],
        )
    });
    let (myopic, gd, kld) = (rms(&result, "Myopic-GD"), rms(&result, "MCTS3-GD"), rms(&result, "MCTS3-KLD"));
    let mut failures = Vec::new();
    if !(65.0..=80.0).contains(&myopic) {
        failures.push(format!("Myopic-GD {myopic:.2} outside 65–80"));
    }
    if !(40.0..=55.0).contains(&gd) {
        failures.push(format!("MCTS3-GD {gd:.2} outside 40–55"));
    }
    if gd >= kld {
        failures.push(format!("MCTS3-GD {gd:.2} not below MCTS3-KLD {kld:.2}"));
    }
    verdict("9", &failures, format!("Myopic-GD {myopic:.2}, MCTS3-GD {gd:.2}, MCTS3-KLD {kld:.2}"));
}

#[test]
fn criterion_10_runtime_ordering() {
    let presets = [Preset::Myopic, Preset::Mcts1, Preset::Mcts3, Preset::Mcts4];
    let result = experiment("timing", 1.0, || {
        let mut config =
            obstacle_config(1.0, 50, 2, presets.iter().map(|&p| AlgorithmSpec::preset(p, CostDriver::Gospa)).collect());
        config.workers = 1;
        config
    });
    let per_step: Vec<(String, f64)> = presets
        .iter()
        .map(|p| {
            let name = AlgorithmSpec::preset(*p, CostDriver::Gospa).name;
            let times: Vec<f64> = result.records.iter().filter(|r| r.algorithm == name).map(|r| r.plan_seconds).collect();
            let mean = times.iter().sum::<f64>() / times.len() as f64;
            (name, mean)
        })
        .collect();
    let mut failures = Vec::new();
    for pair in per_step.windows(2) {
        if pair[0].1 >= pair[1].1 {
            failures.push(format!("{} ({:.2e} s) not faster than {} ({:.2e} s)", pair[0].0, pair[0].1, pair[1].0, pair[1].1));
        }
    }
    if per_step[0].1 > 0.1 {
        failures.push(format!("Myopic {:.3} s/step exceeds 0.1 s", per_step[0].1));
    }
    if per_step[2].1 > 5.0 {
        failures.push(format!("MCTS3 {:.3} s/step exceeds 5 s", per_step[2].1));
    }
    let listing: Vec<String> = per_step.iter().map(|(n, t)| format!("{n} {:.4}", t)).collect();
    verdict("10", &failures, format!("mean plan s/step: {}", listing.join(" < ")));
}
