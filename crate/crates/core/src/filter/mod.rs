//! Gaussian multi-Bernoulli (MB) filter.
//!
//! One filter step is [`predict`], then for each sensor in turn
//! [`update_sensor`] (producing a multi-Bernoulli mixture), [`compute_marginals`]
//! and [`project_to_mb`]; finally [`reduce`] and [`estimate`].

mod association;
mod gaussian;
mod update;

pub use association::{compute_marginals, LbpParams, MarginalMethod, Marginals};
pub use gaussian::{kalman_update, moment_match, updated_covariance, Gaussian, KalmanUpdate};
pub use update::{
    project_to_mb, update_sensor, ComponentHypotheses, GlobalHypothesis, LocalHypothesis, MbmState,
};

use serde::{Deserialize, Serialize};

use crate::gospa::TargetSet;
use crate::linalg::{symmetrise, ObsMatrix, StateCov, StateVec};
use crate::world::SensorModel;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bernoulli {
    pub id: u64,
    /// Existence probability.
    pub r: f64,
    pub density: Gaussian,
}

impl Bernoulli {
    pub fn new(id: u64, r: f64, mean: StateVec, cov: StateCov) -> Self {
        Self { id, r, density: Gaussian::new(mean, cov) }
    }
}

/// The filter belief: independent Bernoulli components.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MultiBernoulli {
    pub components: Vec<Bernoulli>,
    pub time_index: u64,
    next_id: u64,
}

impl MultiBernoulli {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a state from components, assigning fresh ids in order.
    pub fn from_components(components: impl IntoIterator<Item = (f64, Gaussian)>) -> Self {
        let mut state = Self::empty();
        for (r, density) in components {
            let id = state.fresh_id();
            state.components.push(Bernoulli { id, r, density });
        }
        state
    }

    pub fn fresh_id(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub(crate) fn with_components(&self, components: Vec<Bernoulli>) -> Self {
        Self { components, time_index: self.time_index, next_id: self.next_id }
    }
}

/// Linear-Gaussian dynamics with constant survival probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionModel {
    pub transition: StateCov,
    pub process_noise: StateCov,
    pub p_survival: f64,
}

impl MotionModel {
    /// Nearly-constant-velocity model for the `[px, vx, py, vy]` layout.
    pub fn nearly_constant_velocity(tau: f64, q: f64, p_survival: f64) -> Self {
        let mut transition = StateCov::identity();
        transition[(0, 1)] = tau;
        transition[(2, 3)] = tau;
        let block = [[tau.powi(3) / 3.0, tau * tau / 2.0], [tau * tau / 2.0, tau]];
        let mut process_noise = StateCov::zeros();
        for axis in [0, 2] {
            for i in 0..2 {
                for j in 0..2 {
                    process_noise[(axis + i, axis + j)] = q * block[i][j];
                }
            }
        }
        Self { transition, process_noise, p_survival }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BirthComponent {
    pub r: f64,
    pub density: Gaussian,
}

/// Multi-Bernoulli birth model.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BirthModel {
    pub components: Vec<BirthComponent>,
}

impl BirthModel {
    pub fn single(r: f64, density: Gaussian) -> Self {
        Self { components: vec![BirthComponent { r, density }] }
    }
}

/// How the expected detection probability of a Gaussian component is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum DetectionEvaluation {
    /// `p_D` evaluated at the predicted mean.
    #[default]
    PredictedMean,
    /// Closed-form Gaussian expectation of `p_D`.
    Exact,
    /// Fixed value regardless of geometry (testing override).
    Constant(f64),
}

/// Association strategy for the MBM → MB projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum AssociationMode {
    /// Exact enumeration when the global-hypothesis count is small enough,
    /// loopy belief propagation otherwise.
    #[default]
    Auto,
    Exact,
    Lbp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Squared Mahalanobis gate in measurement space.
    pub gate: f64,
    pub prune_r: f64,
    pub merge_gate: f64,
    pub report_threshold: f64,
    pub association: AssociationMode,
    pub max_exact_hypotheses: usize,
    pub lbp: LbpParams,
    pub detection: DetectionEvaluation,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            gate: 13.8,
            prune_r: 1e-4,
            merge_gate: 1.0,
            report_threshold: 0.5,
            association: AssociationMode::Auto,
            max_exact_hypotheses: 10_000,
            lbp: LbpParams::default(),
            detection: DetectionEvaluation::PredictedMean,
        }
    }
}

/// Weights below this are treated as zero.
pub(crate) const WEIGHT_FLOOR: f64 = 1e-300;

/// Prediction step: surviving components are propagated through the linear
/// dynamics, then the birth components are appended.
pub fn predict(state: &MultiBernoulli, motion: &MotionModel, birth: &BirthModel) -> MultiBernoulli {
    let f = &motion.transition;
    let mut out = state.with_components(Vec::with_capacity(state.len() + birth.components.len()));
    out.time_index = state.time_index + 1;
    for b in &state.components {
        out.components.push(Bernoulli {
            id: b.id,
            r: (b.r * motion.p_survival).clamp(0.0, 1.0),
            density: Gaussian::new(
                f * b.density.mean,
                symmetrise(&(f * b.density.cov * f.transpose() + motion.process_noise)),
            ),
        });
    }
    for bc in &birth.components {
        let id = out.fresh_id();
        out.components.push(Bernoulli { id, r: bc.r, density: bc.density.clone() });
    }
    out
}

/// Symmetrised squared Mahalanobis distance
/// `½[Δᵀ P₁⁻¹ Δ + Δᵀ P₂⁻¹ Δ]` between two Gaussians.
pub fn symmetric_mahalanobis_sq(a: &Gaussian, b: &Gaussian) -> f64 {
    let d = a.mean - b.mean;
    let one = |p: &StateCov| p.try_inverse().map(|inv| (d.transpose() * inv * d)[(0, 0)]);
    match (one(&a.cov), one(&b.cov)) {
        (Some(x), Some(y)) => 0.5 * (x + y),
        _ => f64::INFINITY,
    }
}

/// Prunes components with `r < prune_r`, then greedily merges components whose
/// symmetrised Mahalanobis distance is below `merge_gate` into the component of
/// highest existence. Merged existence is the sum, capped at 1; the density is
/// moment-matched with weights proportional to existence.
pub fn reduce(state: &MultiBernoulli, prune_r: f64, merge_gate: f64) -> Result<MultiBernoulli> {
    if !(0.0..1.0).contains(&prune_r) || !(merge_gate > 0.0) {
        return Err(Error::InvalidInput(format!(
            "reduce needs prune_r in [0, 1) and merge_gate > 0, got {prune_r}, {merge_gate}"
        )));
    }
    let mut pool: Vec<Bernoulli> = state
        .components
        .iter()
        .filter(|b| b.r >= prune_r)
        .cloned()
        .collect();
    // Stable: equal existence keeps input order.
    pool.sort_by(|a, b| b.r.total_cmp(&a.r));
    let gate_sq = merge_gate * merge_gate;
    let mut merged = Vec::with_capacity(pool.len());
    let mut taken = vec![false; pool.len()];
    for i in 0..pool.len() {
        if taken[i] {
            continue;
        }
        taken[i] = true;
        let mut group = vec![i];
        for j in (i + 1)..pool.len() {
            if !taken[j] && symmetric_mahalanobis_sq(&pool[i].density, &pool[j].density) < gate_sq {
                taken[j] = true;
                group.push(j);
            }
        }
        if group.len() == 1 {
            merged.push(pool[i].clone());
            continue;
        }
        let r_sum: f64 = group.iter().map(|&k| pool[k].r).sum();
        let density = moment_match(group.iter().map(|&k| (pool[k].r, &pool[k].density)))
            .unwrap_or_else(|| pool[i].density.clone());
        merged.push(Bernoulli { id: pool[i].id, r: r_sum.min(1.0), density });
    }
    // Restore the original (id) order for deterministic output.
    merged.sort_by_key(|b| b.id);
    Ok(state.with_components(merged))
}

/// Positions of components with existence strictly above `threshold`.
pub fn estimate(state: &MultiBernoulli, observation: &ObsMatrix, threshold: f64) -> TargetSet {
    TargetSet(
        state
            .components
            .iter()
            .filter(|b| b.r > threshold)
            .map(|b| observation * b.density.mean)
            .collect(),
    )
}

/// Full sequential update over all sensors followed by reduction.
pub fn update_all(
    predicted: &MultiBernoulli,
    scans: &[(&SensorModel, &crate::linalg::MeasVec, &[crate::linalg::MeasVec])],
    config: &FilterConfig,
) -> Result<MultiBernoulli> {
    let mut state = predicted.clone();
    for (model, position, measurements) in scans {
        let mbm = update_sensor(&state, measurements, model, position, config)?;
        let marginals = compute_marginals(&mbm, config.association, config)?;
        state = project_to_mb(&mbm, &marginals)?;
    }
    reduce(&state, config.prune_r, config.merge_gate)
}
