//! Non-myopic multi-sensor planning: GOSPA-bound (or KLD) node costs inside a
//! reduced-tree MCTS, with sensors grouped by proximity for joint planning.

mod cost;
mod mcts;

pub use cost::{
    bernoulli_cost, bernoulli_cost_with_threshold, evaluate_stage, gaussian_kld, h_probability,
    hypothetical_update, kld_reward, merge_patterns, myopic_bound, node_cost, optimal_threshold,
    pattern_branches, Branch, CostDriver, DetectionPattern, StageOutcome,
};
pub use mcts::{
    mcts_plan, uct_select, ActionProfile, PlanContext, PlanDiagnostics, PlanNode, PlanOutcome,
    RootChildStats, UctCandidate,
};

use serde::{Deserialize, Serialize};

use crate::filter::{Bernoulli, DetectionEvaluation};
use crate::world::SensorPose;
use crate::{rng, Error, Result};

/// Budget/lookahead presets for the compared algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    Myopic,
    Mcts1,
    Mcts2,
    Mcts3,
    Mcts4,
}

impl Preset {
    /// `(budget_joint, budget_individual, lookahead)`.
    pub fn parameters(self) -> (usize, usize, usize) {
        match self {
            Preset::Myopic => (49, 7, 1),
            Preset::Mcts1 => (49, 7, 5),
            Preset::Mcts2 => (49, 7, 10),
            Preset::Mcts3 => (200, 40, 5),
            Preset::Mcts4 => (200, 40, 10),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Preset::Myopic => "Myopic",
            Preset::Mcts1 => "MCTS1",
            Preset::Mcts2 => "MCTS2",
            Preset::Mcts3 => "MCTS3",
            Preset::Mcts4 => "MCTS4",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub budget_joint: usize,
    pub budget_individual: usize,
    pub lookahead: usize,
    /// Per-step discount λ.
    pub discount: f64,
    /// UCT exploration constant ε.
    pub exploration: f64,
    /// Sensors closer than this are planned jointly.
    pub proximity: f64,
    pub driver: CostDriver,
    /// GOSPA cut-off used by the cost bound.
    pub gospa_c: f64,
    pub detection: DetectionEvaluation,
}

impl PlannerConfig {
    /// Preset budgets with λ = 0.9, ε = 2, Ψ = 120 and c = 80.
    pub fn preset(preset: Preset, driver: CostDriver) -> Self {
        let (budget_joint, budget_individual, lookahead) = preset.parameters();
        Self {
            budget_joint,
            budget_individual,
            lookahead,
            discount: 0.9,
            exploration: 2.0,
            proximity: 120.0,
            driver,
            gospa_c: 80.0,
            detection: DetectionEvaluation::PredictedMean,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.budget_joint == 0 || self.budget_individual == 0 {
            return Err("planner budgets must be at least 1".into());
        }
        if self.lookahead == 0 {
            return Err("lookahead must be at least 1".into());
        }
        if !(self.discount > 0.0 && self.discount <= 1.0) {
            return Err(format!("discount must lie in (0, 1], got {}", self.discount));
        }
        if !(self.exploration >= 0.0 && self.exploration.is_finite()) {
            return Err(format!("exploration constant must be finite and non-negative, got {}", self.exploration));
        }
        if !(self.proximity > 0.0) {
            return Err(format!("proximity threshold must be positive, got {}", self.proximity));
        }
        if !(self.gospa_c > 0.0 && self.gospa_c.is_finite()) {
            return Err(format!("GOSPA cut-off must be positive, got {}", self.gospa_c));
        }
        Ok(())
    }

    /// Expansion budget for a group of `size` sensors.
    pub fn budget_for(&self, size: usize) -> usize {
        if size <= 1 {
            self.budget_individual
        } else {
            (self.budget_joint * size).div_ceil(2)
        }
    }
}

/// Connected components of the graph linking sensors closer than `proximity`,
/// each sorted, ordered by their smallest member.
pub fn group_sensors(poses: &[SensorPose], proximity: f64) -> Vec<Vec<usize>> {
    let n = poses.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (poses[i].position - poses[j].position).norm() < proximity {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

/// Actions for every sensor after one planning step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPlan {
    pub actions: Vec<usize>,
    pub groups: Vec<Vec<usize>>,
    pub diagnostics: Vec<PlanDiagnostics>,
}

/// Plans every sensor group independently. Group `g` draws its randomness from
/// the stream derived from `(seed, g)`.
pub fn plan_step(
    ctx: &PlanContext<'_>,
    predicted: &[Bernoulli],
    poses: &[SensorPose],
    seed: u64,
) -> Result<StepPlan> {
    if poses.is_empty() {
        return Err(Error::InvalidInput("no sensors to plan for".into()));
    }
    let groups = group_sensors(poses, ctx.config.proximity);
    let mut actions = vec![0; poses.len()];
    let mut diagnostics = Vec::with_capacity(groups.len());
    for (g, members) in groups.iter().enumerate() {
        let group_poses: Vec<SensorPose> = members.iter().map(|&s| poses[s]).collect();
        let mut group_rng = rng::stream(seed, &[g as u64]);
        let mut outcome =
            mcts_plan(ctx, predicted, &group_poses, ctx.config.budget_for(members.len()), &mut group_rng)?;
        for (&s, &a) in members.iter().zip(&outcome.profile.0) {
            actions[s] = a;
        }
        outcome.diagnostics.sensors = members.clone();
        diagnostics.push(outcome.diagnostics);
    }
    Ok(StepPlan { actions, groups, diagnostics })
}
