//! Reduced-tree Monte Carlo tree search over sensor action profiles. Tree
//! edges are actions only: every detection pattern is merged away at each node.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cost::{evaluate_stage, StageOutcome};
use super::PlannerConfig;
use crate::filter::{predict, Bernoulli, BirthModel, MotionModel, MultiBernoulli};
use crate::linalg::MeasVec;
use crate::world::{SensorModel, SensorPose, Workspace, NUM_ACTIONS};
use crate::{Error, Result};

/// One action index per sensor of the planned group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionProfile(pub Vec<usize>);

impl ActionProfile {
    /// Mixed-radix code with the first sensor most significant; the
    /// tie-breaking order among profiles.
    pub fn code(&self) -> usize {
        self.0.iter().fold(0, |acc, &a| acc * NUM_ACTIONS + a)
    }
}

/// Read-only environment shared by every node of a planning tree.
#[derive(Debug, Clone, Copy)]
pub struct PlanContext<'a> {
    pub workspace: &'a Workspace,
    pub sensor: &'a SensorModel,
    pub motion: &'a MotionModel,
    pub birth: &'a BirthModel,
    pub config: &'a PlannerConfig,
}

impl PlanContext<'_> {
    /// Every profile whose actions are individually feasible from `poses`, in
    /// code order.
    pub fn feasible_profiles(&self, poses: &[SensorPose]) -> Vec<ActionProfile> {
        let per_sensor: Vec<Vec<usize>> =
            poses.iter().map(|p| self.workspace.available_actions(p)).collect();
        let mut out = vec![Vec::with_capacity(poses.len())];
        for options in &per_sensor {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    options.iter().map(move |&a| {
                        let mut next = prefix.clone();
                        next.push(a);
                        next
                    })
                })
                .collect();
        }
        out.into_iter().map(ActionProfile).collect()
    }

    pub fn apply(&self, poses: &[SensorPose], profile: &ActionProfile) -> Result<Vec<SensorPose>> {
        poses
            .iter()
            .zip(&profile.0)
            .map(|(p, &a)| self.workspace.apply_action(p, a))
            .collect()
    }

    /// Stage cost of sensing from `poses` at tree depth `depth` (1-based),
    /// starting from the parent's merged components. Depth 1 senses the
    /// already-predicted root state; deeper stages predict and add births.
    pub fn stage(&self, parent: &[Bernoulli], poses: &[SensorPose], depth: usize) -> Result<StageOutcome> {
        let positions: Vec<MeasVec> = poses.iter().map(|p| p.position).collect();
        let cfg = self.config;
        if depth <= 1 {
            return evaluate_stage(parent, self.sensor, &positions, cfg.driver, cfg.gospa_c, cfg.detection);
        }
        let predicted = predict(&MultiBernoulli::from_components(parent.iter().map(|b| (b.r, b.density.clone()))), self.motion, self.birth);
        evaluate_stage(&predicted.components, self.sensor, &positions, cfg.driver, cfg.gospa_c, cfg.detection)
    }
}

#[derive(Debug, Clone)]
pub struct PlanNode {
    pub parent: Option<usize>,
    pub depth: usize,
    pub profile: Option<ActionProfile>,
    pub poses: Vec<SensorPose>,
    pub components: Vec<Bernoulli>,
    pub immediate_cost: f64,
    /// Discounted cost accumulated along the path from the root to this node.
    pub path_cost: f64,
    pub mean_cost: f64,
    pub visits: u64,
    pub children: Vec<usize>,
    pub untried: Vec<ActionProfile>,
}

impl PlanNode {
    /// Folds one simulation return into the running mean.
    pub fn backpropagate(&mut self, delta: f64) {
        self.mean_cost = (self.mean_cost * self.visits as f64 + delta) / (self.visits + 1) as f64;
        self.visits += 1;
    }
}

/// Child statistics consulted by [`uct_select`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UctCandidate {
    pub code: usize,
    pub mean_cost: f64,
    pub visits: u64,
}

/// Index of the child maximising `−C̄/scale + ε·sqrt(ln n / n_j)`. Unvisited
/// children win outright; ties go to the lowest profile code.
pub fn uct_select(children: &[UctCandidate], parent_visits: u64, epsilon: f64, scale: f64) -> Option<usize> {
    if let Some(i) = children
        .iter()
        .enumerate()
        .filter(|(_, c)| c.visits == 0)
        .min_by_key(|(_, c)| c.code)
        .map(|(i, _)| i)
    {
        return Some(i);
    }
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let ln_n = (parent_visits.max(1) as f64).ln();
    let score = |c: &UctCandidate| -c.mean_cost / scale + epsilon * (ln_n / c.visits as f64).sqrt();
    let mut best: Option<(usize, f64, usize)> = None;
    for (i, c) in children.iter().enumerate() {
        let s = score(c);
        let better = match best {
            None => true,
            Some((_, bs, bc)) => s > bs || (s == bs && c.code < bc),
        };
        if better {
            best = Some((i, s, c.code));
        }
    }
    best.map(|(i, _, _)| i)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootChildStats {
    pub profile: Vec<usize>,
    pub immediate_cost: f64,
    pub mean_cost: f64,
    pub visits: u64,
}

/// Per-call planner diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanDiagnostics {
    pub sensors: Vec<usize>,
    pub budget: usize,
    pub expansions: usize,
    pub iterations: usize,
    pub tree_size: usize,
    pub root_children: Vec<RootChildStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanOutcome {
    pub profile: ActionProfile,
    pub diagnostics: PlanDiagnostics,
}

/// Builds a fresh tree from the predicted state and returns the root child
/// with the lowest backed-up cost (ties: lowest profile code).
pub fn mcts_plan<R: Rng + ?Sized>(
    ctx: &PlanContext<'_>,
    predicted: &[Bernoulli],
    poses: &[SensorPose],
    budget: usize,
    rng: &mut R,
) -> Result<PlanOutcome> {
    let cfg = ctx.config;
    if budget == 0 || cfg.lookahead == 0 {
        return Err(Error::InvalidInput("planner budget and lookahead must be at least 1".into()));
    }
    let root_untried = ctx.feasible_profiles(poses);
    if root_untried.is_empty() {
        return Err(Error::Contract("no feasible action profile at the root".into()));
    }
    if budget < root_untried.len() {
        tracing::warn!(budget, profiles = root_untried.len(), "budget smaller than root fan-out; planning over a subset");
    }
    let mut tree = vec![PlanNode {
        parent: None,
        depth: 0,
        profile: None,
        poses: poses.to_vec(),
        components: predicted.to_vec(),
        immediate_cost: 0.0,
        path_cost: 0.0,
        mean_cost: 0.0,
        visits: 0,
        children: Vec::new(),
        untried: root_untried,
    }];
    let mut expansions = 0;
    let mut iterations = 0;
    let mut idle = 0;
    let mut scale: f64 = 0.0;
    let idle_limit = budget + 64;
    while expansions < budget && idle < idle_limit {
        iterations += 1;
        // Selection.
        let mut node = 0;
        while tree[node].untried.is_empty() && !tree[node].children.is_empty() {
            let candidates: Vec<UctCandidate> = tree[node]
                .children
                .iter()
                .map(|&c| UctCandidate {
                    code: tree[c].profile.as_ref().map_or(0, ActionProfile::code),
                    mean_cost: tree[c].mean_cost,
                    visits: tree[c].visits,
                })
                .collect();
            let pick = uct_select(&candidates, tree[node].visits, cfg.exploration, scale)
                .expect("non-empty children");
            node = tree[node].children[pick];
        }
        // Expansion.
        if !tree[node].untried.is_empty() {
            let k = rng.random_range(0..tree[node].untried.len());
            let profile = tree[node].untried.swap_remove(k);
            let child = expand(ctx, &tree, node, profile)?;
            tree.push(child);
            let id = tree.len() - 1;
            tree[node].children.push(id);
            node = id;
            expansions += 1;
            idle = 0;
        } else {
            idle += 1;
        }
        // Simulation.
        let delta = tree[node].path_cost + rollout(ctx, &tree[node], rng)?;
        scale = scale.max(delta.abs());
        // Backpropagation.
        let mut cursor = Some(node);
        while let Some(i) = cursor {
            tree[i].backpropagate(delta);
            cursor = tree[i].parent;
        }
    }
    let root_children: Vec<RootChildStats> = tree[0]
        .children
        .iter()
        .map(|&c| RootChildStats {
            profile: tree[c].profile.clone().expect("child has a profile").0,
            immediate_cost: tree[c].immediate_cost,
            mean_cost: tree[c].mean_cost,
            visits: tree[c].visits,
        })
        .collect();
    let best = tree[0]
        .children
        .iter()
        .map(|&c| &tree[c])
        .min_by(|a, b| {
            a.mean_cost
                .total_cmp(&b.mean_cost)
                .then_with(|| a.profile.as_ref().map(ActionProfile::code).cmp(&b.profile.as_ref().map(ActionProfile::code)))
        })
        .and_then(|n| n.profile.clone())
        .ok_or_else(|| Error::Contract("planner produced no root child".into()))?;
    Ok(PlanOutcome {
        profile: best,
        diagnostics: PlanDiagnostics {
            sensors: Vec::new(),
            budget,
            expansions,
            iterations,
            tree_size: tree.len(),
            root_children,
        },
    })
}

fn expand(ctx: &PlanContext<'_>, tree: &[PlanNode], parent: usize, profile: ActionProfile) -> Result<PlanNode> {
    let p = &tree[parent];
    let depth = p.depth + 1;
    let poses = ctx.apply(&p.poses, &profile)?;
    let stage = ctx.stage(&p.components, &poses, depth)?;
    let untried = if depth < ctx.config.lookahead { ctx.feasible_profiles(&poses) } else { Vec::new() };
    Ok(PlanNode {
        parent: Some(parent),
        depth,
        profile: Some(profile),
        poses,
        components: stage.merged,
        immediate_cost: stage.cost,
        path_cost: p.path_cost + ctx.config.discount.powi(depth as i32 - 1) * stage.cost,
        mean_cost: 0.0,
        visits: 0,
        children: Vec::new(),
        untried,
    })
}

/// Discounted cost of uniformly random actions from `node` to the horizon.
fn rollout<R: Rng + ?Sized>(ctx: &PlanContext<'_>, node: &PlanNode, rng: &mut R) -> Result<f64> {
    let mut poses = node.poses.clone();
    let mut components = node.components.clone();
    let mut total = 0.0;
    for depth in (node.depth + 1)..=ctx.config.lookahead {
        for pose in poses.iter_mut() {
            let options = ctx.workspace.available_actions(pose);
            let a = options[rng.random_range(0..options.len())];
            *pose = ctx.workspace.apply_action(pose, a)?;
        }
        let stage = ctx.stage(&components, &poses, depth)?;
        total += ctx.config.discount.powi(depth as i32 - 1) * stage.cost;
        components = stage.merged;
    }
    Ok(total)
}
