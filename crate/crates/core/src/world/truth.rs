use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::filter::{BirthModel, Gaussian, MotionModel};
use crate::linalg::{StateCov, StateVec};

use super::scenario::ScriptedTarget;

/// A live ground-truth target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthTarget {
    pub id: u64,
    pub state: StateVec,
    pub birth_step: u64,
    /// Exclusive; `None` while the target is alive.
    pub death_step: Option<u64>,
}

/// Whole trajectory of one target, `states[k - birth_step]` for
/// `birth_step <= k < death_step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthTrack {
    pub id: u64,
    pub birth_step: u64,
    pub death_step: u64,
    pub states: Vec<StateVec>,
}

impl GroundTruthTrack {
    pub fn state_at(&self, step: u64) -> Option<&StateVec> {
        if step < self.birth_step || step >= self.death_step {
            return None;
        }
        self.states.get((step - self.birth_step) as usize)
    }
}

pub(crate) fn sample_gaussian<R: Rng + ?Sized>(g: &Gaussian, rng: &mut R) -> StateVec {
    g.mean + cholesky_factor(&g.cov) * standard_normal(rng)
}

pub(crate) fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> StateVec {
    StateVec::from_fn(|_, _| StandardNormal.sample(rng))
}

/// Lower Cholesky factor of a PSD matrix; singular directions are handled by
/// falling back to an eigen-decomposition square root.
pub(crate) fn cholesky_factor(p: &StateCov) -> StateCov {
    if let Some(c) = p.cholesky() {
        return c.l();
    }
    let eig = p.symmetric_eigen();
    let sqrt = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    eig.eigenvectors * StateCov::from_diagonal(&sqrt)
}

/// Advances the live targets by one step: each survives with `p_survival` and
/// moves by `x ← F·x + w`, `w ~ N(0, Q)`; each birth component spawns a new
/// target with probability `r_birth`.
pub fn step_ground_truth<R: Rng + ?Sized>(
    targets: &[GroundTruthTarget],
    step: u64,
    motion: &MotionModel,
    birth: &BirthModel,
    next_id: &mut u64,
    rng: &mut R,
) -> Vec<GroundTruthTarget> {
    let noise = cholesky_factor(&motion.process_noise);
    let mut out = Vec::with_capacity(targets.len() + birth.components.len());
    for t in targets {
        if rng.random::<f64>() < motion.p_survival {
            out.push(GroundTruthTarget {
                state: motion.transition * t.state + noise * standard_normal(rng),
                ..t.clone()
            });
        }
    }
    for b in &birth.components {
        if rng.random::<f64>() < b.r {
            out.push(GroundTruthTarget {
                id: *next_id,
                state: sample_gaussian(&b.density, rng),
                birth_step: step,
                death_step: None,
            });
            *next_id += 1;
        }
    }
    out
}

/// Generates full trajectories for `steps` steps. With `script` set, targets
/// appear and disappear at the scripted steps (initial states sampled from the
/// first birth component unless given) and move with the motion model;
/// otherwise births and deaths are sampled.
pub fn simulate_ground_truth<R: Rng + ?Sized>(
    steps: u64,
    motion: &MotionModel,
    birth: &BirthModel,
    script: Option<&[ScriptedTarget]>,
    rng: &mut R,
) -> Vec<GroundTruthTrack> {
    match script {
        Some(script) => scripted(steps, motion, birth, script, rng),
        None => stochastic(steps, motion, birth, rng),
    }
}

fn scripted<R: Rng + ?Sized>(
    steps: u64,
    motion: &MotionModel,
    birth: &BirthModel,
    script: &[ScriptedTarget],
    rng: &mut R,
) -> Vec<GroundTruthTrack> {
    let noise = cholesky_factor(&motion.process_noise);
    script
        .iter()
        .enumerate()
        .filter(|(_, t)| t.birth_step < steps)
        .map(|(id, t)| {
            let death = t.death_step.min(steps);
            let mut state = match (&t.initial_state, birth.components.first()) {
                (Some(s), _) => *s,
                (None, Some(b)) => sample_gaussian(&b.density, rng),
                (None, None) => StateVec::zeros(),
            };
            let mut states = Vec::with_capacity((death - t.birth_step) as usize);
            for _ in t.birth_step..death {
                states.push(state);
                state = motion.transition * state + noise * standard_normal(rng);
            }
            GroundTruthTrack { id: id as u64, birth_step: t.birth_step, death_step: death, states }
        })
        .collect()
}

fn stochastic<R: Rng + ?Sized>(
    steps: u64,
    motion: &MotionModel,
    birth: &BirthModel,
    rng: &mut R,
) -> Vec<GroundTruthTrack> {
    let mut tracks: Vec<GroundTruthTrack> = Vec::new();
    let mut live: Vec<GroundTruthTarget> = Vec::new();
    let mut next_id = 0;
    for step in 0..steps {
        live = if step == 0 {
            step_ground_truth(&[], 0, motion, birth, &mut next_id, rng)
        } else {
            step_ground_truth(&live, step, motion, birth, &mut next_id, rng)
        };
        for t in &live {
            match tracks.iter_mut().find(|tr| tr.id == t.id) {
                Some(track) => {
                    track.states.push(t.state);
                    track.death_step = step + 1;
                }
                None => tracks.push(GroundTruthTrack {
                    id: t.id,
                    birth_step: step,
                    death_step: step + 1,
                    states: vec![t.state],
                }),
            }
        }
    }
    tracks
}

/// States of the tracks alive at `step`, ordered by id.
pub fn alive_at(tracks: &[GroundTruthTrack], step: u64) -> Vec<(u64, StateVec)> {
    tracks
        .iter()
        .filter_map(|t| t.state_at(step).map(|s| (t.id, *s)))
        .collect()
}
