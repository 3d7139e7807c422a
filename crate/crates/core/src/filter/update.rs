//! Single-sensor measurement update: local hypotheses per Bernoulli component
//! and the MB projection of the resulting multi-Bernoulli mixture.

use serde::{Deserialize, Serialize};

use super::{
    kalman_update, moment_match, Bernoulli, FilterConfig, Gaussian, Marginals, MultiBernoulli,
    WEIGHT_FLOOR,
};
use crate::linalg::{is_finite_vec, MeasVec};
use crate::world::SensorModel;
use crate::{Error, Result};

/// One way a Bernoulli component may explain the current scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalHypothesis {
    /// `None` for the misdetection hypothesis, else the measurement index.
    pub measurement: Option<usize>,
    /// Unnormalised weight (detection weights are divided by the clutter intensity).
    pub weight: f64,
    pub r: f64,
    pub density: Gaussian,
}

/// Local hypotheses of one component; index 0 is always the misdetection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentHypotheses {
    pub id: u64,
    pub local: Vec<LocalHypothesis>,
}

/// A global association: one local-hypothesis index per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalHypothesis {
    pub local: Vec<usize>,
    /// Normalised weight.
    pub weight: f64,
}

/// Multi-Bernoulli mixture after one sensor's update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MbmState {
    /// The state the update was applied to.
    pub prior: MultiBernoulli,
    pub components: Vec<ComponentHypotheses>,
    pub num_measurements: usize,
}

impl MbmState {
    /// Number of valid global hypotheses, counting at most up to `cap + 1`.
    pub fn count_global_hypotheses(&self, cap: usize) -> usize {
        fn rec(comps: &[ComponentHypotheses], used: &mut Vec<bool>, cap: usize, acc: &mut usize) {
            if *acc > cap {
                return;
            }
            let Some((first, rest)) = comps.split_first() else {
                *acc += 1;
                return;
            };
            for h in &first.local {
                match h.measurement {
                    None => rec(rest, used, cap, acc),
                    Some(j) if !used[j] => {
                        used[j] = true;
                        rec(rest, used, cap, acc);
                        used[j] = false;
                    }
                    Some(_) => {}
                }
                if *acc > cap {
                    return;
                }
            }
        }
        let mut acc = 0;
        rec(&self.components, &mut vec![false; self.num_measurements], cap, &mut acc);
        acc
    }

    /// All valid global hypotheses with normalised weights. Hypotheses whose
    /// weight underflows are still listed (with weight 0).
    pub fn global_hypotheses(&self) -> Result<Vec<GlobalHypothesis>> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(self.components.len());
        let mut used = vec![false; self.num_measurements];
        self.enumerate(0, 0.0, &mut current, &mut used, &mut out);
        let max_log = out.iter().map(|(_, l)| *l).fold(f64::NEG_INFINITY, f64::max);
        if !max_log.is_finite() {
            return Err(Error::Numerical(
                "every global association hypothesis has zero weight".into(),
            ));
        }
        let total: f64 = out.iter().map(|(_, l)| (l - max_log).exp()).sum();
        Ok(out
            .into_iter()
            .map(|(local, l)| GlobalHypothesis { local, weight: (l - max_log).exp() / total })
            .collect())
    }

    fn enumerate(
        &self,
        i: usize,
        log_weight: f64,
        current: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<(Vec<usize>, f64)>,
    ) {
        if i == self.components.len() {
            out.push((current.clone(), log_weight));
            return;
        }
        for (k, h) in self.components[i].local.iter().enumerate() {
            let lw = log_weight + log_or_neg_inf(h.weight);
            match h.measurement {
                None => {
                    current.push(k);
                    self.enumerate(i + 1, lw, current, used, out);
                    current.pop();
                }
                Some(j) if !used[j] => {
                    used[j] = true;
                    current.push(k);
                    self.enumerate(i + 1, lw, current, used, out);
                    current.pop();
                    used[j] = false;
                }
                Some(_) => {}
            }
        }
    }
}

pub(crate) fn log_or_neg_inf(w: f64) -> f64 {
    if w > WEIGHT_FLOOR {
        w.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Builds the local hypotheses of every component for one sensor scan taken
/// from `sensor_position`.
pub fn update_sensor(
    state: &MultiBernoulli,
    measurements: &[MeasVec],
    sensor: &SensorModel,
    sensor_position: &MeasVec,
    config: &FilterConfig,
) -> Result<MbmState> {
    if let Some(bad) = measurements.iter().position(|z| !is_finite_vec(z)) {
        return Err(Error::InvalidInput(format!("measurement {bad} is not finite")));
    }
    let kappa = sensor.clutter_intensity();
    if !measurements.is_empty() && !(kappa > 0.0) {
        return Err(Error::Config(
            "clutter intensity must be positive wherever a measurement lies".into(),
        ));
    }
    let mut components = Vec::with_capacity(state.len());
    for b in &state.components {
        let p_d = sensor
            .expected_detection_probability(sensor_position, &b.density, config.detection)
            .clamp(0.0, 1.0);
        let miss_weight = 1.0 - b.r * p_d;
        let miss_r = if miss_weight > WEIGHT_FLOOR {
            (b.r * (1.0 - p_d) / miss_weight).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let mut local = vec![LocalHypothesis {
            measurement: None,
            weight: miss_weight.max(0.0),
            r: miss_r,
            density: b.density.clone(),
        }];
        if b.r * p_d > WEIGHT_FLOOR {
            for (j, z) in measurements.iter().enumerate() {
                let Some(upd) =
                    kalman_update(&b.density, z, &sensor.observation, &sensor.bias, &sensor.noise)
                else {
                    return Err(Error::Numerical(format!(
                        "innovation covariance of component {} is singular",
                        b.id
                    )));
                };
                if upd.mahalanobis_sq >= config.gate {
                    continue;
                }
                let weight = b.r * p_d * upd.likelihood / kappa;
                if weight > WEIGHT_FLOOR {
                    local.push(LocalHypothesis {
                        measurement: Some(j),
                        weight,
                        r: 1.0,
                        density: upd.posterior,
                    });
                }
            }
        }
        components.push(ComponentHypotheses { id: b.id, local });
    }
    Ok(MbmState { prior: state.clone(), components, num_measurements: measurements.len() })
}

/// Collapses the MBM to an MB: `r = Σ β r_e` and the moment-matched density
/// with weights `β r_e`. Components with zero mass keep their prior density.
pub fn project_to_mb(mbm: &MbmState, marginals: &Marginals) -> Result<MultiBernoulli> {
    if marginals.per_component.len() != mbm.components.len() {
        return Err(Error::Contract(format!(
            "{} marginal rows for {} components",
            marginals.per_component.len(),
            mbm.components.len()
        )));
    }
    let mut out = Vec::with_capacity(mbm.components.len());
    for ((hyps, beta), prior) in mbm
        .components
        .iter()
        .zip(&marginals.per_component)
        .zip(&mbm.prior.components)
    {
        if beta.len() != hyps.local.len() {
            return Err(Error::Contract(format!(
                "component {} has {} hypotheses but {} marginals",
                hyps.id,
                hyps.local.len(),
                beta.len()
            )));
        }
        let weights: Vec<(f64, &Gaussian)> = hyps
            .local
            .iter()
            .zip(beta)
            .map(|(h, &b)| (if b * h.r > WEIGHT_FLOOR { b * h.r } else { 0.0 }, &h.density))
            .collect();
        let r: f64 = weights.iter().map(|(w, _)| w).sum();
        let density = if r > 0.0 {
            moment_match(weights.iter().copied()).unwrap_or_else(|| prior.density.clone())
        } else {
            prior.density.clone()
        };
        out.push(Bernoulli { id: hyps.id, r: r.clamp(0.0, 1.0), density });
    }
    Ok(mbm.prior.with_components(out))
}
