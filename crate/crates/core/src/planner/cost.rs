//! Per-Bernoulli planning cost: the MSGOSPA upper bound with the optimal
//! existence threshold, hypothetical detection/misdetection updates under the
//! ideal-measurement assumption, and the KLD information reward.

use serde::{Deserialize, Serialize};

use crate::filter::{moment_match, updated_covariance, Bernoulli, DetectionEvaluation, Gaussian};
use crate::linalg::MeasVec;
use crate::world::SensorModel;
use crate::{Error, Result};

/// Per-node objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum CostDriver {
    /// Expected GOSPA upper bound (minimised).
    #[default]
    Gospa,
    /// Negated Kullback–Leibler information gain.
    Kld,
}

/// Cost-minimising existence threshold `1 / (2 − min(2·tr P / c², 1))`.
pub fn optimal_threshold(trace: f64, c: f64) -> f64 {
    1.0 / (2.0 - (2.0 * trace / (c * c)).min(1.0))
}

/// Expected squared GOSPA contribution of one Bernoulli when it is reported
/// iff `r > threshold`.
pub fn bernoulli_cost_with_threshold(r: f64, trace: f64, c: f64, threshold: f64) -> f64 {
    let half = 0.5 * c * c;
    if r <= threshold {
        half * r
    } else {
        half * (1.0 - r) + r * trace.min(c * c)
    }
}

/// Expected squared GOSPA contribution at the optimal threshold.
pub fn bernoulli_cost(r: f64, cov: &crate::linalg::StateCov, c: f64) -> f64 {
    let trace = cov.trace();
    bernoulli_cost_with_threshold(r, trace, c, optimal_threshold(trace, c))
}

/// Per-sensor detection bits; bit `s` set iff sensor `s` detects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DetectionPattern {
    pub bits: u32,
    pub sensors: usize,
}

impl DetectionPattern {
    pub fn new(bits: u32, sensors: usize) -> Self {
        Self { bits, sensors }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let value = bits.iter().enumerate().fold(0, |acc, (s, &b)| acc | (u32::from(b) << s));
        Self::new(value, bits.len())
    }

    pub fn detected(&self, sensor: usize) -> bool {
        self.bits >> sensor & 1 == 1
    }

    /// All `2^S` patterns, misdetection-everywhere first.
    pub fn all(sensors: usize) -> impl Iterator<Item = Self> {
        (0..1u32 << sensors).map(move |bits| Self::new(bits, sensors))
    }
}

/// Probability of a detection pattern, `∏_s` of `r·p̄_s` (detected) or
/// `1 − r·p̄_s` (missed), all evaluated at the predicted existence.
pub fn h_probability(r_pred: f64, pbar: &[f64], h: &DetectionPattern) -> f64 {
    pbar.iter()
        .enumerate()
        .map(|(s, &p)| if h.detected(s) { r_pred * p } else { 1.0 - r_pred * p })
        .product()
}

/// Updates a Bernoulli with either no measurement or one measurement at the
/// predicted value: the mean never changes, a detection applies the Kalman
/// covariance update and certifies existence.
pub fn hypothetical_update(
    b: &Bernoulli,
    sensor: &SensorModel,
    p_d: f64,
    detected: bool,
) -> Result<Bernoulli> {
    if detected {
        let cov = updated_covariance(&b.density.cov, &sensor.observation, &sensor.noise)
            .ok_or_else(|| Error::Numerical(format!("singular innovation covariance for component {}", b.id)))?;
        Ok(Bernoulli { id: b.id, r: 1.0, density: Gaussian::new(b.density.mean, cov) })
    } else {
        let denom = 1.0 - b.r + (1.0 - p_d) * b.r;
        let r = if denom > 0.0 { ((1.0 - p_d) * b.r / denom).clamp(0.0, 1.0) } else { 0.0 };
        Ok(Bernoulli { r, ..b.clone() })
    }
}

/// One detection pattern's outcome for a Bernoulli.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub pattern: DetectionPattern,
    pub probability: f64,
    pub component: Bernoulli,
}

/// Applies every detection pattern over the given sensor positions, updating
/// sequentially sensor by sensor.
pub fn pattern_branches(
    b: &Bernoulli,
    sensor: &SensorModel,
    positions: &[MeasVec],
    detection: DetectionEvaluation,
) -> Result<Vec<Branch>> {
    let pbar: Vec<f64> = positions
        .iter()
        .map(|p| sensor.expected_detection_probability(p, &b.density, detection).clamp(0.0, 1.0))
        .collect();
    DetectionPattern::all(positions.len())
        .map(|h| {
            let mut component = b.clone();
            for (s, &p) in pbar.iter().enumerate() {
                component = hypothetical_update(&component, sensor, p, h.detected(s))?;
            }
            Ok(Branch { pattern: h, probability: h_probability(b.r, &pbar, &h), component })
        })
        .collect()
}

/// Collapses pattern branches into one Bernoulli: `r = Σ p(h)·r_h` and the
/// moment-matched density with weights `p(h)·r_h`. With zero total existence
/// the first (all-misdetection) branch density is kept.
pub fn merge_patterns(branches: &[Branch]) -> Result<Bernoulli> {
    let first = branches
        .first()
        .ok_or_else(|| Error::InvalidInput("merge_patterns needs at least one branch".into()))?;
    let weights = branches.iter().map(|b| (b.probability * b.component.r, &b.component.density));
    let r: f64 = weights.clone().map(|(w, _)| w).sum();
    if !(r > 0.0) {
        return Ok(Bernoulli { r: 0.0, ..first.component.clone() });
    }
    let density = moment_match(weights).unwrap_or_else(|| first.component.density.clone());
    Ok(Bernoulli { id: first.component.id, r: r.min(1.0), density })
}

/// KL divergence `KL(N(m_u, P_u) ‖ N(m_p, P_p))` in 4-D.
pub fn gaussian_kld(updated: &Gaussian, predicted: &Gaussian) -> f64 {
    let Some(p_inv) = predicted.cov.try_inverse() else {
        return 0.0;
    };
    let d = predicted.mean - updated.mean;
    let (det_p, det_u) = (predicted.cov.determinant(), updated.cov.determinant());
    if !(det_p > 0.0 && det_u > 0.0) {
        return 0.0;
    }
    let k = updated.mean.len() as f64;
    0.5 * ((p_inv * updated.cov).trace() + (d.transpose() * p_inv * d)[(0, 0)] - k + (det_p / det_u).ln())
}

/// KL divergence between two Bernoulli densities with Gaussian spatial parts.
pub fn kld_reward(predicted: &Bernoulli, updated: &Bernoulli) -> f64 {
    const EDGE: f64 = 1e-9;
    let rp = predicted.r.clamp(EDGE, 1.0 - EDGE);
    let ru = updated.r.clamp(0.0, 1.0);
    let exist = if ru > 0.0 {
        ru * ((ru / rp).ln() + gaussian_kld(&updated.density, &predicted.density))
    } else {
        0.0
    };
    let absent = if ru < 1.0 { (1.0 - ru) * ((1.0 - ru) / (1.0 - rp)).ln() } else { 0.0 };
    exist + absent
}

/// Cost of one planning stage and the pattern-merged components it leads to.
#[derive(Debug, Clone, PartialEq)]
pub struct StageOutcome {
    pub cost: f64,
    pub merged: Vec<Bernoulli>,
}

/// Evaluates a set of (predicted) Bernoullis against sensors placed at
/// `positions`: `Σ_i Σ_h p(h)·C(branch)`, where `C` is the GOSPA bound of the
/// pre-merge branch or the negated KLD from the predicted component.
pub fn evaluate_stage(
    components: &[Bernoulli],
    sensor: &SensorModel,
    positions: &[MeasVec],
    driver: CostDriver,
    c: f64,
    detection: DetectionEvaluation,
) -> Result<StageOutcome> {
    let mut cost = 0.0;
    let mut merged = Vec::with_capacity(components.len());
    for b in components {
        let branches = pattern_branches(b, sensor, positions, detection)?;
        for br in &branches {
            cost += br.probability
                * match driver {
                    CostDriver::Gospa => bernoulli_cost(br.component.r, &br.component.density.cov, c),
                    CostDriver::Kld => -kld_reward(b, &br.component),
                };
        }
        merged.push(merge_patterns(&branches)?);
    }
    Ok(StageOutcome { cost, merged })
}

/// Weighted pattern cost of a single planning stage.
pub fn node_cost(
    components: &[Bernoulli],
    sensor: &SensorModel,
    positions: &[MeasVec],
    driver: CostDriver,
    c: f64,
    detection: DetectionEvaluation,
) -> Result<f64> {
    Ok(evaluate_stage(components, sensor, positions, driver, c, detection)?.cost)
}

/// Upper bound on the expected squared GOSPA after sensing from `positions`
/// given the current predicted state.
pub fn myopic_bound(
    state: &crate::filter::MultiBernoulli,
    sensor: &SensorModel,
    positions: &[MeasVec],
    c: f64,
    detection: DetectionEvaluation,
) -> Result<f64> {
    node_cost(&state.components, sensor, positions, CostDriver::Gospa, c, detection)
}
