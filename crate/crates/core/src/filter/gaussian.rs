//! Gaussian densities on the 4-D state and the moment-matching rule used both
//! for association projection and for detection-pattern merging.

use serde::{Deserialize, Serialize};

use crate::linalg::{
    regularised_inverse2, symmetrise, MeasCov, MeasVec, ObsMatrix, StateCov, StateVec,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub mean: StateVec,
    pub cov: StateCov,
}

impl Gaussian {
    pub fn new(mean: StateVec, cov: StateCov) -> Self {
        Self { mean, cov }
    }

    pub fn position(&self, h: &ObsMatrix) -> MeasVec {
        h * self.mean
    }

    /// Predicted measurement `H·x + b` and innovation covariance `H·P·Hᵀ + R`.
    pub fn innovation(&self, h: &ObsMatrix, bias: &MeasVec, r: &MeasCov) -> (MeasVec, MeasCov) {
        (h * self.mean + bias, symmetrise(&(h * self.cov * h.transpose() + r)))
    }
}

/// Result of a linear-Gaussian Kalman measurement update.
#[derive(Debug, Clone)]
pub struct KalmanUpdate {
    pub posterior: Gaussian,
    /// Squared Mahalanobis distance of the innovation.
    pub mahalanobis_sq: f64,
    /// `N(z; H·x + b, S)`.
    pub likelihood: f64,
}

/// Updated covariance after conditioning on one measurement, in Joseph form.
/// Independent of the measurement value.
pub fn updated_covariance(cov: &StateCov, h: &ObsMatrix, r: &MeasCov) -> Option<StateCov> {
    let s = h * cov * h.transpose() + r;
    let s_inv = regularised_inverse2(&s)?;
    let gain = cov * h.transpose() * s_inv;
    let i_kh = StateCov::identity() - gain * h;
    Some(symmetrise(
        &(i_kh * cov * i_kh.transpose() + gain * r * gain.transpose()),
    ))
}

pub fn kalman_update(
    prior: &Gaussian,
    z: &MeasVec,
    h: &ObsMatrix,
    bias: &MeasVec,
    r: &MeasCov,
) -> Option<KalmanUpdate> {
    let (z_hat, s) = prior.innovation(h, bias, r);
    let s_inv = regularised_inverse2(&s)?;
    let nu = z - z_hat;
    let mahalanobis_sq = (nu.transpose() * s_inv * nu)[(0, 0)];
    let det = s.determinant();
    let likelihood = if det > 0.0 {
        (-0.5 * mahalanobis_sq).exp() / (2.0 * std::f64::consts::PI * det.sqrt())
    } else {
        0.0
    };
    let gain = prior.cov * h.transpose() * s_inv;
    let i_kh = StateCov::identity() - gain * h;
    let cov = symmetrise(&(i_kh * prior.cov * i_kh.transpose() + gain * r * gain.transpose()));
    Some(KalmanUpdate {
        posterior: Gaussian::new(prior.mean + gain * nu, cov),
        mahalanobis_sq,
        likelihood,
    })
}

/// Moment-matched single Gaussian of a weighted mixture. Weights need not be
/// normalised; returns `None` when their sum is not positive.
pub fn moment_match<'a, I>(components: I) -> Option<Gaussian>
where
    I: IntoIterator<Item = (f64, &'a Gaussian)> + Clone,
{
    let total: f64 = components.clone().into_iter().map(|(w, _)| w).sum();
    if !(total > 0.0) {
        return None;
    }
    let mean = components
        .clone()
        .into_iter()
        .fold(StateVec::zeros(), |acc, (w, g)| acc + g.mean * (w / total));
    let cov = components.into_iter().fold(StateCov::zeros(), |acc, (w, g)| {
        let d = g.mean - mean;
        acc + (g.cov + d * d.transpose()) * (w / total)
    });
    Some(Gaussian::new(mean, symmetrise(&cov)))
}
