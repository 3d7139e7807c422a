use serde::{Deserialize, Serialize};

use crate::filter::{DetectionEvaluation, Gaussian};
use crate::linalg::{position_selector, symmetrise, MeasCov, MeasVec, ObsMatrix};

/// Linear-Gaussian sensor with a range-decaying detection probability and
/// Poisson clutter uniform on its field-of-view disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorModel {
    pub observation: ObsMatrix,
    pub noise: MeasCov,
    pub bias: MeasVec,
    pub p_d_max: f64,
    /// Expected clutter count per scan.
    pub clutter_rate: f64,
    pub fov_radius: f64,
}

impl SensorModel {
    /// Position-observing sensor with isotropic noise variance and zero bias.
    pub fn position_sensor(noise_var: f64, p_d_max: f64, clutter_rate: f64, fov_radius: f64) -> Self {
        Self {
            observation: position_selector(),
            noise: MeasCov::identity() * noise_var,
            bias: MeasVec::zeros(),
            p_d_max,
            clutter_rate,
            fov_radius,
        }
    }

    /// `p_D_max · exp(−½ (δ/r)²)` with δ the sensor-to-target distance.
    pub fn detection_probability(&self, sensor: &MeasVec, target: &MeasVec) -> f64 {
        let ratio = (target - sensor).norm() / self.fov_radius;
        self.p_d_max * (-0.5 * ratio * ratio).exp()
    }

    /// Clutter spatial intensity `λ̄ / (π r²)`.
    pub fn clutter_intensity(&self) -> f64 {
        self.clutter_rate / (std::f64::consts::PI * self.fov_radius * self.fov_radius)
    }

    /// Expected detection probability of a Gaussian target.
    pub fn expected_detection_probability(
        &self,
        sensor: &MeasVec,
        density: &Gaussian,
        evaluation: DetectionEvaluation,
    ) -> f64 {
        match evaluation {
            DetectionEvaluation::Constant(p) => p,
            DetectionEvaluation::PredictedMean => {
                self.detection_probability(sensor, &(self.observation * density.mean))
            }
            DetectionEvaluation::Exact => {
                // The detection profile is an unnormalised Gaussian in position,
                // so its expectation under N(μ, Σ) is closed-form.
                let r2 = self.fov_radius * self.fov_radius;
                let sigma = symmetrise(&(self.observation * density.cov * self.observation.transpose()));
                let d = self.observation * density.mean - sensor;
                let widened = sigma + MeasCov::identity() * r2;
                let Some(inv) = widened.try_inverse() else {
                    return self.detection_probability(sensor, &(self.observation * density.mean));
                };
                let scale = (MeasCov::identity() + sigma / r2).determinant();
                self.p_d_max * (-0.5 * (d.transpose() * inv * d)[(0, 0)]).exp() / scale.sqrt()
            }
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.p_d_max > 0.0 && self.p_d_max <= 1.0) {
            return Err(format!("p_d_max must lie in (0, 1], got {}", self.p_d_max));
        }
        if !(self.clutter_rate >= 0.0 && self.clutter_rate.is_finite()) {
            return Err(format!("clutter rate must be finite and non-negative, got {}", self.clutter_rate));
        }
        if !(self.fov_radius > 0.0 && self.fov_radius.is_finite()) {
            return Err(format!("fov radius must be positive, got {}", self.fov_radius));
        }
        let eig = symmetrise(&self.noise).symmetric_eigenvalues();
        if (self.noise - self.noise.transpose()).abs().max() > 1e-12 || eig.min() < 0.0 {
            return Err("measurement noise covariance must be symmetric PSD".into());
        }
        Ok(())
    }
}
