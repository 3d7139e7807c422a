use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::linalg::{MeasVec, StateVec};

use super::{SensorModel, SensorPose};

/// One scan: each target is detected with the range-dependent probability and
/// yields `H·x + b + v`, `v ~ N(0, R)`; a Poisson number of clutter points is
/// spread uniformly over the field-of-view disc. The returned order is random.
pub fn generate_measurements<R: Rng + ?Sized>(
    pose: &SensorPose,
    model: &SensorModel,
    targets: &[StateVec],
    rng: &mut R,
) -> Vec<MeasVec> {
    let noise = model
        .noise
        .cholesky()
        .map(|c| c.l())
        .unwrap_or_else(|| model.noise.map(|v| v.max(0.0).sqrt()));
    let mut out = Vec::new();
    for x in targets {
        let position = model.observation * x;
        if rng.random::<f64>() < model.detection_probability(&pose.position, &position) {
            let v = MeasVec::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
            out.push(position + model.bias + noise * v);
        }
    }
    if model.clutter_rate > 0.0 {
        let count = Poisson::new(model.clutter_rate)
            .map(|p| p.sample(rng) as usize)
            .unwrap_or(0);
        for _ in 0..count {
            let radius = model.fov_radius * rng.random::<f64>().sqrt();
            let angle = rng.random::<f64>() * std::f64::consts::TAU;
            out.push(pose.position + MeasVec::new(angle.cos(), angle.sin()) * radius);
        }
    }
    out.shuffle(rng);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn silent_sensor_yields_nothing() {
        let model = SensorModel { p_d_max: 0.0, ..SensorModel::position_sensor(2.0, 1.0, 0.0, 40.0) };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pose = SensorPose::new(0.0, 0.0, 15.0);
        for _ in 0..100 {
            assert!(generate_measurements(&pose, &model, &[StateVec::zeros()], &mut rng).is_empty());
        }
    }

    #[test]
    fn clutter_count_mean_and_support() {
        let model = SensorModel::position_sensor(2.0, 1.0, 2.0, 40.0);
        let pose = SensorPose::new(10.0, -3.0, 15.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut total = 0usize;
        for _ in 0..10_000 {
            let z = generate_measurements(&pose, &model, &[], &mut rng);
            assert!(z.iter().all(|p| (p - pose.position).norm() <= 40.0));
            total += z.len();
        }
        let mean = total as f64 / 10_000.0;
        assert!((1.95..=2.05).contains(&mean), "{mean}");
    }

    #[test]
    fn noiseless_detection_at_sensor() {
        let model = SensorModel::position_sensor(0.0, 1.0, 0.0, 40.0);
        let pose = SensorPose::new(5.0, 7.0, 15.0);
        let x = StateVec::new(5.0, 1.0, 7.0, -1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = generate_measurements(&pose, &model, &[x], &mut rng);
        assert_eq!(z, vec![MeasVec::new(5.0, 7.0)]);
    }

    #[test]
    fn reproducible_for_a_seed() {
        let model = SensorModel::position_sensor(2.0, 0.999, 1.5, 40.0);
        let pose = SensorPose::new(0.0, 0.0, 15.0);
        let targets = [StateVec::new(3.0, 0.0, -4.0, 0.0), StateVec::new(20.0, 0.0, 10.0, 0.0)];
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| generate_measurements(&pose, &model, &targets, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
    }
}
