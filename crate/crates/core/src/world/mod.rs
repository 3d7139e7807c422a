//! Ground-truth scenario engine: target birth, survival and motion, sensor
//! kinematics constrained by rectangular obstacles, range-dependent detection,
//! Gaussian measurement noise and Poisson clutter on the field-of-view disc.

mod geometry;
mod scenario;
mod sensing;
mod sensor;
mod truth;

pub use geometry::{action_offset, Obstacle, SensorPose, SurveillanceArea, Workspace, HOLD_ACTION, NUM_ACTIONS};
pub use scenario::{Scenario, ScriptedTarget, TruthMode};
pub use sensing::generate_measurements;
pub use sensor::SensorModel;
pub use truth::{alive_at, simulate_ground_truth, step_ground_truth, GroundTruthTarget, GroundTruthTrack};
