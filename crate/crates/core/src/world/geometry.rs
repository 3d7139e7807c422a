//! Sensor kinematics: seven discrete actions (six hexagonal moves and hold)
//! constrained by the surveillance square and rectangular obstacles.

use serde::{Deserialize, Serialize};

use crate::linalg::MeasVec;
use crate::{Error, Result};

pub const NUM_ACTIONS: usize = 7;
pub const HOLD_ACTION: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorPose {
    pub position: MeasVec,
    /// Distance covered by a move action.
    pub step_radius: f64,
}

impl SensorPose {
    pub fn new(x: f64, y: f64, step_radius: f64) -> Self {
        Self { position: MeasVec::new(x, y), step_radius }
    }
}

/// Displacement of action `index`: `step·(cos 60°i, sin 60°i)` for i < 6,
/// zero for the hold action.
pub fn action_offset(index: usize, step_radius: f64) -> MeasVec {
    if index >= HOLD_ACTION {
        return MeasVec::zeros();
    }
    let angle = (60.0 * index as f64).to_radians();
    MeasVec::new(angle.cos(), angle.sin()) * step_radius
}

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub min: MeasVec,
    pub max: MeasVec,
}

impl Obstacle {
    pub fn new(min: (f64, f64), max: (f64, f64)) -> Result<Self> {
        let o = Self { min: MeasVec::new(min.0, min.1), max: MeasVec::new(max.0, max.1) };
        if !(o.min.x < o.max.x && o.min.y < o.max.y) {
            return Err(Error::Config(format!("obstacle min {min:?} must be below max {max:?} on both axes")));
        }
        Ok(o)
    }

    pub fn contains(&self, p: &MeasVec) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Whether the closed segment `a→b` touches the rectangle (slab clipping).
    pub fn intersects_segment(&self, a: &MeasVec, b: &MeasVec) -> bool {
        let d = b - a;
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for axis in 0..2 {
            let (lo, hi) = (self.min[axis], self.max[axis]);
            if d[axis] == 0.0 {
                if a[axis] < lo || a[axis] > hi {
                    return false;
                }
                continue;
            }
            let mut ta = (lo - a[axis]) / d[axis];
            let mut tb = (hi - a[axis]) / d[axis];
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurveillanceArea {
    pub min: MeasVec,
    pub max: MeasVec,
}

impl SurveillanceArea {
    /// Square of side `size` centred at the origin.
    pub fn centred_square(size: f64) -> Self {
        let h = 0.5 * size;
        Self { min: MeasVec::new(-h, -h), max: MeasVec::new(h, h) }
    }

    pub fn contains(&self, p: &MeasVec) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Static environment the sensors move in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Workspace {
    pub area: SurveillanceArea,
    pub obstacles: Vec<Obstacle>,
}

impl Workspace {
    pub fn is_available(&self, pose: &SensorPose, action: usize) -> bool {
        if action >= NUM_ACTIONS {
            return false;
        }
        let from = pose.position;
        let to = from + action_offset(action, pose.step_radius);
        if !self.area.contains(&to) {
            return false;
        }
        !self
            .obstacles
            .iter()
            .any(|o| o.contains(&to) || o.intersects_segment(&from, &to))
    }

    /// Indices in `0..7` whose straight move stays in the area and clear of
    /// every obstacle.
    pub fn available_actions(&self, pose: &SensorPose) -> Vec<usize> {
        (0..NUM_ACTIONS).filter(|&a| self.is_available(pose, a)).collect()
    }

    pub fn apply_action(&self, pose: &SensorPose, action: usize) -> Result<SensorPose> {
        if !self.is_available(pose, action) {
            return Err(Error::Contract(format!(
                "action {action} is not available at ({:.3}, {:.3})",
                pose.position.x, pose.position.y
            )));
        }
        Ok(SensorPose {
            position: pose.position + action_offset(action, pose.step_radius),
            ..*pose
        })
    }
}
