//! Scenario files (TOML). Semantic validation errors carry the line of the
//! offending table.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::filter::{BirthComponent, BirthModel, Gaussian, MotionModel};
use crate::linalg::{StateCov, StateVec};
use crate::{Error, Result};

use super::{Obstacle, SensorModel, SensorPose, SurveillanceArea, Workspace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedTarget {
    pub birth_step: u64,
    /// Exclusive.
    pub death_step: u64,
    #[serde(default)]
    pub initial_state: Option<StateVec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TruthMode {
    /// Births and deaths sampled from the models.
    Stochastic,
    /// Fixed birth/death steps; motion still sampled.
    Scripted(Vec<ScriptedTarget>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub steps: u64,
    pub seed: u64,
    pub workspace: Workspace,
    pub motion: MotionModel,
    pub birth: BirthModel,
    /// Shared by all sensors.
    pub sensor: SensorModel,
    pub sensors: Vec<SensorPose>,
    pub truth: TruthMode,
}

impl Scenario {
    /// Two sensors behind a wall that separates them from the birth area at the
    /// origin; eight scripted targets with at most four alive at once (steps
    /// 70–79 and 120–129).
    pub fn obstacle_scenario(clutter_rate: f64) -> Self {
        let script = [(5, 80), (30, 100), (50, 90), (70, 130), (95, 150), (110, 180), (120, 200), (150, 200)]
            .into_iter()
            .map(|(birth_step, death_step)| ScriptedTarget { birth_step, death_step, initial_state: None })
            .collect();
        Self {
            steps: 200,
            seed: 2024,
            workspace: Workspace {
                area: SurveillanceArea::centred_square(500.0),
                obstacles: vec![Obstacle::new((-30.0, -115.0), (30.0, -100.0)).expect("valid rectangle")],
            },
            motion: MotionModel::nearly_constant_velocity(1.0, 0.8, 0.99),
            birth: BirthModel::single(
                0.03,
                Gaussian::new(StateVec::new(0.0, 0.1, 0.0, 0.1), StateCov::identity() * 6.0),
            ),
            sensor: SensorModel::position_sensor(2.0, 0.999, clutter_rate, 40.0),
            sensors: vec![SensorPose::new(-15.0, -155.0, 15.0), SensorPose::new(15.0, -155.0, 15.0)],
            truth: TruthMode::Scripted(script),
        }
    }

    pub fn script(&self) -> Option<&[ScriptedTarget]> {
        match &self.truth {
            TruthMode::Scripted(s) => Some(s),
            TruthMode::Stochastic => None,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    /// Parses and validates a scenario; `origin` names the source in errors.
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text)
            .map_err(|e| Error::Config(format!("{origin}: {e}")))?;
        raw.into_scenario(text, origin)
    }

    /// Segment from each sensor to each birth mean must cross an obstacle.
    pub fn birth_path_blocked(&self) -> bool {
        let h = &self.sensor.observation;
        self.sensors.iter().all(|s| {
            self.birth.components.iter().all(|b| {
                let target = h * b.density.mean;
                self.workspace
                    .obstacles
                    .iter()
                    .any(|o| o.intersects_segment(&s.position, &target))
            })
        })
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn at<T>(text: &str, origin: &str, item: &Spanned<T>, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{origin}:{}: {msg}", line_of(text, item.span().start)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    steps: Spanned<u64>,
    #[serde(default)]
    seed: u64,
    area: Spanned<RawArea>,
    #[serde(default)]
    obstacles: Vec<Spanned<RawObstacle>>,
    motion: Spanned<RawMotion>,
    birth: Vec<Spanned<RawBirth>>,
    sensor: Spanned<RawSensor>,
    sensors: Vec<Spanned<RawPose>>,
    truth: Spanned<RawTruth>,
    #[serde(default = "default_true")]
    require_blocked_birth: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArea {
    size: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObstacle {
    min: [f64; 2],
    max: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMotion {
    #[serde(default = "one")]
    tau: f64,
    q: f64,
    p_survival: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBirth {
    r: f64,
    mean: [f64; 4],
    cov_diag: [f64; 4],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSensor {
    p_d_max: f64,
    fov_radius: f64,
    noise_var: f64,
    clutter_rate: f64,
    step_radius: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPose {
    position: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTruth {
    mode: String,
    #[serde(default)]
    targets: Vec<Spanned<RawScripted>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScripted {
    birth: u64,
    death: u64,
    #[serde(default)]
    state: Option<[f64; 4]>,
}

impl RawScenario {
    fn into_scenario(self, text: &str, origin: &str) -> Result<Scenario> {
        if *self.steps.get_ref() == 0 {
            return Err(at(text, origin, &self.steps, "steps must be at least 1"));
        }
        let size = self.area.get_ref().size;
        if !(size > 0.0 && size.is_finite()) {
            return Err(at(text, origin, &self.area, format!("area size must be positive, got {size}")));
        }
        let area = SurveillanceArea::centred_square(size);

        let mut obstacles = Vec::new();
        for o in &self.obstacles {
            let r = o.get_ref();
            let ob = Obstacle::new((r.min[0], r.min[1]), (r.max[0], r.max[1]))
                .map_err(|e| at(text, origin, o, e))?;
            obstacles.push(ob);
        }

        let m = self.motion.get_ref();
        if !(m.p_survival > 0.0 && m.p_survival <= 1.0) {
            return Err(at(text, origin, &self.motion, "p_survival must lie in (0, 1]"));
        }
        if !(m.q >= 0.0 && m.tau > 0.0) {
            return Err(at(text, origin, &self.motion, "need q >= 0 and tau > 0"));
        }
        let motion = MotionModel::nearly_constant_velocity(m.tau, m.q, m.p_survival);

        if self.birth.is_empty() {
            return Err(Error::Config(format!("{origin}: at least one [[birth]] component is required")));
        }
        let mut births = Vec::new();
        for b in &self.birth {
            let r = b.get_ref();
            if !(r.r > 0.0 && r.r < 1.0) {
                return Err(at(text, origin, b, format!("birth probability must lie in (0, 1), got {}", r.r)));
            }
            if r.cov_diag.iter().any(|v| !(*v >= 0.0)) {
                return Err(at(text, origin, b, "birth covariance diagonal must be non-negative"));
            }
            births.push(BirthComponent {
                r: r.r,
                density: Gaussian::new(
                    StateVec::from(r.mean),
                    StateCov::from_diagonal(&StateVec::from(r.cov_diag)),
                ),
            });
        }

        let s = self.sensor.get_ref();
        let sensor = SensorModel::position_sensor(s.noise_var, s.p_d_max, s.clutter_rate, s.fov_radius);
        sensor.validate().map_err(|e| at(text, origin, &self.sensor, e))?;
        if !(s.step_radius > 0.0) {
            return Err(at(text, origin, &self.sensor, "step_radius must be positive"));
        }

        if self.sensors.is_empty() {
            return Err(Error::Config(format!("{origin}: at least one [[sensors]] entry is required")));
        }
        let mut sensors = Vec::new();
        for p in &self.sensors {
            let pose = SensorPose::new(p.get_ref().position[0], p.get_ref().position[1], s.step_radius);
            if !area.contains(&pose.position) {
                return Err(at(text, origin, p, "sensor starts outside the surveillance area"));
            }
            if obstacles.iter().any(|o| o.contains(&pose.position)) {
                return Err(at(text, origin, p, "sensor starts inside an obstacle"));
            }
            sensors.push(pose);
        }

        let t = self.truth.get_ref();
        let truth = match t.mode.as_str() {
            "stochastic" => TruthMode::Stochastic,
            "scripted" => {
                let mut script = Vec::new();
                for e in &t.targets {
                    let r = e.get_ref();
                    if r.birth >= r.death {
                        return Err(at(text, origin, e, "scripted target needs birth < death"));
                    }
                    script.push(ScriptedTarget {
                        birth_step: r.birth,
                        death_step: r.death,
                        initial_state: r.state.map(StateVec::from),
                    });
                }
                TruthMode::Scripted(script)
            }
            other => {
                return Err(at(text, origin, &self.truth, format!(
                    "truth mode must be \"scripted\" or \"stochastic\", got {other:?}"
                )))
            }
        };

        let scenario = Scenario {
            steps: *self.steps.get_ref(),
            seed: self.seed,
            workspace: Workspace { area, obstacles },
            motion,
            birth: BirthModel { components: births },
            sensor,
            sensors,
            truth,
        };
        if self.require_blocked_birth && !scenario.birth_path_blocked() {
            return Err(at(
                text,
                origin,
                &self.sensors[0],
                "every sensor's straight path to the birth location must be blocked by an obstacle",
            ));
        }
        Ok(scenario)
    }
}
