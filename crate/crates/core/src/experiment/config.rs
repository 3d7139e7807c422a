//! Experiment configuration files (TOML). Every validation error names the
//! file and line of the offending entry.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::filter::{AssociationMode, DetectionEvaluation, FilterConfig};
use crate::planner::{CostDriver, PlannerConfig, Preset};
use crate::world::Scenario;
use crate::{Error, Result};

/// One compared algorithm: a label plus its planner parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub name: String,
    pub planner: PlannerConfig,
}

impl AlgorithmSpec {
    /// Preset with the conventional label, e.g. `MCTS3-GD` or `Myopic-KLD`.
    pub fn preset(preset: Preset, driver: CostDriver) -> Self {
        let suffix = match driver {
            CostDriver::Gospa => "GD",
            CostDriver::Kld => "KLD",
        };
        Self { name: format!("{}-{suffix}", preset.label()), planner: PlannerConfig::preset(preset, driver) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub algorithms: Vec<AlgorithmSpec>,
    pub runs: usize,
    pub seed: u64,
    /// GOSPA cut-off used for scoring.
    pub gospa_c: f64,
    pub filter: FilterConfig,
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses one per core.
    pub workers: usize,
    /// Emit per-step planner diagnostics.
    pub debug_planner: bool,
}

impl ExperimentConfig {
    /// Defaults around a scenario: c = 80 (twice the FOV radius), one run.
    pub fn new(scenario: Scenario, algorithms: Vec<AlgorithmSpec>) -> Self {
        let gospa_c = 2.0 * scenario.sensor.fov_radius;
        Self {
            scenario,
            algorithms,
            runs: 1,
            seed: 0,
            gospa_c,
            filter: FilterConfig::default(),
            output_dir: PathBuf::from("results"),
            workers: 0,
            debug_planner: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.runs == 0 {
            return fail("run count must be at least 1".into());
        }
        if !(self.gospa_c > 0.0 && self.gospa_c.is_finite()) {
            return fail(format!("GOSPA cut-off must be positive, got {}", self.gospa_c));
        }
        if self.algorithms.is_empty() {
            return fail("at least one algorithm is required".into());
        }
        for a in &self.algorithms {
            a.planner.validate().map_err(|m| Error::Config(format!("algorithm {}: {m}", a.name)))?;
        }
        let mut names: Vec<&str> = self.algorithms.iter().map(|a| a.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return fail("algorithm names must be unique".into());
        }
        self.scenario.sensor.validate().map_err(Error::Config)?;
        if self.scenario.sensors.is_empty() {
            return fail("scenario has no sensors".into());
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, &path.display().to_string(), base)
    }

    /// Parses a configuration; relative paths resolve against `base`.
    pub fn from_toml_str(text: &str, origin: &str, base: &Path) -> Result<Self> {
        let raw: RawExperiment =
            toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {}", e.to_string().trim_end())))?;
        raw.resolve(text, origin, base)
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
struct RawExperiment {
    scenario: Spanned<RawScenarioRef>,
    #[serde(default = "one")]
    runs: Spanned<usize>,
    seed: Option<u64>,
    steps: Option<Spanned<u64>>,
    clutter_rate: Option<Spanned<f64>>,
    output_dir: Option<String>,
    #[serde(default)]
    workers: usize,
    #[serde(default)]
    debug_planner: bool,
    gospa: Option<Spanned<RawGospa>>,
    #[serde(default)]
    filter: Option<Spanned<RawFilter>>,
    #[serde(rename = "algorithm")]
    algorithms: Vec<Spanned<RawAlgorithm>>,
}

fn one() -> Spanned<usize> {
    Spanned::new(0..0, 1)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenarioRef {
    builtin: Option<String>,
    path: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGospa {
    c: f64,
    #[serde(default = "two")]
    p: f64,
    #[serde(default = "two")]
    alpha: f64,
}

fn two() -> f64 {
    2.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilter {
    association: Option<String>,
    detection: Option<String>,
    gate: Option<f64>,
    prune_r: Option<f64>,
    merge_gate: Option<f64>,
    report_threshold: Option<f64>,
    max_exact_hypotheses: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgorithm {
    name: Option<String>,
    preset: String,
    #[serde(default = "gospa_driver")]
    driver: String,
    budget_joint: Option<usize>,
    budget_individual: Option<usize>,
    lookahead: Option<usize>,
    discount: Option<f64>,
    exploration: Option<f64>,
    proximity: Option<f64>,
}

fn gospa_driver() -> String {
    "gospa".into()
}

impl RawExperiment {
    fn resolve(self, text: &str, origin: &str, base: &Path) -> Result<ExperimentConfig> {
        let sref = self.scenario.get_ref();
        let mut scenario = match (&sref.builtin, &sref.path) {
            (Some(name), None) if name == "obstacle" => Scenario::obstacle_scenario(1.0),
            (Some(name), None) => {
                return Err(at(text, origin, &self.scenario, format!("unknown built-in scenario {name:?}")))
            }
            (None, Some(p)) => Scenario::load(base.join(p))?,
            _ => {
                return Err(at(text, origin, &self.scenario, "scenario needs exactly one of `builtin` or `path`"))
            }
        };
        if let Some(steps) = &self.steps {
            if *steps.get_ref() == 0 {
                return Err(at(text, origin, steps, "steps must be at least 1"));
            }
            scenario.steps = *steps.get_ref();
        }
        if let Some(rate) = &self.clutter_rate {
            if !(*rate.get_ref() >= 0.0 && rate.get_ref().is_finite()) {
                return Err(at(text, origin, rate, "clutter_rate must be finite and non-negative"));
            }
            scenario.sensor.clutter_rate = *rate.get_ref();
        }
        if *self.runs.get_ref() == 0 {
            return Err(at(text, origin, &self.runs, "runs must be at least 1"));
        }
        let gospa_c = match &self.gospa {
            None => 2.0 * scenario.sensor.fov_radius,
            Some(g) => {
                let raw = g.get_ref();
                if !(raw.c > 0.0 && raw.c.is_finite()) {
                    return Err(at(text, origin, g, "gospa.c must be positive"));
                }
                if raw.p != 2.0 || raw.alpha != 2.0 {
                    return Err(at(text, origin, g, "only p = 2 and alpha = 2 are supported"));
                }
                raw.c
            }
        };
        let filter = match &self.filter {
            None => FilterConfig::default(),
            Some(f) => resolve_filter(f.get_ref()).map_err(|m| at(text, origin, f, m))?,
        };
        if self.algorithms.is_empty() {
            return Err(Error::Config(format!("{origin}: at least one [[algorithm]] entry is required")));
        }
        let mut algorithms = Vec::with_capacity(self.algorithms.len());
        for entry in &self.algorithms {
            let spec = resolve_algorithm(entry.get_ref(), gospa_c, 3.0 * scenario.sensor.fov_radius, filter.detection).map_err(|m| at(text, origin, entry, m))?;
            if algorithms.iter().any(|a: &AlgorithmSpec| a.name == spec.name) {
                return Err(at(text, origin, entry, format!("duplicate algorithm name {:?}", spec.name)));
            }
            algorithms.push(spec);
        }
        let scenario_seed = scenario.seed;
        let config = ExperimentConfig {
            scenario,
            algorithms,
            runs: *self.runs.get_ref(),
            seed: self.seed.unwrap_or(scenario_seed),
            gospa_c,
            filter,
            output_dir: base.join(self.output_dir.as_deref().unwrap_or("results")),
            workers: self.workers,
            debug_planner: self.debug_planner,
        };
        config.validate().map_err(|e| Error::Config(format!("{origin}: {}", strip_prefix(&e))))?;
        Ok(config)
    }
}

fn strip_prefix(e: &Error) -> String {
    let s = e.to_string();
    s.strip_prefix("configuration error: ").unwrap_or(&s).to_string()
}

fn resolve_filter(raw: &RawFilter) -> std::result::Result<FilterConfig, String> {
    let mut f = FilterConfig::default();
    if let Some(a) = &raw.association {
        f.association = match a.as_str() {
            "auto" => AssociationMode::Auto,
            "exact" => AssociationMode::Exact,
            "lbp" => AssociationMode::Lbp,
            other => return Err(format!("unknown association mode {other:?} (auto, exact, lbp)")),
        };
    }
    if let Some(d) = &raw.detection {
        f.detection = match d.as_str() {
            "predicted_mean" => DetectionEvaluation::PredictedMean,
            "exact" => DetectionEvaluation::Exact,
            other => return Err(format!("unknown detection evaluation {other:?} (predicted_mean, exact)")),
        };
    }
    if let Some(g) = raw.gate {
        f.gate = g;
    }
    if let Some(p) = raw.prune_r {
        f.prune_r = p;
    }
    if let Some(m) = raw.merge_gate {
        f.merge_gate = m;
    }
    if let Some(t) = raw.report_threshold {
        f.report_threshold = t;
    }
    if let Some(n) = raw.max_exact_hypotheses {
        f.max_exact_hypotheses = n;
    }
    if !(f.gate > 0.0) {
        return Err("filter.gate must be positive".into());
    }
    if !(0.0..1.0).contains(&f.prune_r) {
        return Err("filter.prune_r must lie in [0, 1)".into());
    }
    if !(f.merge_gate > 0.0) {
        return Err("filter.merge_gate must be positive".into());
    }
    if !(f.report_threshold > 0.0 && f.report_threshold < 1.0) {
        return Err("filter.report_threshold must lie in (0, 1)".into());
    }
    Ok(f)
}

fn resolve_algorithm(
    raw: &RawAlgorithm,
    gospa_c: f64,
    proximity: f64,
    detection: DetectionEvaluation,
) -> std::result::Result<AlgorithmSpec, String> {
    let preset = match raw.preset.to_ascii_lowercase().as_str() {
        "myopic" => Preset::Myopic,
        "mcts1" => Preset::Mcts1,
        "mcts2" => Preset::Mcts2,
        "mcts3" => Preset::Mcts3,
        "mcts4" => Preset::Mcts4,
        other => return Err(format!("unknown preset {other:?} (myopic, mcts1..mcts4)")),
    };
    let driver = match raw.driver.to_ascii_lowercase().as_str() {
        "gospa" | "gd" => CostDriver::Gospa,
        "kld" => CostDriver::Kld,
        other => return Err(format!("unknown driver {other:?} (gospa, kld)")),
    };
    let mut spec = AlgorithmSpec::preset(preset, driver);
    if let Some(name) = &raw.name {
        spec.name = name.clone();
    }
    let p = &mut spec.planner;
    p.gospa_c = gospa_c;
    p.proximity = proximity;
    p.detection = detection;
    if let Some(v) = raw.budget_joint {
        p.budget_joint = v;
    }
    if let Some(v) = raw.budget_individual {
        p.budget_individual = v;
    }
    if let Some(v) = raw.lookahead {
        p.lookahead = v;
    }
    if let Some(v) = raw.discount {
        p.discount = v;
    }
    if let Some(v) = raw.exploration {
        p.exploration = v;
    }
    if let Some(v) = raw.proximity {
        p.proximity = v;
    }
    p.validate()?;
    Ok(spec)
}
