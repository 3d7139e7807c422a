//! Generalised optimal sub-pattern assignment (GOSPA) metric with p = 2 and
//! α = 2 on 2-D positions.
//!
//! For α = 2 the minimum over assignment sets reduces to a rectangular
//! assignment problem: a matched pair costs `min(d², c²)` and every unmatched
//! element of either set costs `c²/2`.

mod assignment;

pub use assignment::{solve_assignment, Assignment};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::MeasVec;
use crate::{Error, Result};

/// A finite set of 2-D target positions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TargetSet(pub Vec<MeasVec>);

impl TargetSet {
    pub fn new(points: Vec<MeasVec>) -> Self {
        Self(points)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn from_xy(points: &[(f64, f64)]) -> Self {
        Self(points.iter().map(|&(x, y)| MeasVec::new(x, y)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn points(&self) -> &[MeasVec] {
        &self.0
    }

    fn check_finite(&self, name: &str) -> Result<()> {
        if let Some(i) = self
            .0
            .iter()
            .position(|p| !(p.x.is_finite() && p.y.is_finite()))
        {
            return Err(Error::InvalidInput(format!(
                "{name} element {i} has a non-finite coordinate"
            )));
        }
        Ok(())
    }
}

/// Cut-off distance `c`. The exponent and α are fixed at 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GospaParams {
    c: f64,
}

impl GospaParams {
    pub const P: f64 = 2.0;
    pub const ALPHA: f64 = 2.0;

    pub fn new(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidInput(format!(
                "GOSPA cut-off must be finite and positive, got {c}"
            )));
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Penalty `c²/2` for a single missed or false target.
    pub fn unassigned_cost(&self) -> f64 {
        0.5 * self.c * self.c
    }
}

/// GOSPA value with its localisation / missed / false decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GospaBreakdown {
    pub total: f64,
    pub sq_total: f64,
    pub loc_sq: f64,
    pub missed_count: usize,
    pub false_count: usize,
    /// Zero-based `(truth index, estimate index)` pairs, sorted.
    pub assignment: Vec<(usize, usize)>,
}

impl GospaBreakdown {
    /// `(c²/2)·missed`.
    pub fn missed_sq(&self, params: &GospaParams) -> f64 {
        params.unassigned_cost() * self.missed_count as f64
    }

    pub fn false_sq(&self, params: &GospaParams) -> f64 {
        params.unassigned_cost() * self.false_count as f64
    }
}

/// Computes the GOSPA metric between `truth` and `estimate`.
pub fn gospa(truth: &TargetSet, estimate: &TargetSet, params: &GospaParams) -> Result<GospaBreakdown> {
    truth.check_finite("truth")?;
    estimate.check_finite("estimate")?;
    let c2 = params.c * params.c;
    let costs = DMatrix::from_fn(truth.len(), estimate.len(), |i, j| {
        (truth.0[i] - estimate.0[j]).norm_squared().min(c2)
    });
    let solved = solve_assignment(&costs, params.unassigned_cost())?;

    let loc_sq: f64 = solved.pairs.iter().map(|&(i, j)| costs[(i, j)]).sum();
    let matched = solved.pairs.len();
    let missed_count = truth.len() - matched;
    let false_count = estimate.len() - matched;
    let sq_total = loc_sq + params.unassigned_cost() * (missed_count + false_count) as f64;
    Ok(GospaBreakdown {
        total: sq_total.sqrt(),
        sq_total,
        loc_sq,
        missed_count,
        false_count,
        assignment: solved.pairs,
    })
}

/// Root-mean-square of per-run squared GOSPA values.
pub fn rms_gospa(per_run_sq_totals: &[f64]) -> Result<f64> {
    if per_run_sq_totals.is_empty() {
        return Err(Error::InvalidInput("rms_gospa of an empty list".into()));
    }
    if let Some(v) = per_run_sq_totals.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "squared GOSPA values must be finite and non-negative, got {v}"
        )));
    }
    let mean = per_run_sq_totals.iter().sum::<f64>() / per_run_sq_totals.len() as f64;
    Ok(mean.sqrt())
}
