//! Marginal probabilities of local association hypotheses, by exact
//! enumeration of global hypotheses or by loopy belief propagation.

use serde::{Deserialize, Serialize};

use super::{AssociationMode, FilterConfig, MbmState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LbpParams {
    pub damping: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for LbpParams {
    fn default() -> Self {
        Self { damping: 0.5, max_iterations: 200, tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarginalMethod {
    Exact,
    Lbp { iterations: usize },
    /// LBP hit its iteration limit and the problem was too large to enumerate;
    /// the marginals are the last iterate.
    LbpUnconverged,
}

/// Marginal weight of each local hypothesis, laid out like `MbmState::components`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginals {
    pub per_component: Vec<Vec<f64>>,
    pub method: MarginalMethod,
}

impl Marginals {
    pub fn converged(&self) -> bool {
        self.method != MarginalMethod::LbpUnconverged
    }
}

pub fn compute_marginals(
    mbm: &MbmState,
    mode: AssociationMode,
    config: &FilterConfig,
) -> Result<Marginals> {
    let cap = config.max_exact_hypotheses;
    match mode {
        AssociationMode::Exact => exact(mbm),
        AssociationMode::Auto if mbm.count_global_hypotheses(cap) <= cap => exact(mbm),
        AssociationMode::Auto | AssociationMode::Lbp => {
            let (per_component, iterations, converged) = lbp(mbm, &config.lbp)?;
            if converged {
                return Ok(Marginals { per_component, method: MarginalMethod::Lbp { iterations } });
            }
            if mbm.count_global_hypotheses(cap) <= cap {
                tracing::warn!(iterations, "belief propagation did not converge; enumerating");
                return exact(mbm);
            }
            tracing::warn!(iterations, "belief propagation did not converge; using last iterate");
            Ok(Marginals { per_component, method: MarginalMethod::LbpUnconverged })
        }
    }
}

fn exact(mbm: &MbmState) -> Result<Marginals> {
    let mut per_component: Vec<Vec<f64>> =
        mbm.components.iter().map(|c| vec![0.0; c.local.len()]).collect();
    for g in mbm.global_hypotheses()? {
        for (i, &k) in g.local.iter().enumerate() {
            per_component[i][k] += g.weight;
        }
    }
    Ok(Marginals { per_component, method: MarginalMethod::Exact })
}

/// Returns (marginals, iterations, converged).
fn lbp(mbm: &MbmState, params: &LbpParams) -> Result<(Vec<Vec<f64>>, usize, bool)> {
    let n = mbm.components.len();
    let m = mbm.num_measurements;
    // Row-normalised weight table: column 0 is the misdetection, column j+1
    // measurement j. Messages are invariant to per-row scaling.
    let mut w = vec![vec![0.0; m + 1]; n];
    for (i, comp) in mbm.components.iter().enumerate() {
        for h in &comp.local {
            let col = h.measurement.map_or(0, |j| j + 1);
            w[i][col] += h.weight;
        }
        let max = w[i].iter().copied().fold(0.0, f64::max);
        if !(max > 0.0) || !max.is_finite() {
            return Err(Error::Numerical(format!(
                "component {} has no local hypothesis with positive finite weight",
                comp.id
            )));
        }
        w[i].iter_mut().for_each(|x| *x /= max);
    }
    // mu[i][j]: measurement j -> component i; nu[i][j]: component i -> measurement j.
    let mut mu = vec![vec![1.0; m]; n];
    let mut nu = vec![vec![0.0; m]; n];
    let mut iterations = 0;
    let mut converged = m == 0;
    while !converged && iterations < params.max_iterations {
        iterations += 1;
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let total: f64 = w[i][0] + (0..m).map(|j| w[i][j + 1] * mu[i][j]).sum::<f64>();
            for j in 0..m {
                let denom = total - w[i][j + 1] * mu[i][j];
                let fresh = if denom > 0.0 { w[i][j + 1] / denom } else { 0.0 };
                let damped = params.damping * nu[i][j] + (1.0 - params.damping) * fresh;
                delta = delta.max((damped - nu[i][j]).abs());
                nu[i][j] = damped;
            }
        }
        for j in 0..m {
            let column: f64 = (0..n).map(|i| nu[i][j]).sum();
            for i in 0..n {
                let fresh = 1.0 / (1.0 + column - nu[i][j]);
                delta = delta.max((fresh - mu[i][j]).abs());
                mu[i][j] = fresh;
            }
        }
        converged = delta < params.tolerance;
    }
    let per_component = mbm
        .components
        .iter()
        .enumerate()
        .map(|(i, comp)| {
            let total: f64 = w[i][0] + (0..m).map(|j| w[i][j + 1] * mu[i][j]).sum::<f64>();
            comp.local
                .iter()
                .map(|h| match h.measurement {
                    None => w[i][0] / total,
                    Some(j) => w[i][j + 1] * mu[i][j] / total,
                })
                .collect()
        })
        .collect();
    Ok((per_component, iterations, converged))
}
