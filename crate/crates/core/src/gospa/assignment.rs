//! Exact rectangular assignment with an "unassigned" option per element.
//!
//! The `|X|×|Y|` problem is embedded in a square `(|X|+|Y|)` problem whose
//! dummy rows and columns carry the unassigned cost, then solved with the
//! shortest-augmenting-path Hungarian method in O(n³).

use nalgebra::DMatrix;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Zero-based `(row, column)` pairs, sorted by row.
    pub pairs: Vec<(usize, usize)>,
    /// Matched pair costs plus `unassigned_cost` for every unmatched row and column.
    pub total_cost: f64,
}

/// Finds the one-to-one partial assignment minimising
/// `Σ pair costs + unassigned_cost · (#unmatched rows + #unmatched columns)`.
///
/// A pair whose cost is `≥ 2·unassigned_cost` is never returned: leaving both
/// elements unassigned costs no more, and fewer matched pairs win ties.
pub fn solve_assignment(costs: &DMatrix<f64>, unassigned_cost: f64) -> Result<Assignment> {
    if !(unassigned_cost.is_finite() && unassigned_cost >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "unassigned cost must be finite and non-negative, got {unassigned_cost}"
        )));
    }
    if costs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput("assignment cost matrix has non-finite entries".into()));
    }
    let (rows, cols) = costs.shape();
    let cut_pair = 2.0 * unassigned_cost;
    let n = rows + cols;
    if n == 0 {
        return Ok(Assignment { pairs: Vec::new(), total_cost: 0.0 });
    }

    // Rows: real rows then one dummy per column. Columns: real columns then
    // one dummy per row.
    let square = DMatrix::from_fn(n, n, |i, j| match (i < rows, j < cols) {
        (true, true) => costs[(i, j)].min(cut_pair),
        (true, false) | (false, true) => unassigned_cost,
        (false, false) => 0.0,
    });
    let row_to_col = hungarian(&square);

    let mut pairs: Vec<(usize, usize)> = (0..rows)
        .filter_map(|i| {
            let j = row_to_col[i];
            (j < cols && costs[(i, j)] < cut_pair).then_some((i, j))
        })
        .collect();
    pairs.sort_unstable();
    let matched: f64 = pairs.iter().map(|&(i, j)| costs[(i, j)]).sum();
    let unmatched = (rows - pairs.len()) + (cols - pairs.len());
    Ok(Assignment {
        pairs,
        total_cost: matched + unassigned_cost * unmatched as f64,
    })
}

/// Minimum-cost perfect matching on a square matrix. Returns the column
/// assigned to each row.
fn hungarian(cost: &DMatrix<f64>) -> Vec<usize> {
    let n = cost.nrows();
    // 1-based potentials and matching, index 0 is the virtual source.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        col_owner[0] = row;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        if col_owner[j] > 0 {
            row_to_col[col_owner[j] - 1] = j - 1;
        }
    }
    row_to_col
}
