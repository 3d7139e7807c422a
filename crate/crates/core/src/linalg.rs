//! Fixed-size vector and matrix aliases for the 4-D nearly-constant-velocity
//! state `[px, vx, py, vy]` and 2-D position measurements.

use nalgebra::{Matrix2, Matrix2x4, Matrix4, Vector2, Vector4};

pub type StateVec = Vector4<f64>;
pub type StateCov = Matrix4<f64>;
pub type MeasVec = Vector2<f64>;
pub type MeasCov = Matrix2<f64>;
pub type ObsMatrix = Matrix2x4<f64>;

/// Position-selecting observation matrix for the `[px, vx, py, vy]` layout.
pub fn position_selector() -> ObsMatrix {
    ObsMatrix::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0)
}

/// Returns `(P + Pᵀ) / 2`.
pub fn symmetrise<const N: usize>(
    p: &nalgebra::SMatrix<f64, N, N>,
) -> nalgebra::SMatrix<f64, N, N> {
    (p + p.transpose()) * 0.5
}

/// Smallest eigenvalue of a symmetric 4×4 matrix.
pub fn min_eigenvalue(p: &StateCov) -> f64 {
    symmetrise(p).symmetric_eigenvalues().min()
}

/// Inverse of a symmetric 2×2 innovation covariance. Matrices whose condition
/// number exceeds 1e12 are regularised with `+1e-9·I` first.
pub fn regularised_inverse2(s: &MeasCov) -> Option<MeasCov> {
    let s = symmetrise(s);
    let eig = s.symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    let s = if lo <= 0.0 || hi / lo > 1e12 {
        s + MeasCov::identity() * 1e-9
    } else {
        s
    };
    s.try_inverse()
}

pub fn is_finite_vec<const N: usize>(v: &nalgebra::SVector<f64, N>) -> bool {
    v.iter().all(|x| x.is_finite())
}
