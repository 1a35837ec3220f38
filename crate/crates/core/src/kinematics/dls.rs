use nalgebra::{Matrix6, MatrixXx6, SymmetricEigen};

use super::Jacobian;
use crate::error::{Error, Result};

/// Damped pseudo-inverse `Jᵀ (J Jᵀ + λ² I)⁻¹`.
///
/// Each singular value `σ` of `J` maps to `σ / (σ² + λ²)`. With `λ = 0` the
/// product `J Jᵀ` must be invertible.
pub fn dls_pinv(j: &Jacobian, lambda: f64) -> Result<MatrixXx6<f64>> {
    if !(lambda >= 0.0) {
        return Err(Error::NegativeDamping(lambda));
    }
    let jac = &j.0;
    let mut jjt: Matrix6<f64> = jac * jac.transpose();
    if lambda == 0.0 {
        let eig = SymmetricEigen::new(jjt);
        let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > 1e-12 * max.max(1.0)) {
            return Err(Error::SingularJacobian);
        }
    } else {
        for i in 0..6 {
            jjt[(i, i)] += lambda * lambda;
        }
    }
    let inv = jjt
        .cholesky()
        .ok_or(Error::SingularJacobian)?
        .inverse();
    Ok(jac.transpose() * inv)
}
