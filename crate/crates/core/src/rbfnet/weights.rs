use crate::linalg::{cholesky_solve, Matrix};
use crate::{Error, Result};

use super::{unit_activations, Spreads};

/// N×(J+1) matrix: a column of ones followed by the hidden activations of
/// every row of `points`.
pub fn design_matrix(centers: &Matrix, spreads: &Spreads, points: &Matrix) -> Matrix {
    let j = centers.rows();
    let mut phi = Matrix::zeros(points.rows(), j + 1);
    for (i, x) in points.row_iter().enumerate() {
        let row = phi.row_mut(i);
        row[0] = 1.0;
        row[1..].copy_from_slice(&unit_activations(centers, spreads, x));
    }
    phi
}

/// Ridge least-squares output weights.
///
/// Minimizes `‖ΦW − T‖²_F + λ‖W‖²_F` through the normal equations
/// `(ΦᵀΦ + λI) W = ΦᵀT`, solved by Cholesky factorization. The bias column is
/// penalized along with the rest.
pub fn fit_output_weights(phi: &Matrix, targets: &Matrix, lambda: f64) -> Result<Matrix> {
    if phi.rows() != targets.rows() {
        return Err(Error::DimensionMismatch {
            expected: phi.rows(),
            found: targets.rows(),
        });
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    let mut gram = phi.t_mul(phi)?;
    for i in 0..gram.rows() {
        gram[(i, i)] += lambda;
    }
    let rhs = phi.t_mul(targets)?;
    cholesky_solve(&gram, &rhs).ok_or_else(|| {
        Error::Singular(if lambda == 0.0 {
            "normal equations are singular with lambda = 0; use a positive lambda".into()
        } else {
            format!("normal equations are numerically singular at lambda = {lambda}; raise lambda")
        })
    })
}
