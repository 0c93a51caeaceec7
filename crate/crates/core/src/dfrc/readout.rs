use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const DEFAULT_LAMBDA: f64 = 1e-6;

/// Linear readout over the node states plus a trailing bias weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel {
    pub weights: DVector<f64>,
    pub lambda: f64,
}

/// States with a trailing column of ones.
pub fn augment(s: &DMatrix<f64>) -> DMatrix<f64> {
    let (rows, cols) = s.shape();
    let mut out = s.clone().resize_horizontally(cols + 1, 1.0);
    out.column_mut(cols).fill(1.0);
    debug_assert_eq!(out.nrows(), rows);
    out
}

/// Closed-form ridge regression, solved by Cholesky on the normal equations.
pub fn train_readout(s: &DMatrix<f64>, y: &[f64], lambda: f64) -> Result<ReadoutModel> {
    if s.nrows() != y.len() {
        return Err(Error::LengthMismatch {
            left: s.nrows(),
            right: y.len(),
        });
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Config(format!("ridge lambda must be positive, got {lambda}")));
    }
    let x = augment(s);
    let mut gram = x.tr_mul(&x);
    for i in 0..gram.nrows() {
        gram[(i, i)] += lambda;
    }
    let rhs = x.tr_mul(&DVector::from_column_slice(y));
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Shape("ridge normal matrix is not positive definite".into()))?;
    Ok(ReadoutModel {
        weights: chol.solve(&rhs),
        lambda,
    })
}

impl ReadoutModel {
    pub fn predict(&self, s: &DMatrix<f64>) -> Result<Vec<f64>> {
        if s.ncols() + 1 != self.weights.len() {
            return Err(Error::LengthMismatch {
                left: s.ncols() + 1,
                right: self.weights.len(),
            });
        }
        Ok((augment(s) * &self.weights).as_slice().to_vec())
    }
}

/// `||y - S~ w||^2 + lambda ||w||^2`.
pub fn ridge_objective(s: &DMatrix<f64>, y: &[f64], w: &DVector<f64>, lambda: f64) -> f64 {
    let r = DVector::from_column_slice(y) - augment(s) * w;
    r.norm_squared() + lambda * w.norm_squared()
}
