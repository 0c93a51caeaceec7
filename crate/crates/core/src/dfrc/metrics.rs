use nalgebra::DMatrix;

use super::readout::ReadoutModel;
use crate::error::{Error, Result};

pub const SYMBOLS: [f64; 4] = [-3.0, -1.0, 1.0, 3.0];

/// Root-mean-square error normalized by the (population) standard
/// deviation of the target.
pub fn nrmse(pred: &[f64], y: &[f64]) -> Result<f64> {
    if pred.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: y.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::Shape("empty target series".into()));
    }
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let mse = pred.iter().zip(y).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / n;
    Ok((mse / var).sqrt())
}

pub fn nearest_symbol(v: f64) -> f64 {
    if v < -2.0 {
        -3.0
    } else if v < 0.0 {
        -1.0
    } else if v < 2.0 {
        1.0
    } else {
        3.0
    }
}

/// Fraction of predictions whose nearest symbol differs from `d`.
pub fn ser(pred: &[f64], d: &[f64]) -> Result<f64> {
    if pred.len() != d.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: d.len(),
        });
    }
    if d.is_empty() {
        return Err(Error::Shape("empty symbol series".into()));
    }
    let wrong = pred.iter().zip(d).filter(|(p, s)| nearest_symbol(**p) != **s).count();
    Ok(wrong as f64 / d.len() as f64)
}

pub fn evaluate_nrmse(model: &ReadoutModel, s_test: &DMatrix<f64>, y_test: &[f64]) -> Result<f64> {
    nrmse(&model.predict(s_test)?, y_test)
}

pub fn evaluate_ser(model: &ReadoutModel, s_test: &DMatrix<f64>, d_test: &[f64]) -> Result<f64> {
    ser(&model.predict(s_test)?, d_test)
}
