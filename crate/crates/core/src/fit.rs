//! Least-squares slope fits for dyadic scaling experiments.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Fits `y = intercept + slope * x`; needs at least three distinct abscissae.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument(format!("{} abscissae for {} values", xs.len(), ys.len())));
    }
    let m = xs.len();
    let mut distinct = xs.to_vec();
    distinct.sort_by(|a, b| a.total_cmp(b));
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InvalidArgument(format!("slope fit needs at least 3 levels, got {}", distinct.len())));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::InvalidArgument("non-finite value in slope fit".into()));
    }
    let mx = xs.iter().sum::<f64>() / m as f64;
    let my = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(LinearFit { slope, intercept, residual: (ss / m as f64).sqrt() })
}

/// Slope of `log2(values)` against `ks`.
pub fn log2_slope(ks: &[f64], values: &[f64]) -> Result<LinearFit> {
    if values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument("log-slope of a nonpositive value".into()));
    }
    let ys: Vec<f64> = values.iter().map(|v| v.log2()).collect();
    linear_fit(ks, &ys)
}
