//! Delete-1 jackknife and binning.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Central value and jackknife standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// `√((n−1)/n · Σ(θᵢ − θ̄)²)`. Deviations are taken from the first sample so
/// identical resamples give an error of exactly zero.
fn spread(thetas: &[f64]) -> f64 {
    let n = thetas.len() as f64;
    let d: Vec<f64> = thetas.iter().map(|t| t - thetas[0]).collect();
    let dbar = d.iter().sum::<f64>() / n;
    let ss: f64 = d.iter().map(|x| (x - dbar) * (x - dbar)).sum();
    ((n - 1.0) / n * ss).sqrt()
}

/// Jackknife of an arbitrary estimator. The central value is the estimator on
/// the full sample.
pub fn jackknife<F: Fn(&[f64]) -> f64>(values: &[f64], estimator: F) -> Result<Estimate> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "jackknife needs at least 2 samples, got {n}"
        )));
    }
    let mut buf = Vec::with_capacity(n - 1);
    let thetas: Vec<f64> = (0..n)
        .map(|i| {
            buf.clear();
            buf.extend(values[..i].iter().chain(&values[i + 1..]));
            estimator(&buf)
        })
        .collect();
    Ok(Estimate {
        value: estimator(values),
        error: spread(&thetas),
    })
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Jackknife of a function of column means. All columns are per-configuration
/// series over the same configurations.
pub fn jackknife_means<F: Fn(&[f64]) -> f64>(columns: &[&[f64]], f: F) -> Result<Estimate> {
    let n = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidParameter("jackknife columns differ in length".into()));
    }
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "jackknife needs at least 2 samples, got {n}"
        )));
    }
    let sums: Vec<f64> = columns.iter().map(|c| c.iter().sum()).collect();
    let full: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
    let mut m = vec![0.0; columns.len()];
    let thetas: Vec<f64> = (0..n)
        .map(|i| {
            for (k, c) in columns.iter().enumerate() {
                m[k] = (sums[k] - c[i]) / (n - 1) as f64;
            }
            f(&m)
        })
        .collect();
    Ok(Estimate {
        value: f(&full),
        error: spread(&thetas),
    })
}

/// Averages of consecutive bins of `size`; a trailing partial bin is dropped.
pub fn bin_means(values: &[f64], size: usize) -> Result<Vec<f64>> {
    if size == 0 {
        return Err(Error::InvalidParameter("bin size must be positive".into()));
    }
    Ok(values.chunks_exact(size).map(mean).collect())
}

/// Jackknife over bin averages, for autocorrelated series.
pub fn jackknife_binned<F: Fn(&[f64]) -> f64>(values: &[f64], size: usize, estimator: F) -> Result<Estimate> {
    jackknife(&bin_means(values, size)?, estimator)
}
