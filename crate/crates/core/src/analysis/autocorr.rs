//! Integrated autocorrelation time with automatic windowing.

use serde::{Deserialize, Serialize};

/// Window factor `c` in `W ≥ c·τ(W)`.
pub const WINDOW_FACTOR: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Autocorrelation {
    pub tau_int: f64,
    pub tau_err: f64,
    pub window: usize,
}

/// Normalized autocorrelation `ρ(t)` for `t < n/2`. Empty for constant or
/// very short series.
pub fn autocorrelation_function(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 4 {
        return Vec::new();
    }
    let m = x.iter().sum::<f64>() / n as f64;
    let d: Vec<f64> = x.iter().map(|v| v - m).collect();
    let c0 = d.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return Vec::new();
    }
    (0..n / 2)
        .map(|t| {
            let c: f64 = d[..n - t].iter().zip(&d[t..]).map(|(a, b)| a * b).sum();
            c / (n - t) as f64 / c0
        })
        .collect()
}

/// `τ_int = ½ + Σ_{t=1..W} ρ(t)` with the smallest `W ≥ c·τ_int(W)`.
pub fn integrated_autocorrelation(x: &[f64]) -> Option<Autocorrelation> {
    let rho = autocorrelation_function(x);
    if rho.is_empty() {
        return None;
    }
    let mut tau = 0.5;
    let mut window = rho.len() - 1;
    for (w, r) in rho.iter().enumerate().skip(1) {
        tau += r;
        if w as f64 >= WINDOW_FACTOR * tau {
            window = w;
            break;
        }
    }
    let tau = tau.max(0.5);
    Some(Autocorrelation {
        tau_int: tau,
        tau_err: tau * (2.0 * (2 * window + 1) as f64 / x.len() as f64).sqrt(),
        window,
    })
}
