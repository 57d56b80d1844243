//! Static potential from the temporal decay of rectangular Wilson loops.
//!
//! For each `r` the fit is an uncorrelated least-squares line through
//! `ln ⟨W(t, r)⟩` over the fit window, `ln W = ln C − t·V`. Errors come from
//! the jackknife over configurations; `χ²/dof` uses per-point jackknife
//! errors and is a diagnostic only.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::jackknife::jackknife_means;
use super::{RecordTable, Series};
use crate::error::{Error, Result};
use crate::observables::{MeasurementRecord, OBS_WILSON};

/// Fewest window points a fit may use.
pub const MIN_FIT_POINTS: usize = 3;

/// Inclusive `t` range considered for the fit before positivity pruning.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowPolicy {
    pub t_min: u32,
    pub t_max: u32,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        WindowPolicy { t_min: 1, t_max: 4 }
    }
}

impl WindowPolicy {
    pub fn new(t_min: u32, t_max: u32) -> Result<Self> {
        if t_min < 1 || t_max <= t_min {
            return Err(Error::InvalidParameter(format!(
                "fit window [{t_min}, {t_max}] is empty"
            )));
        }
        Ok(WindowPolicy { t_min, t_max })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialFit {
    pub ensemble: String,
    pub scheme: String,
    pub bits_per_link: f64,
    pub r: u32,
    pub v: f64,
    pub v_err: f64,
    pub amplitude: f64,
    pub t_min: u32,
    pub t_max: u32,
    pub chi2_dof: f64,
    pub n_configs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefusedFit {
    pub ensemble: String,
    pub scheme: String,
    pub r: u32,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PotentialTable {
    pub fits: Vec<PotentialFit>,
    pub refused: Vec<RefusedFit>,
}

/// Per-configuration `W(t)` at one `r`, `t` ascending, every column over the
/// same configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopSamples {
    pub ts: Vec<u32>,
    pub columns: Vec<Vec<f64>>,
}

/// Result of one log-linear fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopFit {
    pub v: f64,
    pub v_err: f64,
    pub amplitude: f64,
    pub t_min: u32,
    pub t_max: u32,
    pub chi2_dof: f64,
}

/// Least-squares `(ln C, V)` for `ln w = ln C − t·V`.
pub fn log_linear_fit(ts: &[f64], w: &[f64]) -> (f64, f64) {
    let n = ts.len() as f64;
    let y: Vec<f64> = w.iter().map(|x| x.ln()).collect();
    let tm = ts.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxy: f64 = ts.iter().zip(&y).map(|(t, y)| (t - tm) * (y - ym)).sum();
    let sxx: f64 = ts.iter().map(|t| (t - tm) * (t - tm)).sum();
    let slope = sxy / sxx;
    (ym - slope * tm, -slope)
}

fn delete_one_means_positive(col: &[f64]) -> bool {
    let n = col.len() as f64;
    let s: f64 = col.iter().sum();
    s > 0.0 && s.is_finite() && col.iter().all(|x| (s - x) / (n - 1.0) > 0.0)
}

/// Indices into `data.ts` that survive the window and positivity pruning.
/// The window is cut at the first `t` whose mean, or any delete-1 mean, is
/// not positive.
pub fn select_window(data: &LoopSamples, policy: WindowPolicy) -> std::result::Result<Vec<usize>, String> {
    let mut keep = Vec::new();
    for (i, &t) in data.ts.iter().enumerate() {
        if t < policy.t_min || t > policy.t_max {
            continue;
        }
        if !delete_one_means_positive(&data.columns[i]) {
            break;
        }
        keep.push(i);
    }
    if keep.len() < MIN_FIT_POINTS {
        return Err(format!(
            "only {} positive Wilson loop values in t window [{}, {}], need {MIN_FIT_POINTS}",
            keep.len(),
            policy.t_min,
            policy.t_max
        ));
    }
    Ok(keep)
}

/// Fit over an explicit set of window indices.
pub fn fit_window(data: &LoopSamples, window: &[usize]) -> Result<LoopFit> {
    let ts: Vec<f64> = window.iter().map(|&i| data.ts[i] as f64).collect();
    let cols: Vec<&[f64]> = window.iter().map(|&i| data.columns[i].as_slice()).collect();
    let est = jackknife_means(&cols, |m| log_linear_fit(&ts, m).1)?;
    let means: Vec<f64> = cols.iter().map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    let (lnc, v) = log_linear_fit(&ts, &means);
    let mut chi2 = 0.0;
    for (k, c) in cols.iter().enumerate() {
        let sigma = jackknife_means(&[c], |m| m[0].ln())?.error;
        let res = means[k].ln() - (lnc - v * ts[k]);
        chi2 += if res.abs() <= 1e-13 {
            0.0
        } else if sigma > 0.0 {
            (res / sigma).powi(2)
        } else {
            f64::INFINITY
        };
    }
    Ok(LoopFit {
        v,
        v_err: est.error,
        amplitude: lnc.exp(),
        t_min: data.ts[window[0]],
        t_max: data.ts[*window.last().unwrap()],
        chi2_dof: chi2 / (ts.len() - 2) as f64,
    })
}

/// Window selection then fit.
pub fn fit_loop_samples(data: &LoopSamples, policy: WindowPolicy) -> Result<LoopFit> {
    let window = select_window(data, policy).map_err(Error::InsufficientData)?;
    fit_window(data, &window)
}

/// Wilson-loop samples of one `(ensemble, scheme)` by `r`.
pub fn loop_samples(table: &RecordTable, ensemble: &str, scheme: &str) -> Result<BTreeMap<u32, LoopSamples>> {
    let mut by_r: BTreeMap<u32, Vec<(u32, &Series)>> = BTreeMap::new();
    for (k, s) in table.iter() {
        if k.ensemble == ensemble && k.scheme == scheme && k.observable == OBS_WILSON {
            let (r, t) = match (k.r, k.t) {
                (Some(r), Some(t)) => (r, t),
                _ => return Err(Error::Parse(format!("wilson record without r and t in {k:?}"))),
            };
            by_r.entry(r).or_default().push((t, s));
        }
    }
    let mut out = BTreeMap::new();
    for (r, mut v) in by_r {
        v.sort_by_key(|(t, _)| *t);
        let configs = v[0].1.configs();
        if v.iter().any(|(_, s)| s.configs() != configs) {
            return Err(Error::ConfigSetMismatch(format!(
                "{ensemble}/{scheme}: Wilson loops at r = {r} cover different configurations"
            )));
        }
        out.insert(
            r,
            LoopSamples {
                ts: v.iter().map(|(t, _)| *t).collect(),
                columns: v.iter().map(|(_, s)| s.column()).collect(),
            },
        );
    }
    Ok(out)
}

/// Fit `V(r)` for every `(ensemble, scheme, r)` with Wilson-loop records.
/// Radii whose window does not keep enough points are listed as refused.
pub fn fit_potential(records: &[MeasurementRecord], policy: WindowPolicy) -> Result<PotentialTable> {
    let table = RecordTable::new(records)?;
    let mut out = PotentialTable::default();
    for (ensemble, scheme) in table.ensembles_and_schemes() {
        let bits = records
            .iter()
            .find(|r| r.ensemble == ensemble && r.scheme == scheme)
            .map_or(f64::NAN, |r| r.bits_per_link);
        for (r, data) in loop_samples(&table, &ensemble, &scheme)? {
            match fit_loop_samples(&data, policy) {
                Ok(fit) => out.fits.push(PotentialFit {
                    ensemble: ensemble.clone(),
                    scheme: scheme.clone(),
                    bits_per_link: bits,
                    r,
                    v: fit.v,
                    v_err: fit.v_err,
                    amplitude: fit.amplitude,
                    t_min: fit.t_min,
                    t_max: fit.t_max,
                    chi2_dof: fit.chi2_dof,
                    n_configs: data.columns[0].len(),
                }),
                Err(Error::InsufficientData(reason)) => out.refused.push(RefusedFit {
                    ensemble: ensemble.clone(),
                    scheme: scheme.clone(),
                    r,
                    reason,
                }),
                Err(e) => return Err(e),
            }
        }
    }
    if out.fits.is_empty() && out.refused.is_empty() {
        return Err(Error::InsufficientData("no Wilson loop records".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::testdata::record;
    use crate::rng::seeded;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn exact(n_cfg: usize) -> LoopSamples {
        let ts: Vec<u32> = (1..=6).collect();
        LoopSamples {
            columns: ts
                .iter()
                .map(|&t| vec![0.8 * (-0.35 * t as f64).exp(); n_cfg])
                .collect(),
            ts,
        }
    }

    #[test]
    fn exact_exponential() {
        let fit = fit_loop_samples(&exact(10), WindowPolicy::new(1, 6).unwrap()).unwrap();
        assert!((fit.v - 0.35).abs() < 1e-10);
        assert!((fit.amplitude - 0.8).abs() < 1e-10);
        assert_eq!(fit.chi2_dof, 0.0);
        assert_eq!((fit.t_min, fit.t_max), (1, 6));
    }

    #[test]
    fn noisy_exponential_within_three_sigma() {
        let mut rng = seeded(5);
        let ts: Vec<u32> = (1..=6).collect();
        let columns = ts
            .iter()
            .map(|&t| {
                (0..100)
                    .map(|_| 0.8 * (-0.35 * t as f64).exp() * (1.0 + 0.01 * rng.sample::<f64, _>(StandardNormal)))
                    .collect()
            })
            .collect();
        let fit = fit_loop_samples(&LoopSamples { ts, columns }, WindowPolicy::new(1, 6).unwrap()).unwrap();
        assert!(fit.v_err > 0.0);
        assert!((fit.v - 0.35).abs() < 3.0 * fit.v_err, "{fit:?}");
    }

    #[test]
    fn window_pruned_at_first_nonpositive_point() {
        let mut d = exact(4);
        d.columns[3] = vec![0.01, -0.02, 0.01, 0.01];
        let w = select_window(&d, WindowPolicy::new(1, 6).unwrap()).unwrap();
        assert_eq!(w, vec![0, 1, 2]);
        d.columns[2] = vec![-1.0; 4];
        assert!(select_window(&d, WindowPolicy::new(1, 6).unwrap()).is_err());
        assert!(matches!(
            fit_loop_samples(&d, WindowPolicy::new(1, 6).unwrap()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn window_policy_validation() {
        assert!(WindowPolicy::new(0, 3).is_err());
        assert!(WindowPolicy::new(3, 3).is_err());
        assert_eq!(WindowPolicy::default(), WindowPolicy { t_min: 1, t_max: 4 });
    }

    #[test]
    fn fit_from_records_refuses_short_windows() {
        let mut recs = Vec::new();
        for c in 0..5 {
            for r in 1..=2u32 {
                for t in 1..=4u32 {
                    let v = if r == 2 && t >= 3 {
                        -0.01
                    } else {
                        (-(0.2 * r as f64) * t as f64).exp()
                    };
                    recs.push(record("e", "ultrafine", "wilson", c, Some(r), Some(t), v));
                }
            }
        }
        let tab = fit_potential(&recs, WindowPolicy::default()).unwrap();
        assert_eq!(tab.fits.len(), 1);
        assert_eq!(tab.fits[0].r, 1);
        assert!((tab.fits[0].v - 0.2).abs() < 1e-12);
        assert_eq!(tab.refused.len(), 1);
        assert_eq!(tab.refused[0].r, 2);
    }
}
