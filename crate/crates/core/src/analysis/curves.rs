//! Digitization error as a function of bits per link.
//!
//! Every digitized series is paired configuration by configuration with the
//! undigitized series of the same ensemble; the ratio of means is jackknifed
//! jointly, so correlated fluctuations cancel.

use serde::{Deserialize, Serialize};

use super::jackknife::jackknife_means;
use super::potential::{fit_window, log_linear_fit, loop_samples, select_window, RefusedFit, WindowPolicy};
use super::{check_paired, scheme_is_subgroup, RecordTable, BASELINE_SCHEME};
use crate::error::{Error, Result};
use crate::observables::MeasurementRecord;

/// Observable name used for potential ratios.
pub const OBS_POTENTIAL: &str = "V";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurvePoint {
    pub ensemble: String,
    pub scheme: String,
    pub bits_per_link: f64,
    pub subgroup: bool,
    pub observable: String,
    pub r: Option<u32>,
    pub t: Option<u32>,
    /// `O_dig / O_orig`.
    pub ratio: f64,
    pub ratio_err: f64,
    /// `(O_dig − O_orig) / O_orig`; its error equals `ratio_err`.
    pub rel_error: f64,
    pub n_configs: usize,
}

fn sort_points(points: &mut [ErrorCurvePoint]) {
    points.sort_by(|a, b| {
        a.ensemble
            .cmp(&b.ensemble)
            .then(a.bits_per_link.total_cmp(&b.bits_per_link))
            .then(a.scheme.cmp(&b.scheme))
            .then(a.observable.cmp(&b.observable))
            .then(a.r.cmp(&b.r))
            .then(a.t.cmp(&b.t))
    });
}

/// Paired ratios for every digitized series, optionally restricted to the
/// named observables. Sorted by ensemble, then bits per link.
pub fn error_curve(records: &[MeasurementRecord], observables: Option<&[String]>) -> Result<Vec<ErrorCurvePoint>> {
    let table = RecordTable::new(records)?;
    let mut points = Vec::new();
    for (key, dig) in table.iter() {
        if let Some(obs) = observables {
            if !obs.contains(&key.observable) {
                continue;
            }
        }
        let base = table.baseline(key)?;
        check_paired(
            base,
            dig,
            &format!("{}/{}/{}", key.ensemble, key.scheme, key.observable),
        )?;
        let (d, b) = (dig.column(), base.column());
        let est = jackknife_means(&[&d, &b], |m| m[0] / m[1])?;
        points.push(ErrorCurvePoint {
            ensemble: key.ensemble.clone(),
            scheme: key.scheme.clone(),
            bits_per_link: dig.bits_per_link,
            subgroup: scheme_is_subgroup(&key.scheme),
            observable: key.observable.clone(),
            r: key.r,
            t: key.t,
            ratio: est.value,
            ratio_err: est.error,
            rel_error: est.value - 1.0,
            n_configs: d.len(),
        });
    }
    if points.is_empty() {
        return Err(Error::InsufficientData(
            "no records match the requested observables".into(),
        ));
    }
    sort_points(&mut points);
    Ok(points)
}

/// Paired ratios `V_dig(r) / V_orig(r)`. Both fits use the same window: the
/// intersection of the two pruned windows.
pub fn potential_error_curve(
    records: &[MeasurementRecord],
    policy: WindowPolicy,
) -> Result<(Vec<ErrorCurvePoint>, Vec<RefusedFit>)> {
    let table = RecordTable::new(records)?;
    let mut points = Vec::new();
    let mut refused = Vec::new();
    for (ensemble, scheme) in table.ensembles_and_schemes() {
        let dig_all = loop_samples(&table, &ensemble, &scheme)?;
        if dig_all.is_empty() {
            continue;
        }
        let base_all = loop_samples(&table, &ensemble, BASELINE_SCHEME)?;
        let bits = records
            .iter()
            .find(|r| r.ensemble == ensemble && r.scheme == scheme)
            .map_or(f64::NAN, |r| r.bits_per_link);
        for (r, dig) in dig_all {
            let base = base_all.get(&r).ok_or_else(|| {
                Error::InsufficientData(format!("no {BASELINE_SCHEME} Wilson loops for {ensemble} at r = {r}"))
            })?;
            if dig.ts != base.ts || dig.columns[0].len() != base.columns[0].len() {
                return Err(Error::ConfigSetMismatch(format!(
                    "{ensemble}/{scheme}: Wilson loop sets differ from the baseline at r = {r}"
                )));
            }
            let refuse = |reason: String| RefusedFit {
                ensemble: ensemble.clone(),
                scheme: scheme.clone(),
                r,
                reason,
            };
            let window: Vec<usize> = match (select_window(base, policy), select_window(&dig, policy)) {
                (Ok(a), Ok(b)) => a.into_iter().filter(|i| b.contains(i)).collect(),
                (Err(e), _) | (_, Err(e)) => {
                    refused.push(refuse(e));
                    continue;
                }
            };
            if window.len() < super::potential::MIN_FIT_POINTS {
                refused.push(refuse("common fit window too short".into()));
                continue;
            }
            // validates the fit on each side before pairing
            fit_window(base, &window)?;
            fit_window(&dig, &window)?;
            let ts: Vec<f64> = window.iter().map(|&i| dig.ts[i] as f64).collect();
            let mut cols: Vec<&[f64]> = window.iter().map(|&i| dig.columns[i].as_slice()).collect();
            cols.extend(window.iter().map(|&i| base.columns[i].as_slice()));
            let w = window.len();
            let est = jackknife_means(&cols, |m| {
                log_linear_fit(&ts, &m[..w]).1 / log_linear_fit(&ts, &m[w..]).1
            })?;
            points.push(ErrorCurvePoint {
                ensemble: ensemble.clone(),
                scheme: scheme.clone(),
                bits_per_link: bits,
                subgroup: scheme_is_subgroup(&scheme),
                observable: OBS_POTENTIAL.to_string(),
                r: Some(r),
                t: None,
                ratio: est.value,
                ratio_err: est.error,
                rel_error: est.value - 1.0,
                n_configs: dig.columns[0].len(),
            });
        }
    }
    sort_points(&mut points);
    Ok((points, refused))
}
