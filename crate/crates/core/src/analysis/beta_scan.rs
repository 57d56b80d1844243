//! Polyakov-loop scans across β and the transition locator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::jackknife::jackknife_means;
use super::{check_paired, RecordTable, Series, SeriesKey, BASELINE_SCHEME};
use crate::error::{Error, Result};
use crate::observables::MeasurementRecord;

/// Fewest β values for which a transition is located.
pub const MIN_SCAN_POINTS: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaScanRow {
    pub scheme: String,
    pub bits_per_link: f64,
    pub beta: f64,
    pub ensemble: String,
    pub mean: f64,
    pub err: f64,
    /// Paired ratio to the undigitized ensemble at the same β.
    pub ratio: Option<f64>,
    pub ratio_err: Option<f64>,
    pub n_configs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionEstimate {
    pub scheme: String,
    /// Midpoint of the steepest rising interval; absent with too few points
    /// or no rise.
    pub beta_c: Option<f64>,
    /// Widest spacing of the β grid.
    pub grid_spacing: f64,
    pub n_betas: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BetaScan {
    pub rows: Vec<BetaScanRow>,
    pub transitions: Vec<TransitionEstimate>,
}

/// Midpoint of the interval with the largest positive finite-difference
/// slope. `betas` must be strictly increasing.
pub fn locate_transition(betas: &[f64], values: &[f64]) -> Option<f64> {
    if betas.len() < MIN_SCAN_POINTS || betas.len() != values.len() {
        return None;
    }
    let mut best: Option<(f64, usize)> = None;
    for i in 0..betas.len() - 1 {
        let slope = (values[i + 1] - values[i]) / (betas[i + 1] - betas[i]);
        if slope > 0.0 && best.is_none_or(|(s, _)| slope > s) {
            best = Some((slope, i));
        }
    }
    best.map(|(_, i)| 0.5 * (betas[i] + betas[i + 1]))
}

/// `⟨observable⟩` per `(scheme, β)` with paired ratios and a transition
/// estimate per scheme.
pub fn beta_scan(records: &[MeasurementRecord], observable: &str) -> Result<BetaScan> {
    let table = RecordTable::new(records)?;
    // scheme -> β bits -> (key, series)
    let mut by_scheme: BTreeMap<String, BTreeMap<u64, (&SeriesKey, &Series)>> = BTreeMap::new();
    for (k, s) in table.iter() {
        if k.observable != observable || k.r.is_some() || k.t.is_some() {
            continue;
        }
        if !(s.beta >= 0.0) {
            return Err(Error::Parse(format!("invalid beta {} in {k:?}", s.beta)));
        }
        let slot = by_scheme.entry(k.scheme.clone()).or_default();
        if slot.insert(s.beta.to_bits(), (k, s)).is_some() {
            return Err(Error::InvalidParameter(format!(
                "scheme {} has two ensembles at beta = {}",
                k.scheme, s.beta
            )));
        }
    }
    if by_scheme.is_empty() {
        return Err(Error::InsufficientData(format!("no {observable} records")));
    }
    let mut scan = BetaScan::default();
    for (scheme, cells) in by_scheme {
        let mut betas = Vec::new();
        let mut means = Vec::new();
        for (key, s) in cells.values() {
            let col = s.column();
            let est = jackknife_means(&[&col], |m| m[0])?;
            let (ratio, ratio_err) = if scheme == BASELINE_SCHEME {
                (Some(1.0), Some(0.0))
            } else {
                match table.get(&key.with_scheme(BASELINE_SCHEME)) {
                    Some(base) => {
                        check_paired(base, s, &format!("{}/{scheme}", key.ensemble))?;
                        let b = base.column();
                        let r = jackknife_means(&[&col, &b], |m| m[0] / m[1])?;
                        (Some(r.value), Some(r.error))
                    }
                    None => (None, None),
                }
            };
            betas.push(s.beta);
            means.push(est.value);
            scan.rows.push(BetaScanRow {
                scheme: scheme.clone(),
                bits_per_link: s.bits_per_link,
                beta: s.beta,
                ensemble: key.ensemble.clone(),
                mean: est.value,
                err: est.error,
                ratio,
                ratio_err,
                n_configs: col.len(),
            });
        }
        let grid_spacing = betas.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        scan.transitions.push(TransitionEstimate {
            scheme,
            beta_c: locate_transition(&betas, &means),
            grid_spacing,
            n_betas: betas.len(),
        });
    }
    Ok(scan)
}
