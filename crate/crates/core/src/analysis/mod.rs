//! Statistical post-processing of measurement records.

pub mod autocorr;
pub mod beta_scan;
pub mod curves;
pub mod jackknife;
pub mod potential;

use std::collections::BTreeMap;

pub use autocorr::{integrated_autocorrelation, Autocorrelation};
pub use beta_scan::{beta_scan, locate_transition, BetaScan, BetaScanRow, TransitionEstimate};
pub use curves::{error_curve, potential_error_curve, ErrorCurvePoint};
pub use jackknife::{jackknife, jackknife_binned, jackknife_means, Estimate};
pub use potential::{fit_potential, PotentialFit, PotentialTable, RefusedFit, WindowPolicy};

use crate::error::{Error, Result};
use crate::observables::MeasurementRecord;

/// Scheme name of the undigitized measurements every ratio is taken against.
pub const BASELINE_SCHEME: &str = "ultrafine";

/// Identifies one per-configuration series.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeriesKey {
    pub ensemble: String,
    pub scheme: String,
    pub observable: String,
    pub r: Option<u32>,
    pub t: Option<u32>,
}

impl SeriesKey {
    pub fn with_scheme(&self, scheme: &str) -> SeriesKey {
        SeriesKey {
            scheme: scheme.to_string(),
            ..self.clone()
        }
    }
}

/// Values of one series keyed by configuration index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Series {
    pub beta: f64,
    pub bits_per_link: f64,
    pub values: BTreeMap<u64, f64>,
}

impl Series {
    pub fn column(&self) -> Vec<f64> {
        self.values.values().copied().collect()
    }

    pub fn configs(&self) -> Vec<u64> {
        self.values.keys().copied().collect()
    }
}

/// Measurement records grouped into series.
#[derive(Clone, Debug, Default)]
pub struct RecordTable {
    series: BTreeMap<SeriesKey, Series>,
}

impl RecordTable {
    /// Group records; a repeated `(series, config)` or a series whose β or
    /// bits-per-link varies is refused.
    pub fn new(records: &[MeasurementRecord]) -> Result<Self> {
        let mut series: BTreeMap<SeriesKey, Series> = BTreeMap::new();
        for rec in records {
            let key = SeriesKey {
                ensemble: rec.ensemble.clone(),
                scheme: rec.scheme.clone(),
                observable: rec.observable.clone(),
                r: rec.r,
                t: rec.t,
            };
            let s = series.entry(key.clone()).or_insert_with(|| Series {
                beta: rec.beta,
                bits_per_link: rec.bits_per_link,
                values: BTreeMap::new(),
            });
            if s.beta != rec.beta || s.bits_per_link != rec.bits_per_link {
                return Err(Error::Parse(format!(
                    "inconsistent beta or bits_per_link within series {key:?}"
                )));
            }
            if s.values.insert(rec.config, rec.value).is_some() {
                return Err(Error::Parse(format!(
                    "duplicate record for config {} in series {key:?}",
                    rec.config
                )));
            }
        }
        Ok(RecordTable { series })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SeriesKey, &Series)> {
        self.series.iter()
    }

    pub fn get(&self, key: &SeriesKey) -> Option<&Series> {
        self.series.get(key)
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    /// The undigitized series matching `key`.
    pub fn baseline(&self, key: &SeriesKey) -> Result<&Series> {
        self.get(&key.with_scheme(BASELINE_SCHEME)).ok_or_else(|| {
            Error::InsufficientData(format!(
                "no {BASELINE_SCHEME} baseline for ensemble {:?}, observable {:?}",
                key.ensemble, key.observable
            ))
        })
    }

    /// Distinct `(ensemble, scheme)` pairs.
    pub fn ensembles_and_schemes(&self) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = self
            .series
            .keys()
            .map(|k| (k.ensemble.clone(), k.scheme.clone()))
            .collect();
        v.dedup();
        v
    }
}

/// Check that two series cover the same configurations.
pub fn check_paired(base: &Series, dig: &Series, what: &str) -> Result<()> {
    if base.values.len() != dig.values.len() || base.values.keys().ne(dig.values.keys()) {
        return Err(Error::ConfigSetMismatch(format!(
            "{what}: {} undigitized vs {} digitized configurations",
            base.values.len(),
            dig.values.len()
        )));
    }
    Ok(())
}

/// Subgroup schemes are named after the group (`…-2T`, `…-2O`, `…-2I`).
pub fn scheme_is_subgroup(name: &str) -> bool {
    ["2T", "2O", "2I"].iter().any(|g| name.ends_with(&format!("-{g}")))
}
