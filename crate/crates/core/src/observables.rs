//! Wilson-loop observables.
//!
//! Every trace is divided by `N_c = 2`, so loops lie in `[-1, 1]` and the cold
//! field gives exactly 1. Sums run in a fixed order (directions outer, sites
//! inner) so values are reproducible bit for bit.
//!
//! Orientation counting for the perimeter-six loops:
//!
//! * `P1` rectangle `(+μ,+μ,+ν,−μ,−μ,−ν)` over the 12 ordered pairs `μ ≠ ν`;
//! * `P2` parallelogram `(+μ,+ν,+ρ,−μ,−ν,−ρ)` over the 24 ordered triples of
//!   distinct directions;
//! * `P3` bent rectangle `(+μ,+ν,−μ,+ρ,−ν,−ρ)` over the same 24 triples.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Su2;
use crate::lattice::{GaugeField, Sign, NDIM, T};
use crate::scalar::Real;

/// Closed path of unit steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopPath {
    steps: Vec<(usize, Sign)>,
}

impl LoopPath {
    pub fn new(steps: Vec<(usize, Sign)>) -> Result<Self> {
        let mut disp = [0i64; NDIM];
        for &(mu, s) in &steps {
            if mu >= NDIM {
                return Err(Error::InvalidParameter(format!("direction {mu} out of range")));
            }
            disp[mu] += match s {
                Sign::Forward => 1,
                Sign::Backward => -1,
            };
        }
        if disp != [0; NDIM] {
            return Err(Error::InvalidParameter(format!(
                "path is not closed: displacement {disp:?}"
            )));
        }
        Ok(LoopPath { steps })
    }

    pub fn steps(&self) -> &[(usize, Sign)] {
        &self.steps
    }

    /// Ordered product of links along the path starting at `site`.
    pub fn holonomy<R: Real>(&self, field: &GaugeField<R>, site: usize) -> Su2<R> {
        walk(field, site, &self.steps)
    }
}

fn walk<R: Real>(field: &GaugeField<R>, mut site: usize, steps: &[(usize, Sign)]) -> Su2<R> {
    let g = field.geometry();
    let mut acc = Su2::identity();
    for &(mu, s) in steps {
        match s {
            Sign::Forward => {
                acc = acc * field.link(site, mu);
                site = g.fwd(site, mu);
            }
            Sign::Backward => {
                site = g.bwd(site, mu);
                acc = acc.mul_dagger(field.link(site, mu));
            }
        }
    }
    acc
}

use Sign::{Backward as B, Forward as F};

pub fn p1_path(mu: usize, nu: usize) -> [(usize, Sign); 6] {
    [(mu, F), (mu, F), (nu, F), (mu, B), (mu, B), (nu, B)]
}

pub fn p2_path(mu: usize, nu: usize, rho: usize) -> [(usize, Sign); 6] {
    [(mu, F), (nu, F), (rho, F), (mu, B), (nu, B), (rho, B)]
}

pub fn p3_path(mu: usize, nu: usize, rho: usize) -> [(usize, Sign); 6] {
    [(mu, F), (nu, F), (mu, B), (rho, F), (nu, B), (rho, B)]
}

/// Ordered pairs `(μ, ν)` with `μ ≠ ν`.
pub fn ordered_pairs() -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(12);
    for mu in 0..NDIM {
        for nu in 0..NDIM {
            if mu != nu {
                v.push((mu, nu));
            }
        }
    }
    v
}

/// Ordered triples of distinct directions.
pub fn ordered_triples() -> Vec<(usize, usize, usize)> {
    let mut v = Vec::with_capacity(24);
    for mu in 0..NDIM {
        for nu in 0..NDIM {
            for rho in 0..NDIM {
                if mu != nu && nu != rho && mu != rho {
                    v.push((mu, nu, rho));
                }
            }
        }
    }
    v
}

/// Mean of `½ Re Tr □` over the 6 planes and all sites.
pub fn avg_plaquette<R: Real>(field: &GaugeField<R>) -> f64 {
    let vol = field.geometry().volume();
    let mut s = 0.0;
    for mu in 0..NDIM {
        for nu in mu + 1..NDIM {
            for site in 0..vol {
                s += field.plaquette_unchecked(site, mu, nu).as_f64();
            }
        }
    }
    0.5 * s / (6 * vol) as f64
}

/// Mean plaquette over the three temporal planes only.
pub fn avg_temporal_plaquette<R: Real>(field: &GaugeField<R>) -> f64 {
    let vol = field.geometry().volume();
    let mut s = 0.0;
    for i in 0..T {
        for site in 0..vol {
            s += field.plaquette_unchecked(site, i, T).as_f64();
        }
    }
    0.5 * s / (3 * vol) as f64
}

fn avg_over_paths<R: Real>(field: &GaugeField<R>, paths: &[[(usize, Sign); 6]]) -> f64 {
    let vol = field.geometry().volume();
    let mut s = 0.0;
    for p in paths {
        for site in 0..vol {
            s += walk(field, site, p).a.as_f64();
        }
    }
    s / (paths.len() * vol) as f64
}

/// The three perimeter-six loops `(P1, P2, P3)`.
pub fn loops6<R: Real>(field: &GaugeField<R>) -> (f64, f64, f64) {
    let p1: Vec<_> = ordered_pairs().into_iter().map(|(m, n)| p1_path(m, n)).collect();
    let p2: Vec<_> = ordered_triples()
        .into_iter()
        .map(|(m, n, r)| p2_path(m, n, r))
        .collect();
    let p3: Vec<_> = ordered_triples()
        .into_iter()
        .map(|(m, n, r)| p3_path(m, n, r))
        .collect();
    (
        avg_over_paths(field, &p1),
        avg_over_paths(field, &p2),
        avg_over_paths(field, &p3),
    )
}

/// `½ Tr ∏_t U_T(x, t)` for every spatial site `x`, x fastest.
pub fn polyakov_sites<R: Real>(field: &GaugeField<R>) -> Vec<f64> {
    let g = field.geometry();
    (0..g.spatial_volume())
        .map(|x| {
            let mut site = x;
            let mut acc = Su2::identity();
            for _ in 0..g.dims()[T] {
                acc = acc * field.link(site, T);
                site = g.fwd(site, T);
            }
            acc.a.as_f64()
        })
        .collect()
}

/// Spatial average of the Polyakov loop, signed.
pub fn polyakov_signed<R: Real>(field: &GaugeField<R>) -> f64 {
    let sites = polyakov_sites(field);
    sites.iter().sum::<f64>() / sites.len() as f64
}

/// `|Ω|`: absolute value of the spatially averaged Polyakov loop.
pub fn polyakov<R: Real>(field: &GaugeField<R>) -> f64 {
    polyakov_signed(field).abs()
}

/// Check `1 ≤ r ≤ L/2` on every spatial axis and `1 ≤ t ≤ N_t/2`.
pub fn check_wilson_range(dims: [usize; 4], r: usize, t: usize) -> Result<()> {
    let lmin = dims[..T].iter().copied().min().unwrap();
    if r < 1 || r > lmin / 2 {
        return Err(Error::InvalidParameter(format!("r = {r} outside 1..={}", lmin / 2)));
    }
    if t < 1 || t > dims[T] / 2 {
        return Err(Error::InvalidParameter(format!("t = {t} outside 1..={}", dims[T] / 2)));
    }
    Ok(())
}

/// On-axis `r × t` Wilson loops for all `r ≤ rmax`, `t ≤ tmax`, averaged over
/// sites and the three spatial axes. Entry `[r-1][t-1]`.
pub fn wilson_loops<R: Real>(field: &GaugeField<R>, rmax: usize, tmax: usize) -> Result<Vec<Vec<f64>>> {
    check_wilson_range(field.geometry().dims(), rmax, tmax)?;
    let g = field.geometry();
    let vol = g.volume();
    // line[n][x] = product of n links from x along the axis (n = 1..=max)
    let lines = |axis: usize, max: usize| -> Vec<Vec<Su2<R>>> {
        let mut out: Vec<Vec<Su2<R>>> = Vec::with_capacity(max);
        out.push((0..vol).map(|x| field.link(x, axis)).collect());
        for n in 1..max {
            let prev = &out[n - 1];
            let mut cur = Vec::with_capacity(vol);
            for x in 0..vol {
                let mut end = x;
                for _ in 0..n {
                    end = g.fwd(end, axis);
                }
                cur.push(prev[x] * field.link(end, axis));
            }
            out.push(cur);
        }
        out
    };
    let shift = |mut x: usize, axis: usize, n: usize| {
        for _ in 0..n {
            x = g.fwd(x, axis);
        }
        x
    };
    let temporal = lines(T, tmax);
    let mut sums = vec![vec![0.0; tmax]; rmax];
    for axis in 0..T {
        let spatial = lines(axis, rmax);
        for r in 1..=rmax {
            for t in 1..=tmax {
                let mut s = 0.0;
                for x in 0..vol {
                    let xr = shift(x, axis, r);
                    let xt = shift(x, T, t);
                    let lower = spatial[r - 1][x] * temporal[t - 1][xr];
                    let upper = temporal[t - 1][x] * spatial[r - 1][xt];
                    s += lower.dot(upper).as_f64();
                }
                sums[r - 1][t - 1] += s;
            }
        }
    }
    let norm = (3 * vol) as f64;
    Ok(sums
        .into_iter()
        .map(|row| row.into_iter().map(|s| s / norm).collect())
        .collect())
}

/// Single on-axis Wilson loop `W(r, t)`.
pub fn wilson_rect<R: Real>(field: &GaugeField<R>, r: usize, t: usize) -> Result<f64> {
    check_wilson_range(field.geometry().dims(), r, t)?;
    let g = field.geometry();
    let vol = g.volume();
    let mut s = 0.0;
    for axis in 0..T {
        let mut path = Vec::with_capacity(2 * (r + t));
        path.extend(std::iter::repeat_n((axis, F), r));
        path.extend(std::iter::repeat_n((T, F), t));
        path.extend(std::iter::repeat_n((axis, B), r));
        path.extend(std::iter::repeat_n((T, B), t));
        for x in 0..vol {
            s += walk(field, x, &path).a.as_f64();
        }
    }
    Ok(s / (3 * vol) as f64)
}

/// Observable families selectable for measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObservableSet {
    Plaq,
    Loops6,
    Polyakov,
    Wilson,
}

impl FromStr for ObservableSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plaq" => Ok(ObservableSet::Plaq),
            "loops6" => Ok(ObservableSet::Loops6),
            "polyakov" => Ok(ObservableSet::Polyakov),
            "wilson" => Ok(ObservableSet::Wilson),
            other => Err(Error::InvalidParameter(format!("unknown observable {other:?}"))),
        }
    }
}

impl fmt::Display for ObservableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObservableSet::Plaq => "plaq",
            ObservableSet::Loops6 => "loops6",
            ObservableSet::Polyakov => "polyakov",
            ObservableSet::Wilson => "wilson",
        })
    }
}

pub const OBS_PLAQ: &str = "plaq";
pub const OBS_P1: &str = "P1";
pub const OBS_P2: &str = "P2";
pub const OBS_P3: &str = "P3";
pub const OBS_POLYAKOV: &str = "polyakov";
pub const OBS_WILSON: &str = "wilson";

/// One measured number on one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub ensemble: String,
    pub scheme: String,
    pub bits_per_link: f64,
    pub beta: f64,
    pub config: u64,
    pub observable: String,
    pub r: Option<u32>,
    pub t: Option<u32>,
    pub value: f64,
}

/// `(observable, r, t, value)` tuples for one configuration.
pub type Measurement = (String, Option<u32>, Option<u32>, f64);

/// Measure the requested families on one field, in a fixed order.
pub fn measure<R: Real>(
    field: &GaugeField<R>,
    sets: &[ObservableSet],
    rmax: usize,
    tmax: usize,
) -> Result<Vec<Measurement>> {
    let mut out = Vec::new();
    for set in sets {
        match set {
            ObservableSet::Plaq => out.push((OBS_PLAQ.to_string(), None, None, avg_plaquette(field))),
            ObservableSet::Loops6 => {
                let (p1, p2, p3) = loops6(field);
                out.push((OBS_P1.to_string(), None, None, p1));
                out.push((OBS_P2.to_string(), None, None, p2));
                out.push((OBS_P3.to_string(), None, None, p3));
            }
            ObservableSet::Polyakov => out.push((OBS_POLYAKOV.to_string(), None, None, polyakov(field))),
            ObservableSet::Wilson => {
                let w = wilson_loops(field, rmax, tmax)?;
                for (ri, row) in w.iter().enumerate() {
                    for (ti, v) in row.iter().enumerate() {
                        out.push((OBS_WILSON.to_string(), Some(ri as u32 + 1), Some(ti as u32 + 1), *v));
                    }
                }
            }
        }
    }
    Ok(out)
}
