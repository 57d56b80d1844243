//! Heat-bath and overrelaxation updates for the Wilson plaquette action.
//!
//! The local weight of a link is `exp((β/2)·Re Tr(U·Σ))` where `Σ` is the
//! staple sum. A trajectory is four overrelaxation sweeps followed by one
//! heat-bath sweep, each sweep visiting directions X, Y, Z, T and, within a
//! direction, sites in lexicographic order.

use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::autocorr::integrated_autocorrelation;
use crate::error::{Error, Result};
use crate::group::{haar_sample, normalize, Su2};
use crate::io::config::{write_config, ConfigHeader, PayloadKind};
use crate::lattice::{GaugeField, LatticeGeometry, NDIM};
use crate::observables::avg_plaquette;
use crate::rng::{seeded, state_digest, unit_open_low, StreamRng};
use crate::scalar::Real;

/// Below this `βk` the Kennedy–Pendleton proposal is replaced by the direct
/// exponential method.
pub const KP_THRESHOLD: f64 = 0.1;

/// Overrelaxation sweeps per trajectory.
pub const OR_PER_TRAJECTORY: usize = 4;

/// Thermalization discard used when none is given.
pub const DEFAULT_THERMALIZATION: u64 = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    Hot,
    Cold,
}

impl Start {
    /// Hot at β ≤ 1.5, cold above.
    pub fn default_for(beta: f64) -> Start {
        if beta <= 1.5 {
            Start::Hot
        } else {
            Start::Cold
        }
    }

    pub fn flag(self) -> u8 {
        match self {
            Start::Hot => 1,
            Start::Cold => 0,
        }
    }

    pub fn from_flag(f: u8) -> Result<Start> {
        match f {
            0 => Ok(Start::Cold),
            1 => Ok(Start::Hot),
            other => Err(Error::Parse(format!("unknown start flag {other}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub beta: f64,
    pub dims: [usize; 4],
    pub seed: u64,
    pub n_trajectories: u64,
    pub save_every: u64,
    pub thermalization_trajectories: u64,
    pub start: Start,
}

impl RunParams {
    /// Parameters with the default thermalization and start type for `beta`.
    pub fn new(beta: f64, dims: [usize; 4], seed: u64, n_trajectories: u64, save_every: u64) -> Self {
        RunParams {
            beta,
            dims,
            seed,
            n_trajectories,
            save_every,
            thermalization_trajectories: DEFAULT_THERMALIZATION,
            start: Start::default_for(beta),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta must be >= 0, got {}", self.beta)));
        }
        if self.save_every < 1 {
            return Err(Error::InvalidParameter("save_every must be >= 1".into()));
        }
        LatticeGeometry::new(self.dims)?;
        Ok(())
    }

    /// Trajectory indices at which configurations are saved.
    pub fn saved_trajectories(&self) -> Vec<u64> {
        let first = self.thermalization_trajectories + self.save_every;
        (0..)
            .map(|i| first + i * self.save_every)
            .take_while(|&t| t <= self.n_trajectories)
            .collect()
    }
}

/// Sample `x₀ ∈ [-1, 1]` with density `∝ √(1-x₀²)·exp(α x₀)`.
pub fn sample_x0<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha < KP_THRESHOLD {
        sample_x0_direct(alpha, rng)
    } else {
        sample_x0_kennedy_pendleton(alpha, rng)
    }
}

/// Kennedy–Pendleton: propose `δ = 1 - x₀` from `δ^{1/2} e^{-αδ}` and accept
/// with probability `√(1 - δ/2)`.
pub fn sample_x0_kennedy_pendleton<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    loop {
        let r1 = unit_open_low(rng);
        let r2: f64 = rng.random();
        let r3 = unit_open_low(rng);
        let c = (std::f64::consts::TAU * r2).cos();
        let delta = -(r1.ln() + c * c * r3.ln()) / alpha;
        let r4: f64 = rng.random();
        if r4 * r4 <= 1.0 - 0.5 * delta {
            return 1.0 - delta;
        }
    }
}

/// Creutz-style direct method: `x₀` from the truncated exponential, accepted
/// with probability `√(1 - x₀²)`.
pub fn sample_x0_direct<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    loop {
        let r: f64 = rng.random();
        let x0 = if alpha < 1e-12 {
            2.0 * r - 1.0
        } else {
            // y uniform in [e^{-2α}, 1], x₀ = 1 + ln(y)/α
            let span = -(-2.0 * alpha).exp_m1();
            1.0 + (1.0 - span * (1.0 - r)).ln() / alpha
        };
        let x0 = x0.clamp(-1.0, 1.0);
        let r2: f64 = rng.random();
        if r2 * r2 <= 1.0 - x0 * x0 {
            return x0;
        }
    }
}

/// Unit quaternion with scalar part `x0` and uniformly oriented vector part.
fn with_random_axis<R: Rng + ?Sized>(x0: f64, rng: &mut R) -> [f64; 4] {
    let r = (1.0 - x0 * x0).max(0.0).sqrt();
    let cos_t = 2.0 * rng.random::<f64>() - 1.0;
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    [x0, r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t]
}

/// New link drawn from its local Boltzmann weight given the current staples.
pub fn heatbath_link<T: Real, R: Rng + ?Sized>(
    field: &GaugeField<T>,
    site: usize,
    mu: usize,
    beta: f64,
    rng: &mut R,
) -> Su2<T> {
    let staple = field.staple_sum(site, mu);
    match normalize(staple) {
        Ok((a_hat, k)) => {
            let alpha = beta * k.as_f64();
            if alpha == 0.0 {
                return haar_sample(rng);
            }
            let x0 = sample_x0(alpha, rng);
            let x = with_random_axis(x0, rng);
            let x = Su2::new(T::lit(x[0]), T::lit(x[1]), T::lit(x[2]), T::lit(x[3]));
            x.mul_dagger(a_hat)
        }
        Err(_) => haar_sample(rng),
    }
}

/// Microcanonical reflection `U → Â† U† Â†` with `Â = Σ/k`; keeps
/// `Re Tr(U·Σ)` fixed and is its own inverse. Zero staples leave the link.
pub fn overrelax_link<T: Real>(field: &GaugeField<T>, site: usize, mu: usize) -> Su2<T> {
    let u = field.link(site, mu);
    match normalize(field.staple_sum(site, mu)) {
        Ok((a_hat, _)) => {
            let ad = a_hat.dagger();
            ad * u.dagger() * ad
        }
        Err(_) => u,
    }
}

pub fn overrelax_sweep<T: Real>(field: &mut GaugeField<T>) {
    let vol = field.geometry().volume();
    for mu in 0..NDIM {
        for site in 0..vol {
            let u = overrelax_link(field, site, mu);
            field.set_link(site, mu, u);
        }
    }
}

pub fn heatbath_sweep<T: Real, R: Rng + ?Sized>(field: &mut GaugeField<T>, beta: f64, rng: &mut R) {
    let vol = field.geometry().volume();
    for mu in 0..NDIM {
        for site in 0..vol {
            let u = heatbath_link(field, site, mu, beta, rng);
            field.set_link(site, mu, u);
        }
    }
}

/// Four overrelaxation sweeps then one heat-bath sweep.
pub fn trajectory<T: Real, R: Rng + ?Sized>(field: &mut GaugeField<T>, beta: f64, rng: &mut R) {
    for _ in 0..OR_PER_TRAJECTORY {
        overrelax_sweep(field);
    }
    heatbath_sweep(field, beta, rng);
}

/// One Markov chain: field, stream and trajectory counter.
pub struct MarkovChain<T> {
    pub field: GaugeField<T>,
    pub rng: StreamRng,
    pub beta: f64,
    seed: u64,
    trajectory: u64,
}

impl<T: Real> MarkovChain<T> {
    pub fn new(params: &RunParams) -> Result<Self> {
        params.validate()?;
        let geometry = LatticeGeometry::new(params.dims)?;
        let mut rng = seeded(params.seed);
        let field = match params.start {
            Start::Cold => GaugeField::cold(geometry),
            Start::Hot => GaugeField::hot(geometry, &mut rng),
        };
        Ok(MarkovChain {
            field,
            rng,
            beta: params.beta,
            seed: params.seed,
            trajectory: 0,
        })
    }

    /// Advance one trajectory and reunitarize.
    pub fn step(&mut self) {
        trajectory(&mut self.field, self.beta, &mut self.rng);
        self.field.reunitarize();
        self.trajectory += 1;
    }

    pub fn trajectory_index(&self) -> u64 {
        self.trajectory
    }

    pub fn rng_digest(&self) -> String {
        state_digest(self.seed, &self.rng)
    }
}

/// Run the chain described by `params`, calling `on_save` at every saved
/// trajectory. Returns the per-trajectory plaquette history after
/// thermalization.
pub fn run_chain<T, F>(params: &RunParams, mut on_save: F) -> Result<Vec<f64>>
where
    T: Real,
    F: FnMut(&MarkovChain<T>) -> Result<()>,
{
    let mut chain = MarkovChain::<T>::new(params)?;
    let mut history = Vec::new();
    let saves = params.saved_trajectories();
    let mut next = saves.iter().peekable();
    while chain.trajectory_index() < params.n_trajectories {
        chain.step();
        let t = chain.trajectory_index();
        if t > params.thermalization_trajectories {
            history.push(avg_plaquette(&chain.field).as_f64());
        }
        if next.peek() == Some(&&t) {
            next.next();
            on_save(&chain)?;
        }
    }
    Ok(history)
}

/// One saved configuration in an ensemble directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEntry {
    pub trajectory: u64,
    pub file: String,
    pub rng_digest: String,
    pub plaquette: f64,
}

/// Bookkeeping written beside the configurations as `ensemble.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMetadata {
    pub params: RunParams,
    pub configs: Vec<ConfigEntry>,
    /// Integrated autocorrelation time of the plaquette in trajectories.
    pub plaquette_tau_int: Option<f64>,
    /// Which run parameters were filled in by defaults rather than given.
    pub defaulted: Vec<String>,
}

pub const ENSEMBLE_FILE: &str = "ensemble.json";

/// File name of the configuration saved at `trajectory`.
pub fn config_file_name(trajectory: u64) -> String {
    format!("cfg_{trajectory:08}.su2")
}

/// Refuse unwritable targets before doing any Monte Carlo work.
pub fn ensure_writable_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe: PathBuf = dir.join(".write-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))?;
    Ok(())
}

/// Generate and store an ensemble in `out_dir` (configurations plus
/// `ensemble.json`).
pub fn generate_ensemble(params: &RunParams, out_dir: &Path, defaulted: Vec<String>) -> Result<EnsembleMetadata> {
    params.validate()?;
    ensure_writable_dir(out_dir)?;
    let mut configs = Vec::new();
    let history = run_chain::<f64, _>(params, |chain| {
        let t = chain.trajectory_index();
        let file = config_file_name(t);
        let header = ConfigHeader::quaternion(params.dims, params.beta, t, params.seed, params.start);
        debug_assert_eq!(header.payload, PayloadKind::QuaternionF64);
        write_config(&out_dir.join(&file), &header, &chain.field, None)?;
        configs.push(ConfigEntry {
            trajectory: t,
            file,
            rng_digest: chain.rng_digest(),
            plaquette: avg_plaquette(&chain.field),
        });
        Ok(())
    })?;
    let meta = EnsembleMetadata {
        params: params.clone(),
        configs,
        plaquette_tau_int: integrated_autocorrelation(&history).map(|a| a.tau_int),
        defaulted,
    };
    write_metadata(out_dir, &meta)?;
    Ok(meta)
}

pub fn write_metadata(dir: &Path, meta: &EnsembleMetadata) -> Result<()> {
    let path = dir.join(ENSEMBLE_FILE);
    let text = serde_json::to_string_pretty(meta).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

pub fn read_metadata(dir: &Path) -> Result<EnsembleMetadata> {
    let path = dir.join(ENSEMBLE_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
