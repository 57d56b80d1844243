//! Digitization of SU(2) lattice gauge fields.
//!
//! Generates pure-gauge SU(2) ensembles with heat bath and overrelaxation,
//! replaces the links by coarse digitizations (fixed point, binary polyhedral
//! subgroups, geodesic meshes) and measures the resulting change in Wilson
//! loop observables. Projected fields double as a compact storage format:
//! a field on a mesh of `v` elements is stored as `ceil(log₂ v)` bits per
//! link.
//!
//! Numerical core types are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar.

pub mod analysis;
pub mod digitize;
pub mod error;
pub mod group;
pub mod io;
pub mod lattice;
pub mod monte_carlo;
pub mod observables;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Su2F64 = group::Su2<f64>;
pub type Su2F32 = group::Su2<f32>;
pub type GaugeFieldF64 = lattice::GaugeField<f64>;
pub type GaugeFieldF32 = lattice::GaugeField<f32>;
pub type MeshF64 = digitize::Mesh<f64>;
pub type MeshF32 = digitize::Mesh<f32>;
