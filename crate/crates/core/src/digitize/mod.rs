//! Digitization schemes and projection of gauge fields onto them.

pub mod fixed_point;
pub mod mesh;
pub mod nn;
pub mod project;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use fixed_point::{fixed_point_truncate, project_fixed_point, FixedPointSpec};
pub use mesh::{edgewise_size, gen_edgewise_mesh, gen_mesh, gen_subgroup, Mesh, MeshKind, Subgroup};
pub use project::{project_apr, project_apr_indices, project_l2, AprObjective};

use crate::error::Result;
use crate::lattice::GaugeField;
use crate::scalar::Real;

/// Bits used by the full-precision quaternion storage (four `f64`).
pub const ULTRAFINE_BITS_PER_LINK: f64 = 256.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    L2,
    Apr(AprObjective),
}

/// Everything needed to name a digitization and count its bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    Ultrafine,
    FixedPoint(FixedPointSpec),
    Mesh {
        kind: MeshKind,
        size: usize,
        projection: Projection,
    },
}

impl Scheme {
    pub fn mesh<T: Real>(mesh: &Mesh<T>, projection: Projection) -> Scheme {
        Scheme::Mesh {
            kind: mesh.kind(),
            size: mesh.len(),
            projection,
        }
    }

    /// `3p` for fixed point, `log₂ v` (unrounded) for meshes.
    pub fn bits_per_link(&self) -> f64 {
        match self {
            Scheme::Ultrafine => ULTRAFINE_BITS_PER_LINK,
            Scheme::FixedPoint(spec) => spec.bits_per_link(),
            Scheme::Mesh { size, .. } => (*size as f64).log2(),
        }
    }

    pub fn is_subgroup(&self) -> bool {
        matches!(
            self,
            Scheme::Mesh {
                kind: MeshKind::Subgroup { .. },
                ..
            }
        )
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Ultrafine => f.write_str("ultrafine"),
            Scheme::FixedPoint(spec) => write!(f, "fixed-p{}", spec.bits()),
            Scheme::Mesh { kind, projection, .. } => match projection {
                Projection::L2 => write!(f, "l2-{kind}"),
                Projection::Apr(AprObjective::AllStaples) => write!(f, "apr-{kind}"),
                Projection::Apr(AprObjective::Single) => write!(f, "apr1-{kind}"),
            },
        }
    }
}

/// Bits per link of a fixed-point precision `p`.
pub fn bits_per_link_fixed(p: u32) -> Result<f64> {
    Ok(FixedPointSpec::new(p)?.bits_per_link())
}

/// Bits per link of a mesh of `v` elements.
pub fn bits_per_link_mesh(v: usize) -> f64 {
    (v as f64).log2()
}

/// Apply a mesh projection.
pub fn project_mesh<T: Real>(field: &GaugeField<T>, mesh: &Mesh<T>, projection: Projection) -> Result<GaugeField<T>> {
    match projection {
        Projection::L2 => project_l2(field, mesh),
        Projection::Apr(obj) => project_apr(field, mesh, obj),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_per_link_examples() {
        assert_eq!(bits_per_link_fixed(8).unwrap(), 24.0);
        assert!((bits_per_link_mesh(120) - 6.907).abs() < 1e-3);
        assert_eq!(bits_per_link_mesh(8), 3.0);
        let m: Mesh<f64> = gen_subgroup(Subgroup::Icosahedral);
        let s = Scheme::mesh(&m, Projection::Apr(AprObjective::AllStaples));
        assert_eq!(s.to_string(), "apr-2I");
        assert_eq!(
            Scheme::mesh(&m, Projection::Apr(AprObjective::Single)).to_string(),
            "apr1-2I"
        );
        assert!(s.is_subgroup());
        assert_eq!(s.bits_per_link(), m.bits_per_link());
        let e: Mesh<f64> = gen_edgewise_mesh(3).unwrap();
        assert_eq!(Scheme::mesh(&e, Projection::L2).to_string(), "l2-edgewise-k3");
        assert_eq!(
            Scheme::FixedPoint(FixedPointSpec::new(5).unwrap()).to_string(),
            "fixed-p5"
        );
    }
}
