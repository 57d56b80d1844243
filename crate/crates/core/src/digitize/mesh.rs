//! Finite codebooks of SU(2) elements.
//!
//! Two families: the binary polyhedral subgroups 2T (24), 2O (48) and
//! 2I (120), and geodesic "edgewise" meshes built from the integer points of
//! the L1 sphere of radius `k` in ℤ⁴, normalized onto S³. At `k = 1` the
//! edgewise mesh is the 8 vertices of the 4D cross-polytope.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::nn::{brute_force_nearest, KdTree, INDEX_THRESHOLD};
use crate::error::{Error, Result};
use crate::group::Su2;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subgroup {
    #[serde(rename = "2T")]
    Tetrahedral,
    #[serde(rename = "2O")]
    Octahedral,
    #[serde(rename = "2I")]
    Icosahedral,
}

impl Subgroup {
    pub fn order(self) -> usize {
        match self {
            Subgroup::Tetrahedral => 24,
            Subgroup::Octahedral => 48,
            Subgroup::Icosahedral => 120,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Subgroup::Tetrahedral => "2T",
            Subgroup::Octahedral => "2O",
            Subgroup::Icosahedral => "2I",
        }
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subgroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2T" | "T" => Ok(Subgroup::Tetrahedral),
            "2O" | "O" => Ok(Subgroup::Octahedral),
            "2I" | "I" | "2Y" => Ok(Subgroup::Icosahedral),
            other => Err(Error::InvalidParameter(format!("unknown subgroup {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeshKind {
    Subgroup { name: Subgroup },
    Edgewise { level: u32 },
}

impl fmt::Display for MeshKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshKind::Subgroup { name } => write!(f, "{name}"),
            MeshKind::Edgewise { level } => write!(f, "edgewise-k{level}"),
        }
    }
}

/// Codebook of unit quaternions with an exact nearest-neighbor index.
#[derive(Clone, Debug)]
pub struct Mesh<T> {
    kind: MeshKind,
    elements: Vec<Su2<T>>,
    tree: Option<KdTree<T>>,
}

impl<T: Real> Mesh<T> {
    /// Wrap a codebook. Refuses empty codebooks.
    pub fn from_elements(kind: MeshKind, elements: Vec<Su2<T>>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let tree = (elements.len() >= INDEX_THRESHOLD).then(|| KdTree::build(&elements));
        Ok(Mesh { kind, elements, tree })
    }

    #[inline]
    pub fn kind(&self) -> MeshKind {
        self.kind
    }

    #[inline]
    pub fn elements(&self) -> &[Su2<T>] {
        &self.elements
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<Su2<T>> {
        self.elements.get(i).copied()
    }

    /// `log₂ v`, unrounded.
    pub fn bits_per_link(&self) -> f64 {
        (self.len() as f64).log2()
    }

    /// Bits of one packed index, `ceil(log₂ v)` (at least 1).
    pub fn index_bits(&self) -> u32 {
        index_bits(self.len())
    }

    /// Nearest element under `distance_sq`, lowest index on ties.
    #[inline]
    pub fn nearest(&self, g: Su2<T>) -> usize {
        match &self.tree {
            Some(tree) => tree.nearest(&self.elements, g),
            None => brute_force_nearest(&self.elements, g),
        }
    }

    /// Index of the element bitwise equal to `g`, if any.
    pub fn index_of(&self, g: Su2<T>) -> Option<usize> {
        let i = self.nearest(g);
        (self.elements[i] == g).then_some(i)
    }

    /// Index of an element within `tol` (Euclidean) of `g`.
    pub fn find(&self, g: Su2<T>, tol: f64) -> Option<usize> {
        let i = self.nearest(g);
        (self.elements[i].distance_sq(g).as_f64().sqrt() <= tol).then_some(i)
    }

    /// Content hash over the element count and the little-endian `f64`
    /// components.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"su2-mesh-v1");
        h.update((self.len() as u64).to_le_bytes());
        for g in &self.elements {
            for x in g.to_array() {
                h.update(x.as_f64().to_le_bytes());
            }
        }
        h.finalize().into()
    }

    pub fn digest_hex(&self) -> String {
        hex::encode(self.digest())
    }

    /// Smallest pairwise `distance_sq`; `O(v²)`.
    pub fn min_pair_distance_sq(&self) -> f64 {
        let mut m = f64::INFINITY;
        for (i, g) in self.elements.iter().enumerate() {
            for h in &self.elements[i + 1..] {
                m = m.min(g.distance_sq(*h).as_f64());
            }
        }
        m
    }

    /// Check closure under product and conjugation within `tol`.
    pub fn is_closed(&self, tol: f64) -> bool {
        self.elements.iter().all(|g| {
            self.find(g.dagger(), tol).is_some() && self.elements.iter().all(|h| self.find(*g * *h, tol).is_some())
        })
    }
}

pub fn index_bits(v: usize) -> u32 {
    if v <= 2 {
        1
    } else {
        usize::BITS - (v - 1).leading_zeros()
    }
}

/// All coordinate permutations and sign flips of `base`, deduplicated, in a
/// fixed order.
fn signed_permutations(base: [f64; 4], even_only: bool, out: &mut Vec<[f64; 4]>) {
    const PERMS: [[usize; 4]; 24] = [
        [0, 1, 2, 3],
        [0, 1, 3, 2],
        [0, 2, 1, 3],
        [0, 2, 3, 1],
        [0, 3, 1, 2],
        [0, 3, 2, 1],
        [1, 0, 2, 3],
        [1, 0, 3, 2],
        [1, 2, 0, 3],
        [1, 2, 3, 0],
        [1, 3, 0, 2],
        [1, 3, 2, 0],
        [2, 0, 1, 3],
        [2, 0, 3, 1],
        [2, 1, 0, 3],
        [2, 1, 3, 0],
        [2, 3, 0, 1],
        [2, 3, 1, 0],
        [3, 0, 1, 2],
        [3, 0, 2, 1],
        [3, 1, 0, 2],
        [3, 1, 2, 0],
        [3, 2, 0, 1],
        [3, 2, 1, 0],
    ];
    fn is_even(p: &[usize; 4]) -> bool {
        let mut inv = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if p[i] > p[j] {
                    inv += 1;
                }
            }
        }
        inv % 2 == 0
    }
    for p in PERMS.iter().filter(|p| !even_only || is_even(p)) {
        for signs in 0..16u32 {
            let mut q = [0.0; 4];
            for i in 0..4 {
                let x = base[p[i]];
                q[i] = if signs & (1 << i) != 0 { -x } else { x };
            }
            if !out.iter().any(|o| o.iter().zip(q.iter()).all(|(a, b)| a == b)) {
                // −0.0 == 0.0 so sign flips of zero entries are deduplicated
                out.push(q);
            }
        }
    }
}

fn to_mesh<T: Real>(kind: MeshKind, pts: Vec<[f64; 4]>) -> Mesh<T> {
    let elements = pts
        .into_iter()
        .map(|q| Su2::new(T::lit(q[0]), T::lit(q[1]), T::lit(q[2]), T::lit(q[3])))
        .collect();
    Mesh::from_elements(kind, elements).expect("generated meshes are non-empty")
}

fn clean_zeros(pts: &mut [[f64; 4]]) {
    for q in pts {
        for x in q.iter_mut() {
            if *x == 0.0 {
                *x = 0.0;
            }
        }
    }
}

/// Binary tetrahedral, octahedral or icosahedral group.
pub fn gen_subgroup<T: Real>(name: Subgroup) -> Mesh<T> {
    let mut pts = Vec::new();
    // 2T: ±1, ±i, ±j, ±k and (±½, ±½, ±½, ±½)
    signed_permutations([1.0, 0.0, 0.0, 0.0], false, &mut pts);
    signed_permutations([0.5, 0.5, 0.5, 0.5], false, &mut pts);
    match name {
        Subgroup::Tetrahedral => {}
        Subgroup::Octahedral => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            signed_permutations([h, h, 0.0, 0.0], false, &mut pts);
        }
        Subgroup::Icosahedral => {
            let phi = (1.0 + 5f64.sqrt()) / 2.0;
            signed_permutations([phi / 2.0, 0.5, 0.5 / phi, 0.0], true, &mut pts);
        }
    }
    clean_zeros(&mut pts);
    to_mesh(MeshKind::Subgroup { name }, pts)
}

/// Number of points of ℤ⁴ with L1 norm `k`: `(8/3)·k·(k² + 2)`.
pub fn edgewise_size(k: u32) -> usize {
    let k = k as usize;
    8 * k * (k * k + 2) / 3
}

/// Geodesic mesh from the subdivided cross-polytope at level `k ≥ 1`.
pub fn gen_edgewise_mesh<T: Real>(k: u32) -> Result<Mesh<T>> {
    if k < 1 {
        return Err(Error::InvalidParameter("edgewise level must be >= 1".into()));
    }
    let ki = k as i64;
    let mut pts = Vec::with_capacity(edgewise_size(k));
    for a in -ki..=ki {
        let ra = ki - a.abs();
        for b in -ra..=ra {
            let rb = ra - b.abs();
            for c in -rb..=rb {
                let rc = rb - c.abs();
                let ds: &[i64] = if rc == 0 { &[0] } else { &[rc, -rc] };
                for &d in ds {
                    let x = [a as f64, b as f64, c as f64, d as f64];
                    let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
                    pts.push([x[0] / n, x[1] / n, x[2] / n, x[3] / n]);
                }
            }
        }
    }
    clean_zeros(&mut pts);
    Ok(to_mesh(MeshKind::Edgewise { level: k }, pts))
}

/// Build the codebook described by `kind`.
pub fn gen_mesh<T: Real>(kind: MeshKind) -> Result<Mesh<T>> {
    match kind {
        MeshKind::Subgroup { name } => Ok(gen_subgroup(name)),
        MeshKind::Edgewise { level } => gen_edgewise_mesh(level),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integer points of the L1 sphere by exhaustive search of the box.
    fn l1_sphere_points(k: i64) -> Vec<[i64; 4]> {
        let mut out = Vec::new();
        for a in -k..=k {
            for b in -k..=k {
                for c in -k..=k {
                    for d in -k..=k {
                        if a.abs() + b.abs() + c.abs() + d.abs() == k {
                            out.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn subgroup_orders() {
        for (g, n) in [
            (Subgroup::Tetrahedral, 24),
            (Subgroup::Octahedral, 48),
            (Subgroup::Icosahedral, 120),
        ] {
            let m: Mesh<f64> = gen_subgroup(g);
            assert_eq!(m.len(), n);
            assert_eq!(g.order(), n);
            assert!(m.min_pair_distance_sq() > 1e-9);
            for e in m.elements() {
                assert!((e.norm_sq() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn subgroups_are_closed() {
        for g in [Subgroup::Tetrahedral, Subgroup::Octahedral, Subgroup::Icosahedral] {
            let m: Mesh<f64> = gen_subgroup(g);
            assert!(m.is_closed(1e-12), "{g} not closed");
        }
    }

    #[test]
    fn tetrahedral_inside_octahedral_and_icosahedral() {
        let t: Mesh<f64> = gen_subgroup(Subgroup::Tetrahedral);
        let o: Mesh<f64> = gen_subgroup(Subgroup::Octahedral);
        let i: Mesh<f64> = gen_subgroup(Subgroup::Icosahedral);
        for e in t.elements() {
            assert!(o.elements().iter().any(|x| x.distance_sq(*e).sqrt() < 1e-12));
            assert!(i.elements().iter().any(|x| x.distance_sq(*e).sqrt() < 1e-12));
        }
    }

    #[test]
    fn edgewise_level_one_is_cross_polytope() {
        let m: Mesh<f64> = gen_edgewise_mesh(1).unwrap();
        assert_eq!(m.len(), 8);
        for e in m.elements() {
            let nz = e.to_array().iter().filter(|x| **x != 0.0).count();
            assert_eq!(nz, 1);
            assert!(e.to_array().iter().any(|x| x.abs() == 1.0));
        }
        assert_eq!(m.bits_per_link(), 3.0);
    }

    #[test]
    fn edgewise_sizes_match_enumeration() {
        for k in 1..=6u32 {
            let brute = l1_sphere_points(k as i64).len();
            assert_eq!(brute, edgewise_size(k));
            let m: Mesh<f64> = gen_edgewise_mesh(k).unwrap();
            assert_eq!(m.len(), brute);
            assert!(m.min_pair_distance_sq() > 1e-9);
        }
        assert_eq!(edgewise_size(2), 32);
        assert_eq!(edgewise_size(3), 88);
        assert!(gen_edgewise_mesh::<f64>(0).is_err());
    }

    #[test]
    fn edgewise_symmetric_under_hyperoctahedral_group() {
        let m: Mesh<f64> = gen_edgewise_mesh(3).unwrap();
        let mut pts = Vec::new();
        signed_permutations([1.0, 2.0, 3.0, 4.0], false, &mut pts);
        for e in m.elements() {
            assert!((e.norm_sq() - 1.0).abs() < 1e-14);
            let x = e.to_array();
            for p in &pts {
                // p encodes a signed permutation through the image of (1,2,3,4)
                let mut y = [0.0; 4];
                for i in 0..4 {
                    let src = p[i].abs() as usize - 1;
                    y[i] = p[i].signum() * x[src];
                }
                assert!(m.find(Su2::from_array(y), 1e-14).is_some());
            }
        }
    }

    #[test]
    fn bits_and_index_widths() {
        let m: Mesh<f64> = gen_subgroup(Subgroup::Icosahedral);
        assert!((m.bits_per_link() - 120f64.log2()).abs() < 1e-15);
        assert!((m.bits_per_link() - 6.907).abs() < 1e-3);
        assert_eq!(m.index_bits(), 7);
        assert_eq!(index_bits(8), 3);
        assert_eq!(index_bits(9), 4);
        assert_eq!(index_bits(1), 1);
    }

    #[test]
    fn large_mesh_uses_exact_index() {
        let m: Mesh<f64> = gen_edgewise_mesh(8).unwrap();
        assert_eq!(m.len(), edgewise_size(8));
        assert!(m.len() >= INDEX_THRESHOLD);
        let mut rng = crate::rng::seeded(3);
        for _ in 0..2000 {
            let q: Su2<f64> = crate::group::haar_sample(&mut rng);
            assert_eq!(m.nearest(q), brute_force_nearest(m.elements(), q));
        }
    }

    #[test]
    fn empty_mesh_refused() {
        assert!(matches!(
            Mesh::<f64>::from_elements(MeshKind::Edgewise { level: 1 }, vec![]),
            Err(Error::EmptyMesh)
        ));
    }

    #[test]
    fn digest_is_content_hash() {
        let a: Mesh<f64> = gen_subgroup(Subgroup::Tetrahedral);
        let b: Mesh<f64> = gen_subgroup(Subgroup::Tetrahedral);
        let c: Mesh<f64> = gen_subgroup(Subgroup::Octahedral);
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
    }
}
