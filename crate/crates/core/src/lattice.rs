//! Periodic 4D hypercubic lattice and the gauge-link field.
//!
//! Sites are numbered lexicographically with x fastest, then y, z, t. Links
//! are stored site-major with direction order X, Y, Z, T, so link `(s, μ)`
//! lives at `4·s + μ`.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{haar_sample, QuatSum, Su2};
use crate::scalar::Real;

pub const X: usize = 0;
pub const Y: usize = 1;
pub const Z: usize = 2;
pub const T: usize = 3;
pub const NDIM: usize = 4;

/// Step direction along an axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Forward,
    Backward,
}

#[derive(Debug)]
struct Neighbors {
    fwd: Vec<usize>,
    bwd: Vec<usize>,
}

/// Extents of a periodic 4D lattice plus a precomputed neighbor table.
#[derive(Clone, Debug)]
pub struct LatticeGeometry {
    dims: [usize; 4],
    nbr: Arc<Neighbors>,
}

impl PartialEq for LatticeGeometry {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims
    }
}

impl Eq for LatticeGeometry {}

impl LatticeGeometry {
    pub fn new(dims: [usize; 4]) -> Result<Self> {
        if dims.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter(format!(
                "every lattice extent must be at least 2, got {dims:?}"
            )));
        }
        let volume: usize = dims.iter().product();
        let mut fwd = vec![0; volume * NDIM];
        let mut bwd = vec![0; volume * NDIM];
        for s in 0..volume {
            let c = coords_of(dims, s);
            for mu in 0..NDIM {
                let mut up = c;
                up[mu] = (c[mu] + 1) % dims[mu];
                let mut dn = c;
                dn[mu] = (c[mu] + dims[mu] - 1) % dims[mu];
                fwd[s * NDIM + mu] = index_of(dims, up);
                bwd[s * NDIM + mu] = index_of(dims, dn);
            }
        }
        Ok(LatticeGeometry {
            dims,
            nbr: Arc::new(Neighbors { fwd, bwd }),
        })
    }

    /// Isotropic `L⁴` lattice.
    pub fn hypercube(l: usize) -> Result<Self> {
        Self::new([l; 4])
    }

    #[inline]
    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    #[inline]
    pub fn volume(&self) -> usize {
        self.dims.iter().product()
    }

    /// Number of spatial sites `Nx·Ny·Nz`.
    #[inline]
    pub fn spatial_volume(&self) -> usize {
        self.dims[X] * self.dims[Y] * self.dims[Z]
    }

    #[inline]
    pub fn n_links(&self) -> usize {
        self.volume() * NDIM
    }

    /// Lexicographic index after reducing each coordinate modulo its extent.
    pub fn site_index(&self, coords: [i64; 4]) -> usize {
        let mut c = [0usize; 4];
        for mu in 0..NDIM {
            c[mu] = coords[mu].rem_euclid(self.dims[mu] as i64) as usize;
        }
        index_of(self.dims, c)
    }

    pub fn coords(&self, site: usize) -> [usize; 4] {
        coords_of(self.dims, site)
    }

    #[inline]
    pub fn neighbor(&self, site: usize, mu: usize, sign: Sign) -> usize {
        match sign {
            Sign::Forward => self.nbr.fwd[site * NDIM + mu],
            Sign::Backward => self.nbr.bwd[site * NDIM + mu],
        }
    }

    #[inline]
    pub fn fwd(&self, site: usize, mu: usize) -> usize {
        self.nbr.fwd[site * NDIM + mu]
    }

    #[inline]
    pub fn bwd(&self, site: usize, mu: usize) -> usize {
        self.nbr.bwd[site * NDIM + mu]
    }
}

fn index_of(dims: [usize; 4], c: [usize; 4]) -> usize {
    c[0] + dims[0] * (c[1] + dims[1] * (c[2] + dims[2] * c[3]))
}

fn coords_of(dims: [usize; 4], mut s: usize) -> [usize; 4] {
    let mut c = [0; 4];
    for mu in 0..NDIM {
        c[mu] = s % dims[mu];
        s /= dims[mu];
    }
    c
}

/// Gauge links `U_μ(x)` on a periodic lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeField<T> {
    geometry: LatticeGeometry,
    links: Vec<Su2<T>>,
    off_manifold: bool,
}

impl<T: Real> GaugeField<T> {
    /// All links set to the identity.
    pub fn cold(geometry: LatticeGeometry) -> Self {
        let links = vec![Su2::identity(); geometry.n_links()];
        GaugeField {
            geometry,
            links,
            off_manifold: false,
        }
    }

    /// All links drawn from the Haar measure, in storage order.
    pub fn hot<R: Rng + ?Sized>(geometry: LatticeGeometry, rng: &mut R) -> Self {
        let links = (0..geometry.n_links()).map(|_| haar_sample(rng)).collect();
        GaugeField {
            geometry,
            links,
            off_manifold: false,
        }
    }

    /// Wrap an existing link array laid out in storage order.
    pub fn from_links(geometry: LatticeGeometry, links: Vec<Su2<T>>) -> Result<Self> {
        if links.len() != geometry.n_links() {
            return Err(Error::GeometryMismatch(format!(
                "{} links for a lattice with {} links",
                links.len(),
                geometry.n_links()
            )));
        }
        Ok(GaugeField {
            geometry,
            links,
            off_manifold: false,
        })
    }

    #[inline]
    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    #[inline]
    pub fn links(&self) -> &[Su2<T>] {
        &self.links
    }

    #[inline]
    pub fn links_mut(&mut self) -> &mut [Su2<T>] {
        &mut self.links
    }

    #[inline]
    pub fn link(&self, site: usize, mu: usize) -> Su2<T> {
        self.links[site * NDIM + mu]
    }

    #[inline]
    pub fn set_link(&mut self, site: usize, mu: usize, u: Su2<T>) {
        self.links[site * NDIM + mu] = u;
    }

    /// True once a lossy pass (fixed-point truncation) has moved links off S³.
    #[inline]
    pub fn is_off_manifold(&self) -> bool {
        self.off_manifold
    }

    pub fn mark_off_manifold(&mut self, off: bool) {
        self.off_manifold = off;
    }

    /// Largest `|‖U‖² - 1|` over all links.
    pub fn max_norm_deviation(&self) -> T {
        self.links
            .iter()
            .map(|u| (u.norm_sq() - T::one()).abs())
            .fold(T::zero(), T::max)
    }

    /// Renormalize every link onto S³.
    pub fn reunitarize(&mut self) {
        for u in &mut self.links {
            *u = u.reunitarized();
        }
        self.off_manifold = false;
    }

    /// `Re Tr[U_μ(x) U_ν(x+μ) U†_μ(x+ν) U†_ν(x)]` without the plane check.
    #[inline]
    pub(crate) fn plaquette_unchecked(&self, site: usize, mu: usize, nu: usize) -> T {
        let g = &self.geometry;
        let xm = g.fwd(site, mu);
        let xn = g.fwd(site, nu);
        let left = self.link(site, mu) * self.link(xm, nu);
        let right = self.link(site, nu) * self.link(xn, mu);
        // Re Tr(L R†) = 2 (L · R) on S³
        (T::one() + T::one()) * left.dot(right)
    }

    /// Plaquette `Re Tr` in the `(μ, ν)` plane based at `site`.
    pub fn plaquette_re_trace(&self, site: usize, mu: usize, nu: usize) -> Result<T> {
        if mu == nu {
            return Err(Error::InvalidPlane(mu));
        }
        if mu >= NDIM || nu >= NDIM {
            return Err(Error::InvalidParameter(format!("direction out of range: ({mu}, {nu})")));
        }
        Ok(self.plaquette_unchecked(site, mu, nu))
    }

    /// Sum of the six staples `Σ` such that `Re Tr(U_μ(x)·Σ)` is the sum of
    /// the six plaquettes containing the link.
    pub fn staple_sum(&self, site: usize, mu: usize) -> QuatSum<T> {
        let g = &self.geometry;
        let xm = g.fwd(site, mu);
        let mut acc = QuatSum::zero();
        for nu in 0..NDIM {
            if nu == mu {
                continue;
            }
            // forward: U_ν(x+μ) U†_μ(x+ν) U†_ν(x)
            let xn = g.fwd(site, nu);
            acc += self
                .link(xm, nu)
                .mul_dagger(self.link(xn, mu))
                .mul_dagger(self.link(site, nu));
            // backward: U†_ν(x+μ-ν) U†_μ(x-ν) U_ν(x-ν)
            let xmn = g.bwd(xm, nu);
            let xbn = g.bwd(site, nu);
            acc += (self.link(xbn, mu) * self.link(xmn, nu)).dagger() * self.link(xbn, nu);
        }
        acc
    }

    /// Single-plaquette staple: the product `R` with
    /// `Re Tr(U_μ(x)·R) = □_{μν}(x)`.
    #[inline]
    pub fn plaquette_staple(&self, site: usize, mu: usize, nu: usize) -> Su2<T> {
        let g = &self.geometry;
        let xm = g.fwd(site, mu);
        let xn = g.fwd(site, nu);
        self.link(xm, nu)
            .mul_dagger(self.link(xn, mu))
            .mul_dagger(self.link(site, nu))
    }

    /// Wilson action `Σ_□ (1 - ½ Re Tr □)` without the factor β.
    pub fn action_density_sum(&self) -> f64 {
        let mut s = 0.0;
        for site in 0..self.geometry.volume() {
            for mu in 0..NDIM {
                for nu in mu + 1..NDIM {
                    s += 1.0 - 0.5 * self.plaquette_unchecked(site, mu, nu).as_f64();
                }
            }
        }
        s
    }

    /// `U_μ(x) → Ω(x) U_μ(x) Ω†(x+μ)`.
    pub fn gauge_transform(&self, omega: &[Su2<T>]) -> Result<GaugeField<T>> {
        if omega.len() != self.geometry.volume() {
            return Err(Error::GeometryMismatch(format!(
                "{} gauge rotations for {} sites",
                omega.len(),
                self.geometry.volume()
            )));
        }
        let mut out = self.clone();
        for site in 0..self.geometry.volume() {
            for mu in 0..NDIM {
                let up = self.geometry.fwd(site, mu);
                out.set_link(site, mu, (omega[site] * self.link(site, mu)).mul_dagger(omega[up]));
            }
        }
        Ok(out)
    }

    /// Field shifted by `shift` lattice units: `U'_μ(x) = U_μ(x + shift)`.
    pub fn translated(&self, shift: [i64; 4]) -> GaugeField<T> {
        let g = &self.geometry;
        let mut out = self.clone();
        for site in 0..g.volume() {
            let c = g.coords(site);
            let src = g.site_index([
                c[0] as i64 + shift[0],
                c[1] as i64 + shift[1],
                c[2] as i64 + shift[2],
                c[3] as i64 + shift[3],
            ]);
            for mu in 0..NDIM {
                out.set_link(site, mu, self.link(src, mu));
            }
        }
        out
    }

    /// Relabel axes: new axis `i` is old axis `perm[i]`. The geometry is
    /// permuted accordingly.
    pub fn permuted_axes(&self, perm: [usize; 4]) -> Result<GaugeField<T>> {
        let mut seen = [false; 4];
        for &p in &perm {
            if p >= NDIM || seen[p] {
                return Err(Error::InvalidParameter(format!("not a permutation: {perm:?}")));
            }
            seen[p] = true;
        }
        let old = &self.geometry;
        let od = old.dims();
        let geometry = LatticeGeometry::new([od[perm[0]], od[perm[1]], od[perm[2]], od[perm[3]]])?;
        let mut out = GaugeField::cold(geometry.clone());
        out.off_manifold = self.off_manifold;
        for site in 0..geometry.volume() {
            let c = geometry.coords(site);
            let mut oc = [0i64; 4];
            for i in 0..NDIM {
                oc[perm[i]] = c[i] as i64;
            }
            let src = old.site_index(oc);
            for i in 0..NDIM {
                out.set_link(site, i, self.link(src, perm[i]));
            }
        }
        Ok(out)
    }

    /// Convert the component type.
    pub fn cast<U: Real>(&self) -> GaugeField<U> {
        GaugeField {
            geometry: self.geometry.clone(),
            links: self.links.iter().map(|u| u.cast()).collect(),
            off_manifold: self.off_manifold,
        }
    }
}
