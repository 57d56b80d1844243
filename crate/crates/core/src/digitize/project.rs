//! Projection of a gauge field onto a mesh.
//!
//! L2 projection replaces every link by its nearest mesh element. APR
//! (action-preserving rounding) walks the links direction by direction in
//! X, Y, Z, T order and, within a direction, by lexicographic site; each link
//! becomes the mesh element that brings its target plaquette closest to the
//! value on the untouched input field.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh::Mesh;
use crate::error::{Error, Result};
use crate::group::Su2;
use crate::lattice::{GaugeField, NDIM};
use crate::scalar::Real;

/// Plaquette deviations closer than this are treated as ties.
pub const APR_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AprObjective {
    /// One plaquette per link: the plane `(μ, μ+1 mod 4)` based at the link's
    /// site. The level set of one plaquette trace is a 2-sphere, so on coarse
    /// meshes this often picks elements far from the original link.
    Single,
    /// Summed squared deviation over all six plaquettes containing the link.
    #[default]
    AllStaples,
}

impl fmt::Display for AprObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AprObjective::Single => "single",
            AprObjective::AllStaples => "all-staples",
        })
    }
}

impl FromStr for AprObjective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(AprObjective::Single),
            "all-staples" => Ok(AprObjective::AllStaples),
            other => Err(Error::InvalidParameter(format!("unknown APR objective {other:?}"))),
        }
    }
}

/// Mesh index of every link's nearest element, in storage order.
pub fn nearest_indices<T: Real>(field: &GaugeField<T>, mesh: &Mesh<T>) -> Vec<u32> {
    field.links().par_iter().map(|u| mesh.nearest(*u) as u32).collect()
}

/// Nearest-neighbor projection under `distance_sq`.
pub fn project_l2<T: Real>(field: &GaugeField<T>, mesh: &Mesh<T>) -> Result<GaugeField<T>> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let idx = nearest_indices(field, mesh);
    let links = idx.iter().map(|&i| mesh.elements()[i as usize]).collect();
    GaugeField::from_links(field.geometry().clone(), links)
}

/// Pick by `(deviation, distance_sq to original, index)`, with deviations
/// within [`APR_TIE_TOLERANCE`] of the minimum counted as ties.
fn select<T: Real>(elements: &[Su2<T>], original: Su2<T>, deviation: impl Fn(Su2<T>) -> f64) -> usize {
    let devs: Vec<f64> = elements.iter().map(|m| deviation(*m)).collect();
    let min = devs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut best = usize::MAX;
    let mut best_dist = T::infinity();
    for (i, (m, d)) in elements.iter().zip(&devs).enumerate() {
        if *d <= min + APR_TIE_TOLERANCE {
            let dist = m.distance_sq(original);
            if dist < best_dist {
                best = i;
                best_dist = dist;
            }
        }
    }
    best
}

/// `Re Tr(m·R)` for unit quaternions, `2·(m · R†)`.
#[inline]
fn re_trace_with<T: Real>(m: Su2<T>, rest: Su2<T>) -> f64 {
    2.0 * m.dot(rest.dagger()).as_f64()
}

/// Action-preserving rounding onto `mesh`.
pub fn project_apr<T: Real>(field: &GaugeField<T>, mesh: &Mesh<T>, objective: AprObjective) -> Result<GaugeField<T>> {
    Ok(project_apr_indices(field, mesh, objective)?.0)
}

/// As [`project_apr`], also returning the chosen mesh indices.
pub fn project_apr_indices<T: Real>(
    field: &GaugeField<T>,
    mesh: &Mesh<T>,
    objective: AprObjective,
) -> Result<(GaugeField<T>, Vec<u32>)> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let geom = field.geometry().clone();
    let vol = geom.volume();
    let elements = mesh.elements();
    let mut cur = field.clone();
    cur.mark_off_manifold(false);
    let mut idx = vec![0u32; geom.n_links()];
    for mu in 0..NDIM {
        for site in 0..vol {
            let orig = field.link(site, mu);
            let choice = match objective {
                AprObjective::Single => {
                    let nu = (mu + 1) % NDIM;
                    let target = re_trace_with(orig, field.plaquette_staple(site, mu, nu));
                    let rest = cur.plaquette_staple(site, mu, nu);
                    select(elements, orig, |m| (re_trace_with(m, rest) - target).abs())
                }
                AprObjective::AllStaples => {
                    let mut planes: Vec<(Su2<T>, f64)> = Vec::with_capacity(6);
                    for nu in 0..NDIM {
                        if nu == mu {
                            continue;
                        }
                        let fwd_target = re_trace_with(orig, field.plaquette_staple(site, mu, nu));
                        planes.push((cur.plaquette_staple(site, mu, nu), fwd_target));
                        let back_orig = backward_staple(field, site, mu, nu);
                        planes.push((backward_staple(&cur, site, mu, nu), re_trace_with(orig, back_orig)));
                    }
                    select(elements, orig, |m| {
                        planes
                            .iter()
                            .map(|(rest, target)| {
                                let d = re_trace_with(m, *rest) - target;
                                d * d
                            })
                            .sum()
                    })
                }
            };
            cur.set_link(site, mu, elements[choice]);
            idx[site * NDIM + mu] = choice as u32;
        }
    }
    Ok((cur, idx))
}

/// Staple `R` of the plaquette based at `x-ν` with `Re Tr(U_μ(x)·R)` equal
/// to that plaquette.
fn backward_staple<T: Real>(f: &GaugeField<T>, site: usize, mu: usize, nu: usize) -> Su2<T> {
    let g = f.geometry();
    let xbn = g.bwd(site, nu);
    let xmn = g.bwd(g.fwd(site, mu), nu);
    (f.link(xbn, mu) * f.link(xmn, nu)).dagger() * f.link(xbn, nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digitize::mesh::{gen_edgewise_mesh, gen_subgroup, Subgroup};
    use crate::lattice::LatticeGeometry;
    use crate::rng::seeded;

    fn hot(l: usize, seed: u64) -> GaugeField<f64> {
        GaugeField::hot(LatticeGeometry::hypercube(l).unwrap(), &mut seeded(seed))
    }

    #[test]
    fn l2_picks_brute_force_nearest() {
        let mesh: Mesh<f64> = gen_subgroup(Subgroup::Tetrahedral);
        let n = (0.99f64 * 0.99 + 0.141 * 0.141).sqrt();
        let g = Su2::new(0.99 / n, 0.141 / n, 0.0, 0.0);
        let mut best = 0;
        for (i, m) in mesh.elements().iter().enumerate() {
            if m.distance_sq(g) < mesh.elements()[best].distance_sq(g) {
                best = i;
            }
        }
        assert_eq!(mesh.elements()[best], Su2::identity());
        assert_eq!(mesh.elements()[mesh.nearest(g)], Su2::identity());
    }

    #[test]
    fn l2_output_on_mesh_and_idempotent() {
        let mesh: Mesh<f64> = gen_edgewise_mesh(3).unwrap();
        let f = hot(3, 1);
        let p = project_l2(&f, &mesh).unwrap();
        for (u, q) in f.links().iter().zip(p.links()) {
            assert!(mesh.index_of(*q).is_some());
            for m in mesh.elements() {
                assert!(q.distance_sq(*u) <= m.distance_sq(*u));
            }
        }
        assert_eq!(project_l2(&p, &mesh).unwrap(), p);
    }

    #[test]
    fn l2_equivariant_under_left_multiplication() {
        let mesh: Mesh<f64> = gen_subgroup(Subgroup::Icosahedral);
        let mut rng = seeded(2);
        for _ in 0..500 {
            let g: Su2<f64> = crate::group::haar_sample(&mut rng);
            let r = mesh.elements()[(rng_index(&mut rng)) % mesh.len()];
            let direct = mesh.elements()[mesh.nearest(r * g)];
            let moved = r * mesh.elements()[mesh.nearest(g)];
            assert!(direct.distance_sq(moved) < 1e-20);
        }
    }

    fn rng_index(rng: &mut crate::rng::StreamRng) -> usize {
        use rand::Rng;
        rng.random::<u32>() as usize
    }

    #[test]
    fn apr_cold_field_is_fixed() {
        let f = GaugeField::<f64>::cold(LatticeGeometry::hypercube(2).unwrap());
        for mesh in [gen_subgroup::<f64>(Subgroup::Octahedral), gen_edgewise_mesh(2).unwrap()] {
            assert_eq!(project_apr(&f, &mesh, AprObjective::Single).unwrap(), f);
            assert_eq!(project_apr(&f, &mesh, AprObjective::AllStaples).unwrap(), f);
        }
    }

    #[test]
    fn apr_fixes_fields_of_mesh_elements() {
        let mesh: Mesh<f64> = gen_subgroup(Subgroup::Icosahedral);
        let f = project_l2(&hot(3, 3), &mesh).unwrap();
        assert_eq!(project_apr(&f, &mesh, AprObjective::Single).unwrap(), f);
        assert_eq!(project_apr(&f, &mesh, AprObjective::AllStaples).unwrap(), f);
    }

    #[test]
    fn apr_output_on_mesh() {
        let mesh: Mesh<f64> = gen_edgewise_mesh(4).unwrap();
        let f = hot(3, 4);
        for obj in [AprObjective::Single, AprObjective::AllStaples] {
            let (p, idx) = project_apr_indices(&f, &mesh, obj).unwrap();
            for (q, i) in p.links().iter().zip(&idx) {
                assert_eq!(*q, mesh.elements()[*i as usize]);
            }
        }
    }

    #[test]
    fn first_link_minimizes_its_plaquette_deviation() {
        // link (0, X) is visited first, so its staple is still the original
        let mesh: Mesh<f64> = gen_subgroup(Subgroup::Icosahedral);
        let f = hot(3, 5);
        let p = project_apr(&f, &mesh, AprObjective::Single).unwrap();
        let r = f.plaquette_staple(0, 0, 1);
        let target = f.plaquette_re_trace(0, 0, 1).unwrap();
        let best = mesh
            .elements()
            .iter()
            .map(|m| ((*m * r).re_trace() - target).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(((p.link(0, 0) * r).re_trace() - target).abs() <= best + 1e-12);
    }

    #[test]
    fn all_staples_preserves_plaquettes_better_than_l2() {
        // a smooth field: small random rotations of the identity
        let mesh: Mesh<f64> = gen_subgroup(Subgroup::Icosahedral);
        let mut rng = seeded(6);
        let geom = LatticeGeometry::hypercube(3).unwrap();
        let links = (0..geom.n_links())
            .map(|_| {
                let h: Su2<f64> = crate::group::haar_sample(&mut rng);
                Su2::new(1.0 + 0.6 * h.a, 0.6 * h.b, 0.6 * h.c, 0.6 * h.d).reunitarized()
            })
            .collect();
        let f = GaugeField::from_links(geom, links).unwrap();
        let dev = |g: &GaugeField<f64>| -> f64 {
            let mut s = 0.0;
            for site in 0..f.geometry().volume() {
                for mu in 0..NDIM {
                    for nu in mu + 1..NDIM {
                        let d =
                            g.plaquette_re_trace(site, mu, nu).unwrap() - f.plaquette_re_trace(site, mu, nu).unwrap();
                        s += d * d;
                    }
                }
            }
            s
        };
        let apr = project_apr(&f, &mesh, AprObjective::AllStaples).unwrap();
        let l2 = project_l2(&f, &mesh).unwrap();
        assert!(dev(&apr) < dev(&l2), "{} vs {}", dev(&apr), dev(&l2));
    }

    #[test]
    fn objective_parsing() {
        assert_eq!("single".parse::<AprObjective>().unwrap(), AprObjective::Single);
        assert_eq!(AprObjective::default(), AprObjective::AllStaples);
        assert_eq!("all-staples".parse::<AprObjective>().unwrap(), AprObjective::AllStaples);
        assert!("both".parse::<AprObjective>().is_err());
    }
}
