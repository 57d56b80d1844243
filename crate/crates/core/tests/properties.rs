use proptest::prelude::*;

use su2dig::analysis::jackknife::{jackknife, mean};
use su2dig::analysis::locate_transition;
use su2dig::analysis::potential::log_linear_fit;
use su2dig::digitize::{
    fixed_point_truncate, gen_edgewise_mesh, gen_subgroup, project_apr, project_l2, AprObjective, FixedPointSpec, Mesh,
    Subgroup,
};
use su2dig::group::{haar_sample, Su2};
use su2dig::io::bitpack::{pack, packed_len, unpack};
use su2dig::io::config::{config_bytes, parse_config, ConfigHeader};
use su2dig::lattice::{GaugeField, LatticeGeometry};
use su2dig::monte_carlo::{overrelax_link, overrelax_sweep, Start};
use su2dig::observables::{avg_plaquette, loops6, polyakov, wilson_loops};
use su2dig::rng::seeded;

fn unit() -> impl Strategy<Value = Su2<f64>> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("away from the origin", |q| q.iter().map(|x| x * x).sum::<f64>() > 0.01)
        .prop_map(|q| {
            let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            Su2::new(q[0] / n, q[1] / n, q[2] / n, q[3] / n)
        })
}

fn close(x: Su2<f64>, y: Su2<f64>, tol: f64) -> bool {
    x.distance_sq(y).sqrt() < tol
}

fn hot(dims: [usize; 4], seed: u64) -> GaugeField<f64> {
    GaugeField::hot(LatticeGeometry::new(dims).unwrap(), &mut seeded(seed))
}

/// Field with plaquettes near 1, so projections and fits see realistic links.
fn smooth(dims: [usize; 4], seed: u64, spread: f64) -> GaugeField<f64> {
    let mut rng = seeded(seed);
    let mut f = GaugeField::<f64>::cold(LatticeGeometry::new(dims).unwrap());
    let omega: Vec<Su2<f64>> = (0..f.geometry().volume()).map(|_| haar_sample(&mut rng)).collect();
    for u in f.links_mut() {
        let h: Su2<f64> = haar_sample(&mut rng);
        let q = [1.0, spread * h.b, spread * h.c, spread * h.d];
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        *u = Su2::new(q[0] / n, q[1] / n, q[2] / n, q[3] / n);
    }
    f.gauge_transform(&omega).unwrap()
}

fn observables(f: &GaugeField<f64>) -> Vec<f64> {
    let (p1, p2, p3) = loops6(f);
    let mut v = vec![avg_plaquette(f), p1, p2, p3, polyakov(f)];
    for row in wilson_loops(f, 2, 2).unwrap() {
        v.extend(row);
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_axioms(g in unit(), h in unit(), k in unit()) {
        prop_assert!(close((g * h) * k, g * (h * k), 1e-12));
        prop_assert!(close(g * g.dagger(), Su2::identity(), 1e-12));
        prop_assert!(close(g * Su2::identity(), g, 1e-15));
        prop_assert!(((g * h).norm_sq() - 1.0).abs() < 1e-12);
        prop_assert!(((g * h).re_trace() - (h * g).re_trace()).abs() < 1e-12);
        prop_assert!(close((g * h).dagger(), h.dagger() * g.dagger(), 1e-12));
    }

    #[test]
    fn distance_is_bi_invariant(a in unit(), b in unit(), g in unit()) {
        let d = a.distance_sq(b);
        prop_assert!((d - (g * a).distance_sq(g * b)).abs() < 1e-12);
        prop_assert!((d - (a * g).distance_sq(b * g)).abs() < 1e-12);
        prop_assert!((d - b.distance_sq(a)).abs() == 0.0);
    }

    #[test]
    fn single_precision_tracks_double(g in unit(), h in unit()) {
        let p32 = g.cast::<f32>() * h.cast::<f32>();
        prop_assert!(close(p32.cast::<f64>(), g * h, 1e-6));
    }

    #[test]
    fn observables_are_gauge_invariant(seed in any::<u64>()) {
        let f = hot([4, 4, 4, 4], seed);
        let mut rng = seeded(seed ^ 0x5eed);
        let omega: Vec<Su2<f64>> = (0..f.geometry().volume()).map(|_| haar_sample(&mut rng)).collect();
        let g = f.gauge_transform(&omega).unwrap();
        for (x, y) in observables(&f).iter().zip(observables(&g)) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn observables_are_translation_invariant(seed in any::<u64>(), shift in prop::array::uniform4(-3i64..4)) {
        let f = hot([4, 5, 4, 6], seed);
        let g = f.translated(shift);
        for (x, y) in observables(&f).iter().zip(observables(&g)) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn spatial_axis_relabeling_preserves_observables(seed in any::<u64>(), perm in Just([0usize, 1, 2]).prop_shuffle()) {
        let f = hot([4, 5, 6, 4], seed);
        let g = f.permuted_axes([perm[0], perm[1], perm[2], 3]).unwrap();
        for (x, y) in observables(&f).iter().zip(observables(&g)) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn overrelaxation_preserves_action_and_is_an_involution(seed in any::<u64>()) {
        let mut f = hot([2, 2, 2, 2], seed);
        let s0 = f.action_density_sum();
        overrelax_sweep(&mut f);
        prop_assert!((f.action_density_sum() - s0).abs() <= 1e-8 * s0.max(1.0));
        // a single link reflected twice returns
        let once = overrelax_link(&f, 3, 1);
        let mut g = f.clone();
        g.set_link(3, 1, once);
        prop_assert!(close(overrelax_link(&g, 3, 1), f.link(3, 1), 1e-12));
    }

    #[test]
    fn fixed_point_bounds(g in unit(), p in 2u32..=30) {
        let spec = FixedPointSpec::new(p).unwrap();
        let t = fixed_point_truncate(g, spec);
        prop_assert!((t.norm_sq() - 1.0).abs() <= spec.norm_deviation_bound());
        prop_assert!(t.a.abs() <= g.a.abs() && t.b.abs() <= g.b.abs() && t.c.abs() <= g.c.abs());
        prop_assert_eq!(fixed_point_truncate(t, spec), t);
        let grid = (1u64 << (p - 1)) as f64;
        for x in [t.a, t.b, t.c, t.d] {
            prop_assert_eq!((x * grid).fract(), 0.0);
        }
    }

    #[test]
    fn l2_projection_picks_a_nearest_element(g in unit(), k in 1u32..=4) {
        let mesh: Mesh<f64> = gen_edgewise_mesh(k).unwrap();
        let q = mesh.elements()[mesh.nearest(g)];
        let best = mesh.elements().iter().map(|m| m.distance_sq(g)).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(q.distance_sq(g), best);
    }

    #[test]
    fn l2_commutes_with_subgroup_rotations(g in unit(), r in 0usize..120) {
        let mesh: Mesh<f64> = gen_subgroup(Subgroup::Icosahedral);
        let rot = mesh.elements()[r];
        let mut d: Vec<f64> = mesh.elements().iter().map(|m| m.distance_sq(g)).collect();
        d.sort_by(f64::total_cmp);
        prop_assume!(d[1] - d[0] > 1e-9);
        let direct = mesh.elements()[mesh.nearest(rot * g)];
        prop_assert!(close(direct, rot * mesh.elements()[mesh.nearest(g)], 1e-12));
    }

    #[test]
    fn projections_land_on_the_mesh_and_fix_mesh_fields(seed in any::<u64>()) {
        let mesh: Mesh<f64> = gen_subgroup(Subgroup::Octahedral);
        let f = smooth([2, 2, 2, 2], seed, 0.4);
        let l2 = project_l2(&f, &mesh).unwrap();
        let apr = project_apr(&f, &mesh, AprObjective::AllStaples).unwrap();
        for u in l2.links().iter().chain(apr.links()) {
            prop_assert!(mesh.index_of(*u).is_some());
        }
        prop_assert_eq!(project_apr(&l2, &mesh, AprObjective::AllStaples).unwrap(), l2.clone());
        prop_assert_eq!(project_apr(&l2, &mesh, AprObjective::Single).unwrap(), l2.clone());
        prop_assert_eq!(project_l2(&l2, &mesh).unwrap(), l2);
    }

    #[test]
    fn bitpack_round_trip(width in 1u32..=64, raw in prop::collection::vec(any::<u64>(), 0..200)) {
        let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        let values: Vec<u64> = raw.iter().map(|v| v & mask).collect();
        let bytes = pack(&values, width);
        prop_assert_eq!(bytes.len(), packed_len(values.len(), width));
        prop_assert_eq!(unpack(&bytes, width, values.len()).unwrap(), values);
    }

    #[test]
    fn config_images_round_trip(seed in any::<u64>(), p in 2u32..=20) {
        let f = hot([2, 2, 2, 2], seed);
        let h = ConfigHeader::quaternion([2, 2, 2, 2], 2.5, 7, seed, Start::Hot);
        let (_, back) = parse_config(&config_bytes(&h, &f, None).unwrap(), None).unwrap();
        prop_assert_eq!(&back, &f);

        let mesh: Mesh<f64> = gen_subgroup(Subgroup::Icosahedral);
        let q = project_l2(&f, &mesh).unwrap();
        let hi = h.indexed(&mesh);
        let (_, back) = parse_config(&config_bytes(&hi, &q, Some(&mesh)).unwrap(), Some(&mesh)).unwrap();
        prop_assert_eq!(back.links(), q.links());

        let spec = FixedPointSpec::new(p).unwrap();
        let t = su2dig::digitize::project_fixed_point(&f, spec);
        let hf = h.fixed_point(spec);
        let (_, back) = parse_config(&config_bytes(&hf, &t, None).unwrap(), None).unwrap();
        prop_assert_eq!(back.links(), t.links());
    }

    #[test]
    fn jackknife_of_the_mean(values in prop::collection::vec(-10.0f64..10.0, 2..60), shift in -5.0f64..5.0) {
        let e = jackknife(&values, mean).unwrap();
        prop_assert!((e.value - mean(&values)).abs() < 1e-12);
        let n = values.len() as f64;
        let m = mean(&values);
        let sd = (values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt();
        prop_assert!((e.error - sd / n.sqrt()).abs() < 1e-9 * (1.0 + sd));
        let moved: Vec<f64> = values.iter().map(|x| x + shift).collect();
        prop_assert!((jackknife(&moved, mean).unwrap().error - e.error).abs() < 1e-9);
        let flat = vec![values[0]; values.len()];
        prop_assert_eq!(jackknife(&flat, mean).unwrap().error, 0.0);
    }

    #[test]
    fn log_linear_fit_recovers_exponentials(amp in 0.01f64..10.0, v in 0.01f64..3.0, n in 3usize..8) {
        let ts: Vec<f64> = (1..=n).map(|t| t as f64).collect();
        let w: Vec<f64> = ts.iter().map(|t| amp * (-v * t).exp()).collect();
        let (ln_c, fit_v) = log_linear_fit(&ts, &w);
        prop_assert!((fit_v - v).abs() < 1e-10);
        prop_assert!((ln_c - amp.ln()).abs() < 1e-9);
    }

    #[test]
    fn transition_sits_on_the_steepest_rise(jump in 0usize..6, height in 0.1f64..1.0) {
        let betas: Vec<f64> = (0..7).map(|i| 2.0 + 0.1 * i as f64).collect();
        let values: Vec<f64> = (0..7).map(|i| if i > jump { height + 0.001 * i as f64 } else { 0.001 * i as f64 }).collect();
        let bc = locate_transition(&betas, &values).unwrap();
        prop_assert!((bc - (betas[jump] + betas[jump + 1]) / 2.0).abs() < 1e-12);
    }
}
