mod common;

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use contact_gabor::manifold::*;
use contact_gabor::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn constant_generic(g: DMatrix<f64>) -> RiemannianChart {
    let n = g.nrows();
    RiemannianChart::generic(
        vec![-10.0; n],
        vec![10.0; n],
        vec![false; n],
        Arc::new(move |_: &[f64]| g.clone()),
        Some(0.5),
    )
    .unwrap()
}

#[test]
fn volume_density_matches_cofactor_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=4 {
        for _ in 0..10 {
            let g = common::random_spd(&mut rng, n);
            let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| g[(i, j)]).collect()).collect();
            let oracle = common::cofactor_det(&rows).sqrt();
            let chart = constant_generic(g);
            let v = chart.volume_density(&chart.point(&vec![0.0; n]).unwrap()).unwrap();
            assert!((v - oracle).abs() < 1e-12 * oracle.max(1.0), "{v} {oracle}");
        }
    }
}

#[test]
fn volume_density_examples() {
    let t = RiemannianChart::flat_torus(&[1.0, 2.0]).unwrap();
    assert_eq!(t.volume_density(&t.point(&[0.3, 0.4]).unwrap()).unwrap(), 2.0);
    let s = RiemannianChart::round_sphere(1.0).unwrap();
    let v = s.volume_density(&s.point(&[PI / 2.0, 1.0]).unwrap()).unwrap();
    assert!((v - 1.0).abs() < 1e-15);
}

#[test]
fn raise_then_lower_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sphere = RiemannianChart::round_sphere(1.7).unwrap();
    let generic = constant_generic(common::random_spd(&mut rng, 3));
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let (chart, coords) = if k % 2 == 0 {
            (&sphere, vec![rng.gen_range(0.2..PI - 0.2), rng.gen_range(0.0..2.0 * PI)])
        } else {
            (&generic, (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect())
        };
        let b = chart.point(&coords).unwrap();
        let comps: Vec<f64> = (0..chart.dim()).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let eta = FiberVector::cotangent(b, comps.clone());
        assert!(eta.norm_squared(chart).unwrap() >= 0.0);
        let back = eta.flip_variance(chart).unwrap().flip_variance(chart).unwrap();
        assert_eq!(back.variance, Variance::Cotangent);
        for (x, y) in back.components.iter().zip(&comps) {
            worst = worst.max((x - y).abs());
        }
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn injectivity_radius_matches_shortest_loop() {
    for radii in [[1.0, 1.0], [1.0, 2.0], [0.5, 3.0]] {
        let chart = RiemannianChart::flat_torus(&radii).unwrap();
        // half the shortest nonzero lattice translate 2π·(k1 r1, k2 r2)
        let mut shortest = f64::INFINITY;
        for k1 in -3i32..=3 {
            for k2 in -3i32..=3 {
                if (k1, k2) != (0, 0) {
                    let l = 2.0 * PI * ((k1 as f64 * radii[0]).powi(2) + (k2 as f64 * radii[1]).powi(2)).sqrt();
                    shortest = shortest.min(l);
                }
            }
        }
        let r = chart.injectivity_radius(&chart.point(&[0.0, 0.0]).unwrap()).unwrap();
        assert!((r - shortest / 2.0).abs() < 1e-12);
    }
    let s = RiemannianChart::round_sphere(2.0).unwrap();
    let b = s.point(&[1.0, 1.0]).unwrap();
    let antipode = [PI - 1.0, 1.0 + PI];
    let p = sphere_point_to_r3(2.0, b.coords());
    let q = sphere_point_to_r3(2.0, &antipode);
    let dist = 2.0 * ((p[0] * q[0] + p[1] * q[1] + p[2] * q[2]) / 4.0).clamp(-1.0, 1.0).acos();
    assert!((s.injectivity_radius(&b).unwrap() - dist).abs() < 1e-12);
}

#[test]
fn generic_chart_has_constant_speed() {
    // conformally flat metric (1 + 0.3 sin x + 0.2 cos y)·Id
    let chart = RiemannianChart::generic(
        vec![-10.0, -10.0],
        vec![10.0, 10.0],
        vec![false, false],
        Arc::new(|x: &[f64]| DMatrix::identity(2, 2) * (1.0 + 0.3 * x[0].sin() + 0.2 * x[1].cos())),
        Some(1.0),
    )
    .unwrap();
    let b = chart.point(&[0.3, -0.2]).unwrap();
    let traj = chart.geodesic_trajectory(&b, &[0.8, 0.5], 64).unwrap();
    let speed = |x: &[f64], v: &[f64]| {
        let g = chart.metric_at_coords(x).unwrap();
        (0..2).map(|i| (0..2).map(|j| v[i] * g[(i, j)] * v[j]).sum::<f64>()).sum::<f64>()
    };
    let s0 = speed(&traj[0].0, &traj[0].1);
    for (x, v) in &traj {
        assert!((speed(x, v) - s0).abs() < 1e-6 * s0);
    }
}

#[test]
fn sphere_rk4_matches_great_circle() {
    let chart = RiemannianChart::round_sphere(1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut accepted = 0;
    while accepted < 100 {
        let b = chart.point(&[rng.gen_range(0.3..PI - 0.3), rng.gen_range(0.0..2.0 * PI)]).unwrap();
        let g = chart.metric_at(&b).unwrap();
        let dir = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let len = (dir[0] * dir[0] * g[(0, 0)] + dir[1] * dir[1] * g[(1, 1)]).sqrt();
        let t = rng.gen_range(0.0..0.9 * PI) / len;
        let v = [dir[0] * t, dir[1] * t];
        // the chart is singular at the poles; keep paths that stay 0.3 away from them
        let near_pole = (0..=64).any(|k| {
            let s = k as f64 / 64.0;
            let th = chart.exp_map(&b, &[v[0] * s, v[1] * s]).unwrap().coords()[0];
            !(0.3..=PI - 0.3).contains(&th)
        });
        if near_pole {
            continue;
        }
        accepted += 1;
        let exact = sphere_point_to_r3(1.0, chart.exp_map(&b, &v).unwrap().coords());
        let numeric = sphere_point_to_r3(1.0, chart.exp_map_numeric(&b, &v).unwrap().coords());
        let d: f64 = (0..3).map(|i| (exact[i] - numeric[i]).powi(2)).sum::<f64>().sqrt();
        assert!(d < 1e-6, "{d}");
    }
}

#[test]
fn leaving_a_generic_chart_is_reported() {
    let chart = RiemannianChart::generic(
        vec![0.0],
        vec![1.0],
        vec![false],
        Arc::new(|_: &[f64]| DMatrix::identity(1, 1)),
        Some(0.5),
    )
    .unwrap();
    let b = chart.point(&[0.5]).unwrap();
    assert!(matches!(chart.exp_map(&b, &[2.0]), Err(Error::ChartExit { .. })));
    assert!(matches!(chart.point(&[1.5]), Err(Error::ChartExit { .. })));
}

proptest! {
    #[test]
    fn flat_exp_is_additive(b1 in 0.0f64..TAU, b2 in 0.0f64..TAU,
                            v1 in -4.0f64..4.0, v2 in -4.0f64..4.0, w1 in -4.0f64..4.0, w2 in -4.0f64..4.0) {
        let chart = RiemannianChart::flat_torus(&[1.0, 1.0]).unwrap();
        let b = chart.point(&[b1, b2]).unwrap();
        let two_steps = chart.exp_map(&chart.exp_map(&b, &[v1, v2]).unwrap(), &[w1, w2]).unwrap();
        let one_step = chart.exp_map(&b, &[v1 + w1, v2 + w2]).unwrap();
        for (x, y) in two_steps.coords().iter().zip(one_step.coords()) {
            let d = (x - y).rem_euclid(2.0 * PI);
            prop_assert!(d.min(2.0 * PI - d) < 1e-12);
        }
    }

    #[test]
    fn dyadic_flat_exp_is_exactly_additive(b in 0u32..100, v in 0u32..100, w in 0u32..100) {
        // no wrap-around and dyadic values: every sum is exact
        let chart = RiemannianChart::flat_torus(&[1.0]).unwrap();
        let (b, v, w) = (b as f64 / 64.0, v as f64 / 64.0, w as f64 / 64.0);
        let p = chart.point(&[b]).unwrap();
        let two = chart.exp_map(&chart.exp_map(&p, &[v]).unwrap(), &[w]).unwrap();
        let one = chart.exp_map(&p, &[v + w]).unwrap();
        prop_assert_eq!(two.coords(), one.coords());
    }

    #[test]
    fn zero_vector_is_fixed(t in 0.1f64..3.0, f in 0.0f64..6.0) {
        let s = RiemannianChart::round_sphere(1.3).unwrap();
        let b = s.point(&[t, f]).unwrap();
        let e = s.exp_map(&b, &[0.0, 0.0]).unwrap();
        prop_assert_eq!(e.coords(), b.coords());
    }
}
