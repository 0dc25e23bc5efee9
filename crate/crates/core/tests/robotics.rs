use std::f64::consts::PI;

use contact_gabor::robotics::*;
use proptest::prelude::*;

fn run_band(width: f64) -> PipelineReport {
    let c = ConstraintDensity::band(2, vec![1.0, 1.0], 0.0, width, true).unwrap();
    let (window, params) = arm_demo_defaults();
    boundary_map_pipeline(&c, &anti_diagonal_probes(width), &window, &params).unwrap()
}

#[test]
fn band_edge_normals_at_two_widths() {
    for width in [0.3, 0.6] {
        let r = run_band(width);
        assert_eq!(r.rows.len(), 16);
        for row in &r.rows {
            let err = unoriented_angle_deg(&row.normal, &[1.0, 1.0]);
            println!("w={width} probe={:?} err={err:.3} contrast={:.4}", row.probe, row.contrast);
            assert!(err < 5.0, "{err}");
            assert!(!row.no_boundary);
        }
    }
}

#[test]
fn far_probe_reports_no_boundary() {
    let c = ConstraintDensity::band(2, vec![1.0, 1.0], 0.0, 0.3, true).unwrap();
    let (window, params) = arm_demo_defaults();
    let r = boundary_map_pipeline(&c, &[vec![PI / 2.0, PI / 2.0]], &window, &params).unwrap();
    println!("far contrast {}", r.rows[0].contrast);
    assert!(r.rows[0].no_boundary);
    assert_eq!(r.rows[0].flag(), "no-boundary");
}

#[test]
fn band_mass_matches_closed_form() {
    // complement of a band of width w around θ1 + θ2 ≡ 0 has area (2π)² − 2π·√2·w
    for w in [0.3, 0.6, 1.0] {
        let c = ConstraintDensity::band(2, vec![1.0, 1.0], 0.0, w, true).unwrap();
        let exact = 4.0 * PI * PI - 2.0 * PI * 2f64.sqrt() * w;
        assert!((c.mass - exact).abs() < 1e-3 * exact, "{} {}", c.mass, exact);
        let total = torus_integral(&constraint_to_signal(&c), 2).unwrap();
        assert!((total - 1.0).abs() < 1e-3);
    }
}

#[test]
fn ball_indicator_normalizes_to_inverse_area() {
    let chart = contact_gabor::manifold::RiemannianChart::flat_torus(&[1.0, 1.0]).unwrap();
    let s = contact_gabor::lift::SignalOnB::ball(&chart, vec![1.0, 2.0], 0.8);
    let c = ConstraintDensity::new(s, ConstraintKind::Indicator, 2).unwrap();
    let area = PI * 0.64;
    assert!((c.mass - area).abs() < 1e-3 * area);
    let v = constraint_to_signal(&c).eval(&[1.0, 2.0]);
    assert!((v - 1.0 / area).abs() < 1e-3 / area);
}

#[test]
fn csv_shape() {
    let r = run_band(0.3);
    assert_eq!(PipelineReport::csv_header(2).join(","),
        "probe_theta1,probe_theta2,normal_theta_component1,normal_theta_component2,contrast,flag");
    assert_eq!(r.csv_rows().len(), 16);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]
    #[test]
    fn shifting_by_full_turns_changes_nothing(k1 in -1i32..=2, k2 in -1i32..=2, i in 0usize..16) {
        let c = ConstraintDensity::band(2, vec![1.0, 1.0], 0.0, 0.3, true).unwrap();
        let (window, params) = arm_demo_defaults();
        // dyadic coordinates make θ + 2πk − 2πk round-trip exactly
        let p: Vec<f64> = anti_diagonal_probes(0.3)[i].iter().map(|x| (x * 64.0).round() / 64.0).collect();
        let shifted = vec![p[0] + 2.0 * PI * k1 as f64, p[1] + 2.0 * PI * k2 as f64];
        let a = boundary_map_pipeline(&c, &[p], &window, &params).unwrap();
        let b = boundary_map_pipeline(&c, &[shifted], &window, &params).unwrap();
        let err = unoriented_angle_deg(&a.rows[0].normal, &b.rows[0].normal);
        prop_assert_eq!(&a.rows[0].normal, &b.rows[0].normal, "{}", err);
        prop_assert_eq!(a.rows[0].contrast, b.rows[0].contrast);
    }

    #[test]
    fn forward_kinematics_reach(t1 in -PI..PI, t2 in -PI..PI, l1 in 0.1f64..3.0, l2 in 0.1f64..3.0) {
        let arm = ArmSpec::new(vec![l1, l2]).unwrap();
        let e = workspace_map(&arm, &[t1, t2], WorkspaceMode::ForwardKinematics).unwrap();
        let r = (e[0] * e[0] + e[1] * e[1]).sqrt();
        prop_assert!(r <= l1 + l2 + 1e-12 && r >= (l1 - l2).abs() - 1e-12);
        let law = (l1 * l1 + l2 * l2 + 2.0 * l1 * l2 * t2.cos()).sqrt();
        prop_assert!((r - law).abs() < 1e-9);
    }
}
