use std::f64::consts::PI;
use std::sync::Arc;

use contact_gabor::bargmann::*;
use contact_gabor::lift::FiberGrid;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn suite_passes_at_default_window() {
    let r = verification_suite(&SuiteParams::default(), 7).unwrap();
    for id in &r.identities {
        println!("{} lhs={} rhs={} rel={} pass={}", id.name, id.lhs, id.rhs, id.relative_error, id.pass);
    }
    assert!(r.all_pass);
    let ratio = &r.identities.iter().find(|i| i.name == "bounded-ratio").unwrap().detail;
    let mean = ratio["mean"].as_f64().unwrap();
    assert!((mean - 2f64.powf(-0.25)).abs() < 1e-6, "{mean}");
}

#[test]
fn unit_constant_has_closed_form_norm() {
    let a = DMatrix::from_diagonal_element(1, 1, 2.0);
    let w = FockWeight::new(&a).unwrap();
    let z = ZGrid::new(1, 6.0, 61).unwrap();
    let one = vec![Complex64::new(1.0, 0.0); z.len()];
    let v = fock_inner_product(&one, &one, &w, &z).unwrap().re;
    let oracle = (PI / 2.0).sqrt();
    assert!((v - oracle).abs() < 1e-9, "{v} {oracle}");
}

#[test]
fn window_transform_at_origin() {
    let a = DMatrix::from_diagonal_element(1, 1, 3.0);
    let g = FiberGrid::new(1, 6.0, 161).unwrap();
    let psi: Vec<Complex64> = (0..g.len())
        .map(|k| {
            let x = g.point(k)[0];
            Complex64::new(-3.0 * x * x, -x).exp()
        })
        .collect();
    let b = bargmann_at(&psi, &g, 1.0, &a, &[0.0], &[0.0]);
    let oracle = (PI / 6.0).sqrt() * (-1.0f64 / 24.0).exp();
    assert!((b - oracle).norm() < 1e-10 * oracle);
}

#[test]
fn kernel_reproduces_itself() {
    let w = FockWeight::new(&DMatrix::from_diagonal_element(1, 1, PI)).unwrap();
    let z = ZGrid::new(1, 4.0, 41).unwrap();
    let z0 = [Complex64::new(0.4, -0.2)];
    let k: Vec<Complex64> = (0..z.len()).map(|i| reproducing_kernel(&z0, &w, z.point(i))).collect();
    let kk = fock_inner_product(&k, &k, &w, &z).unwrap();
    let direct = reproducing_kernel(&z0, &w, &z0);
    assert!((kk - direct).norm() < 1e-8 * direct.norm());
}

#[test]
fn transform_rejects_mismatched_grids() {
    let g = Arc::new(FiberGrid::new(1, 6.0, 11).unwrap());
    let z = ZGrid::new(1, 4.0, 5).unwrap();
    let a = DMatrix::from_diagonal_element(1, 1, PI);
    assert!(bargmann_transform(&vec![Complex64::new(0.0, 0.0); 3], &g, 1.0, &a, &z).is_err());
}

proptest! {
    #[test]
    fn embedding_radius_is_monotone(a in 0.1f64..20.0, s in 1.01f64..4.0) {
        let (r1, _) = embedding_check(&DMatrix::from_diagonal_element(2, 2, a)).unwrap();
        let (r2, _) = embedding_check(&DMatrix::from_diagonal_element(2, 2, a * s)).unwrap();
        prop_assert!(r2 > r1);
        prop_assert!((r1 - (a / PI).sqrt()).abs() < 1e-12 * r1.max(1.0));
    }

    #[test]
    fn p_form_matches_fock_exponent(v in -2.0f64..2.0, e in -2.0f64..2.0, a in 0.5f64..5.0) {
        let am = DMatrix::from_diagonal_element(1, 1, a);
        let w = FockWeight::new(&am).unwrap();
        let p = quadratic_form_p(&[v], &[e], &am);
        let frak = w.frak_p(&complexify(&[v], &[e]).z);
        prop_assert!((p.re + 2.0 * e * e - frak).abs() < 1e-12);
        prop_assert!((p.im - 2.0 * e * v).abs() < 1e-12);
    }
}
