use std::f64::consts::PI;
use std::ffi::c_char;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use contact_gabor_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { cg_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf.iter().take(n.min(255)).map(|c| *c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn certificate_cases() {
    let b = [0.7, 0.7];
    let c = [0.7, -0.7];
    let wide = [1.2, 0.7];
    unsafe {
        assert_eq!(cg_frame_certificate(b.as_ptr(), c.as_ptr(), 2, true), CgCertificate::FrameCertified);
        assert_eq!(cg_frame_certificate(wide.as_ptr(), wide.as_ptr(), 2, true), CgCertificate::Unknown);
        assert_eq!(cg_frame_certificate(b.as_ptr(), b.as_ptr(), 2, false), CgCertificate::Unknown);
        assert_eq!(cg_frame_certificate(ptr::null(), b.as_ptr(), 2, true), CgCertificate::NotApplicable);
    }
}

#[test]
fn embedding_threshold() {
    // the embedding is an isometry exactly at A = πI and expands beyond it
    let (mut rho, mut ok) = (0.0, false);
    let at = [PI];
    let above = [2.0 * PI];
    unsafe {
        assert_eq!(cg_embedding_check(at.as_ptr(), 1, &mut rho, &mut ok), CgStatus::Ok);
        assert!((rho - 1.0).abs() < 1e-12 && ok);
        assert_eq!(cg_embedding_check(above.as_ptr(), 1, &mut rho, &mut ok), CgStatus::Ok);
        assert!((rho - 2f64.sqrt()).abs() < 1e-12 && !ok);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut chart: *mut CgChart = ptr::null_mut();
    let bad = [1.0, -1.0];
    unsafe {
        assert_eq!(cg_chart_flat_torus(bad.as_ptr(), 2, &mut chart), CgStatus::InvalidInput);
        assert!(chart.is_null());
        assert!(last_error().contains("radii"));
        assert_eq!(cg_chart_flat_torus(bad.as_ptr(), 2, ptr::null_mut()), CgStatus::InvalidInput);
        assert_eq!(cg_chart_flat_torus(ptr::null(), 2, &mut chart), CgStatus::NullPointer);
        assert_eq!(cg_chart_round_sphere(1.0, &mut chart), CgStatus::Ok);
        assert_eq!(last_error(), "");
        assert_eq!(cg_chart_dim(chart), 2);
        cg_chart_free(chart);

        let mut w: *mut CgWindow = ptr::null_mut();
        let indefinite = [1.0, 0.0, 0.0, -1.0];
        assert_eq!(cg_window_matrix(indefinite.as_ptr(), 2, &mut w), CgStatus::WindowDegenerate);
        let asym = [1.0, 0.5, 0.0, 1.0];
        assert_ne!(cg_window_matrix(asym.as_ptr(), 2, &mut w), CgStatus::Ok);
        assert!(w.is_null());
        cg_window_free(ptr::null_mut());
    }
}

#[test]
fn half_space_normal_through_handles() {
    unsafe {
        let mut chart = ptr::null_mut();
        let mut signal = ptr::null_mut();
        let mut window = ptr::null_mut();
        let radii = [1.0, 1.0];
        let normal = [1.0, 0.0];
        assert_eq!(cg_chart_flat_torus(radii.as_ptr(), 2, &mut chart), CgStatus::Ok);
        assert_eq!(cg_signal_half_space(normal.as_ptr(), 2, PI, &mut signal), CgStatus::Ok);
        assert_eq!(cg_window_scalar(2, 1.0, &mut window), CgStatus::Ok);

        let mut v = 0.0;
        let inside = [2.0, 1.0];
        assert_eq!(cg_signal_eval(signal, inside.as_ptr(), 2, &mut v), CgStatus::Ok);
        assert_eq!(v, 1.0);

        let b = [PI, 1.0];
        let mut p = [0.0; 2];
        let (mut contrast, mut none) = (0.0, true);
        let s = cg_detect_boundary(signal, chart, window, b.as_ptr(), 2, 0, p.as_mut_ptr(), &mut contrast, &mut none);
        assert_eq!(s, CgStatus::Ok);
        assert!(p[0].abs() > 1.0 - 1e-9 && p[1].abs() < 1e-6, "{p:?}");
        assert!(contrast > 0.05 && !none);

        let s = cg_detect_boundary(signal, chart, window, b.as_ptr(), 1, 0, p.as_mut_ptr(), &mut contrast, &mut none);
        assert_eq!(s, CgStatus::ShapeMismatch);

        cg_signal_free(signal);
        cg_window_free(window);
        cg_chart_free(chart);
    }
}

#[test]
fn circle_frame_bounds() {
    unsafe {
        let mut chart = ptr::null_mut();
        let mut window = ptr::null_mut();
        assert_eq!(cg_chart_flat_torus([1.0].as_ptr(), 1, &mut chart), CgStatus::Ok);
        assert_eq!(cg_window_scalar(1, PI, &mut window), CgStatus::Ok);
        let (mut lo, mut hi, mut cert) = (0.0, 0.0, CgCertificate::NotApplicable);
        assert_eq!(cg_frame_bounds_1d(chart, window, 0.0, 0.7, 0.7, 4, &mut lo, &mut hi, &mut cert), CgStatus::Ok);
        assert!(lo > 0.05 && hi >= lo);
        assert_eq!(cert, CgCertificate::FrameCertified);
        let mut sphere = ptr::null_mut();
        assert_eq!(cg_chart_round_sphere(1.0, &mut sphere), CgStatus::Ok);
        let s = cg_frame_bounds_1d(sphere, window, 0.0, 0.7, 0.7, 4, &mut lo, &mut hi, &mut cert);
        assert_eq!(s, CgStatus::ShapeMismatch);
        cg_chart_free(sphere);
        cg_window_free(window);
        cg_chart_free(chart);
    }
}

/// Compiles a small C program against the generated header and the static library.
#[test]
fn header_compiles_and_links_from_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libcontact_gabor_ffi.a");
    if !lib.exists() {
        eprintln!("static library not built at {}; skipping", lib.display());
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "contact_gabor.h"
int main(void) {
    double b[2] = {0.7, 0.7}, c[2] = {-0.7, 0.7};
    if (cg_frame_certificate(b, c, 2, true) != CG_CERTIFICATE_FRAME_CERTIFIED) return 1;
    CgChart *chart = NULL;
    double bad = -1.0;
    if (cg_chart_flat_torus(&bad, 1, &chart) != CG_STATUS_INVALID_INPUT) return 2;
    char msg[128];
    if (cg_last_error_message(msg, sizeof msg) == 0) return 3;
    double rho; bool ok;
    double a = 3.141592653589793;
    if (cg_embedding_check(&a, 1, &rho, &ok) != CG_STATUS_OK || !ok) return 4;
    printf("ok %.6f\n", rho);
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.join("smoke");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok 1.000000");
    let _ = std::fs::remove_dir_all(dir);
}

fn which_cc() -> Result<String, ()> {
    for c in ["cc", "gcc", "clang"] {
        if Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(c.to_string());
        }
    }
    Err(())
}

fn tempfile_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("cg-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
