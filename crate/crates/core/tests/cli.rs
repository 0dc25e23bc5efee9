use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_contact-gabor");

fn run(cmd: &str, config: Option<&str>, dir: &Path, extra: &[&str]) -> (i32, PathBuf) {
    let out = dir.join("out");
    let mut c = Command::new(BIN);
    c.arg(cmd).arg("--out").arg(&out).args(extra).env_remove("CONTACT_GABOR_THREADS");
    if let Some(text) = config {
        let p = dir.join("run.toml");
        fs::write(&p, text).unwrap();
        c.arg("--config").arg(p);
    }
    let status = c.output().unwrap().status;
    (status.code().unwrap(), out)
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(p).unwrap();
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn detect_writes_three_artifacts() {
    let d = tempfile::tempdir().unwrap();
    let (code, out) = run("detect", None, d.path(), &[]);
    assert_eq!(code, 0);
    for f in ["normals.csv", "output_field.csv", "heatmap.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    assert_eq!(csv_rows(&out.join("output_field.csv")).len(), 8 * 720);
}

#[test]
fn detect_matches_golden_normals() {
    let d = tempfile::tempdir().unwrap();
    let (code, out) = run("detect", None, d.path(), &[]);
    assert_eq!(code, 0);
    let golden = csv_rows(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/halfspace_normals.csv"));
    let got = csv_rows(&out.join("normals.csv"));
    assert_eq!(golden.len(), got.len());
    for (g, r) in golden.iter().zip(&got) {
        assert_eq!(g.len(), r.len());
        for (a, b) in g.iter().zip(r) {
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(y)) => assert!((x - y).abs() <= 1e-6, "{x} {y}"),
                _ => assert_eq!(a, b),
            }
        }
    }
}

#[test]
fn oversized_grid_is_a_budget_failure() {
    let d = tempfile::tempdir().unwrap();
    let (code, out) = run("detect", Some("[grid]\nfiber_nodes = 1000000\n"), d.path(), &[]);
    assert_eq!(code, 1);
    assert_eq!(json(&out.join("error.json"))["kind"], "budget-exceeded");
}

#[test]
fn config_errors_exit_with_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run("frame-check", Some("[lattice\n"), d.path(), &[]).0, 2);
    assert_eq!(run("detect", Some("[grid]\nnodes = 3\n"), d.path(), &[]).0, 2);
    assert_eq!(run("detect", Some("[signal]\nkind = \"ellipse\"\n"), d.path(), &[]).0, 2);
    let missing = d.path().join("absent.toml");
    let status = Command::new(BIN).args(["detect", "--config"]).arg(&missing).arg("--out").arg(d.path()).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = Command::new(BIN)
        .args(["arm-demo", "--out"])
        .arg(d.path())
        .env("CONTACT_GABOR_THREADS", "many")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let status = Command::new(BIN).arg("no-such-command").output().unwrap().status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn frame_check_certifies_the_frame_side() {
    let d = tempfile::tempdir().unwrap();
    let (code, out) = run("frame-check", Some("[lattice]\ntranslation_scales = [0.7]\nmodulation_scales = [0.7]\n"), d.path(), &[]);
    assert_eq!(code, 0);
    let r = json(&out.join("frame_report.json"));
    assert_eq!(r["certificate"], "frame-certified");
    assert!(r["lower_bound"].as_f64().unwrap() > 0.05);
    assert_eq!(r["trace"].as_array().unwrap().len(), 3);
}

#[test]
fn frame_check_flags_the_critical_side() {
    let d = tempfile::tempdir().unwrap();
    let (code, out) = run("frame-check", Some("[lattice]\ntranslation_scales = [1.1]\nmodulation_scales = [1.1]\n"), d.path(), &[]);
    assert_eq!(code, 0);
    let r = json(&out.join("frame_report.json"));
    assert_eq!(r["certificate"], "unknown");
    let trace: Vec<f64> = r["trace"].as_array().unwrap().iter().map(|t| t["lower_bound"].as_f64().unwrap()).collect();
    assert!(trace.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn bargmann_defaults_pass() {
    let d = tempfile::tempdir().unwrap();
    let (code, out) = run("bargmann-verify", Some(""), d.path(), &[]);
    assert_eq!(code, 0);
    let r = json(&out.join("bargmann_suite.json"));
    assert_eq!(r["identities"].as_array().unwrap().len(), 6);
    assert_eq!(r["all_pass"], true);
}

#[test]
fn bargmann_reports_non_embedding_window() {
    let d = tempfile::tempdir().unwrap();
    let cfg = format!("[window]\nscalar = {}\n", 4.0 * std::f64::consts::PI);
    let (code, out) = run("bargmann-verify", Some(&cfg), d.path(), &[]);
    let r = json(&out.join("bargmann_suite.json"));
    let emb = r["identities"].as_array().unwrap().iter().find(|i| i["name"] == "embedding").unwrap();
    assert_eq!(emb["detail"]["configured"]["embeds"], false);
    assert!((emb["detail"]["configured"]["rho"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(code, if r["all_pass"] == true { 0 } else { 1 });
}

#[test]
fn arm_demo_default_and_wide_band() {
    for (cfg, width) in [(None, 0.3), (Some("[arm]\nband_width = 0.6\n"), 0.6)] {
        let d = tempfile::tempdir().unwrap();
        let (code, out) = run("arm-demo", cfg, d.path(), &[]);
        assert_eq!(code, 0, "width {width}");
        let rows = csv_rows(&out.join("arm_report.csv"));
        assert_eq!(rows.len(), 16);
        let good = rows
            .iter()
            .filter(|r| {
                let (x, y): (f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap());
                ((x + y).abs() / (2f64.sqrt() * (x * x + y * y).sqrt())).min(1.0).acos().to_degrees() < 5.0
            })
            .count();
        assert!(good >= 14, "{good}");
        assert!(out.join("arm_torus.svg").exists());
    }
}

#[test]
fn arm_demo_without_probes_writes_header_only() {
    let d = tempfile::tempdir().unwrap();
    let (code, out) = run("arm-demo", Some("[probes]\npoints = []\n"), d.path(), &[]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(out.join("arm_report.csv")).unwrap();
    assert_eq!(text.trim_end(), "probe_theta1,probe_theta2,normal_theta_component1,normal_theta_component2,contrast,flag");
}

#[test]
fn probe_grids_expand_in_order() {
    let d = tempfile::tempdir().unwrap();
    let cfg = "[probes]\nlower = [3.141592653589793, 0.5]\nupper = [3.141592653589793, 2.5]\ncounts = [1, 3]\n";
    let (code, out) = run("detect", Some(cfg), d.path(), &[]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out.join("normals.csv"));
    let b2: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(b2, vec![0.5, 1.5, 2.5]);
}
