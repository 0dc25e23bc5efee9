//! CSV, JSON and SVG emitters. All output is byte-deterministic for identical input.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// 17 significant digits, scientific notation, '.' decimal separator.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("cannot write {}: {e}", path.display()))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    fs::write(path, s + "\n").map_err(|e| io_err(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Linear map from [0, 1] onto a dark-blue → yellow ramp.
fn color(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let lo = [68.0, 1.0, 84.0];
    let hi = [253.0, 231.0, 37.0];
    let c: Vec<u8> = (0..3).map(|i| (lo[i] + t * (hi[i] - lo[i])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn range(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn normalize(v: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        (v - lo) / (hi - lo)
    } else {
        0.5
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const CELL: f64 = 4.0;
const MARGIN: f64 = 40.0;

/// Heatmap of a row-major table: one rectangle per value.
pub fn render_svg_heatmap(values: &[Vec<f64>], x_label: &str, y_label: &str) -> Result<String> {
    let rows = values.len();
    let cols = values.iter().map(|r| r.len()).max().unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("heatmap needs at least one value".into()));
    }
    let (lo, hi) = range(values.iter().flatten().cloned());
    let cw = (600.0 / cols as f64).clamp(1.0, 60.0);
    let ch = (400.0 / rows as f64).clamp(CELL, 60.0);
    let width = 2.0 * MARGIN + cw * cols as f64;
    let height = 2.0 * MARGIN + ch * rows as f64;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    for (i, row) in values.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                MARGIN + cw * j as f64,
                MARGIN + ch * i as f64,
                cw,
                ch,
                color(normalize(*v, lo, hi))
            )
            .unwrap();
        }
    }
    writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
        width / 2.0,
        height - 10.0,
        escape(x_label)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="12" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 12 {:.1})">{}</text>"#,
        height / 2.0,
        height / 2.0,
        escape(y_label)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{MARGIN:.1}" y="20" font-size="12">min={} max={}</text>"#,
        fmt_f64(lo),
        fmt_f64(hi)
    )
    .unwrap();
    s.push_str("</svg>\n");
    Ok(s)
}

/// Ring heatmap: one annular sector per value, starting at angle 0 and going counter-clockwise.
pub fn render_svg_ring(values: &[f64], label: &str) -> Result<String> {
    if values.is_empty() {
        return Err(Error::InvalidInput("ring needs at least one value".into()));
    }
    let (lo, hi) = range(values.iter().cloned());
    let (cx, cy, r0, r1) = (200.0, 200.0, 110.0, 170.0);
    let k = values.len();
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="400" height="420" viewBox="0 0 400 420">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    for (i, v) in values.iter().enumerate() {
        let a0 = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
        let a1 = 2.0 * std::f64::consts::PI * (i + 1) as f64 / k as f64;
        let pt = |r: f64, a: f64| (cx + r * a.cos(), cy - r * a.sin());
        let (x0, y0) = pt(r1, a0);
        let (x1, y1) = pt(r1, a1);
        let (x2, y2) = pt(r0, a1);
        let (x3, y3) = pt(r0, a0);
        let large = if a1 - a0 > std::f64::consts::PI { 1 } else { 0 };
        writeln!(
            s,
            r#"<path d="M {x0:.3} {y0:.3} A {r1:.1} {r1:.1} 0 {large} 0 {x1:.3} {y1:.3} L {x2:.3} {y2:.3} A {r0:.1} {r0:.1} 0 {large} 1 {x3:.3} {y3:.3} Z" fill="{}"/>"#,
            color(normalize(*v, lo, hi))
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="200" y="205" font-size="12" text-anchor="middle">{}</text>"#,
        escape(label)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="200" y="405" font-size="12" text-anchor="middle">min={} max={}</text>"#,
        fmt_f64(lo),
        fmt_f64(hi)
    )
    .unwrap();
    s.push_str("</svg>\n");
    Ok(s)
}

/// Square [0, 2π)² torus chart with probe dots and normal ticks.
pub fn render_torus_probes(probes: &[[f64; 2]], normals: &[Option<[f64; 2]>], title: &str) -> String {
    let size = 400.0;
    let scale = size / (2.0 * std::f64::consts::PI);
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#,
        w = size + 2.0 * MARGIN,
        h = size + 2.0 * MARGIN
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<rect x="{MARGIN:.1}" y="{MARGIN:.1}" width="{size:.1}" height="{size:.1}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    let map = |t1: f64, t2: f64| (MARGIN + t1 * scale, MARGIN + size - t2 * scale);
    for (i, p) in probes.iter().enumerate() {
        let (x, y) = map(p[0], p[1]);
        writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="black"/>"#).unwrap();
        if let Some(Some(nv)) = normals.get(i) {
            let len = 14.0;
            writeln!(
                s,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="red" stroke-width="1.5"/>"#,
                x - len * nv[0],
                y + len * nv[1],
                x + len * nv[0],
                y - len * nv[1]
            )
            .unwrap();
        }
    }
    writeln!(
        s,
        r#"<text x="{MARGIN:.1}" y="20" font-size="12">{}</text>"#,
        escape(title)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">theta1</text>"#,
        MARGIN + size / 2.0,
        size + 2.0 * MARGIN - 10.0
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}
