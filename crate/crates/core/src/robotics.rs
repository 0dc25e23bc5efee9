//! Planar n-bar arms: configuration tori, constraint densities and boundary mapping over probes.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gabor::{detect_boundary_normal, DetectionParams, WindowSpec};
use crate::lift::SignalOnB;
use crate::manifold::RiemannianChart;
use crate::report::fmt_f64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmSpec {
    pub lengths: Vec<f64>,
}

impl ArmSpec {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidInput("arm needs at least one link".into()));
        }
        if let Some(l) = lengths.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidInput(format!("link length {l} is not positive")));
        }
        Ok(ArmSpec { lengths })
    }

    pub fn links(&self) -> usize {
        self.lengths.len()
    }
}

/// Flat torus of radii 1: one periodic joint angle per link.
pub fn arm_config_space(spec: &ArmSpec) -> Result<RiemannianChart> {
    RiemannianChart::flat_torus(&vec![1.0; spec.links()])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WorkspaceMode {
    /// Σ ℓ_k θ_k promoted to (value, 0).
    LinearSum,
    /// End effector Σ ℓ_k (cos Θ_k, sin Θ_k) with Θ_k = θ_1 + ... + θ_k.
    ForwardKinematics,
}

pub fn workspace_map(spec: &ArmSpec, theta: &[f64], mode: WorkspaceMode) -> Result<[f64; 2]> {
    if theta.len() != spec.links() {
        return Err(Error::ShapeMismatch(format!(
            "{} joint angles for {} links",
            theta.len(),
            spec.links()
        )));
    }
    Ok(match mode {
        WorkspaceMode::LinearSum => [spec.lengths.iter().zip(theta).map(|(l, t)| l * t).sum(), 0.0],
        WorkspaceMode::ForwardKinematics => {
            let mut cum = 0.0;
            let mut out = [0.0, 0.0];
            for (l, t) in spec.lengths.iter().zip(theta) {
                cum += t;
                out[0] += l * cum.cos();
                out[1] += l * cum.sin();
            }
            out
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    Indicator,
    Band,
    Grid,
}

/// A probability density on the configuration torus.
#[derive(Clone, Debug)]
pub struct ConstraintDensity {
    pub signal: SignalOnB,
    /// Mass of `signal` before normalization.
    pub mass: f64,
    pub kind: ConstraintKind,
    pub dim: usize,
}

/// Cap on midpoint cells used to normalize a density.
pub const MAX_NORMALIZATION_CELLS: u128 = 10_000_000;

/// Midpoint rule over [0, 2π)^n, 1024 cells per axis or fewer to stay under the cell cap.
pub fn torus_integral(signal: &SignalOnB, dim: usize) -> Result<f64> {
    let per_axis = ((MAX_NORMALIZATION_CELLS as f64).powf(1.0 / dim as f64).floor() as usize).min(1024);
    if per_axis < 8 {
        return Err(Error::budget(
            "normalization cells",
            8u128.pow(dim as u32),
            MAX_NORMALIZATION_CELLS,
        ));
    }
    let h = 2.0 * PI / per_axis as f64;
    let slab = per_axis.pow(dim as u32 - 1);
    // one slab per first-axis cell, summed in order so the result does not depend on the pool size
    let slabs: Vec<f64> = (0..per_axis)
        .into_par_iter()
        .map(|i0| {
            let mut b = vec![0.0; dim];
            b[0] = (i0 as f64 + 0.5) * h;
            let mut acc = 0.0;
            for flat in 0..slab {
                let mut r = flat;
                for k in (1..dim).rev() {
                    b[k] = ((r % per_axis) as f64 + 0.5) * h;
                    r /= per_axis;
                }
                acc += signal.eval(&b);
            }
            acc
        })
        .collect();
    let sum: f64 = slabs.iter().sum();
    Ok(sum * h.powi(dim as i32))
}

impl ConstraintDensity {
    pub fn new(signal: SignalOnB, kind: ConstraintKind, dim: usize) -> Result<Self> {
        let mass = torus_integral(&signal, dim)?;
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::DegenerateConstraint);
        }
        Ok(ConstraintDensity {
            signal,
            mass,
            kind,
            dim,
        })
    }

    /// Complement (`complement = true`) or interior of a band around ⟨normal, θ⟩ ≡ level.
    pub fn band(dim: usize, normal: Vec<f64>, level: f64, width: f64, complement: bool) -> Result<Self> {
        Self::new(SignalOnB::torus_band(normal, level, width, complement), ConstraintKind::Band, dim)
    }
}

/// The constraint as a normalized signal (integral 1 over the torus).
pub fn constraint_to_signal(c: &ConstraintDensity) -> SignalOnB {
    c.signal.clone().scaled(1.0 / c.mass)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeResult {
    pub probe: Vec<f64>,
    /// Unit normal in θ coordinates, sign fixed so the first nonzero component is positive.
    pub normal: Vec<f64>,
    pub contrast: f64,
    pub no_boundary: bool,
}

impl ProbeResult {
    pub fn flag(&self) -> &'static str {
        if self.no_boundary {
            "no-boundary"
        } else {
            "boundary"
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub rows: Vec<ProbeResult>,
}

impl PipelineReport {
    pub fn csv_header(dim: usize) -> Vec<String> {
        let mut h: Vec<String> = (1..=dim).map(|k| format!("probe_theta{k}")).collect();
        h.extend((1..=dim).map(|k| format!("normal_theta_component{k}")));
        h.push("contrast".into());
        h.push("flag".into());
        h
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                let mut row: Vec<String> = r.probe.iter().map(|x| fmt_f64(*x)).collect();
                row.extend(r.normal.iter().map(|x| fmt_f64(*x)));
                row.push(fmt_f64(r.contrast));
                row.push(r.flag().to_string());
                row
            })
            .collect()
    }
}

fn canonical_sign(mut v: Vec<f64>) -> Vec<f64> {
    if let Some(first) = v.iter().find(|x| **x != 0.0) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

/// Runs normal detection at every probe; rows follow probe order.
pub fn boundary_map_pipeline(
    c: &ConstraintDensity,
    probes: &[Vec<f64>],
    window: &WindowSpec,
    params: &DetectionParams,
) -> Result<PipelineReport> {
    let chart = RiemannianChart::flat_torus(&vec![1.0; c.dim])?;
    let signal = constraint_to_signal(c);
    let rows = probes
        .par_iter()
        .map(|probe| {
            let b = chart.point(probe)?;
            let d = detect_boundary_normal(&signal, &chart, &b, window, params)?;
            Ok(ProbeResult {
                probe: b.coords().to_vec(),
                normal: canonical_sign(d.normal),
                contrast: d.contrast,
                no_boundary: d.no_boundary,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PipelineReport { rows })
}

/// Sixteen probes on the two edges of a width-`width` band around θ1 + θ2 ≡ 0.
pub fn anti_diagonal_probes(width: f64) -> Vec<Vec<f64>> {
    let off = 0.5 * width / 2f64.sqrt();
    let mut out = Vec::with_capacity(16);
    for k in 0..8 {
        let t = 2.0 * PI * k as f64 / 8.0;
        for s in [1.0, -1.0] {
            out.push(vec![
                (t + s * off).rem_euclid(2.0 * PI),
                (-t + s * off).rem_euclid(2.0 * PI),
            ]);
        }
    }
    out
}

/// Parameters the arm demo uses unless overridden: A = Id and 121 fiber nodes per axis.
pub fn arm_demo_defaults() -> (WindowSpec, DetectionParams) {
    (
        WindowSpec::scalar(2, 1.0),
        DetectionParams {
            fiber_nodes: 121,
            ..DetectionParams::default()
        },
    )
}

/// Unoriented angle in degrees between two nonzero vectors.
pub fn unoriented_angle_deg(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot.abs() / (na * nb)).clamp(0.0, 1.0).acos().to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arm_validation() {
        assert!(ArmSpec::new(vec![]).is_err());
        assert!(ArmSpec::new(vec![1.0, 0.0]).is_err());
        assert!(ArmSpec::new(vec![1.0, f64::NAN]).is_err());
        assert_eq!(arm_config_space(&ArmSpec::new(vec![1.0; 3]).unwrap()).unwrap().dim(), 3);
    }

    #[test]
    fn workspace_examples() {
        let arm = ArmSpec::new(vec![1.0, 1.0]).unwrap();
        let fk = WorkspaceMode::ForwardKinematics;
        assert_eq!(workspace_map(&arm, &[0.0, 0.0], fk).unwrap(), [2.0, 0.0]);
        let folded = workspace_map(&arm, &[0.0, PI], fk).unwrap();
        assert!(folded[0].abs() < 1e-15 && folded[1].abs() < 1e-15);
        assert_eq!(workspace_map(&arm, &[0.0, 0.0], WorkspaceMode::LinearSum).unwrap(), [0.0, 0.0]);
        assert!(workspace_map(&arm, &[0.0], fk).is_err());
    }

    #[test]
    fn empty_constraint_is_degenerate() {
        let r = ConstraintDensity::new(SignalOnB::constant(0.0), ConstraintKind::Indicator, 2);
        assert_eq!(r.unwrap_err(), Error::DegenerateConstraint);
    }

    #[test]
    fn probe_layout() {
        let p = anti_diagonal_probes(0.3);
        assert_eq!(p.len(), 16);
        let band = SignalOnB::torus_band(vec![1.0, 1.0], 0.0, 0.3 * (1.0 + 1e-9), false);
        let band_in = SignalOnB::torus_band(vec![1.0, 1.0], 0.0, 0.3 * (1.0 - 1e-9), false);
        for q in &p {
            assert_eq!(band.eval(q), 1.0);
            assert_eq!(band_in.eval(q), 0.0);
        }
    }
}
