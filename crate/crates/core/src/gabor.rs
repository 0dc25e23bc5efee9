//! Windows, time-frequency shifts, the output function, boundary detection and frame bounds.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contact::{CospherePoint, Provenance};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_lattice_points, lattice_point_count, LatticeFrame, LatticeSpec};
use crate::lift::{lift_samples, CutoffSpec, FiberGrid, LiftedFiberSignal, SignalOnB};
use crate::manifold::{ManifoldPoint, RiemannianChart};
use crate::quadrature::{gauss_legendre_symmetric, multi_index, sphere_directions, tensor_size};

pub type TensorFieldFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

#[derive(Clone)]
pub enum WindowTensor {
    Constant(DMatrix<f64>),
    Field(TensorFieldFn),
}

impl std::fmt::Debug for WindowTensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WindowTensor::Constant(m) => write!(f, "Constant({m:?})"),
            WindowTensor::Field(_) => write!(f, "Field"),
        }
    }
}

/// The tensor field A of the window Ψ(V) = exp(−VᵗAV − i⟨η_p, V⟩).
#[derive(Clone, Debug)]
pub struct WindowSpec {
    pub tensor: WindowTensor,
    pub floor: f64,
}

impl WindowSpec {
    pub const DEFAULT_FLOOR: f64 = 1e-6;

    /// A = a·Id.
    pub fn scalar(n: usize, a: f64) -> Self {
        Self::matrix(DMatrix::identity(n, n) * a)
    }

    pub fn matrix(a: DMatrix<f64>) -> Self {
        WindowSpec {
            tensor: WindowTensor::Constant(a),
            floor: Self::DEFAULT_FLOOR,
        }
    }

    /// The default A = πI.
    pub fn standard(n: usize) -> Self {
        Self::scalar(n, PI)
    }

    /// A at b, checked for symmetry and the eigenvalue floor.
    pub fn at(&self, b: &[f64]) -> Result<DMatrix<f64>> {
        let a = match &self.tensor {
            WindowTensor::Constant(m) => m.clone(),
            WindowTensor::Field(f) => f(b),
        };
        let n = b.len();
        let bad = |min_eigenvalue: f64| Error::WindowDegenerate {
            point: b.to_vec(),
            min_eigenvalue,
        };
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::ShapeMismatch(format!("window tensor must be {n}x{n}")));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(bad(f64::NAN));
        }
        let scale = a.amax().max(f64::MIN_POSITIVE);
        if (&a - a.transpose()).amax() > 1e-12 * scale {
            return Err(bad(f64::NAN));
        }
        let min = a.clone().symmetric_eigen().eigenvalues.min();
        if !(min >= self.floor) {
            return Err(bad(min));
        }
        Ok(a)
    }
}

fn quad(a: &DMatrix<f64>, v: &[f64]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += v[i] * a[(i, j)] * v[j];
        }
    }
    s
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ψ(V) with a precomputed tensor.
pub fn window_with(a: &DMatrix<f64>, p: &[f64], v: &[f64]) -> Complex64 {
    Complex64::new(-quad(a, v), -dot(p, v)).exp()
}

pub fn window_eval(spec: &WindowSpec, m: &CospherePoint, v: &[f64]) -> Result<Complex64> {
    let a = spec.at(m.base.coords())?;
    Ok(window_with(&a, &m.p, v))
}

/// M_ξ T_W Ψ.
#[derive(Clone, Debug, PartialEq)]
pub struct GaborAtom {
    pub point: CospherePoint,
    pub translation: Vec<f64>,
    pub modulation: Vec<f64>,
}

/// e^{−2πi⟨ξ,V⟩}·Ψ(V − W) with a precomputed tensor.
pub fn tf_shift_with(a: &DMatrix<f64>, p: &[f64], w: &[f64], xi: &[f64], v: &[f64]) -> Complex64 {
    let d: Vec<f64> = v.iter().zip(w).map(|(x, y)| x - y).collect();
    let phase = -2.0 * PI * dot(xi, v) - dot(p, &d);
    Complex64::new(-quad(a, &d), phase).exp()
}

pub fn tf_shift_eval(spec: &WindowSpec, atom: &GaborAtom, v: &[f64]) -> Result<Complex64> {
    let a = spec.at(atom.point.base.coords())?;
    Ok(tf_shift_with(&a, &atom.point.p, &atom.translation, &atom.modulation, v))
}

/// ⟨s, M_ξT_WΨ⟩ = ∫ s·conj(atom) dvol.
pub fn gabor_coefficient(s: &LiftedFiberSignal, atom: &GaborAtom, spec: &WindowSpec) -> Result<Complex64> {
    if s.point.base != atom.point.base || s.point.dim() != atom.translation.len() {
        return Err(Error::ShapeMismatch("atom and signal live on different fibers".into()));
    }
    let a = spec.at(s.point.base.coords())?;
    let grid = &s.grid;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..grid.len() {
        let t = tf_shift_with(&a, &atom.point.p, &atom.translation, &atom.modulation, grid.point(i));
        acc += s.samples[i] * t.conj() * grid.weights[i];
    }
    Ok(acc * s.volume)
}

/// Quadrature of I(f)·Ψ with everything except the phase e^{−i⟨p,V⟩} folded into one weight per node.
#[derive(Clone, Debug)]
pub struct OutputEngine {
    pub base: ManifoldPoint,
    dim: usize,
    points: Vec<f64>,
    weighted: Vec<f64>,
    /// Cholesky factor of g; maps coframe-unit vectors to g*-unit covectors.
    coframe: DMatrix<f64>,
}

impl OutputEngine {
    pub fn new(
        f: &SignalOnB,
        chart: &RiemannianChart,
        b: &ManifoldPoint,
        spec: &WindowSpec,
        grid: &FiberGrid,
        cutoff: &CutoffSpec,
    ) -> Result<Self> {
        let samples = lift_samples(f, chart, b, grid, cutoff)?;
        let a = spec.at(b.coords())?;
        let vol = chart.volume_density(b)?;
        let weighted: Vec<f64> = (0..grid.len())
            .map(|i| samples[i] * grid.weights[i] * vol * (-quad(&a, grid.point(i))).exp())
            .collect();
        let coframe = chart
            .metric_at(b)?
            .cholesky()
            .ok_or_else(|| Error::MetricDegenerate {
                point: b.coords().to_vec(),
            })?
            .unpack();
        // drop nodes that contribute nothing
        let mut points = Vec::new();
        let mut kept = Vec::new();
        for (i, w) in weighted.iter().enumerate() {
            if *w != 0.0 {
                points.extend_from_slice(grid.point(i));
                kept.push(*w);
            }
        }
        Ok(OutputEngine {
            base: b.clone(),
            dim: chart.dim(),
            points,
            weighted: kept,
            coframe,
        })
    }

    /// O_b(f, η_p) for a g*-unit covector p.
    pub fn value(&self, p: &[f64]) -> Complex64 {
        let n = self.dim;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, w) in self.weighted.iter().enumerate() {
            let v = &self.points[k * n..(k + 1) * n];
            let (s, c) = dot(p, v).sin_cos();
            re += w * c;
            im -= w * s;
        }
        Complex64::new(re, im)
    }

    /// Covector with coframe components `u` (a Euclidean unit vector).
    pub fn covector(&self, u: &[f64]) -> Vec<f64> {
        (&self.coframe * DVector::from_column_slice(u)).as_slice().to_vec()
    }

    /// |O(p) − O(−p)|/2, the part of O that is odd in the direction.
    pub fn odd_part(&self, p: &[f64]) -> f64 {
        let neg: Vec<f64> = p.iter().map(|x| -x).collect();
        0.5 * (self.value(p) - self.value(&neg)).norm()
    }
}

pub fn output_function(
    f: &SignalOnB,
    chart: &RiemannianChart,
    b: &ManifoldPoint,
    p: &[f64],
    spec: &WindowSpec,
    fiber_nodes: usize,
) -> Result<Complex64> {
    let cutoff = CutoffSpec::at(chart, b)?;
    let grid = FiberGrid::for_cutoff(chart.dim(), &cutoff, fiber_nodes)?;
    let m = CospherePoint::new(chart, b.clone(), p.to_vec())?;
    Ok(OutputEngine::new(f, chart, b, spec, &grid, &cutoff)?.value(&m.p))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionParams {
    pub fiber_nodes: usize,
    pub directions: usize,
    pub threshold: f64,
    pub overshoot: f64,
    pub refine_steps: usize,
    pub max_fiber_nodes: u128,
}

impl Default for DetectionParams {
    fn default() -> Self {
        DetectionParams {
            fiber_nodes: FiberGrid::DEFAULT_NODES,
            directions: 720,
            threshold: 0.05,
            overshoot: CutoffSpec::DEFAULT_OVERSHOOT,
            refine_steps: 10,
            max_fiber_nodes: crate::lift::DEFAULT_MAX_FIBER_NODES,
        }
    }
}

/// O_b sampled over a direction scan.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputField {
    pub base: Vec<f64>,
    /// g*-unit covectors.
    pub directions: Vec<Vec<f64>>,
    /// Direction in the orthonormal coframe (angle for n = 2).
    pub coframe_directions: Vec<Vec<f64>>,
    pub values: Vec<Complex64>,
    pub resolution: usize,
}

impl OutputField {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// (max − min)/max of |O| over the scan.
    pub fn contrast(&self) -> f64 {
        let m = self.magnitudes();
        let hi = m.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = m.iter().cloned().fold(f64::INFINITY, f64::min);
        if hi > 0.0 {
            (hi - lo) / hi
        } else {
            0.0
        }
    }

    pub fn csv_header(dim: usize) -> Vec<String> {
        let mut h = Vec::new();
        if dim == 2 {
            h.push("angle".to_string());
        } else {
            h.push("index".to_string());
        }
        for k in 0..dim {
            h.push(format!("p{}", k + 1));
        }
        h.extend(["re", "im", "abs"].iter().map(|s| s.to_string()));
        h
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        use crate::report::fmt_f64;
        let dim = self.base.len();
        (0..self.values.len())
            .map(|i| {
                let mut r = Vec::new();
                if dim == 2 {
                    let u = &self.coframe_directions[i];
                    r.push(fmt_f64(u[1].atan2(u[0]).rem_euclid(2.0 * PI)));
                } else {
                    r.push(i.to_string());
                }
                r.extend(self.directions[i].iter().map(|x| fmt_f64(*x)));
                let v = self.values[i];
                r.push(fmt_f64(v.re));
                r.push(fmt_f64(v.im));
                r.push(fmt_f64(v.norm()));
                r
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Detection {
    /// One representative of the unoriented normal ±p (g*-unit).
    pub normal: Vec<f64>,
    pub coframe_normal: Vec<f64>,
    pub contrast: f64,
    pub no_boundary: bool,
    /// Odd part |O(p) − O(−p)|/2 at the reported normal.
    pub score: f64,
    pub field: OutputField,
}

fn coframe_scan(n: usize, count: usize) -> Vec<Vec<f64>> {
    sphere_directions(n, count)
}

/// Scan directions, refine the best one, and report it as an unoriented normal.
///
/// Directions are ranked by the odd part |O(p) − O(−p)|/2; the contrast and
/// no-boundary flag use |O| over the scan.
pub fn detect_boundary_normal(
    f: &SignalOnB,
    chart: &RiemannianChart,
    b: &ManifoldPoint,
    spec: &WindowSpec,
    params: &DetectionParams,
) -> Result<Detection> {
    let n = chart.dim();
    if n >= 2 && params.directions < 8 {
        return Err(Error::InvalidInput("direction scan needs at least 8 directions".into()));
    }
    let mut cutoff = CutoffSpec::at(chart, b)?;
    cutoff.overshoot = params.overshoot;
    let grid = FiberGrid::with_budget(n, cutoff.support_radius(), params.fiber_nodes, params.max_fiber_nodes)?;
    let engine = OutputEngine::new(f, chart, b, spec, &grid, &cutoff)?;
    detect_with_engine(&engine, params)
}

pub fn detect_with_engine(engine: &OutputEngine, params: &DetectionParams) -> Result<Detection> {
    let n = engine.dim;
    let count = if n == 1 { 2 } else { params.directions };
    let coframe_dirs = coframe_scan(n, count);
    let dirs: Vec<Vec<f64>> = coframe_dirs.iter().map(|u| engine.covector(u)).collect();
    let values: Vec<Complex64> = dirs.par_iter().map(|p| engine.value(p)).collect();
    let field = OutputField {
        base: engine.base.coords().to_vec(),
        directions: dirs.clone(),
        coframe_directions: coframe_dirs.clone(),
        values: values.clone(),
        resolution: count,
    };
    let paired = n == 2 && count % 2 == 0;
    let odd: Vec<f64> = if paired {
        (0..count)
            .map(|i| 0.5 * (values[i] - values[(i + count / 2) % count]).norm())
            .collect()
    } else {
        dirs.par_iter().map(|p| engine.odd_part(p)).collect()
    };
    let best = (0..count).fold(0, |bi, i| if odd[i] > odd[bi] { i } else { bi });

    let (coframe_normal, score) = match n {
        1 => (coframe_dirs[best].clone(), odd[best]),
        2 => refine_planar(engine, &coframe_dirs[best], odd[best], count, params.refine_steps),
        _ => refine_ascent(engine, &coframe_dirs[best], odd[best], count, params.refine_steps),
    };
    let contrast = field.contrast();
    Ok(Detection {
        normal: engine.covector(&coframe_normal),
        coframe_normal,
        contrast,
        no_boundary: contrast < params.threshold,
        score,
        field,
    })
}

fn refine_planar(engine: &OutputEngine, start: &[f64], start_score: f64, count: usize, steps: usize) -> (Vec<f64>, f64) {
    let score = |phi: f64| engine.odd_part(&engine.covector(&[phi.cos(), phi.sin()]));
    let phi0 = start[1].atan2(start[0]);
    let delta = 2.0 * PI / count as f64;
    let (mut a, mut b) = (phi0 - delta, phi0 + delta);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (score(c), score(d));
    let mut best = (phi0, start_score);
    for _ in 0..steps {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = score(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = score(d);
        }
        for (x, fx) in [(c, fc), (d, fd)] {
            if fx > best.1 {
                best = (x, fx);
            }
        }
    }
    let phi = best.0.rem_euclid(2.0 * PI);
    (vec![phi.cos(), phi.sin()], best.1)
}

fn refine_ascent(engine: &OutputEngine, start: &[f64], start_score: f64, count: usize, steps: usize) -> (Vec<f64>, f64) {
    let n = start.len();
    let area = crate::quadrature::sphere_area(n);
    let mut step = (area / count as f64).powf(1.0 / (n as f64 - 1.0));
    let mut u = start.to_vec();
    let mut best = start_score;
    let score = |u: &[f64]| engine.odd_part(&engine.covector(u));
    for _ in 0..steps {
        let tangents = crate::contact::orthonormal_completion(&u, &DMatrix::identity(n, n))
            .expect("identity metric is SPD");
        let mut improved = None;
        for t in &tangents {
            for sgn in [1.0, -1.0] {
                let mut w: Vec<f64> = u.iter().zip(t).map(|(a, b)| a + sgn * step * b).collect();
                let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                w.iter_mut().for_each(|x| *x /= norm);
                let s = score(&w);
                if s > best && improved.as_ref().is_none_or(|(_, bs)| s > *bs) {
                    improved = Some((w, s));
                }
            }
        }
        match improved {
            Some((w, s)) => {
                u = w;
                best = s;
            }
            None => step *= 0.5,
        }
    }
    (u, best)
}

/// d|O|/dφ at angle φ (n = 2) by central differences.
pub fn planar_angular_derivative(engine: &OutputEngine, phi: f64, h: f64) -> f64 {
    let mag = |a: f64| engine.value(&engine.covector(&[a.cos(), a.sin()])).norm();
    (mag(phi + h) - mag(phi - h)) / (2.0 * h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    FrameCertified,
    Unknown,
    NotApplicable,
}

/// Sufficient condition for separable lattices built on an orthonormal frame:
/// 0 < b_i < 1 and b_i = ±c_i for every i.
pub fn corollary_frame_certificate(b: &[f64], c: &[f64], orthonormal_separable: bool) -> CertificateStatus {
    if b.len() != c.len() || b.is_empty() || b.iter().chain(c).any(|x| !x.is_finite()) {
        return CertificateStatus::NotApplicable;
    }
    if !orthonormal_separable {
        return CertificateStatus::Unknown;
    }
    let ok = b
        .iter()
        .zip(c)
        .all(|(&bi, &ci)| bi > 0.0 && bi < 1.0 && (bi == ci || bi == -ci));
    if ok {
        CertificateStatus::FrameCertified
    } else {
        CertificateStatus::Unknown
    }
}

/// Certificate for a concrete lattice: checks the frame is orthonormal and separable first.
pub fn certificate_for_lattice(chart: &RiemannianChart, lattice: &LatticeFrame, window: &WindowSpec) -> CertificateStatus {
    if lattice.degenerate || window.at(lattice.frame.point.base.coords()).is_err() {
        return CertificateStatus::NotApplicable;
    }
    let orthonormal = matches!(
        lattice.frame.provenance,
        Provenance::AnalyticFlat | Provenance::Hypercomplex
    ) && lattice
        .frame
        .defects(chart)
        .map(|d| d.unit_norm < 1e-9 && d.orthogonality < 1e-9)
        .unwrap_or(false);
    corollary_frame_certificate(
        &lattice.spec.translation_scales,
        &lattice.spec.modulation_scales,
        orthonormal,
    )
}

/// Discretization choices for the frame operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameGridParams {
    /// Nodes per cycle of the highest lattice modulation, relative to π.
    pub oversampling: f64,
    /// |Ψ|² level that defines the window's effective radius.
    pub tail_tolerance: f64,
    /// Node spacing at the center as a fraction of the window width √(π/λ_max).
    pub resolution_fraction: f64,
    pub max_atoms: u128,
    /// Largest test space handled by the dense eigensolver.
    pub max_dense_dim: usize,
    pub power_iterations: usize,
    pub power_tolerance: f64,
    /// Cap on atoms × test-space nodes.
    pub max_work: u128,
}

impl Default for FrameGridParams {
    fn default() -> Self {
        FrameGridParams {
            oversampling: 1.5,
            tail_tolerance: 1e-12,
            resolution_fraction: 0.25,
            max_atoms: 10_000,
            max_dense_dim: 4000,
            power_iterations: 500,
            power_tolerance: 1e-8,
            max_work: 400_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameGridInfo {
    pub half_widths: Vec<f64>,
    pub nodes: Vec<usize>,
    pub test_dim: usize,
    pub atoms: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub truncation: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub lattice: LatticeSpec,
    pub truncation: usize,
    pub grid: FrameGridInfo,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub certificate: CertificateStatus,
    pub solver: String,
    pub trace: Vec<TracePoint>,
}

/// Truncated analysis operator restricted to test functions on the central half of the grid.
///
/// Rows are atoms, columns are test nodes; entries are conj(atom(V_k))·√(w_k dvol),
/// so that for u_k = √(w_k dvol)·g(V_k) the coefficient vector is `matrix·u`
/// and ‖g‖² = |u|².
#[derive(Clone, Debug)]
pub struct FrameOperator {
    pub matrix: DMatrix<Complex64>,
    /// Fiber vectors of the test nodes, `dim` per node.
    pub test_points: Vec<f64>,
    pub sqrt_weights: Vec<f64>,
    /// Full-grid quadrature of |Ψ|², for reference.
    pub window_norm_sq: f64,
    pub info: FrameGridInfo,
    dim: usize,
}

impl FrameOperator {
    pub fn assemble(
        chart: &RiemannianChart,
        spec: &WindowSpec,
        lattice: &LatticeFrame,
        k: usize,
        params: &FrameGridParams,
    ) -> Result<Self> {
        if lattice.degenerate {
            return Err(Error::DegenerateLattice);
        }
        let n = lattice.dim();
        let atoms_count = lattice_point_count(n, k);
        if atoms_count > params.max_atoms {
            return Err(Error::budget("frame atoms", atoms_count, params.max_atoms));
        }
        let m = &lattice.frame.point;
        let a = spec.at(m.base.coords())?;
        let vol = chart.volume_density(&m.base)?;
        let t = DMatrix::from_fn(n, n, |r, c| lattice.directions[c][r]);
        let det_t = t.determinant().abs();
        if !(det_t > 0.0) {
            return Err(Error::DegenerateLattice);
        }
        let a_u = t.transpose() * &a * &t;
        let eig = a_u.clone().symmetric_eigen().eigenvalues;
        let (lmin, lmax) = (eig.min(), eig.max());
        let r_tail = (-params.tail_tolerance.ln() / (2.0 * lmin)).sqrt();
        let width = (PI / lmax).sqrt();

        let mut half_widths = Vec::with_capacity(n);
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let b_i = lattice.spec.translation_scales[i];
            let l = (b_i * (k as f64 + 1.0)).max(2.0 * r_tail);
            let omega: f64 = (0..n)
                .map(|j| {
                    (lattice.spec.modulation_scales[j] * dot(&lattice.frame.covectors[j], &lattice.directions[i])).abs()
                })
                .sum();
            let by_frequency = (params.oversampling * PI * l * omega * (k as f64 + 1.0)).ceil();
            let floor = (PI * l / (params.resolution_fraction * width)).ceil();
            half_widths.push(l);
            nodes.push(by_frequency.max(floor) as usize);
        }

        let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..n).map(|i| gauss_legendre_symmetric(nodes[i], half_widths[i])).collect();
        let total = tensor_size(&nodes);
        if total > params.max_work {
            return Err(Error::budget("frame grid nodes", total, params.max_work));
        }
        let p = &m.p;
        let mut test_points = Vec::new();
        let mut sqrt_weights = Vec::new();
        let mut window_norm_sq = 0.0;
        let mut idx = vec![0; n];
        for flat in 0..total as usize {
            multi_index(&nodes, flat, &mut idx);
            let u: Vec<f64> = (0..n).map(|i| axes[i].0[idx[i]]).collect();
            let w: f64 = (0..n).map(|i| axes[i].1[idx[i]]).product::<f64>() * vol * det_t;
            let v = (&t * DVector::from_column_slice(&u)).as_slice().to_vec();
            window_norm_sq += w * window_with(&a, p, &v).norm_sqr();
            if (0..n).all(|i| u[i].abs() <= 0.5 * half_widths[i]) {
                test_points.extend_from_slice(&v);
                sqrt_weights.push(w.sqrt());
            }
        }
        let test_dim = sqrt_weights.len();
        let work = atoms_count * test_dim as u128;
        if work > params.max_work {
            return Err(Error::budget("frame operator entries", work, params.max_work));
        }
        let points = enumerate_lattice_points(lattice, k)?;
        let rows: Vec<Vec<Complex64>> = points
            .par_iter()
            .map(|lp| {
                (0..test_dim)
                    .map(|c| {
                        let v = &test_points[c * n..(c + 1) * n];
                        tf_shift_with(&a, p, &lp.translation, &lp.modulation, v).conj() * sqrt_weights[c]
                    })
                    .collect()
            })
            .collect();
        let matrix = DMatrix::from_fn(points.len(), test_dim, |r, c| rows[r][c]);
        Ok(FrameOperator {
            matrix,
            test_points,
            sqrt_weights,
            window_norm_sq,
            info: FrameGridInfo {
                half_widths,
                nodes,
                test_dim,
                atoms: points.len(),
            },
            dim: n,
        })
    }

    pub fn test_dim(&self) -> usize {
        self.sqrt_weights.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn to_u(&self, g: &[Complex64]) -> DVector<Complex64> {
        DVector::from_iterator(g.len(), g.iter().zip(&self.sqrt_weights).map(|(x, w)| x * *w))
    }

    /// Σ_λ |⟨g, atom_λ⟩|² for g given by its values at the test nodes.
    pub fn coefficient_energy(&self, g: &[Complex64]) -> f64 {
        let c = &self.matrix * self.to_u(g);
        c.iter().map(|z| z.norm_sqr()).sum()
    }

    /// ‖g‖² on the test space.
    pub fn norm_sq(&self, g: &[Complex64]) -> f64 {
        self.to_u(g).iter().map(|z| z.norm_sqr()).sum()
    }

    fn gram(&self) -> DMatrix<Complex64> {
        self.matrix.adjoint() * &self.matrix
    }

    /// Smallest and largest eigenvalue of the restricted frame operator, and the solver used.
    pub fn extremal_bounds(&self, params: &FrameGridParams) -> Result<(f64, f64, &'static str)> {
        if self.test_dim() <= params.max_dense_dim {
            let s = self.gram();
            let ev = s.symmetric_eigen().eigenvalues;
            return Ok((ev.min().max(0.0), ev.max(), "dense"));
        }
        let upper = self.power_iteration(None, params)?;
        let shifted = self.power_iteration(Some(upper), params)?;
        Ok(((upper - shifted).max(0.0), upper, "power"))
    }

    /// Dominant eigenvalue of S (or of shift·I − S).
    fn power_iteration(&self, shift: Option<f64>, params: &FrameGridParams) -> Result<f64> {
        let d = self.test_dim();
        let mut x = DVector::from_fn(d, |i, _| Complex64::new(1.0 + (i % 7) as f64 * 0.01, 0.0));
        let nrm = x.norm();
        x /= Complex64::from(nrm);
        let mut lambda = 0.0;
        for _ in 0..params.power_iterations {
            let sx = self.matrix.adjoint() * (&self.matrix * &x);
            let y = match shift {
                None => sx,
                Some(s) => &x * Complex64::from(s) - sx,
            };
            let next = x.dotc(&y).re;
            let ny = y.norm();
            if ny == 0.0 {
                return Ok(0.0);
            }
            x = y / Complex64::from(ny);
            if (next - lambda).abs() <= params.power_tolerance * next.abs().max(1e-300) {
                return Ok(next);
            }
            lambda = next;
        }
        Err(Error::IterationLimit {
            iterations: params.power_iterations,
            partial_trace: Vec::new(),
        })
    }
}

/// Frame bounds at K with a convergence trace over K, K+1, K+2.
pub fn frame_bounds_estimate(
    chart: &RiemannianChart,
    spec: &WindowSpec,
    lattice: &LatticeFrame,
    k: usize,
    params: &FrameGridParams,
) -> Result<FrameReport> {
    let n = lattice.dim();
    let needed = lattice_point_count(n, k + 2);
    if needed > params.max_atoms {
        return Err(Error::budget("frame atoms", needed, params.max_atoms));
    }
    let mut trace: Vec<TracePoint> = Vec::with_capacity(3);
    let mut first = None;
    for kk in k..=k + 2 {
        let op = FrameOperator::assemble(chart, spec, lattice, kk, params)?;
        let (lo, hi, solver) = match op.extremal_bounds(params) {
            Ok(b) => b,
            Err(Error::IterationLimit { iterations, .. }) => {
                return Err(Error::IterationLimit {
                    iterations,
                    partial_trace: trace.iter().map(|t| (t.truncation, t.lower_bound)).collect(),
                })
            }
            Err(e) => return Err(e),
        };
        trace.push(TracePoint {
            truncation: kk,
            lower_bound: lo,
            upper_bound: hi,
        });
        if first.is_none() {
            first = Some((op.info.clone(), solver));
        }
    }
    let (grid, solver) = first.expect("three truncations evaluated");
    Ok(FrameReport {
        lattice: lattice.spec.clone(),
        truncation: k,
        grid,
        lower_bound: trace[0].lower_bound,
        upper_bound: trace[0].upper_bound,
        certificate: certificate_for_lattice(chart, lattice, spec),
        solver: solver.to_string(),
        trace,
    })
}
