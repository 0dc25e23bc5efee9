//! Signals on the base, the radial cutoff, fiber grids and the lift into E.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::contact::CospherePoint;
use crate::error::{Error, Result};
use crate::manifold::{ManifoldPoint, RiemannianChart};
use crate::quadrature::{gauss_legendre, gauss_legendre_interval, multi_index, periodic_trapezoid, sphere_area, tensor_size};

/// Default cap on the number of nodes in one fiber grid.
pub const DEFAULT_MAX_FIBER_NODES: u128 = 4_000_000;
/// Cap on the total work of a global norm evaluation.
pub const MAX_GLOBAL_NODES: u128 = 10_000_000;

pub type SignalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Samples on a regular chart grid, interpolated multilinearly.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSignal {
    pub sizes: Vec<usize>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: Vec<bool>,
    /// Row-major, last axis fastest.
    pub values: Vec<f64>,
}

impl GridSignal {
    pub fn new(chart: &RiemannianChart, sizes: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if sizes.len() != chart.dim() {
            return Err(Error::ShapeMismatch("grid rank differs from chart dimension".into()));
        }
        if sizes.iter().any(|&s| s < 2) {
            return Err(Error::InvalidInput("grid axes need at least two samples".into()));
        }
        if tensor_size(&sizes) != values.len() as u128 {
            return Err(Error::ShapeMismatch(format!(
                "grid of sizes {sizes:?} needs {} values, got {}",
                tensor_size(&sizes),
                values.len()
            )));
        }
        Ok(GridSignal {
            sizes,
            lower: chart.lower().to_vec(),
            upper: chart.upper().to_vec(),
            periodic: chart.periodic().to_vec(),
            values,
        })
    }

    /// Chart coordinate of node `i` on `axis`.
    pub fn node(&self, axis: usize, i: usize) -> f64 {
        let w = self.upper[axis] - self.lower[axis];
        let cells = if self.periodic[axis] {
            self.sizes[axis]
        } else {
            self.sizes[axis] - 1
        };
        self.lower[axis] + w * i as f64 / cells as f64
    }

    pub fn eval(&self, b: &[f64]) -> f64 {
        let n = self.sizes.len();
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0; n];
        let mut next = vec![0usize; n];
        for a in 0..n {
            let w = self.upper[a] - self.lower[a];
            let size = self.sizes[a];
            let cells = if self.periodic[a] { size } else { size - 1 };
            let t = (b[a] - self.lower[a]) / w * cells as f64;
            let (i, f) = if self.periodic[a] {
                let t = t.rem_euclid(cells as f64);
                let i = (t.floor() as usize).min(size - 1);
                (i, t - i as f64)
            } else {
                let t = t.clamp(0.0, cells as f64);
                let i = (t.floor() as usize).min(cells - 1);
                (i, t - i as f64)
            };
            base[a] = i;
            frac[a] = f;
            next[a] = if self.periodic[a] { (i + 1) % size } else { i + 1 };
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut flat = 0usize;
            for a in 0..n {
                let hi = corner >> a & 1 == 1;
                let f = frac[a];
                if hi {
                    w *= f;
                } else {
                    w *= 1.0 - f;
                }
                let idx = if hi { next[a] } else { base[a] };
                flat = flat * self.sizes[a] + idx;
            }
            if w != 0.0 {
                acc += w * self.values[flat];
            }
        }
        acc
    }

    /// Reads a CSV whose first record holds the axis sizes and whose
    /// remaining fields are the values in row-major order.
    pub fn from_csv(chart: &RiemannianChart, path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_path(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        let mut records = rdr.records();
        let header = records
            .next()
            .ok_or_else(|| Error::InvalidInput("grid CSV is empty".into()))?
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        let sizes = header
            .iter()
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidInput(format!("bad grid header: {e}")))?;
        let mut values = Vec::new();
        for rec in records {
            let rec = rec.map_err(|e| Error::InvalidInput(e.to_string()))?;
            for field in rec.iter() {
                let v = field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("bad grid value {field:?}: {e}")))?;
                values.push(v);
            }
        }
        GridSignal::new(chart, sizes, values)
    }

    /// Writes the format read by [`GridSignal::from_csv`], one row per last-axis line.
    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidInput(format!("cannot write {}: {e}", path.display()));
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .from_path(path)
            .map_err(io)?;
        w.write_record(self.sizes.iter().map(|s| s.to_string())).map_err(io)?;
        let row = *self.sizes.last().expect("rank >= 1");
        for chunk in self.values.chunks(row) {
            w.write_record(chunk.iter().map(|v| crate::report::fmt_f64(*v))).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
    }
}

#[derive(Clone)]
pub enum SignalKind {
    Constant(f64),
    /// 1 where ⟨normal, b⟩ < offset.
    HalfSpace { normal: Vec<f64>, offset: f64 },
    /// 1 within chart distance `radius` of `center`, minimum image on periodic axes.
    Ball {
        center: Vec<f64>,
        radius: f64,
        periods: Vec<Option<f64>>,
    },
    /// 1 where the periodic distance to the level set ⟨normal, b⟩ ≡ level (mod period)
    /// is below width/2; `complement` flips it.
    Band {
        normal: Vec<f64>,
        level: f64,
        width: f64,
        period: f64,
        complement: bool,
    },
    Grid(GridSignal),
    Custom(SignalFn),
}

impl fmt::Debug for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalKind::Constant(c) => write!(f, "Constant({c})"),
            SignalKind::HalfSpace { normal, offset } => write!(f, "HalfSpace({normal:?} < {offset})"),
            SignalKind::Ball { center, radius, .. } => write!(f, "Ball({center:?}, {radius})"),
            SignalKind::Band {
                normal,
                level,
                width,
                complement,
                ..
            } => write!(f, "Band({normal:?} = {level}, width {width}, complement {complement})"),
            SignalKind::Grid(g) => write!(f, "Grid({:?})", g.sizes),
            SignalKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A real signal on the base manifold.
#[derive(Clone, Debug)]
pub struct SignalOnB {
    pub kind: SignalKind,
    pub scale: f64,
}

impl SignalOnB {
    pub fn new(kind: SignalKind) -> Self {
        SignalOnB { kind, scale: 1.0 }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(SignalKind::Constant(c))
    }

    pub fn half_space(normal: Vec<f64>, offset: f64) -> Self {
        Self::new(SignalKind::HalfSpace { normal, offset })
    }

    pub fn ball(chart: &RiemannianChart, center: Vec<f64>, radius: f64) -> Self {
        let periods = (0..chart.dim())
            .map(|i| chart.periodic()[i].then(|| chart.width(i)))
            .collect();
        Self::new(SignalKind::Ball {
            center,
            radius,
            periods,
        })
    }

    /// Band around {⟨normal, θ⟩ ≡ level mod 2π} on a torus; `normal` should be integral.
    pub fn torus_band(normal: Vec<f64>, level: f64, width: f64, complement: bool) -> Self {
        Self::new(SignalKind::Band {
            normal,
            level,
            width,
            period: 2.0 * std::f64::consts::PI,
            complement,
        })
    }

    pub fn custom(f: SignalFn) -> Self {
        Self::new(SignalKind::Custom(f))
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.scale *= c;
        self
    }

    pub fn eval(&self, b: &[f64]) -> f64 {
        let v = match &self.kind {
            SignalKind::Constant(c) => *c,
            SignalKind::HalfSpace { normal, offset } => {
                let s: f64 = normal.iter().zip(b).map(|(n, x)| n * x).sum();
                indicator(s < *offset)
            }
            SignalKind::Ball {
                center,
                radius,
                periods,
            } => {
                let d2: f64 = b
                    .iter()
                    .zip(center)
                    .zip(periods)
                    .map(|((x, c), p)| {
                        let mut d = x - c;
                        if let Some(p) = p {
                            d = d.rem_euclid(*p);
                            d = d.min(p - d);
                        }
                        d * d
                    })
                    .sum();
                indicator(d2.sqrt() < *radius)
            }
            SignalKind::Band {
                normal,
                level,
                width,
                period,
                complement,
            } => {
                let s: f64 = normal.iter().zip(b).map(|(n, x)| n * x).sum();
                let u = (s - level).rem_euclid(*period);
                let norm = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
                let dist = u.min(period - u) / norm;
                indicator((dist < 0.5 * width) != *complement)
            }
            SignalKind::Grid(g) => g.eval(b),
            SignalKind::Custom(f) => f(b),
        };
        self.scale * v
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Radial cutoff: 1 up to the plateau radius, quintic smoothstep down to 0 at (1+δ)R.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffSpec {
    pub plateau: f64,
    pub overshoot: f64,
}

impl CutoffSpec {
    pub const DEFAULT_OVERSHOOT: f64 = 0.25;

    pub fn new(plateau: f64) -> Self {
        CutoffSpec {
            plateau,
            overshoot: Self::DEFAULT_OVERSHOOT,
        }
    }

    /// Plateau at the injectivity radius of b.
    pub fn at(chart: &RiemannianChart, b: &ManifoldPoint) -> Result<Self> {
        Ok(Self::new(chart.injectivity_radius(b)?))
    }

    pub fn support_radius(&self) -> f64 {
        (1.0 + self.overshoot) * self.plateau
    }
}

pub fn cutoff_chi(spec: &CutoffSpec, r: f64) -> f64 {
    let r0 = spec.plateau;
    if r <= r0 {
        return 1.0;
    }
    let s = (r - r0) / (spec.overshoot * r0);
    if s >= 1.0 {
        return 0.0;
    }
    1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

/// Tensor Gauss–Legendre grid on [−L, L]^n in chart components of T_bB.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberGrid {
    pub dim: usize,
    pub half_width: f64,
    pub nodes_1d: Vec<f64>,
    pub weights_1d: Vec<f64>,
    /// Flattened node coordinates, `dim` per node.
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl FiberGrid {
    pub const DEFAULT_NODES: usize = 61;

    pub fn new(dim: usize, half_width: f64, nodes: usize) -> Result<Self> {
        Self::with_budget(dim, half_width, nodes, DEFAULT_MAX_FIBER_NODES)
    }

    pub fn with_budget(dim: usize, half_width: f64, nodes: usize, max_nodes: u128) -> Result<Self> {
        if dim == 0 || nodes == 0 {
            return Err(Error::InvalidInput("fiber grid needs dim >= 1 and nodes >= 1".into()));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidInput(format!("fiber half-width must be positive, got {half_width}")));
        }
        let total = (nodes as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if total > max_nodes {
            return Err(Error::budget("fiber grid nodes", total, max_nodes));
        }
        let (x, w) = gauss_legendre_interval(nodes, -half_width, half_width);
        Ok(Self::from_axes(dim, half_width, x, w))
    }

    /// Grid covering the support of the cutoff.
    pub fn for_cutoff(dim: usize, cutoff: &CutoffSpec, nodes: usize) -> Result<Self> {
        Self::new(dim, cutoff.support_radius(), nodes)
    }

    fn from_axes(dim: usize, half_width: f64, x: Vec<f64>, w: Vec<f64>) -> Self {
        let extents = vec![x.len(); dim];
        let total = tensor_size(&extents) as usize;
        let mut points = Vec::with_capacity(total * dim);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0; dim];
        for flat in 0..total {
            multi_index(&extents, flat, &mut idx);
            let mut wt = 1.0;
            for &i in &idx {
                points.push(x[i]);
                wt *= w[i];
            }
            weights.push(wt);
        }
        FiberGrid {
            dim,
            half_width,
            nodes_1d: x,
            weights_1d: w,
            points,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_1d.len()
    }
}

/// Samples of the lifted signal on one fiber.
#[derive(Clone, Debug)]
pub struct LiftedFiberSignal {
    pub point: CospherePoint,
    pub grid: Arc<FiberGrid>,
    /// √det g at the base point.
    pub volume: f64,
    pub samples: Vec<Complex64>,
}

impl LiftedFiberSignal {
    pub fn from_samples(point: CospherePoint, grid: Arc<FiberGrid>, volume: f64, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        Ok(LiftedFiberSignal {
            point,
            grid,
            volume,
            samples,
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut s = self.clone();
        s.samples.iter_mut().for_each(|x| *x *= c);
        s
    }
}

/// χ(|V|_g)·f(exp_b V) at every node; nodes outside the cutoff support are 0
/// without evaluating the exponential map.
pub fn lift_samples(
    f: &SignalOnB,
    chart: &RiemannianChart,
    b: &ManifoldPoint,
    grid: &FiberGrid,
    cutoff: &CutoffSpec,
) -> Result<Vec<f64>> {
    if grid.dim != chart.dim() {
        return Err(Error::ShapeMismatch("fiber grid dimension differs from chart".into()));
    }
    let g = chart.metric_at(b)?;
    let n = grid.dim;
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let v = grid.point(i);
            let mut r2 = 0.0;
            for a in 0..n {
                for c in 0..n {
                    r2 += v[a] * g[(a, c)] * v[c];
                }
            }
            let chi = cutoff_chi(cutoff, r2.sqrt());
            if chi == 0.0 {
                return Ok(0.0);
            }
            let e = chart.exp_map(b, v)?;
            Ok(chi * f.eval(e.coords()))
        })
        .collect()
}

pub fn lift_signal(
    f: &SignalOnB,
    chart: &RiemannianChart,
    m: &CospherePoint,
    grid: Arc<FiberGrid>,
    cutoff: &CutoffSpec,
) -> Result<LiftedFiberSignal> {
    let samples = lift_samples(f, chart, &m.base, &grid, cutoff)?;
    let volume = chart.volume_density(&m.base)?;
    Ok(LiftedFiberSignal {
        point: m.clone(),
        grid,
        volume,
        samples: samples.into_iter().map(Complex64::from).collect(),
    })
}

/// (∫ |s|² dvol)^{1/2} over the fiber.
pub fn fiber_l2_norm(s: &LiftedFiberSignal) -> f64 {
    let sum: f64 = s
        .samples
        .iter()
        .zip(&s.grid.weights)
        .map(|(x, w)| w * x.norm_sqr())
        .sum();
    (s.volume * sum).sqrt()
}

/// Resolution of the outer and fiber quadratures for the global norm.
#[derive(Clone, Copy, Debug)]
pub struct GlobalNormParams {
    pub base_nodes: usize,
    pub sphere_nodes: usize,
    pub fiber_nodes: usize,
}

/// ‖I(f)‖ over all of M.
///
/// The lift depends on b only, so each base node contributes
/// (fiber norm)² × (sphere quadrature weight total) × √det g.
pub fn global_l2_norm(f: &SignalOnB, chart: &RiemannianChart, params: &GlobalNormParams) -> Result<f64> {
    let n = chart.dim();
    if params.base_nodes < 2 || params.sphere_nodes < 2 {
        return Err(Error::InvalidInput("global norm resolutions must be at least 2".into()));
    }
    let base_total = (params.base_nodes as u128).pow(n as u32);
    let fiber_total = (params.fiber_nodes as u128).pow(n as u32);
    let work = base_total * (fiber_total + params.sphere_nodes as u128);
    if work > MAX_GLOBAL_NODES {
        return Err(Error::budget("global norm nodes", work, MAX_GLOBAL_NODES));
    }
    let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .map(|i| {
            if chart.periodic()[i] {
                periodic_trapezoid(params.base_nodes, chart.lower()[i], chart.width(i))
            } else {
                let (x, w) = gauss_legendre(params.base_nodes);
                let (lo, hi) = (chart.lower()[i], chart.upper()[i]);
                (
                    x.iter().map(|t| 0.5 * (lo + hi) + 0.5 * (hi - lo) * t).collect(),
                    w.iter().map(|w| 0.5 * (hi - lo) * w).collect(),
                )
            }
        })
        .collect();
    // uniform-angle / Fibonacci rules carry equal weights summing to the sphere area
    let sphere_weight = sphere_area(n);
    let extents = vec![params.base_nodes; n];
    let terms: Vec<f64> = (0..base_total as usize)
        .into_par_iter()
        .map(|flat| {
            let mut idx = vec![0; n];
            multi_index(&extents, flat, &mut idx);
            let coords: Vec<f64> = (0..n).map(|a| axes[a].0[idx[a]]).collect();
            let wt: f64 = (0..n).map(|a| axes[a].1[idx[a]]).product();
            let b = chart.point(&coords)?;
            let cutoff = CutoffSpec::at(chart, &b)?;
            let grid = FiberGrid::for_cutoff(n, &cutoff, params.fiber_nodes)?;
            let samples = lift_samples(f, chart, &b, &grid, &cutoff)?;
            let vol = chart.volume_density(&b)?;
            let fiber_sq: f64 = samples.iter().zip(&grid.weights).map(|(s, w)| w * s * s).sum::<f64>() * vol;
            Ok(wt * vol * sphere_weight * fiber_sq)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum::<f64>().sqrt())
}
