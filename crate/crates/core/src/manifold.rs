//! Single-chart Riemannian manifolds.
//!
//! A chart is a coordinate box with optional periodic axes and a metric
//! evaluator. Two built-ins have closed-form geodesics (flat tori and the
//! round sphere in colatitude/longitude coordinates); everything else goes
//! through a fixed-step RK4 integrator with finite-difference Christoffel
//! symbols.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Error, Result};

/// Metric evaluator for generic charts.
pub type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

#[derive(Clone)]
pub enum ChartKind {
    /// Product of circles, coordinates in radians with period 2π, metric diag(r_i²).
    FlatTorus { radii: Vec<f64> },
    /// Round 2-sphere in (colatitude θ ∈ [0, π], longitude φ ∈ [0, 2π)).
    RoundSphere { radius: f64 },
    /// User metric on a box; injectivity radius must be declared.
    Generic {
        metric: MetricFn,
        injectivity_radius: Option<f64>,
    },
}

impl fmt::Debug for ChartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartKind::FlatTorus { radii } => f.debug_struct("FlatTorus").field("radii", radii).finish(),
            ChartKind::RoundSphere { radius } => {
                f.debug_struct("RoundSphere").field("radius", radius).finish()
            }
            ChartKind::Generic {
                injectivity_radius, ..
            } => f
                .debug_struct("Generic")
                .field("injectivity_radius", injectivity_radius)
                .finish_non_exhaustive(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RiemannianChart {
    lower: Vec<f64>,
    upper: Vec<f64>,
    periodic: Vec<bool>,
    kind: ChartKind,
    /// RK4 steps per unit metric length of the initial velocity.
    pub steps_per_unit: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldPoint {
    coords: Vec<f64>,
}

impl ManifoldPoint {
    /// Builds a point, reducing periodic coordinates into the chart box.
    pub fn new(chart: &RiemannianChart, coords: &[f64]) -> Result<Self> {
        if coords.len() != chart.dim() {
            return Err(Error::ShapeMismatch(format!(
                "point has {} coordinates, chart dimension is {}",
                coords.len(),
                chart.dim()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coordinates {coords:?}")));
        }
        let mut c = coords.to_vec();
        chart.reduce(&mut c);
        for (i, &x) in c.iter().enumerate() {
            if !chart.periodic[i] && (x < chart.lower[i] || x > chart.upper[i]) {
                return Err(Error::ChartExit {
                    axis: i,
                    point: coords.to_vec(),
                });
            }
        }
        Ok(ManifoldPoint { coords: c })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Tangent,
    Cotangent,
}

/// Components of a tangent or cotangent vector at a base point.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberVector {
    pub base: ManifoldPoint,
    pub components: Vec<f64>,
    pub variance: Variance,
}

pub type TangentVector = FiberVector;
pub type Covector = FiberVector;

impl FiberVector {
    pub fn tangent(base: ManifoldPoint, components: Vec<f64>) -> Self {
        FiberVector {
            base,
            components,
            variance: Variance::Tangent,
        }
    }

    pub fn cotangent(base: ManifoldPoint, components: Vec<f64>) -> Self {
        FiberVector {
            base,
            components,
            variance: Variance::Cotangent,
        }
    }

    /// Index lowering (tangent → cotangent) or raising (cotangent → tangent).
    pub fn flip_variance(&self, chart: &RiemannianChart) -> Result<FiberVector> {
        let g = chart.metric_at(&self.base)?;
        let v = DVector::from_column_slice(&self.components);
        let (components, variance) = match self.variance {
            Variance::Tangent => ((&g * v).as_slice().to_vec(), Variance::Cotangent),
            Variance::Cotangent => {
                let chol = g.cholesky().ok_or_else(|| Error::MetricDegenerate {
                    point: self.base.coords.clone(),
                })?;
                (chol.solve(&v).as_slice().to_vec(), Variance::Tangent)
            }
        };
        Ok(FiberVector {
            base: self.base.clone(),
            components,
            variance,
        })
    }

    /// Squared length in g (tangent) or g* (cotangent).
    pub fn norm_squared(&self, chart: &RiemannianChart) -> Result<f64> {
        let g = chart.metric_at(&self.base)?;
        let v = DVector::from_column_slice(&self.components);
        Ok(match self.variance {
            Variance::Tangent => v.dot(&(&g * &v)),
            Variance::Cotangent => {
                let chol = g.cholesky().ok_or_else(|| Error::MetricDegenerate {
                    point: self.base.coords.clone(),
                })?;
                v.dot(&chol.solve(&v))
            }
        })
    }
}

impl RiemannianChart {
    pub fn flat_torus(radii: &[f64]) -> Result<Self> {
        if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidInput(format!("torus radii must be positive, got {radii:?}")));
        }
        let n = radii.len();
        Ok(RiemannianChart {
            lower: vec![0.0; n],
            upper: vec![2.0 * PI; n],
            periodic: vec![true; n],
            kind: ChartKind::FlatTorus {
                radii: radii.to_vec(),
            },
            steps_per_unit: 64.0,
        })
    }

    pub fn round_sphere(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidInput(format!("sphere radius must be positive, got {radius}")));
        }
        Ok(RiemannianChart {
            lower: vec![0.0, 0.0],
            upper: vec![PI, 2.0 * PI],
            periodic: vec![false, true],
            kind: ChartKind::RoundSphere { radius },
            steps_per_unit: 64.0,
        })
    }

    pub fn generic(
        lower: Vec<f64>,
        upper: Vec<f64>,
        periodic: Vec<bool>,
        metric: MetricFn,
        injectivity_radius: Option<f64>,
    ) -> Result<Self> {
        let n = lower.len();
        if n == 0 || upper.len() != n || periodic.len() != n {
            return Err(Error::ShapeMismatch("chart box and periodicity flags disagree".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(Error::InvalidInput("chart box needs lower < upper on every axis".into()));
        }
        Ok(RiemannianChart {
            lower,
            upper,
            periodic,
            kind: ChartKind::Generic {
                metric,
                injectivity_radius,
            },
            steps_per_unit: 64.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn kind(&self) -> &ChartKind {
        &self.kind
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    /// True when the metric does not depend on the base point.
    pub fn is_flat(&self) -> bool {
        matches!(self.kind, ChartKind::FlatTorus { .. })
    }

    pub fn point(&self, coords: &[f64]) -> Result<ManifoldPoint> {
        ManifoldPoint::new(self, coords)
    }

    /// Reduces periodic coordinates into `[lower, lower + period)`.
    pub fn reduce(&self, coords: &mut [f64]) {
        for i in 0..coords.len() {
            if self.periodic[i] {
                let period = self.width(i);
                let mut r = (coords[i] - self.lower[i]).rem_euclid(period);
                // rem_euclid can round up to exactly the period
                if r >= period {
                    r = 0.0;
                }
                coords[i] = self.lower[i] + r;
            }
        }
    }

    fn raw_metric(&self, b: &[f64]) -> DMatrix<f64> {
        match &self.kind {
            ChartKind::FlatTorus { radii } => {
                DMatrix::from_diagonal(&DVector::from_iterator(radii.len(), radii.iter().map(|r| r * r)))
            }
            ChartKind::RoundSphere { radius } => {
                let r2 = radius * radius;
                let s = b[0].sin();
                DMatrix::from_diagonal(&DVector::from_vec(vec![r2, r2 * s * s]))
            }
            ChartKind::Generic { metric, .. } => metric(b),
        }
    }

    /// Metric matrix at a raw coordinate vector, checked for symmetry and positive definiteness.
    pub fn metric_at_coords(&self, b: &[f64]) -> Result<DMatrix<f64>> {
        let g = self.raw_metric(b);
        let n = self.dim();
        let degenerate = || Error::MetricDegenerate { point: b.to_vec() };
        if g.nrows() != n || g.ncols() != n || g.iter().any(|x| !x.is_finite()) {
            return Err(degenerate());
        }
        let scale = g.amax().max(f64::MIN_POSITIVE);
        for i in 0..n {
            for j in 0..i {
                if (g[(i, j)] - g[(j, i)]).abs() > 1e-12 * scale {
                    return Err(degenerate());
                }
            }
        }
        let chol = g.clone().cholesky().ok_or_else(degenerate)?;
        let l = chol.l();
        let dmin = (0..n).map(|i| l[(i, i)]).fold(f64::INFINITY, f64::min);
        if !(dmin > 1e-150) {
            return Err(degenerate());
        }
        Ok(g)
    }

    pub fn metric_at(&self, b: &ManifoldPoint) -> Result<DMatrix<f64>> {
        self.metric_at_coords(&b.coords)
    }

    /// √det g at b.
    pub fn volume_density(&self, b: &ManifoldPoint) -> Result<f64> {
        let g = self.metric_at(b)?;
        let chol = g.cholesky().ok_or_else(|| Error::MetricDegenerate {
            point: b.coords.clone(),
        })?;
        let l = chol.l();
        Ok((0..self.dim()).map(|i| l[(i, i)]).product())
    }

    pub fn injectivity_radius(&self, _b: &ManifoldPoint) -> Result<f64> {
        match &self.kind {
            ChartKind::FlatTorus { radii } => Ok(PI * radii.iter().cloned().fold(f64::INFINITY, f64::min)),
            ChartKind::RoundSphere { radius } => Ok(PI * radius),
            ChartKind::Generic {
                injectivity_radius, ..
            } => injectivity_radius.ok_or_else(|| {
                Error::MissingParameter("generic chart needs a declared injectivity radius".into())
            }),
        }
    }

    /// γ_V(1) for the geodesic with γ(0) = b, γ'(0) = V.
    pub fn exp_map(&self, b: &ManifoldPoint, v: &[f64]) -> Result<ManifoldPoint> {
        if v.len() != self.dim() {
            return Err(Error::ShapeMismatch("tangent vector length differs from chart dimension".into()));
        }
        if v.iter().all(|&x| x == 0.0) {
            return Ok(b.clone());
        }
        match &self.kind {
            ChartKind::FlatTorus { .. } => {
                let mut c: Vec<f64> = b.coords.iter().zip(v).map(|(x, y)| x + y).collect();
                self.reduce(&mut c);
                Ok(ManifoldPoint { coords: c })
            }
            ChartKind::RoundSphere { radius } => Ok(sphere_exp(*radius, &b.coords, v, self)),
            ChartKind::Generic { .. } => self.exp_map_numeric(b, v),
        }
    }

    /// RK4 geodesic integration regardless of chart kind.
    pub fn exp_map_numeric(&self, b: &ManifoldPoint, v: &[f64]) -> Result<ManifoldPoint> {
        let traj = self.geodesic_rk4(b, v, 1)?;
        let (x, _) = traj.into_iter().last().expect("trajectory has an endpoint");
        Ok(ManifoldPoint { coords: x })
    }

    /// Samples of (γ(t), γ'(t)) at `samples + 1` evenly spaced times in [0, 1],
    /// integrated with RK4.
    pub fn geodesic_trajectory(
        &self,
        b: &ManifoldPoint,
        v: &[f64],
        samples: usize,
    ) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        self.geodesic_rk4(b, v, samples.max(1))
    }

    fn geodesic_rk4(
        &self,
        b: &ManifoldPoint,
        v: &[f64],
        samples: usize,
    ) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        let n = self.dim();
        let g = self.metric_at(b)?;
        let vv = DVector::from_column_slice(v);
        let speed = vv.dot(&(&g * &vv)).sqrt();
        let per_sample = ((self.steps_per_unit * speed) / samples as f64).ceil().max(1.0) as usize;
        let h = 1.0 / (per_sample * samples) as f64;

        let mut x = b.coords.clone();
        let mut u = v.to_vec();
        let mut out = Vec::with_capacity(samples + 1);
        out.push((x.clone(), u.clone()));
        for _ in 0..samples {
            for _ in 0..per_sample {
                let (k1x, k1u) = (u.clone(), self.geodesic_accel(&x, &u)?);
                let x2 = axpy(&x, 0.5 * h, &k1x);
                let u2 = axpy(&u, 0.5 * h, &k1u);
                let (k2x, k2u) = (u2.clone(), self.geodesic_accel(&x2, &u2)?);
                let x3 = axpy(&x, 0.5 * h, &k2x);
                let u3 = axpy(&u, 0.5 * h, &k2u);
                let (k3x, k3u) = (u3.clone(), self.geodesic_accel(&x3, &u3)?);
                let x4 = axpy(&x, h, &k3x);
                let u4 = axpy(&u, h, &k3u);
                let (k4x, k4u) = (u4.clone(), self.geodesic_accel(&x4, &u4)?);
                for i in 0..n {
                    x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
                    u[i] += h / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
                }
                self.check_inside(&x)?;
                self.reduce(&mut x);
            }
            out.push((x.clone(), u.clone()));
        }
        Ok(out)
    }

    fn check_inside(&self, x: &[f64]) -> Result<()> {
        for i in 0..x.len() {
            if !self.periodic[i] && (x[i] < self.lower[i] || x[i] > self.upper[i]) {
                return Err(Error::ChartExit {
                    axis: i,
                    point: x.to_vec(),
                });
            }
        }
        Ok(())
    }

    /// Finite-difference step per axis.
    pub fn fd_step(&self, axis: usize) -> f64 {
        1e-5 * self.width(axis)
    }

    /// Shifted coordinate for a finite-difference stencil; errors if a
    /// non-periodic axis would leave the box.
    pub(crate) fn fd_shift(&self, x: &[f64], axis: usize, delta: f64) -> Result<Vec<f64>> {
        let mut y = x.to_vec();
        y[axis] += delta;
        if !self.periodic[axis] && (y[axis] < self.lower[axis] || y[axis] > self.upper[axis]) {
            return Err(Error::FiniteDifference { point: x.to_vec() });
        }
        Ok(y)
    }

    /// Christoffel symbols Γ^k_ij at x, indexed `[k][i][j]`.
    pub fn christoffel(&self, x: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
        let n = self.dim();
        let g = self.metric_at_coords(x)?;
        let ginv = g
            .clone()
            .cholesky()
            .ok_or_else(|| Error::MetricDegenerate { point: x.to_vec() })?
            .inverse();
        // dg[l] = ∂_l g
        let mut dg = Vec::with_capacity(n);
        for l in 0..n {
            let h = self.fd_step(l);
            let gp = self.metric_at_coords(&self.fd_shift(x, l, h)?)?;
            let gm = self.metric_at_coords(&self.fd_shift(x, l, -h)?)?;
            dg.push((gp - gm) / (2.0 * h));
        }
        let mut gamma = vec![vec![vec![0.0; n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += ginv[(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]);
                    }
                    gamma[k][i][j] = 0.5 * s;
                }
            }
        }
        Ok(gamma)
    }

    fn geodesic_accel(&self, x: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        self.check_inside(x)?;
        // a stencil poking out of the box means the path is about to leave it
        let gamma = self.christoffel(x).map_err(|e| match e {
            Error::FiniteDifference { point } => {
                let axis = (0..n)
                    .filter(|&i| !self.periodic[i])
                    .min_by(|&i, &j| {
                        let di = (point[i] - self.lower[i]).min(self.upper[i] - point[i]);
                        let dj = (point[j] - self.lower[j]).min(self.upper[j] - point[j]);
                        di.total_cmp(&dj)
                    })
                    .unwrap_or(0);
                Error::ChartExit { axis, point }
            }
            other => other,
        })?;
        Ok((0..n)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += gamma[k][i][j] * u[i] * u[j];
                    }
                }
                -s
            })
            .collect())
    }
}

fn axpy(x: &[f64], a: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(x, y)| x + a * y).collect()
}

fn sphere_embed(r: f64, theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(
        r * theta.sin() * phi.cos(),
        r * theta.sin() * phi.sin(),
        r * theta.cos(),
    )
}

fn sphere_exp(r: f64, b: &[f64], v: &[f64], chart: &RiemannianChart) -> ManifoldPoint {
    let (theta, phi) = (b[0], b[1]);
    let x = sphere_embed(r, theta, phi);
    let d_theta = Vector3::new(
        r * theta.cos() * phi.cos(),
        r * theta.cos() * phi.sin(),
        -r * theta.sin(),
    );
    let d_phi = Vector3::new(-r * theta.sin() * phi.sin(), r * theta.sin() * phi.cos(), 0.0);
    let t = d_theta * v[0] + d_phi * v[1];
    let len = t.norm();
    let mut coords = if len == 0.0 {
        b.to_vec()
    } else {
        let y = x * (len / r).cos() + t * (r / len) * (len / r).sin();
        let th = (y.z / r).clamp(-1.0, 1.0).acos();
        let ph = y.y.atan2(y.x);
        vec![th, ph]
    };
    chart.reduce(&mut coords);
    ManifoldPoint { coords }
}

/// 3-D embedding of a sphere chart point, used by tests and the closed-form oracle.
pub fn sphere_point_to_r3(radius: f64, coords: &[f64]) -> [f64; 3] {
    let p = sphere_embed(radius, coords[0], coords[1]);
    [p.x, p.y, p.z]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_metric(r: f64) -> MetricFn {
        Arc::new(move |b: &[f64]| {
            let s = b[0].sin();
            DMatrix::from_diagonal(&DVector::from_vec(vec![r * r, r * r * s * s]))
        })
    }

    #[test]
    fn flat_torus_metric_is_diag() {
        let c = RiemannianChart::flat_torus(&[1.0, 2.0]).unwrap();
        let b = c.point(&[0.3, 5.0]).unwrap();
        let g = c.metric_at(&b).unwrap();
        assert_eq!(g, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]));
        assert_eq!(c.volume_density(&b).unwrap(), 2.0);
    }

    #[test]
    fn sphere_equator_metric_is_identity() {
        let c = RiemannianChart::round_sphere(1.0).unwrap();
        let b = c.point(&[PI / 2.0, 1.0]).unwrap();
        let g = c.metric_at(&b).unwrap();
        assert!((g[(0, 0)] - 1.0).abs() < 1e-15 && (g[(1, 1)] - 1.0).abs() < 1e-15);
        assert!((c.volume_density(&b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        let m: MetricFn = Arc::new(|_| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let c = RiemannianChart::generic(vec![0.0; 2], vec![1.0; 2], vec![false; 2], m, None).unwrap();
        let b = c.point(&[0.5, 0.5]).unwrap();
        assert!(matches!(c.metric_at(&b), Err(Error::MetricDegenerate { .. })));
    }

    #[test]
    fn flat_exp_is_translation() {
        let c = RiemannianChart::flat_torus(&[1.0, 1.0]).unwrap();
        let b = c.point(&[PI, PI]).unwrap();
        let e = c.exp_map(&b, &[PI / 2.0, 0.0]).unwrap();
        assert!((e.coords()[0] - 1.5 * PI).abs() < 1e-15);
        assert_eq!(e.coords()[1], PI);
        assert_eq!(c.exp_map(&b, &[0.0, 0.0]).unwrap(), b);
    }

    #[test]
    fn sphere_pole_to_equator() {
        let c = RiemannianChart::round_sphere(1.0).unwrap();
        let b = c.point(&[0.0, 0.0]).unwrap();
        let e = c.exp_map(&b, &[PI / 2.0, 0.0]).unwrap();
        assert!((e.coords()[0] - PI / 2.0).abs() < 1e-12);
        assert!(e.coords()[1].abs() < 1e-12);
    }

    #[test]
    fn injectivity_radii() {
        let t = RiemannianChart::flat_torus(&[1.0, 1.0]).unwrap();
        let s = RiemannianChart::round_sphere(2.0).unwrap();
        let b = t.point(&[0.0, 0.0]).unwrap();
        assert_eq!(t.injectivity_radius(&b).unwrap(), PI);
        let bs = s.point(&[1.0, 1.0]).unwrap();
        assert_eq!(s.injectivity_radius(&bs).unwrap(), 2.0 * PI);
        let id: MetricFn = Arc::new(|_| DMatrix::identity(1, 1));
        let g = RiemannianChart::generic(vec![0.0], vec![1.0], vec![false], id, Some(0.5)).unwrap();
        let bg = g.point(&[0.5]).unwrap();
        assert_eq!(g.injectivity_radius(&bg).unwrap(), 0.5);
    }

    #[test]
    fn generic_without_radius_is_missing_parameter() {
        let g = RiemannianChart::generic(
            vec![0.1, 0.0],
            vec![PI - 0.1, 2.0 * PI],
            vec![false, true],
            sphere_metric(1.0),
            None,
        )
        .unwrap();
        let b = g.point(&[1.0, 1.0]).unwrap();
        assert!(matches!(g.injectivity_radius(&b), Err(Error::MissingParameter(_))));
    }

    #[test]
    fn rk4_matches_great_circle() {
        let s = RiemannianChart::round_sphere(1.0).unwrap();
        let b = s.point(&[1.2, 0.4]).unwrap();
        let v = [0.5, 0.7];
        let closed = s.exp_map(&b, &v).unwrap();
        let num = s.exp_map_numeric(&b, &v).unwrap();
        for i in 0..2 {
            assert!((closed.coords()[i] - num.coords()[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn generic_chart_exit() {
        let g = RiemannianChart::generic(
            vec![0.5, 0.0],
            vec![PI - 0.5, 2.0 * PI],
            vec![false, true],
            sphere_metric(1.0),
            Some(PI),
        )
        .unwrap();
        let b = g.point(&[1.0, 0.0]).unwrap();
        assert!(matches!(g.exp_map(&b, &[-1.0, 0.0]), Err(Error::ChartExit { axis: 0, .. })));
    }

    #[test]
    fn periodic_reduction_is_canonical() {
        let t = RiemannianChart::flat_torus(&[1.0]).unwrap();
        let p = t.point(&[-0.5]).unwrap();
        assert!((p.coords()[0] - (2.0 * PI - 0.5)).abs() < 1e-15);
        let q = t.point(&[2.0 * PI]).unwrap();
        assert_eq!(q.coords()[0], 0.0);
    }
}
