//! Contact elements: points of the cosphere bundle, contact covectors and Reeb fields.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix4};

use crate::error::{Error, Result};
use crate::manifold::{ManifoldPoint, RiemannianChart};

/// Finite-difference step along the fiber-sphere coordinates.
const FIBER_FD_STEP: f64 = 1e-5;

/// A base point with a g*-unit covector.
#[derive(Clone, Debug, PartialEq)]
pub struct CospherePoint {
    pub base: ManifoldPoint,
    pub p: Vec<f64>,
}

impl CospherePoint {
    /// Requires |p|_{g*} = 1 to 1e-12.
    pub fn new(chart: &RiemannianChart, base: ManifoldPoint, p: Vec<f64>) -> Result<Self> {
        let norm = cometric_norm(chart, &base, &p)?;
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("covector {p:?} has g*-norm {norm}, expected 1")));
        }
        Ok(CospherePoint { base, p })
    }

    /// Rescales `p` to unit g*-norm.
    pub fn normalized(chart: &RiemannianChart, base: ManifoldPoint, p: &[f64]) -> Result<Self> {
        let norm = cometric_norm(chart, &base, p)?;
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidInput("zero covector has no direction".into()));
        }
        Ok(CospherePoint {
            base,
            p: p.iter().map(|x| x / norm).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }
}

fn cometric_norm(chart: &RiemannianChart, base: &ManifoldPoint, p: &[f64]) -> Result<f64> {
    if p.len() != chart.dim() {
        return Err(Error::ShapeMismatch("covector length differs from chart dimension".into()));
    }
    let l = cholesky_l(chart, base.coords())?;
    let q = l
        .solve_lower_triangular(&DVector::from_column_slice(p))
        .ok_or_else(|| Error::MetricDegenerate {
            point: base.coords().to_vec(),
        })?;
    Ok(q.norm())
}

fn cholesky_l(chart: &RiemannianChart, b: &[f64]) -> Result<DMatrix<f64>> {
    let g = chart.metric_at_coords(b)?;
    Ok(g.cholesky()
        .ok_or_else(|| Error::MetricDegenerate { point: b.to_vec() })?
        .unpack())
}

/// Quaternionic triple acting on 4-dimensional fibers.
#[derive(Clone, Debug, PartialEq)]
pub struct HypercomplexStructure {
    pub i: Matrix4<f64>,
    pub j: Matrix4<f64>,
    pub k: Matrix4<f64>,
}

impl HypercomplexStructure {
    pub fn builtin() -> Self {
        #[rustfmt::skip]
        let i = Matrix4::new(
            0.0, -1.0, 0.0, 0.0,
            1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, -1.0,
            0.0, 0.0, 1.0, 0.0,
        );
        #[rustfmt::skip]
        let j = Matrix4::new(
            0.0, 0.0, -1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            1.0, 0.0, 0.0, 0.0,
            0.0, -1.0, 0.0, 0.0,
        );
        let k = i * j;
        HypercomplexStructure { i, j, k }
    }

    /// Largest entrywise violation of I²=J²=K²=−Id, IJ=K, JI=−K.
    pub fn identity_defect(&self) -> f64 {
        let id = Matrix4::<f64>::identity();
        let (i, j, k) = (&self.i, &self.j, &self.k);
        [
            i * i + id,
            j * j + id,
            k * k + id,
            i * j - k,
            j * i + k,
        ]
        .iter()
        .map(|m| m.amax())
        .fold(0.0, f64::max)
    }
}

/// Covector field on M given by (base coords, covector) → n covectors.
pub type CovectorFrameFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<Vec<f64>> + Send + Sync>;

/// How the n contact covectors are produced from p.
#[derive(Clone)]
pub enum FrameStructure {
    /// p followed by its deterministic orthonormal completion.
    Standard,
    /// {p, Iᵗp, Jᵗp, Kᵗp}, n = 4.
    Hypercomplex(HypercomplexStructure),
    /// Arbitrary user rule, e.g. mock frames for degeneracy tests.
    Custom(CovectorFrameFn),
}

impl std::fmt::Debug for FrameStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FrameStructure::Standard => write!(f, "Standard"),
            FrameStructure::Hypercomplex(_) => write!(f, "Hypercomplex"),
            FrameStructure::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReebMethod {
    /// Analytic on flat charts, numeric otherwise.
    Auto,
    Analytic,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    AnalyticFlat,
    NumericGeneric,
    Hypercomplex,
}

#[derive(Clone, Debug)]
pub struct ContactFrame {
    pub point: CospherePoint,
    /// Contact covectors; the first one is p.
    pub covectors: Vec<Vec<f64>>,
    /// Horizontal parts of the Reeb vectors (components in T_bB).
    pub reeb: Vec<Vec<f64>>,
    /// Vertical parts of the Reeb vectors in the fiber-sphere chart; zero on the analytic path.
    pub reeb_vertical: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

/// Worst-case deviations of a frame from its invariants.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct FrameDefects {
    pub unit_norm: f64,
    pub orthogonality: f64,
    pub reeb_pairing: f64,
    pub reeb_gram_det: f64,
    pub vertical: f64,
}

impl FrameDefects {
    pub fn passes(&self) -> bool {
        self.unit_norm < 1e-9
            && self.orthogonality < 1e-9
            && self.reeb_pairing < 1e-9
            && self.reeb_gram_det > 1e-9
            && self.vertical < 1e-9
    }
}

impl ContactFrame {
    pub fn defects(&self, chart: &RiemannianChart) -> Result<FrameDefects> {
        let g = chart.metric_at(&self.point.base)?;
        let ginv = g
            .clone()
            .cholesky()
            .ok_or_else(|| Error::MetricDegenerate {
                point: self.point.base.coords().to_vec(),
            })?
            .inverse();
        let n = self.covectors.len();
        let cov: Vec<DVector<f64>> = self.covectors.iter().map(|c| DVector::from_column_slice(c)).collect();
        let reeb: Vec<DVector<f64>> = self.reeb.iter().map(|c| DVector::from_column_slice(c)).collect();
        let mut d = FrameDefects::default();
        for i in 0..n {
            for j in 0..n {
                let gij = cov[i].dot(&(&ginv * &cov[j]));
                if i == j {
                    d.unit_norm = d.unit_norm.max((gij - 1.0).abs());
                } else {
                    d.orthogonality = d.orthogonality.max(gij.abs());
                }
            }
            d.reeb_pairing = d.reeb_pairing.max((cov[i].dot(&reeb[i]) - 1.0).abs());
        }
        let gram = DMatrix::from_fn(n, n, |i, j| reeb[i].dot(&(&g * &reeb[j])));
        d.reeb_gram_det = gram.determinant();
        d.vertical = self
            .reeb_vertical
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |a, x| a.max(x.abs()));
        Ok(d)
    }
}

/// Branch choice for the completion, fixed at a center point so that
/// finite-difference stencils see a smooth field.
#[derive(Clone, Copy, Debug)]
struct Branch {
    householder_plus: bool,
}

impl Branch {
    fn at(p_hat: &DVector<f64>) -> Self {
        let n = p_hat.len();
        Branch {
            householder_plus: n >= 3 && p_hat[n - 1] > 0.0,
        }
    }
}

/// Completion of a Euclidean unit vector to a positively oriented orthonormal basis.
fn complete_euclidean(p_hat: &DVector<f64>, branch: Branch) -> Vec<DVector<f64>> {
    let n = p_hat.len();
    match n {
        1 => Vec::new(),
        2 => vec![DVector::from_vec(vec![-p_hat[1], p_hat[0]])],
        _ => {
            let mut w = -p_hat.clone();
            if branch.householder_plus {
                w = p_hat.clone();
            }
            w[n - 1] += 1.0;
            let ww = w.dot(&w);
            let mut cols: Vec<DVector<f64>> = (0..n - 1)
                .map(|i| {
                    let mut e = DVector::zeros(n);
                    e[i] = 1.0;
                    let c = 2.0 * w[i] / ww;
                    e - &w * c
                })
                .collect();
            // det[p̂ | He_1 .. He_{n-1}] = (-1)^n on the minus branch, (-1)^{n+1} on the plus branch
            let negative = (n % 2 == 1) != branch.householder_plus;
            if negative {
                let last = cols.last_mut().expect("n >= 3");
                *last = -last.clone();
            }
            cols
        }
    }
}

/// g*-orthonormal covectors completing p, positively oriented.
pub fn orthonormal_completion(p: &[f64], metric: &DMatrix<f64>) -> Result<Vec<Vec<f64>>> {
    let l = metric
        .clone()
        .cholesky()
        .ok_or_else(|| Error::MetricDegenerate { point: Vec::new() })?
        .unpack();
    let p_hat = l
        .solve_lower_triangular(&DVector::from_column_slice(p))
        .ok_or_else(|| Error::MetricDegenerate { point: Vec::new() })?;
    let branch = Branch::at(&p_hat);
    Ok(complete_euclidean(&p_hat, branch)
        .into_iter()
        .map(|u| (&l * u).as_slice().to_vec())
        .collect())
}

fn structure_covectors(
    structure: &FrameStructure,
    l: &DMatrix<f64>,
    b: &[f64],
    p: &[f64],
    branch: Option<Branch>,
) -> Result<Vec<Vec<f64>>> {
    let n = p.len();
    let p_hat = l
        .solve_lower_triangular(&DVector::from_column_slice(p))
        .ok_or_else(|| Error::MetricDegenerate { point: b.to_vec() })?;
    let to_coframe = |u: DVector<f64>| (l * u).as_slice().to_vec();
    match structure {
        FrameStructure::Standard => {
            let branch = branch.unwrap_or_else(|| Branch::at(&p_hat));
            let mut out = vec![p.to_vec()];
            out.extend(complete_euclidean(&p_hat, branch).into_iter().map(to_coframe));
            Ok(out)
        }
        FrameStructure::Hypercomplex(h) => {
            if n != 4 {
                return Err(Error::ShapeMismatch("hypercomplex frames need a 4-dimensional base".into()));
            }
            let q = nalgebra::Vector4::new(p_hat[0], p_hat[1], p_hat[2], p_hat[3]);
            let mut out = vec![p.to_vec()];
            for m in [&h.i, &h.j, &h.k] {
                let v = m.transpose() * q;
                out.push(to_coframe(DVector::from_column_slice(v.as_slice())));
            }
            Ok(out)
        }
        FrameStructure::Custom(f) => {
            let c = f(b, p);
            if c.len() != n || c.iter().any(|v| v.len() != n) {
                return Err(Error::ShapeMismatch("custom frame must return n covectors of length n".into()));
            }
            Ok(c)
        }
    }
}

/// The n contact covectors at m.
pub fn contact_covectors(
    chart: &RiemannianChart,
    m: &CospherePoint,
    structure: &FrameStructure,
) -> Result<Vec<Vec<f64>>> {
    let l = cholesky_l(chart, m.base.coords())?;
    structure_covectors(structure, &l, m.base.coords(), &m.p, None)
}

/// Local coordinates (b, s) on M around a center point.
///
/// The fiber coordinates s ∈ ℝ^{n-1} parametrize p(b, s) = q/|q|_{g*(b)} with
/// q = p₀ + Σ s_k t_k, where t_k is the completion at the center.
struct FiberChart<'a> {
    chart: &'a RiemannianChart,
    p0: Vec<f64>,
    tangents: Vec<Vec<f64>>,
    branch: Branch,
}

impl<'a> FiberChart<'a> {
    fn new(chart: &'a RiemannianChart, m: &CospherePoint) -> Result<Self> {
        let l = cholesky_l(chart, m.base.coords())?;
        let p_hat = l
            .solve_lower_triangular(&DVector::from_column_slice(&m.p))
            .ok_or_else(|| Error::MetricDegenerate {
                point: m.base.coords().to_vec(),
            })?;
        let branch = Branch::at(&p_hat);
        let tangents = complete_euclidean(&p_hat, branch)
            .into_iter()
            .map(|u| (&l * u).as_slice().to_vec())
            .collect();
        Ok(FiberChart {
            chart,
            p0: m.p.clone(),
            tangents,
            branch,
        })
    }

    fn covector_at(&self, b: &[f64], s: &[f64]) -> Result<(DMatrix<f64>, Vec<f64>)> {
        let l = cholesky_l(self.chart, b)?;
        let mut q = self.p0.clone();
        for (sk, t) in s.iter().zip(&self.tangents) {
            for (qi, ti) in q.iter_mut().zip(t) {
                *qi += sk * ti;
            }
        }
        let qh = l
            .solve_lower_triangular(&DVector::from_column_slice(&q))
            .ok_or_else(|| Error::MetricDegenerate { point: b.to_vec() })?;
        let norm = qh.norm();
        Ok((l, q.iter().map(|x| x / norm).collect()))
    }

    /// Exterior derivative of a 1-form on M whose b-components are `field(b, p)`
    /// and whose s-components vanish; returns (ω, a) at the center in the
    /// 2n−1 coordinates (b, s).
    fn differential<F>(&self, b0: &[f64], field: F) -> Result<(DMatrix<f64>, DVector<f64>)>
    where
        F: Fn(&DMatrix<f64>, &[f64], &[f64]) -> Result<Vec<f64>>,
    {
        let n = b0.len();
        let dim = 2 * n - 1;
        let eval = |b: &[f64], s: &[f64]| -> Result<Vec<f64>> {
            let (l, p) = self.covector_at(b, s)?;
            field(&l, b, &p)
        };
        let s0 = vec![0.0; n - 1];
        let a0 = eval(b0, &s0)?;
        // jac[(j, k)] = ∂_j a_k
        let mut jac = DMatrix::zeros(dim, n);
        for j in 0..dim {
            let (plus, minus, h) = if j < n {
                let h = self.chart.fd_step(j);
                (
                    eval(&self.chart.fd_shift(b0, j, h)?, &s0)?,
                    eval(&self.chart.fd_shift(b0, j, -h)?, &s0)?,
                    h,
                )
            } else {
                let mut sp = s0.clone();
                let mut sm = s0.clone();
                sp[j - n] += FIBER_FD_STEP;
                sm[j - n] -= FIBER_FD_STEP;
                (eval(b0, &sp)?, eval(b0, &sm)?, FIBER_FD_STEP)
            };
            for k in 0..n {
                jac[(j, k)] = (plus[k] - minus[k]) / (2.0 * h);
            }
        }
        let omega = DMatrix::from_fn(dim, dim, |j, k| {
            let djk = if k < n { jac[(j, k)] } else { 0.0 };
            let dkj = if j < n { jac[(k, j)] } else { 0.0 };
            djk - dkj
        });
        let mut a = DVector::zeros(dim);
        for k in 0..n {
            a[k] = a0[k];
        }
        Ok((omega, a))
    }
}

fn solve_reeb(omega: &DMatrix<f64>, a: &DVector<f64>, point: &[f64]) -> Result<DVector<f64>> {
    let dim = a.len();
    let mut sys = DMatrix::zeros(dim + 1, dim);
    sys.view_mut((0, 0), (dim, dim)).copy_from(omega);
    for k in 0..dim {
        sys[(dim, k)] = a[k];
    }
    let mut rhs = DVector::zeros(dim + 1);
    rhs[dim] = 1.0;
    let svd = sys.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-9 * smax) {
        return Err(Error::ReebDegenerate {
            point: point.to_vec(),
        });
    }
    svd.solve(&rhs, 0.0).map_err(|_| Error::ReebDegenerate {
        point: point.to_vec(),
    })
}

/// Reeb vectors of the given covectors at m.
///
/// Returns (horizontal parts, vertical parts). The numeric path solves
/// α(R) = 1, ι_R dα = 0 with dα from central differences in (b, s).
pub fn reeb_fields(
    chart: &RiemannianChart,
    m: &CospherePoint,
    structure: &FrameStructure,
    covectors: &[Vec<f64>],
    method: ReebMethod,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n = m.dim();
    let analytic = match method {
        ReebMethod::Auto => chart.is_flat(),
        ReebMethod::Analytic => true,
        ReebMethod::Numeric => false,
    };
    if analytic {
        let g = chart.metric_at(&m.base)?;
        let chol = g.cholesky().ok_or_else(|| Error::MetricDegenerate {
            point: m.base.coords().to_vec(),
        })?;
        let reeb = covectors
            .iter()
            .map(|c| chol.solve(&DVector::from_column_slice(c)).as_slice().to_vec())
            .collect();
        return Ok((reeb, vec![vec![0.0; n.saturating_sub(1)]; covectors.len()]));
    }
    let fc = FiberChart::new(chart, m)?;
    let branch = fc.branch;
    let mut horiz = Vec::with_capacity(n);
    let mut vert = Vec::with_capacity(n);
    for i in 0..covectors.len() {
        let (omega, a) = fc.differential(m.base.coords(), |l, b, p| {
            let cs = structure_covectors(structure, l, b, p, Some(branch))?;
            Ok(cs[i].clone())
        })?;
        let r = solve_reeb(&omega, &a, m.base.coords())?;
        horiz.push(r.rows(0, n).iter().cloned().collect());
        vert.push(r.rows(n, n - 1).iter().cloned().collect());
    }
    Ok((horiz, vert))
}

/// Covectors plus Reeb vectors at m.
pub fn contact_frame(
    chart: &RiemannianChart,
    m: &CospherePoint,
    structure: &FrameStructure,
    method: ReebMethod,
) -> Result<ContactFrame> {
    let covectors = contact_covectors(chart, m, structure)?;
    let (reeb, reeb_vertical) = reeb_fields(chart, m, structure, &covectors, method)?;
    let numeric = match method {
        ReebMethod::Auto => !chart.is_flat(),
        ReebMethod::Analytic => false,
        ReebMethod::Numeric => true,
    };
    let provenance = match structure {
        FrameStructure::Hypercomplex(_) => Provenance::Hypercomplex,
        _ if numeric => Provenance::NumericGeneric,
        _ => Provenance::AnalyticFlat,
    };
    Ok(ContactFrame {
        point: m.clone(),
        covectors,
        reeb,
        reeb_vertical,
        provenance,
    })
}

/// |α ∧ (dα)^{n-1}| at m for the 1-form on M whose horizontal part is `field(b, p)`.
///
/// Uses the identity |α ∧ (dα)^{n-1}| = (n−1)!·√|det [[dα, α], [−αᵗ, 0]]|
/// in the (b, s) coordinates around m.
pub fn contact_condition_check<F>(chart: &RiemannianChart, m: &CospherePoint, field: F) -> Result<f64>
where
    F: Fn(&[f64], &[f64]) -> Vec<f64>,
{
    let n = m.dim();
    let fc = FiberChart::new(chart, m)?;
    let (omega, a) = fc.differential(m.base.coords(), |_, b, p| Ok(field(b, p)))?;
    let dim = 2 * n - 1;
    let mut big = DMatrix::zeros(dim + 1, dim + 1);
    big.view_mut((0, 0), (dim, dim)).copy_from(&omega);
    for k in 0..dim {
        big[(k, dim)] = a[k];
        big[(dim, k)] = -a[k];
    }
    let fact: f64 = (1..n).map(|k| k as f64).product();
    Ok(fact * big.determinant().abs().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(n: usize) -> RiemannianChart {
        RiemannianChart::flat_torus(&vec![1.0; n]).unwrap()
    }

    fn point(chart: &RiemannianChart, b: &[f64], p: &[f64]) -> CospherePoint {
        let base = chart.point(b).unwrap();
        CospherePoint::normalized(chart, base, p).unwrap()
    }

    #[test]
    fn planar_completion_rotates() {
        let g = DMatrix::identity(2, 2);
        assert_eq!(orthonormal_completion(&[1.0, 0.0], &g).unwrap(), vec![vec![0.0, 1.0]]);
        let u = orthonormal_completion(&[0.0, 1.0], &g).unwrap();
        assert_eq!(u, vec![vec![-1.0, 0.0]]);
    }

    #[test]
    fn completion_of_e3_is_oriented() {
        let g = DMatrix::identity(3, 3);
        let u = orthonormal_completion(&[0.0, 0.0, 1.0], &g).unwrap();
        let m = DMatrix::from_columns(&[
            DVector::from_vec(vec![0.0, 0.0, 1.0]),
            DVector::from_column_slice(&u[0]),
            DVector::from_column_slice(&u[1]),
        ]);
        assert!((m.determinant() - 1.0).abs() < 1e-12);
        assert!((m.transpose() * &m - DMatrix::identity(3, 3)).amax() < 1e-12);
    }

    #[test]
    fn completion_orientation_all_branches() {
        for n in 3..=6 {
            for sign in [-1.0, 1.0] {
                let mut p = vec![0.3; n];
                p[n - 1] = sign * 0.8;
                let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                p.iter_mut().for_each(|x| *x /= norm);
                let u = orthonormal_completion(&p, &DMatrix::identity(n, n)).unwrap();
                let mut cols = vec![DVector::from_column_slice(&p)];
                cols.extend(u.iter().map(|c| DVector::from_column_slice(c)));
                let m = DMatrix::from_columns(&cols);
                assert!((m.determinant() - 1.0).abs() < 1e-12, "n={n} sign={sign}");
            }
        }
    }

    #[test]
    fn flat_planar_covectors() {
        let c = flat(2);
        let phi: f64 = 0.8;
        let m = point(&c, &[1.0, 2.0], &[phi.cos(), phi.sin()]);
        let cov = contact_covectors(&c, &m, &FrameStructure::Standard).unwrap();
        assert!((cov[1][0] + phi.sin()).abs() < 1e-15 && (cov[1][1] - phi.cos()).abs() < 1e-15);
    }

    #[test]
    fn quaternion_identities_exact() {
        assert_eq!(HypercomplexStructure::builtin().identity_defect(), 0.0);
    }

    #[test]
    fn numeric_reeb_matches_metric_dual() {
        let c = flat(2);
        let phi: f64 = 2.1;
        let m = point(&c, &[0.4, 5.0], &[phi.cos(), phi.sin()]);
        let s = FrameStructure::Standard;
        let cov = contact_covectors(&c, &m, &s).unwrap();
        let (num, vert) = reeb_fields(&c, &m, &s, &cov, ReebMethod::Numeric).unwrap();
        let (ana, _) = reeb_fields(&c, &m, &s, &cov, ReebMethod::Analytic).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                assert!((num[i][k] - ana[i][k]).abs() < 1e-9);
            }
            assert!(vert[i].iter().all(|v| v.abs() < 1e-9));
        }
        assert!((num[0][0] - phi.cos()).abs() < 1e-9);
    }

    #[test]
    fn exact_form_is_not_contact() {
        let c = flat(2);
        let m = point(&c, &[1.0, 1.0], &[0.6, 0.8]);
        let v = contact_condition_check(&c, &m, |_, _| vec![1.0, 0.0]).unwrap();
        assert!(v < 1e-9);
        let w = contact_condition_check(&c, &m, |_, p| p.to_vec()).unwrap();
        assert!(w > 1e-3);
    }

    #[test]
    fn sphere_numeric_reeb_is_horizontal_dual() {
        let s = RiemannianChart::round_sphere(1.0).unwrap();
        let m = point(&s, &[1.1, 0.5], &[0.3, 0.9]);
        let f = contact_frame(&s, &m, &FrameStructure::Standard, ReebMethod::Auto).unwrap();
        assert_eq!(f.provenance, Provenance::NumericGeneric);
        let d = f.defects(&s).unwrap();
        assert!(d.unit_norm < 1e-12 && d.orthogonality < 1e-12);
        assert!(d.reeb_pairing < 1e-8, "{d:?}");
    }

    #[test]
    fn unit_check_rejects_non_unit() {
        let c = flat(2);
        let b = c.point(&[0.0, 0.0]).unwrap();
        assert!(CospherePoint::new(&c, b, vec![1.0, 1.0]).is_err());
    }
}
