//! Fiberwise Bargmann transform, Fock-space quadrature, basis, kernel and the norm identity.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::contact::CospherePoint;
use crate::error::{Error, Result};
use crate::gabor::{gabor_coefficient, GaborAtom, WindowSpec};
use crate::lift::{FiberGrid, LiftedFiberSignal};
use crate::manifold::RiemannianChart;
use crate::quadrature::{gauss_legendre_symmetric, multi_index, tensor_size};

/// z = V + iη componentwise.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexFiberPoint {
    pub z: Vec<Complex64>,
}

pub fn complexify(v: &[f64], eta: &[f64]) -> ComplexFiberPoint {
    ComplexFiberPoint {
        z: v.iter().zip(eta).map(|(a, b)| Complex64::new(*a, *b)).collect(),
    }
}

pub fn decomplexify(z: &ComplexFiberPoint) -> (Vec<f64>, Vec<f64>) {
    (z.z.iter().map(|c| c.re).collect(), z.z.iter().map(|c| c.im).collect())
}

/// The real form of multiplication by i: (V, η) ↦ (−η, V).
pub fn complex_structure(v: &[f64], eta: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (eta.iter().map(|x| -x).collect(), v.to_vec())
}

/// 𝒫(V, η) = Vᵗ(A/π)V + 2i⟨η, V⟩ − ηᵗη.
pub fn quadratic_form_p(v: &[f64], eta: &[f64], a: &DMatrix<f64>) -> Complex64 {
    let n = v.len();
    let mut vav = 0.0;
    for i in 0..n {
        for j in 0..n {
            vav += v[i] * a[(i, j)] * v[j];
        }
    }
    let ev: f64 = eta.iter().zip(v).map(|(x, y)| x * y).sum();
    let ee: f64 = eta.iter().map(|x| x * x).sum();
    Complex64::new(vav / PI - ee, 2.0 * ev)
}

/// A = QᵗQ and the real-linear map P̃z = (Q/√π)Re z + i·Im z.
#[derive(Clone, Debug)]
pub struct FockWeight {
    pub a: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

impl FockWeight {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let l = a
            .clone()
            .cholesky()
            .ok_or_else(|| Error::WindowDegenerate {
                point: Vec::new(),
                min_eigenvalue: a.clone().symmetric_eigen().eigenvalues.min(),
            })?
            .unpack();
        Ok(FockWeight {
            a: a.clone(),
            q: l.transpose(),
        })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn p_tilde(&self, z: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let re: f64 = (0..n).map(|j| self.q[(i, j)] * z[j].re).sum::<f64>() / PI.sqrt();
                Complex64::new(re, z[i].im)
            })
            .collect()
    }

    /// 𝔓(z) = |P̃z|².
    pub fn frak_p(&self, z: &[Complex64]) -> f64 {
        self.p_tilde(z).iter().map(|c| c.norm_sqr()).sum()
    }

    /// Fock weight e^{−π𝔓(z)}.
    pub fn weight(&self, z: &[Complex64]) -> f64 {
        (-PI * self.frak_p(z)).exp()
    }

    /// N_A² = det(Q/√π), the constant making e_0 a unit vector.
    pub fn normalization_sq(&self) -> f64 {
        let n = self.dim();
        (0..n).map(|i| self.q[(i, i)]).product::<f64>() / PI.powf(n as f64 / 2.0)
    }
}

/// Tensor Gauss–Legendre grid over (V, η) ∈ [−L, L]^{2n}.
#[derive(Clone, Debug)]
pub struct ZGrid {
    pub dim: usize,
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl ZGrid {
    pub const DEFAULT_NODES: usize = 41;
    pub const DEFAULT_HALF_WIDTH: f64 = 4.0;
    pub const MAX_NODES: u128 = 3_000_000;

    pub fn new(dim: usize, half_width: f64, nodes: usize) -> Result<Self> {
        let extents = vec![nodes; 2 * dim];
        let total = tensor_size(&extents);
        if total > Self::MAX_NODES {
            return Err(Error::budget("Fock grid nodes", total, Self::MAX_NODES));
        }
        let (x, w) = gauss_legendre_symmetric(nodes, half_width);
        let mut points = Vec::with_capacity(total as usize * dim);
        let mut weights = Vec::with_capacity(total as usize);
        let mut idx = vec![0; 2 * dim];
        for flat in 0..total as usize {
            multi_index(&extents, flat, &mut idx);
            for k in 0..dim {
                points.push(Complex64::new(x[idx[k]], x[idx[dim + k]]));
            }
            weights.push(idx.iter().map(|&i| w[i]).product());
        }
        Ok(ZGrid { dim, points, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[Complex64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }
}

/// Cap on f-grid × z-grid kernel evaluations.
pub const MAX_TRANSFORM_WORK: u128 = 1_000_000_000;

/// ℬf(V, η) at one point, with W⋆(V, η) = Wᵗ(A/π)V + i⟨η, W⟩.
pub fn bargmann_at(f: &[Complex64], grid: &FiberGrid, volume: f64, a: &DMatrix<f64>, v: &[f64], eta: &[f64]) -> Complex64 {
    let n = v.len();
    let pv = quadratic_form_p(v, eta, a);
    let av: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[(i, j)] * v[j]).sum()).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..grid.len() {
        if f[k] == Complex64::new(0.0, 0.0) {
            continue;
        }
        let w = grid.point(k);
        let mut waw = 0.0;
        for i in 0..n {
            for j in 0..n {
                waw += w[i] * a[(i, j)] * w[j];
            }
        }
        let wav: f64 = w.iter().zip(&av).map(|(x, y)| x * y).sum();
        let ew: f64 = eta.iter().zip(w).map(|(x, y)| x * y).sum();
        let exponent = Complex64::new(2.0 * wav - waw, 2.0 * PI * ew) - pv * (PI / 2.0);
        acc += f[k] * exponent.exp() * grid.weights[k];
    }
    acc * volume
}

/// ℬf on every node of a z-grid.
pub fn bargmann_transform(
    f: &[Complex64],
    grid: &FiberGrid,
    volume: f64,
    a: &DMatrix<f64>,
    zgrid: &ZGrid,
) -> Result<Vec<Complex64>> {
    if f.len() != grid.len() || zgrid.dim != grid.dim || a.nrows() != grid.dim {
        return Err(Error::ShapeMismatch("signal, fiber grid, Fock grid and A disagree".into()));
    }
    let work = grid.len() as u128 * zgrid.len() as u128;
    if work > MAX_TRANSFORM_WORK {
        return Err(Error::budget("Bargmann kernel evaluations", work, MAX_TRANSFORM_WORK));
    }
    Ok((0..zgrid.len())
        .into_par_iter()
        .map(|i| {
            let (v, eta) = decomplexify(&ComplexFiberPoint {
                z: zgrid.point(i).to_vec(),
            });
            bargmann_at(f, grid, volume, a, &v, &eta)
        })
        .collect())
}

/// ∫ F·conj(G)·e^{−π𝔓(z)} dz.
pub fn fock_inner_product(f: &[Complex64], g: &[Complex64], weight: &FockWeight, zgrid: &ZGrid) -> Result<Complex64> {
    if f.len() != zgrid.len() || g.len() != zgrid.len() {
        return Err(Error::ShapeMismatch("Fock functions must be sampled on the z-grid".into()));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..zgrid.len() {
        acc += f[i] * g[i].conj() * (zgrid.weights[i] * weight.weight(zgrid.point(i)));
    }
    Ok(acc)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// e_α(z) = N_A·(π^{|α|}/α!)^{1/2}·(P̃z)^α.
pub fn basis_e_alpha(alpha: &[usize], weight: &FockWeight, z: &[Complex64]) -> Complex64 {
    let pz = weight.p_tilde(z);
    let deg: usize = alpha.iter().sum();
    let fact: f64 = alpha.iter().map(|&k| factorial(k)).product();
    let mut mono = Complex64::new(1.0, 0.0);
    for (c, &k) in pz.iter().zip(alpha) {
        mono *= c.powu(k as u32);
    }
    mono * (weight.normalization_sq().sqrt() * (PI.powi(deg as i32) / fact).sqrt())
}

/// K_{z0}(z) = N_A²·e^{π·conj(P̃z0)·P̃z}.
pub fn reproducing_kernel(z0: &[Complex64], weight: &FockWeight, z: &[Complex64]) -> Complex64 {
    let p0 = weight.p_tilde(z0);
    let pz = weight.p_tilde(z);
    let s: Complex64 = p0.iter().zip(&pz).map(|(a, b)| a.conj() * b).sum();
    (s * PI).exp() * weight.normalization_sq()
}

/// Multi-indices with |α| ≤ degree, graded then lexicographic.
pub fn multi_indices(n: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for d in 0..=degree {
        let mut cur = vec![0; n];
        fill(&mut out, &mut cur, 0, d);
    }
    out
}

fn fill(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, pos: usize, left: usize) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k;
        fill(out, cur, pos + 1, left - k);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub relative_error: f64,
}

/// |⟨f, M_ξT_WΨ⟩| against e^{−(π/2)𝔓(W, η̃)}·|ℬf(W, η̃)| with η̃ = ξ + η_p/(2π).
pub fn lemma_norm_verify(s: &LiftedFiberSignal, atom: &GaborAtom, spec: &WindowSpec) -> Result<NormCheck> {
    let lhs = gabor_coefficient(s, atom, spec)?.norm();
    let a = spec.at(s.point.base.coords())?;
    let weight = FockWeight::new(&a)?;
    let eta: Vec<f64> = atom
        .modulation
        .iter()
        .zip(&atom.point.p)
        .map(|(xi, p)| xi + p / (2.0 * PI))
        .collect();
    let b = bargmann_at(&s.samples, &s.grid, s.volume, &a, &atom.translation, &eta);
    let z = complexify(&atom.translation, &eta);
    let rhs = (-(PI / 2.0) * weight.frak_p(&z.z)).exp() * b.norm();
    let scale = lhs.max(rhs);
    let relative_error = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
    Ok(NormCheck {
        lhs,
        rhs,
        relative_error,
    })
}

/// Largest singular value ρ of Q/√π and whether ρ ≤ 1.
pub fn embedding_check(a: &DMatrix<f64>) -> Result<(f64, bool)> {
    let w = FockWeight::new(a)?;
    let m = &w.q / PI.sqrt();
    let rho = m.singular_values().max();
    Ok((rho, rho <= 1.0 + 1e-12))
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relative_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub dim: usize,
    pub a_scalar: f64,
    pub seed: u64,
    pub identities: Vec<IdentityResult>,
    pub all_pass: bool,
    /// ∫e^{−WᵗAW}dW and ∫|Ψ|² = ∫e^{−2WᵗAW}dW on the fiber grid, with closed forms.
    pub window_integrals: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, serde::Deserialize, Serialize)]
#[serde(default)]
pub struct SuiteParams {
    pub dim: usize,
    /// A = a·Id.
    pub a_scalar: f64,
    pub f_nodes: usize,
    pub f_half_width: f64,
    pub z_nodes: usize,
    pub z_half_width: f64,
    pub lemma_trials: usize,
    pub ratio_trials: usize,
    pub kernel_points: usize,
    pub max_degree: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            dim: 1,
            a_scalar: PI,
            f_nodes: 161,
            f_half_width: 6.0,
            z_nodes: ZGrid::DEFAULT_NODES,
            z_half_width: ZGrid::DEFAULT_HALF_WIDTH,
            lemma_trials: 20,
            ratio_trials: 10,
            kernel_points: 5,
            max_degree: 3,
        }
    }
}

/// Sum of three modulated, translated Gaussians with random complex amplitudes.
pub fn random_test_signal<R: Rng>(rng: &mut R, grid: &FiberGrid) -> Vec<Complex64> {
    let n = grid.dim;
    let terms: Vec<(Vec<f64>, Vec<f64>, Complex64)> = (0..3)
        .map(|_| {
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (c, w, amp)
        })
        .collect();
    (0..grid.len())
        .map(|k| {
            let x = grid.point(k);
            terms
                .iter()
                .map(|(c, w, amp)| {
                    let d2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                    let ph: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum();
                    amp * Complex64::new(-PI * d2, 2.0 * PI * ph).exp()
                })
                .sum()
        })
        .collect()
}

fn l2_sq(f: &[Complex64], grid: &FiberGrid) -> f64 {
    f.iter().zip(&grid.weights).map(|(x, w)| w * x.norm_sqr()).sum()
}

fn identity(name: &str, lhs: f64, rhs: f64, relative_error: f64, tolerance: f64, detail: serde_json::Value) -> IdentityResult {
    IdentityResult {
        name: name.to_string(),
        lhs,
        rhs,
        relative_error,
        tolerance,
        pass: relative_error < tolerance,
        detail,
    }
}

/// Runs the six quadrature-level identities at A = a·Id.
pub fn verification_suite(params: &SuiteParams, seed: u64) -> Result<SuiteReport> {
    let n = params.dim;
    let chart = RiemannianChart::flat_torus(&vec![1.0; n])?;
    let base = chart.point(&vec![0.0; n])?;
    let mut p = vec![0.0; n];
    p[0] = 1.0;
    let m = CospherePoint::new(&chart, base, p.clone())?;
    let spec = WindowSpec::scalar(n, params.a_scalar);
    let a = spec.at(m.base.coords())?;
    let weight = FockWeight::new(&a)?;
    let fgrid = Arc::new(FiberGrid::new(n, params.f_half_width, params.f_nodes)?);
    let zgrid = ZGrid::new(n, params.z_half_width, params.z_nodes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids = Vec::new();

    // norm identity
    let mut worst = NormCheck {
        lhs: 0.0,
        rhs: 0.0,
        relative_error: 0.0,
    };
    for _ in 0..params.lemma_trials {
        let f = random_test_signal(&mut rng, &fgrid);
        let s = LiftedFiberSignal::from_samples(m.clone(), fgrid.clone(), 1.0, f)?;
        let atom = GaborAtom {
            point: m.clone(),
            translation: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            modulation: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        };
        let c = lemma_norm_verify(&s, &atom, &spec)?;
        if c.relative_error >= worst.relative_error {
            worst = c;
        }
    }
    ids.push(identity(
        "norm-lemma",
        worst.lhs,
        worst.rhs,
        worst.relative_error,
        1e-4,
        serde_json::json!({ "trials": params.lemma_trials }),
    ));

    // orthonormal basis
    let alphas = multi_indices(n, params.max_degree);
    let basis: Vec<Vec<Complex64>> = alphas
        .iter()
        .map(|al| (0..zgrid.len()).map(|i| basis_e_alpha(al, &weight, zgrid.point(i))).collect())
        .collect();
    let mut gram_dev: f64 = 0.0;
    let mut worst_entry = (0.0, 0.0);
    for i in 0..alphas.len() {
        for j in 0..alphas.len() {
            let g = fock_inner_product(&basis[i], &basis[j], &weight, &zgrid)?;
            let target = if i == j { 1.0 } else { 0.0 };
            let d = (g - target).norm();
            if d > gram_dev {
                gram_dev = d;
                worst_entry = (g.norm(), target);
            }
        }
    }
    ids.push(identity(
        "orthonormal-basis",
        worst_entry.0,
        worst_entry.1,
        gram_dev,
        1e-3,
        serde_json::json!({ "basis_size": alphas.len(), "max_abs_deviation": gram_dev }),
    ));

    // reproducing kernel
    let mut worst_rep = (0.0, 0.0, 0.0);
    for _ in 0..params.kernel_points {
        let r = rng.gen_range(0.3..1.5);
        let z0: Vec<Complex64> = (0..n)
            .map(|_| Complex64::from_polar(r / (n as f64).sqrt(), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        let k: Vec<Complex64> = (0..zgrid.len()).map(|i| reproducing_kernel(&z0, &weight, zgrid.point(i))).collect();
        for (al, e) in alphas.iter().zip(&basis) {
            let lhs = fock_inner_product(e, &k, &weight, &zgrid)?;
            let rhs = basis_e_alpha(al, &weight, &z0);
            let rel = (lhs - rhs).norm() / rhs.norm();
            if rel >= worst_rep.2 {
                worst_rep = (lhs.norm(), rhs.norm(), rel);
            }
        }
    }
    ids.push(identity(
        "reproducing-kernel",
        worst_rep.0,
        worst_rep.1,
        worst_rep.2,
        1e-3,
        serde_json::json!({ "points": params.kernel_points }),
    ));

    // bounded ratio ‖ℬf‖/‖f‖
    let mut ratios = Vec::with_capacity(params.ratio_trials);
    for _ in 0..params.ratio_trials {
        let f = random_test_signal(&mut rng, &fgrid);
        let bf = bargmann_transform(&f, &fgrid, 1.0, &a, &zgrid)?;
        let nb = fock_inner_product(&bf, &bf, &weight, &zgrid)?.re.sqrt();
        ratios.push(nb / l2_sq(&f, &fgrid).sqrt());
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let var = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / ratios.len() as f64;
    let spread = var.sqrt() / mean;
    let det = a.determinant();
    let nominal_constant = (PI.powi(n as i32) / det).sqrt();
    let fock_constant = (PI.powi(n as i32) / (2f64.powi(n as i32) * det)).powf(0.25);
    ids.push(identity(
        "bounded-ratio",
        ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        spread,
        1e-3,
        serde_json::json!({
            "ratios": ratios,
            "mean": mean,
            "nominal_constant": nominal_constant,
            "deviation_from_nominal": mean - nominal_constant,
            "closed_form_constant": fock_constant,
        }),
    ));

    // embedding verdicts
    let cases = [
        (DMatrix::from_diagonal_element(2, 2, PI), true),
        (DMatrix::from_diagonal_element(2, 2, 4.0 * PI), false),
        (DMatrix::from_row_slice(2, 2, &[PI, 0.0, 0.0, PI / 4.0]), true),
    ];
    let mut verdicts = Vec::new();
    let mut wrong = 0usize;
    for (m, expected) in &cases {
        let (rho, embeds) = embedding_check(m)?;
        if embeds != *expected {
            wrong += 1;
        }
        verdicts.push(serde_json::json!({ "a_diagonal": [m[(0, 0)], m[(1, 1)]], "rho": rho, "embeds": embeds, "expected": expected }));
    }
    let (rho_here, embeds_here) = embedding_check(&a)?;
    ids.push(identity(
        "embedding",
        (cases.len() - wrong) as f64,
        cases.len() as f64,
        wrong as f64,
        0.5,
        serde_json::json!({ "cases": verdicts, "configured": { "rho": rho_here, "embeds": embeds_here } }),
    ));

    // transform of the window at the origin
    let psi: Vec<Complex64> = (0..fgrid.len())
        .map(|k| crate::gabor::window_with(&a, &p, fgrid.point(k)))
        .collect();
    let b0 = bargmann_at(&psi, &fgrid, 1.0, &a, &vec![0.0; n], &vec![0.0; n]);
    let ainv = a.clone().try_inverse().expect("SPD");
    let pap: f64 = (0..n).map(|i| (0..n).map(|j| p[i] * ainv[(i, j)] * p[j]).sum::<f64>()).sum();
    let closed = (PI.powi(n as i32) / (2f64.powi(n as i32) * det)).sqrt() * (-pap / 8.0).exp();
    ids.push(identity(
        "gaussian-transform",
        b0.norm(),
        closed,
        (b0 - closed).norm() / closed,
        1e-6,
        serde_json::json!({ "imaginary_part": b0.im }),
    ));

    let single: f64 = (0..fgrid.len()).map(|k| fgrid.weights[k] * (-quad(&a, fgrid.point(k))).exp()).sum();
    let double: f64 = (0..fgrid.len()).map(|k| fgrid.weights[k] * (-2.0 * quad(&a, fgrid.point(k))).exp()).sum();
    let window_integrals = serde_json::json!({
        "exp_minus_waw": single,
        "exp_minus_waw_closed_form": (PI.powi(n as i32) / det).sqrt(),
        "window_norm_sq": double,
        "window_norm_sq_closed_form": (PI.powi(n as i32) / (2f64.powi(n as i32) * det)).sqrt(),
    });

    let all_pass = ids.iter().all(|i| i.pass);
    Ok(SuiteReport {
        dim: n,
        a_scalar: params.a_scalar,
        seed,
        identities: ids,
        all_pass,
        window_integrals,
    })
}

fn quad(a: &DMatrix<f64>, v: &[f64]) -> f64 {
    let n = v.len();
    (0..n).map(|i| (0..n).map(|j| v[i] * a[(i, j)] * v[j]).sum::<f64>()).sum()
}
