//! Lattices in the fibers of E ⊕ E∨ generated by a contact frame.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::contact::{contact_frame, ContactFrame, CospherePoint, FrameStructure, ReebMethod};
use crate::error::{Error, Result};
use crate::manifold::RiemannianChart;
use crate::quadrature::rand_distr_free::standard_normal;

/// Enumeration cap for truncated lattices.
pub const MAX_LATTICE_POINTS: u128 = 10_000_000;
/// |det| at or below this marks a frame as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeVariant {
    /// Translations along the Reeb vectors.
    Reeb,
    /// Translations along the basis dual to the contact covectors.
    DualBasis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub variant: LatticeVariant,
    pub translation_scales: Vec<f64>,
    pub modulation_scales: Vec<f64>,
    pub truncation: usize,
}

impl LatticeSpec {
    pub fn uniform(n: usize, b: f64, c: f64, truncation: usize) -> Self {
        LatticeSpec {
            variant: LatticeVariant::Reeb,
            translation_scales: vec![b; n],
            modulation_scales: vec![c; n],
            truncation,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.translation_scales.len() != n || self.modulation_scales.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "lattice needs {n} translation and {n} modulation scales"
            )));
        }
        if self
            .translation_scales
            .iter()
            .chain(&self.modulation_scales)
            .any(|s| !s.is_finite() || *s == 0.0)
        {
            return Err(Error::InvalidInput("lattice scales must be finite and nonzero".into()));
        }
        if self.translation_scales.iter().any(|b| *b < 0.0) {
            return Err(Error::InvalidInput("translation scales must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LatticeFrame {
    pub spec: LatticeSpec,
    /// Unit-scale translation directions (Reeb vectors or the dual basis).
    pub directions: Vec<Vec<f64>>,
    /// Scaled translation generators b_i·T_i.
    pub translations: Vec<Vec<f64>>,
    /// Scaled modulation generators c_i·F_i.
    pub modulations: Vec<Vec<f64>>,
    pub frame: ContactFrame,
    pub degenerate: bool,
}

impl LatticeFrame {
    pub fn dim(&self) -> usize {
        self.translations.len()
    }

    /// The 2n×2n block-diagonal generator matrix (translations, modulations as columns).
    pub fn generator_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for k in 0..n {
                m[(k, i)] = self.translations[i][k];
                m[(n + k, n + i)] = self.modulations[i][k];
            }
        }
        m
    }
}

fn columns(vs: &[Vec<f64>]) -> DMatrix<f64> {
    let n = vs.len();
    DMatrix::from_fn(n, n, |k, i| vs[i][k])
}

pub fn build_lattice_frame(frame: &ContactFrame, spec: &LatticeSpec) -> Result<LatticeFrame> {
    let n = frame.covectors.len();
    spec.validate(n)?;
    let f = columns(&frame.covectors);
    let (directions, dir_ok) = match spec.variant {
        LatticeVariant::Reeb => {
            let r = columns(&frame.reeb);
            (frame.reeb.clone(), r.determinant().abs() > DEGENERACY_THRESHOLD)
        }
        LatticeVariant::DualBasis => {
            // ⟨F_j, V_i⟩ = δ_ij  ⇔  Fᵗ V = Id
            match f.transpose().lu().try_inverse() {
                Some(v) if f.determinant().abs() > DEGENERACY_THRESHOLD => (
                    (0..n).map(|i| v.column(i).iter().cloned().collect()).collect(),
                    true,
                ),
                _ => (vec![vec![0.0; n]; n], false),
            }
        }
    };
    let translations: Vec<Vec<f64>> = directions
        .iter()
        .zip(&spec.translation_scales)
        .map(|(d, b)| d.iter().map(|x| b * x).collect())
        .collect();
    let modulations: Vec<Vec<f64>> = frame
        .covectors
        .iter()
        .zip(&spec.modulation_scales)
        .map(|(c, s)| c.iter().map(|x| s * x).collect())
        .collect();
    let mut lf = LatticeFrame {
        spec: spec.clone(),
        directions,
        translations,
        modulations,
        frame: frame.clone(),
        degenerate: false,
    };
    lf.degenerate = !dir_ok
        || f.determinant().abs() <= DEGENERACY_THRESHOLD
        || lf.generator_matrix().determinant().abs() <= DEGENERACY_THRESHOLD;
    Ok(lf)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticePoint {
    pub translation: Vec<f64>,
    pub modulation: Vec<f64>,
    /// (k_1..k_n, l_1..l_n)
    pub index: Vec<i64>,
}

/// Number of points with every index in [−K, K].
pub fn lattice_point_count(n: usize, k: usize) -> u128 {
    (2 * k as u128 + 1).pow(2 * n as u32)
}

/// All lattice points with indices in [−K, K], lexicographic in the index.
pub fn enumerate_lattice_points(lf: &LatticeFrame, k: usize) -> Result<Vec<LatticePoint>> {
    if lf.degenerate {
        return Err(Error::DegenerateLattice);
    }
    let n = lf.dim();
    let count = lattice_point_count(n, k);
    if count > MAX_LATTICE_POINTS {
        return Err(Error::budget("lattice points", count, MAX_LATTICE_POINTS));
    }
    let side = 2 * k + 1;
    let mut idx = vec![0usize; 2 * n];
    let mut out = Vec::with_capacity(count as usize);
    for flat in 0..count as usize {
        crate::quadrature::multi_index(&vec![side; 2 * n], flat, &mut idx);
        let index: Vec<i64> = idx.iter().map(|&i| i as i64 - k as i64).collect();
        let mut translation = vec![0.0; n];
        let mut modulation = vec![0.0; n];
        for i in 0..n {
            let (ki, li) = (index[i] as f64, index[n + i] as f64);
            for c in 0..n {
                translation[c] += ki * lf.translations[i][c];
                modulation[c] += li * lf.modulations[i][c];
            }
        }
        out.push(LatticePoint {
            translation,
            modulation,
            index,
        });
    }
    Ok(out)
}

/// Uniformly random cosphere point: uniform chart coordinates (θ-weighted on
/// the sphere chart) and an isotropic direction.
pub fn random_cosphere_point<R: Rng>(chart: &RiemannianChart, rng: &mut R) -> Result<CospherePoint> {
    let n = chart.dim();
    let coords: Vec<f64> = (0..n)
        .map(|i| rng.gen_range(chart.lower()[i]..chart.upper()[i]))
        .collect();
    let base = chart.point(&coords)?;
    let l = chart.metric_at(&base)?.cholesky().expect("checked SPD").unpack();
    let dir: Vec<f64> = (0..n).map(|_| standard_normal(rng)).collect();
    // isotropic in the orthonormal coframe, mapped back with L
    let p = &l * DVector::from_vec(dir);
    CospherePoint::normalized(chart, base, p.as_slice())
}

/// Fraction of random cosphere points whose lattice frame is degenerate.
pub fn degenerate_locus_probe(
    chart: &RiemannianChart,
    structure: &FrameStructure,
    spec: &LatticeSpec,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidInput("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degenerate = 0usize;
    for _ in 0..samples {
        let m = random_cosphere_point(chart, &mut rng)?;
        let d = match contact_frame(chart, &m, structure, ReebMethod::Auto) {
            Ok(frame) => build_lattice_frame(&frame, spec)?.degenerate,
            Err(Error::ReebDegenerate { .. }) => true,
            Err(e) => return Err(e),
        };
        if d {
            degenerate += 1;
        }
    }
    Ok(degenerate as f64 / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn frame2(phi: f64) -> (RiemannianChart, ContactFrame) {
        let c = RiemannianChart::flat_torus(&[1.0, 1.0]).unwrap();
        let b = c.point(&[1.0, 2.0]).unwrap();
        let m = CospherePoint::normalized(&c, b, &[phi.cos(), phi.sin()]).unwrap();
        let f = contact_frame(&c, &m, &FrameStructure::Standard, ReebMethod::Auto).unwrap();
        (c, f)
    }

    #[test]
    fn counts() {
        let (_, f) = frame2(0.3);
        let lf = build_lattice_frame(&f, &LatticeSpec::uniform(2, 1.0, 1.0, 0)).unwrap();
        let pts = enumerate_lattice_points(&lf, 0).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].index.iter().all(|&i| i == 0));
        assert_eq!(enumerate_lattice_points(&lf, 2).unwrap().len(), 625);
    }

    #[test]
    fn scaling_is_exact() {
        let (_, f) = frame2(0.9);
        let unit = build_lattice_frame(&f, &LatticeSpec::uniform(2, 1.0, 1.0, 0)).unwrap();
        let s = build_lattice_frame(&f, &LatticeSpec::uniform(2, 0.7, 0.7, 0)).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                assert_eq!(s.translations[i][k], 0.7 * unit.translations[i][k]);
                assert_eq!(s.modulations[i][k], 0.7 * unit.modulations[i][k]);
            }
        }
    }

    #[test]
    fn equal_covectors_are_degenerate() {
        let (c, mut f) = frame2(0.2);
        f.covectors[1] = f.covectors[0].clone();
        f.reeb[1] = f.reeb[0].clone();
        let mut spec = LatticeSpec::uniform(2, 1.0, 1.0, 0);
        assert!(build_lattice_frame(&f, &spec).unwrap().degenerate);
        spec.variant = LatticeVariant::DualBasis;
        assert!(build_lattice_frame(&f, &spec).unwrap().degenerate);

        let mock = FrameStructure::Custom(Arc::new(|_, p| vec![p.to_vec(), p.to_vec()]));
        let frac = degenerate_locus_probe(&c, &mock, &spec, 50, 1).unwrap();
        assert_eq!(frac, 1.0);
    }

    #[test]
    fn budget_cap() {
        let (_, f) = frame2(0.2);
        let lf = build_lattice_frame(&f, &LatticeSpec::uniform(2, 1.0, 1.0, 0)).unwrap();
        assert!(matches!(enumerate_lattice_points(&lf, 40), Err(Error::BudgetExceeded { .. })));
    }
}
