//! One-dimensional rules and tensor-product helpers.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
///
/// Newton iteration on the three-term recurrence; accurate to a few ulps for
/// the node counts used here (up to a few hundred).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[-half_width, half_width]`.
pub fn gauss_legendre_symmetric(n: usize, half_width: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.into_iter().map(|t| t * half_width).collect(),
        w.into_iter().map(|t| t * half_width).collect(),
    )
}

/// Gauss–Legendre rule mapped to `[lo, hi]`.
pub fn gauss_legendre_interval(n: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    (
        x.into_iter().map(|t| mid + half * t).collect(),
        w.into_iter().map(|t| t * half).collect(),
    )
}

/// Periodic trapezoid (equivalently midpoint-free uniform) rule on `[lo, lo+period)`.
pub fn periodic_trapezoid(n: usize, lo: f64, period: f64) -> (Vec<f64>, Vec<f64>) {
    let h = period / n as f64;
    ((0..n).map(|i| lo + h * i as f64).collect(), vec![h; n])
}

/// Row-major multi-index iterator over a tensor grid with the given extents.
/// The last axis varies fastest.
pub fn multi_index(extents: &[usize], mut flat: usize, out: &mut [usize]) {
    for axis in (0..extents.len()).rev() {
        out[axis] = flat % extents[axis];
        flat /= extents[axis];
    }
}

/// Product of extents as u128 so budget checks cannot overflow.
pub fn tensor_size(extents: &[usize]) -> u128 {
    extents.iter().map(|&e| e as u128).product()
}

/// Unit vectors on `S^{n-1}` used for direction scans and sphere quadrature.
///
/// n = 2: uniform angles starting at 0. n = 3: Fibonacci lattice. n >= 4:
/// normalized Gaussian samples from a fixed-seed generator.
pub fn sphere_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let phi = 2.0 * PI * k as f64 / count as f64;
                vec![phi.cos(), phi.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * k as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            use rand::SeedableRng;
            use rand_distr_free::standard_normal;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0f_d1);
            (0..count)
                .map(|_| {
                    let mut v: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.iter_mut().for_each(|x| *x /= norm);
                    v
                })
                .collect()
        }
    }
}

/// Surface measure of the unit sphere `S^{n-1}`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI / (n as f64 - 2.0) * sphere_area(n - 2),
    }
}

pub(crate) mod rand_distr_free {
    use rand::Rng;

    /// Box–Muller standard normal sample.
    pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
