//! Fixed Gaussian rules.
//!
//! Gauss-Hermite nodes come from the Golub-Welsch eigenproblem of the Jacobi
//! matrix, polished by Newton steps on the orthonormal Hermite recurrence.
//! Gauss-Legendre nodes use the usual cosine guess plus Newton. Both are
//! cached per order.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

pub const MAX_CACHED_ORDER: usize = 256;

#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

static HERMITE: [OnceLock<GaussRule>; MAX_CACHED_ORDER + 1] = [const { OnceLock::new() }; MAX_CACHED_ORDER + 1];
static LEGENDRE: [OnceLock<GaussRule>; MAX_CACHED_ORDER + 1] = [const { OnceLock::new() }; MAX_CACHED_ORDER + 1];

/// Gauss-Hermite rule for the weight `exp(-x^2)` on the real line.
///
/// # Panics
/// If `n == 0` or `n > MAX_CACHED_ORDER`.
pub fn gauss_hermite(n: usize) -> &'static GaussRule {
    assert!(
        (1..=MAX_CACHED_ORDER).contains(&n),
        "Gauss-Hermite order {n} unsupported"
    );
    HERMITE[n].get_or_init(|| build_hermite(n))
}

/// Gauss-Legendre rule on [-1, 1].
///
/// # Panics
/// If `n == 0` or `n > MAX_CACHED_ORDER`.
pub fn gauss_legendre(n: usize) -> &'static GaussRule {
    assert!(
        (1..=MAX_CACHED_ORDER).contains(&n),
        "Gauss-Legendre order {n} unsupported"
    );
    LEGENDRE[n].get_or_init(|| build_legendre(n))
}

// Orthonormal Hermite values p_0..p_n at x, with p_k normalized against exp(-x^2).
fn hermite_orthonormal(n: usize, x: f64, out: &mut [f64]) {
    out[0] = std::f64::consts::PI.powf(-0.25);
    if n >= 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for k in 1..n {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

fn build_hermite(n: usize) -> GaussRule {
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let off = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = off;
        jacobi[(k - 1, k)] = off;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut p = vec![0.0; n + 1];
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        // p_n' = sqrt(2n) p_{n-1} for the orthonormal family
        for _ in 0..3 {
            hermite_orthonormal(n, *x, &mut p);
            let dp = (2.0 * n as f64).sqrt() * p[n - 1];
            if dp == 0.0 {
                break;
            }
            *x -= p[n] / dp;
        }
        hermite_orthonormal(n, *x, &mut p);
        let s: f64 = p[..n].iter().map(|v| v * v).sum();
        weights.push(1.0 / s);
    }
    // enforce exact symmetry
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

fn build_legendre(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
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
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// 15-point Kronrod abscissae on [0, 1) (symmetric half), with the 7-point
/// Gauss rule embedded at the odd indices.
pub(crate) const KRONROD_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

pub(crate) const KRONROD_W: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

/// Gauss weights for KRONROD_X[1], [3], [5], [7].
pub(crate) const GAUSS7_W: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_moments() {
        for n in [1usize, 2, 5, 16, 40, 64, 80] {
            let r = gauss_hermite(n);
            let m0: f64 = r.weights.iter().sum();
            assert!((m0 - std::f64::consts::PI.sqrt()).abs() < 1e-13, "n={n} m0={m0}");
            if n >= 2 {
                let m2: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x).sum();
                assert!((m2 - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn hermite_known_nodes() {
        let r = gauss_hermite(2);
        assert!((r.nodes[1] - 0.5f64.sqrt()).abs() < 1e-15);
        let r = gauss_hermite(3);
        assert!((r.nodes[2] - 1.5f64.sqrt()).abs() < 1e-15);
        assert!((r.weights[1] - 2.0 * std::f64::consts::PI.sqrt() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre(10);
        for deg in 0..20 {
            let q: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "deg {deg}");
        }
    }

    #[test]
    fn kronrod_weights_sum() {
        let s: f64 = 2.0 * KRONROD_W[..7].iter().sum::<f64>() + KRONROD_W[7];
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = 2.0 * GAUSS7_W[..3].iter().sum::<f64>() + GAUSS7_W[3];
        assert!((g - 2.0).abs() < 1e-15);
    }
}
