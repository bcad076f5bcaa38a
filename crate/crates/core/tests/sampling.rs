use hyperhs::linalg::{max_abs, vandermonde};
use hyperhs::quadrature::{weighted_monte_carlo, McConfig, WeightedEstimate};
use hyperhs::sampling::*;
use hyperhs::specfun::macdonald_k0;
use hyperhs::{ComplexMatrix, Execution, C64};
use proptest::prelude::*;

const DRAWS: usize = 100_000;

#[test]
fn haar_moments() {
    let mut rng = RngStream::new(11, 0);
    let mut mean1 = C64::new(0.0, 0.0);
    let mut m2 = 0.0;
    let mut m3 = C64::new(0.0, 0.0);
    for _ in 0..DRAWS {
        mean1 += haar_unitary(1, &mut rng).unwrap()[(0, 0)];
        m2 += haar_unitary(2, &mut rng).unwrap()[(0, 0)].norm_sqr();
        let u = haar_unitary(3, &mut rng).unwrap();
        m3 += u[(0, 0)] * u[(1, 0)].conj();
    }
    let n = DRAWS as f64;
    assert!((mean1 / n).norm() < 0.02);
    assert!((m2 / n - 0.5).abs() < 0.01);
    assert!((m3 / n).norm() < 0.01);
}

#[test]
fn haar_draws_are_unitary_and_reproducible() {
    for stream in 0..200 {
        for n in 1..=8 {
            let u = haar_unitary(n, &mut RngStream::new(5, stream)).unwrap();
            let w = haar_unitary(n, &mut RngStream::new(5, stream)).unwrap();
            assert_eq!(u, w);
            assert!(max_abs(&(&u * u.adjoint() - ComplexMatrix::identity(n, n))) < 1e-12);
        }
    }
    assert!(haar_unitary(9, &mut RngStream::new(5, 0)).is_err());
}

#[test]
fn ginibre_moments() {
    let mut rng = RngStream::new(12, 0);
    let (mut mean, mut sq, mut cov) = (C64::new(0.0, 0.0), 0.0, C64::new(0.0, 0.0));
    for _ in 0..DRAWS {
        let g = ginibre(2, &mut rng).unwrap();
        mean += g[(0, 1)];
        sq += g[(1, 0)].norm_sqr();
        cov += g[(0, 0)] * g[(1, 1)].conj();
    }
    let n = DRAWS as f64;
    assert!((mean / n).norm() < 0.02);
    assert!((sq / n - 1.0).abs() < 0.02);
    assert!((cov / n).norm() < 0.02);
}

#[test]
fn hamiltonian_second_moments() {
    let profile = VarianceProfile::new(1.0, 1.0, 2, 2).unwrap();
    let n = profile.size();
    let mut rng = RngStream::new(13, 0);
    let mut acc = vec![vec![(0.0, 0.0); n]; n];
    for _ in 0..DRAWS {
        let h = korbital_hamiltonian(&profile, &mut rng);
        assert_eq!(max_abs(&(&h - h.adjoint())), 0.0);
        for l in 0..n {
            for m in 0..n {
                let x = h[(l, m)].norm_sqr();
                acc[l][m].0 += x;
                acc[l][m].1 += x * x;
            }
        }
    }
    let d = DRAWS as f64;
    for l in 0..n {
        for m in 0..n {
            let mean = acc[l][m].0 / d;
            let se = ((acc[l][m].1 / d - mean * mean) / d).sqrt();
            let want = profile.variance(l, m);
            assert!((mean - want).abs() <= 5.0 * se + 1e-15, "({l},{m}): {mean} vs {want}");
        }
    }
    let e13 = acc[0][2].0 / d;
    assert!((e13 / 0.25 - 1.0).abs() < 0.05);
}

#[test]
fn hamiltonian_blocks_vanish_without_coupling() {
    let profile = VarianceProfile::new(1.0, 0.0, 2, 2).unwrap();
    let h = korbital_hamiltonian(&profile, &mut RngStream::new(1, 0));
    for l in 0..2 {
        for m in 2..4 {
            assert_eq!(h[(l, m)], C64::new(0.0, 0.0));
        }
    }
    let three = VarianceProfile::new(1.0, 1.0, 2, 3).unwrap();
    assert_eq!(three.variance(0, 5), 0.0);
    assert_eq!(three.variance(0, 3), 0.25);
    assert_eq!(three.variance(1, 0), 0.5);
}

/// exp(-½ Tr[X T T^† + Y (T T^†)^{-1}]) for Hermitian X, Y.
fn macdonald_integrand(t: &ComplexMatrix, x: &ComplexMatrix, y: &ComplexMatrix) -> C64 {
    let p = t * t.adjoint();
    let Some(pi) = p.clone().try_inverse() else {
        return C64::new(0.0, 0.0);
    };
    let q = (x * &p).trace().re + (y * &pi).trace().re;
    C64::new((-0.5 * q).exp(), 0.0)
}

fn gl_average<F>(n: usize, scale: f64, f: F, cfg: &McConfig) -> WeightedEstimate
where
    F: Fn(&ComplexMatrix) -> C64 + Sync + Send,
{
    weighted_monte_carlo(
        |rng| {
            let s = gl_invariant_sample(n, scale, rng).unwrap();
            (s.point, s.log_weight)
        },
        f,
        cfg,
        Execution::Parallel,
    )
}

fn within_3_sigma(a: &WeightedEstimate, b: &WeightedEstimate) -> bool {
    let se = a.estimate.stderr.hypot(b.estimate.stderr);
    (a.estimate.value - b.estimate.value).norm() <= 3.0 * se
}

fn diag(v: &[f64]) -> ComplexMatrix {
    hyperhs::linalg::from_real_diagonal(v)
}

#[test]
fn gl_sample_reduces_to_k0_at_n1() {
    let cfg = McConfig::new(200_000, 5);
    let est = |x: f64, y: f64, off: u64| {
        gl_average(
            1,
            0.7,
            |t| macdonald_integrand(t, &diag(&[x]), &diag(&[y])),
            &cfg.with_stream_offset(off),
        )
    };
    let a = est(1.0, 1.0, 0);
    let b = est(1.5, 1.0, 1000);
    let ratio = b.estimate.value.re / a.estimate.value.re;
    // ½(x t² + y t^{-2}) = √(xy) cosh(2 log t + c)
    let want = macdonald_k0(1.5f64.sqrt()).unwrap() / macdonald_k0(1.0).unwrap();
    let rel = (a.estimate.stderr / a.estimate.value.re).hypot(b.estimate.stderr / b.estimate.value.re);
    assert!((ratio / want - 1.0).abs() < 3.0 * rel, "{ratio} vs {want} (rel {rel})");
}

#[test]
fn gl_sample_left_invariance() {
    let cfg = McConfig::new(200_000, 22);
    let x = diag(&[1.0, 0.4]);
    let mut y = diag(&[0.9, 0.3]);
    y[(0, 1)] = C64::new(0.1, 0.05);
    y[(1, 0)] = C64::new(0.1, -0.05);
    let g = haar_unitary(2, &mut RngStream::new(99, 0)).unwrap();
    let plain = gl_average(2, 0.7, |t| macdonald_integrand(t, &x, &y), &cfg);
    let moved = gl_average(
        2,
        0.7,
        |t| macdonald_integrand(&(&g * t), &x, &y),
        &cfg.with_stream_offset(1000),
    );
    assert!(within_3_sigma(&plain, &moved));
}

#[test]
fn gl_sample_scale_independence() {
    let cfg = McConfig::new(200_000, 23);
    let (x, y) = (diag(&[1.0, 0.4]), diag(&[0.9, 0.3]));
    let a = gl_average(2, 0.5, |t| macdonald_integrand(t, &x, &y), &cfg);
    let b = gl_average(
        2,
        1.0,
        |t| macdonald_integrand(t, &x, &y),
        &cfg.with_stream_offset(1000),
    );
    assert!(within_3_sigma(&a, &b));
}

#[test]
fn gl_sample_effective_size() {
    let cfg = McConfig::new(100_000, 20240601);
    for n in 1..=2 {
        let x = diag(&[1.0, 0.4][..n]);
        let y = diag(&[0.9, 0.3][..n]);
        let w = gl_average(n, 0.7, |t| macdonald_integrand(t, &x, &y), &cfg);
        assert!(w.ess > 0.05 * cfg.samples as f64, "n={n}: ess {}", w.ess);
    }
}

#[test]
fn gl_density_lemma() {
    // log_weight + log proposal = log Δ²(t²) + (1 - 2n) Σ log t
    let mut rng = RngStream::new(3, 0);
    for n in 1..=3 {
        let s = gl_invariant_sample(n, 0.7, &mut rng).unwrap();
        let t2: Vec<f64> = s.singular_values.iter().map(|t| t * t).collect();
        let logs: Vec<f64> = s.singular_values.iter().map(|t| t.ln()).collect();
        let dens = 2.0 * vandermonde(&t2).abs().ln() + (1.0 - 2.0 * n as f64) * logs.iter().sum::<f64>();
        let prop: f64 = logs
            .iter()
            .map(|l| -l * l / (2.0 * 0.49) - l - (0.7 * (2.0 * std::f64::consts::PI).sqrt()).ln())
            .sum();
        assert!((s.log_weight - (dens - prop)).abs() < 1e-10);
        // singular values of the point match the sampled ones
        let mut sv: Vec<f64> = s
            .point
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        let mut want = s.singular_values.clone();
        sv.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (a, b) in sv.iter().zip(&want) {
            assert!((a - b).abs() < 1e-10 * b.max(1.0));
        }
    }
}

proptest! {
    #[test]
    fn streams_reproduce(seed in any::<u64>(), stream in any::<u64>()) {
        let mut a = RngStream::new(seed, stream);
        let mut b = RngStream::new(seed, stream);
        for _ in 0..16 {
            prop_assert_eq!(a.normal().to_bits(), b.normal().to_bits());
        }
        prop_assert_eq!(a.seed(), seed);
        prop_assert_eq!(a.stream_id(), stream);
    }

    #[test]
    fn gl_weights_finite(seed in any::<u64>(), n in 1usize..4, scale in 0.2f64..1.5) {
        let s = gl_invariant_sample(n, scale, &mut RngStream::new(seed, 0)).unwrap();
        prop_assert!(s.log_weight.is_finite());
    }
}
