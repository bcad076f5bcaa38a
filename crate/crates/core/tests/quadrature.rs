use std::f64::consts::PI;

use hyperhs::quadrature::*;
use hyperhs::sampling::{haar_unitary, RngStream};
use hyperhs::specfun::k0_imaginary;
use hyperhs::{Execution, C64};
use proptest::prelude::*;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn adaptive_examples() {
    let q = adaptive_1d(|x| re(x * x), 0.0, 1.0, 1e-13).unwrap();
    assert!((q.value.re - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(q.stderr, 0.0);
    assert!(q.n_evals > 0);

    let w = adaptive_1d(
        |p| re(p * (-p * p).exp() * hyperhs::specfun::bessel_j0(2.0 * p)),
        0.0,
        f64::INFINITY,
        1e-14,
    )
    .unwrap();
    assert!((w.value.re - 0.5 * (-1.0f64).exp()).abs() < 1e-12);

    let odd = adaptive_1d(re, -1.0, 1.0, 1e-14).unwrap();
    assert!(odd.value.norm() < 1e-14);
}

#[test]
fn adaptive_reports_unreachable_tolerance() {
    let opts = AdaptiveOptions {
        max_panels: 8,
        ..AdaptiveOptions::abs(1e-15)
    };
    let r = adaptive_1d_with(
        |x: f64| re(x.abs().sqrt().sin() / (x.abs() + 1e-9).sqrt()),
        -1.0,
        1.0,
        opts,
    );
    assert!(matches!(r, Err(hyperhs::Error::ToleranceNotReached { .. })));
}

#[test]
fn gauss_hermite_examples() {
    let one = gauss_hermite_tensor(|_| re(1.0), 1, 8, GaussianWeight::Hermite).unwrap();
    assert!((one.value.re - PI.sqrt()).abs() < 1e-14);
    let q = gauss_hermite_tensor(|p| re(p[0] * p[0] * p[1] * p[1]), 2, 8, GaussianWeight::Hermite).unwrap();
    assert!((q.value.re - PI / 4.0).abs() < 1e-13);
    let f = gauss_hermite_tensor(|p| C64::from_polar(1.0, -p[0]), 1, 40, GaussianWeight::Normal).unwrap();
    let want = (2.0 * PI).sqrt() * (-0.5f64).exp();
    assert!((f.value - re(want)).norm() < 1e-10);
    assert!(gauss_hermite_tensor(|_| re(1.0), 5, 4, GaussianWeight::Hermite).is_err());
}

/// ∫ x^k e^{-x²} dx
fn hermite_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    // Γ((k+1)/2)
    let mut g = PI.sqrt();
    let mut a = 0.5;
    while a < (k as f64 + 1.0) / 2.0 - 1e-12 {
        g *= a;
        a += 1.0;
    }
    g
}

proptest! {
    #[test]
    fn gauss_hermite_polynomial_exactness(m in 1usize..8, coeffs in prop::collection::vec(-1.0f64..1.0, 32)) {
        // order 2m is exact up to degree 4m - 1
        let deg = 4 * m - 1;
        let c = &coeffs[..=deg.min(31)];
        let q = gauss_hermite_tensor(
            |p| re(c.iter().enumerate().map(|(k, ck)| ck * p[0].powi(k as i32)).sum()),
            1,
            2 * m,
            GaussianWeight::Hermite,
        )
        .unwrap();
        let exact: f64 = c.iter().enumerate().map(|(k, ck)| ck * hermite_moment(k)).sum();
        let scale: f64 = c.iter().enumerate().map(|(k, ck)| ck.abs() * hermite_moment(k)).sum::<f64>().max(1.0);
        prop_assert!((q.value.re - exact).abs() < 1e-12 * scale, "{} vs {}", q.value.re, exact);
    }

    #[test]
    fn gauss_hermite_tensor_factorizes(a in 0usize..5, b in 0usize..5) {
        let q = gauss_hermite_tensor(|p| re(p[0].powi(2 * a as i32) * p[1].powi(2 * b as i32)), 2, 12, GaussianWeight::Hermite).unwrap();
        let want = hermite_moment(2 * a) * hermite_moment(2 * b);
        prop_assert!((q.value.re / want - 1.0).abs() < 1e-12);
    }
}

#[test]
fn damped_examples() {
    let run = |u: f64| {
        damped_oscillatory(
            |mu: f64, d: f64| C64::from_polar((-d * mu.cosh()).exp(), -u * mu.cosh()),
            |mu: f64, d: f64| (-d * mu.cosh()).exp(),
            0.0,
            f64::INFINITY,
            &DampingSchedule::default(),
            DampedOptions {
                exec: Execution::Sequential,
                ..DampedOptions::default()
            },
        )
        .unwrap()
    };
    for u in [1.5, -1.5] {
        let d = run(u);
        assert!((d.estimate.value - k0_imaginary(u).unwrap()).norm() < 1e-5, "u={u}");
        assert_eq!(d.per_delta.len(), 4);
    }
    let (p, m) = (run(1.5).estimate.value, run(-1.5).estimate.value);
    assert!((p - m.conj()).norm() < 1e-12);
}

#[test]
fn damped_matches_adaptive_on_convergent_integrand() {
    let f = |x: f64| C64::new((-x * x).exp() * (3.0 * x).cos(), (-x * x).exp() * x.sin());
    let plain = adaptive_1d(f, 0.0, f64::INFINITY, 1e-12).unwrap();
    let d = damped_oscillatory(
        |x: f64, delta: f64| f(x) * (-delta * x).exp(),
        |x: f64, delta: f64| (-x * x - delta * x).exp(),
        0.0,
        f64::INFINITY,
        &DampingSchedule::default(),
        DampedOptions::default(),
    )
    .unwrap();
    assert!((d.estimate.value - plain.value).norm() <= d.estimate.stderr + 1e-9);
}

#[test]
fn damped_is_execution_independent() {
    let run = |exec| {
        damped_oscillatory(
            |mu: f64, d: f64| C64::from_polar((-d * mu.cosh()).exp(), -2.0 * mu.cosh()),
            |mu: f64, d: f64| (-d * mu.cosh()).exp(),
            0.0,
            f64::INFINITY,
            &DampingSchedule::default(),
            DampedOptions {
                exec,
                ..DampedOptions::default()
            },
        )
        .unwrap()
        .estimate
    };
    assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
}

#[test]
fn monte_carlo_examples() {
    let cfg = McConfig::new(100_000, 7);
    let one = monte_carlo(|_| (), |_| re(1.0), &cfg, Execution::Parallel);
    assert_eq!(one.value, re(1.0));
    assert_eq!(one.stderr, 0.0);

    let u11 = monte_carlo(
        |rng| haar_unitary(2, rng).unwrap(),
        |u| re(u[(0, 0)].norm_sqr()),
        &cfg,
        Execution::Parallel,
    );
    assert!((u11.value.re - 0.5).abs() < 3.0 * u11.stderr);
}

#[test]
fn monte_carlo_clt_scaling() {
    let f = |x: &f64| re(x.exp());
    let half = monte_carlo(
        |rng: &mut RngStream| rng.normal(),
        f,
        &McConfig::new(100_000, 8),
        Execution::Parallel,
    );
    let full = monte_carlo(
        |rng: &mut RngStream| rng.normal(),
        f,
        &McConfig::new(200_000, 8),
        Execution::Parallel,
    );
    let r = full.stderr / half.stderr;
    assert!((0.6..=0.8).contains(&r), "{r}");
}

#[test]
fn monte_carlo_is_worker_independent() {
    let cfg = McConfig::new(50_000, 9);
    let f = |u: &hyperhs::ComplexMatrix| u[(0, 1)] * u[(1, 0)];
    let a = monte_carlo(|rng| haar_unitary(3, rng).unwrap(), f, &cfg, Execution::Sequential);
    let b = monte_carlo(|rng| haar_unitary(3, rng).unwrap(), f, &cfg, Execution::Parallel);
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let c = pool.install(|| monte_carlo(|rng| haar_unitary(3, rng).unwrap(), f, &cfg, Execution::Parallel));
    assert_eq!(a, c);
}

#[test]
fn chunks_cover_the_budget() {
    let cfg = McConfig {
        chunk: 300,
        ..McConfig::new(1000, 1)
    };
    let c = cfg.chunks();
    assert_eq!(c, vec![(0, 300), (1, 300), (2, 300), (3, 100)]);
    assert_eq!(cfg.with_stream_offset(10).chunks()[0], (10, 300));
}

#[test]
fn weighted_monte_carlo_importance() {
    // ∫ e^{-x²/2} dx with proposal N(0, 2²)
    let cfg = McConfig::new(100_000, 10);
    let w = weighted_monte_carlo(
        |rng| {
            let x = 2.0 * rng.normal();
            let log_q = -x * x / 8.0 - (2.0 * (2.0 * PI).sqrt()).ln();
            (x, -log_q)
        },
        |x| re((-x * x / 2.0).exp()),
        &cfg,
        Execution::Parallel,
    );
    let want = (2.0 * PI).sqrt();
    assert!((w.estimate.value.re - want).abs() < 3.0 * w.estimate.stderr);
    assert!(w.ess > 0.3 * cfg.samples as f64);
}
