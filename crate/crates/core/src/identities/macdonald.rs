use std::time::Instant;

use super::{check_distinct, digest, ratio_rel_err, IdentityReport};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{det, vandermonde};
use crate::quadrature::{adaptive_1d, weighted_monte_carlo, IntegralEstimate, McConfig, WeightedEstimate};
use crate::sampling::gl_invariant_sample;
use crate::specfun::macdonald_k0;
use crate::{ComplexMatrix, C64};

const MAC_TOLERANCE_1: f64 = 1e-8;
const MAC_TOLERANCE_2: f64 = 0.05;
/// Required effective sample size as a fraction of the nominal budget.
const MIN_ESS_FRACTION: f64 = 0.01;
const REFERENCE_STREAM_OFFSET: u64 = 1 << 32;

/// det[K0(x_i y_j)] / (Δ(x²) Δ(y²)).
pub fn macdonald_rhs(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = C64::new(macdonald_k0(x[i] * y[j])?, 0.0);
        }
    }
    let sq = |v: &[f64]| vandermonde(&v.iter().map(|t| t * t).collect::<Vec<_>>());
    Ok(det(&m).re / (sq(x) * sq(y)))
}

fn check_spectrum(v: &[f64], what: &str) -> Result<()> {
    if !(1..=2).contains(&v.len()) {
        return Err(Error::Dimension(format!("{what}: size {} not in 1..=2", v.len())));
    }
    if let Some(t) = v.iter().find(|t| !(**t > 0.0)) {
        return Err(Error::ConstraintViolation(format!(
            "{what}: entries must be positive, got {t}"
        )));
    }
    check_distinct(v, 1e-12, what)
}

/// n = 1: T = e^s, so ½ x y (t² + t^{-2}) = x y cosh 2s.
fn lhs_one(x: f64, y: f64) -> Result<IntegralEstimate> {
    adaptive_1d(
        |s| {
            let t2 = (2.0 * s).exp();
            C64::new((-0.5 * x * y * (t2 + 1.0 / t2)).exp(), 0.0)
        },
        f64::NEG_INFINITY,
        f64::INFINITY,
        1e-14,
    )
}

fn lhs_two(x: &[f64], y: &[f64], scale: f64, cfg: &McConfig, exec: Execution) -> WeightedEstimate {
    let (x, y) = (x.to_vec(), y.to_vec());
    weighted_monte_carlo(
        |rng| {
            let s = gl_invariant_sample(2, scale, rng).expect("size checked");
            (s.point, s.log_weight)
        },
        move |t| {
            let Some(ti) = t.clone().try_inverse() else {
                return C64::new(0.0, 0.0);
            };
            // Re Tr X (T Y T^† + T^{-†} Y T^{-1}) = Σ_i x_i Σ_j y_j (|T_ij|² + |Ti_ji|²)
            let mut q = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    q += x[i] * y[j] * (t[(i, j)].norm_sqr() + ti[(j, i)].norm_sqr());
                }
            }
            C64::new((-0.5 * q).exp(), 0.0)
        },
        cfg,
        exec,
    )
}

/// Checks the matrix Macdonald integral against det[K0(x_i y_j)]/(Δ(x²)Δ(y²)),
/// the constant fitted at `reference`. n = 1 is deterministic; n = 2 uses
/// importance samples of the invariant measure with log-scale `scale`.
pub fn verify_matrix_macdonald(
    x: &[f64],
    y: &[f64],
    reference: (&[f64], &[f64]),
    scale: f64,
    cfg: &McConfig,
    exec: Execution,
) -> Result<IdentityReport> {
    let start = Instant::now();
    for (v, what) in [(x, "x"), (y, "y"), (reference.0, "ref_x"), (reference.1, "ref_y")] {
        check_spectrum(v, what)?;
    }
    let n = x.len();
    if y.len() != n || reference.0.len() != n || reference.1.len() != n {
        return Err(Error::Dimension("all spectra must have the same size".into()));
    }
    let rhs = macdonald_rhs(x, y)?;
    let rhs_ref = macdonald_rhs(reference.0, reference.1)?;
    let digests = (
        digest(&[("x", x), ("y", y)]),
        digest(&[("x", reference.0), ("y", reference.1)]),
    );
    if n == 1 {
        let anchor = lhs_one(reference.0[0], reference.1[0])?;
        let point = lhs_one(x[0], y[0])?;
        return Ok(IdentityReport::build(
            "macdonald",
            digests.0,
            digests.1,
            point.value,
            C64::new(rhs, 0.0),
            anchor.value / rhs_ref,
            0.0,
            MAC_TOLERANCE_1,
            0,
            start,
        )
        .with("k0_deviation", (point.value.re - rhs).abs() / rhs));
    }
    let anchor = lhs_two(
        reference.0,
        reference.1,
        scale,
        &cfg.with_stream_offset(cfg.stream_offset + REFERENCE_STREAM_OFFSET),
        exec,
    );
    let point = lhs_two(x, y, scale, cfg, exec);
    let required = MIN_ESS_FRACTION * cfg.samples as f64;
    for w in [&anchor, &point] {
        if w.ess < required {
            return Err(Error::EffectiveSampleSizeTooLow { ess: w.ess, required });
        }
    }
    let (a, p) = (anchor.estimate, point.estimate);
    let rel = ratio_rel_err(p.value, p.stderr, a.value, a.stderr);
    Ok(IdentityReport::build(
        "macdonald",
        digests.0,
        digests.1,
        p.value,
        C64::new(rhs, 0.0),
        a.value / rhs_ref,
        rel * p.value.norm(),
        MAC_TOLERANCE_2,
        cfg.seed,
        start,
    )
    .with("ess_fraction", point.ess / cfg.samples as f64)
    .with("anchor_ess_fraction", anchor.ess / cfg.samples as f64))
}
