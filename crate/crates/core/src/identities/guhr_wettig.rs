use std::time::Instant;

use super::{check_distinct, digest, ratio_rel_err, IdentityReport};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{det, vandermonde};
use crate::quadrature::{monte_carlo, IntegralEstimate, McConfig};
use crate::sampling::haar_unitary;
use crate::specfun::bessel_j0;
use crate::{ComplexMatrix, C64};

const GW_TOLERANCE: f64 = 0.05;
/// Below this max(p)·max(a) the determinant ratio is summed as a Schur series.
const SERIES_SWITCH: f64 = 0.1;
const MAX_SERIES_DEGREE: usize = 60;
const REFERENCE_STREAM_OFFSET: u64 = 1 << 32;

fn check_spectrum(v: &[f64], what: &str) -> Result<()> {
    if !(2..=3).contains(&v.len()) {
        return Err(Error::Dimension(format!("{what}: size {} not in 2..=3", v.len())));
    }
    if let Some(x) = v.iter().find(|x| !(**x > 0.0)) {
        return Err(Error::ConstraintViolation(format!(
            "{what}: entries must be positive, got {x}"
        )));
    }
    check_distinct(v, 1e-12, what)
}

/// det[J0(2 p_i a_j)] / (Δ(p²) Δ(a²)), switching to the Schur series when
/// the direct form would cancel.
pub fn bessel_det_ratio(p: &[f64], a: &[f64]) -> f64 {
    let pm = p.iter().copied().fold(0.0, f64::max);
    let am = a.iter().copied().fold(0.0, f64::max);
    if pm * am < SERIES_SWITCH {
        return bessel_det_ratio_series(p, a);
    }
    let n = p.len();
    let m = ComplexMatrix::from_fn(n, n, |i, j| C64::new(bessel_j0(2.0 * p[i] * a[j]), 0.0));
    let sq = |v: &[f64]| vandermonde(&v.iter().map(|x| x * x).collect::<Vec<_>>());
    det(&m).re / (sq(p) * sq(a))
}

/// Σ_λ ∏_j f_{λ_j + n - j} s_λ(p²) s_λ(a²) with f_k = (-1)^k / (k!)², the
/// Cauchy-Binet expansion of the same ratio.
pub fn bessel_det_ratio_series(p: &[f64], a: &[f64]) -> f64 {
    let n = p.len();
    let x: Vec<f64> = p.iter().map(|v| v * v).collect();
    let y: Vec<f64> = a.iter().map(|v| v * v).collect();
    let top = MAX_SERIES_DEGREE + n;
    let hx = complete_homogeneous(&x, top);
    let hy = complete_homogeneous(&y, top);
    let mut coef = vec![1.0; top + 1];
    for k in 1..=top {
        coef[k] = -coef[k - 1] / (k * k) as f64;
    }
    let mut total = 0.0;
    for m in 0..=MAX_SERIES_DEGREE {
        let mut level = 0.0;
        for lambda in partitions(m, n) {
            let f: f64 = (0..n).map(|j| coef[lambda[j] + n - 1 - j]).product();
            level += f * schur(&lambda, &hx) * schur(&lambda, &hy);
        }
        total += level;
        if m > 2 && level.abs() < 1e-18 * total.abs() {
            break;
        }
    }
    total
}

/// h_0..=h_top of the given variables.
fn complete_homogeneous(x: &[f64], top: usize) -> Vec<f64> {
    let mut h = vec![0.0; top + 1];
    h[0] = 1.0;
    for xi in x {
        // multiply the generating function by 1/(1 - xi t)
        for k in 1..=top {
            h[k] += xi * h[k - 1];
        }
    }
    h
}

/// Jacobi-Trudi: s_λ = det[h_{λ_i - i + j}].
fn schur(lambda: &[usize], h: &[f64]) -> f64 {
    let n = lambda.len();
    let entry = |i: usize, j: usize| {
        let k = lambda[i] as i64 - i as i64 + j as i64;
        if k < 0 {
            0.0
        } else {
            h[k as usize]
        }
    };
    let m = nalgebra::DMatrix::from_fn(n, n, entry);
    m.determinant()
}

/// Partitions of m into at most n parts, padded with zeros to length n.
fn partitions(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for part in (0..=rest.min(max)).rev() {
            if part * slots < rest {
                break;
            }
            cur.push(part);
            rec(rest - part, part, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, n, &mut Vec::new(), &mut out);
    out
}

/// E over Haar U, V of e^{-iTr(P[U a V^† + V a U^†])}.
fn gw_lhs(p: &[f64], a: &[f64], cfg: &McConfig, exec: Execution) -> IntegralEstimate {
    let n = p.len();
    monte_carlo(
        |rng| {
            let u = haar_unitary(n, rng).expect("dimension checked");
            let v = haar_unitary(n, rng).expect("dimension checked");
            (u, v)
        },
        |(u, v)| {
            // Tr P U a V^† = Σ_ij p_i U_ij a_j conj(V_ij)
            let mut tr = C64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    tr += u[(i, j)] * v[(i, j)].conj() * (p[i] * a[j]);
                }
            }
            // the exponent is -2i Re(tr); V -> -V makes the average real
            C64::new((2.0 * tr.re).cos(), 0.0)
        },
        cfg,
        exec,
    )
}

/// Monte Carlo check of the Haar double integral against the Bessel
/// determinant ratio, the constant fitted at `reference` on an independent
/// range of streams.
pub fn verify_guhr_wettig(
    p: &[f64],
    a: &[f64],
    reference: (&[f64], &[f64]),
    cfg: &McConfig,
    exec: Execution,
) -> Result<IdentityReport> {
    let start = Instant::now();
    for (v, what) in [(p, "p"), (a, "a"), (reference.0, "ref_p"), (reference.1, "ref_a")] {
        check_spectrum(v, what)?;
    }
    if a.len() != p.len() || reference.0.len() != p.len() || reference.1.len() != p.len() {
        return Err(Error::Dimension("all spectra must have the same size".into()));
    }
    let anchor = gw_lhs(
        reference.0,
        reference.1,
        &cfg.with_stream_offset(cfg.stream_offset + REFERENCE_STREAM_OFFSET),
        exec,
    );
    let point = gw_lhs(p, a, cfg, exec);
    let rhs_ref = bessel_det_ratio(reference.0, reference.1);
    let rhs = bessel_det_ratio(p, a);
    let const_fit = anchor.value / rhs_ref;
    let rel = ratio_rel_err(point.value, point.stderr, anchor.value, anchor.stderr);
    Ok(IdentityReport::build(
        "guhr_wettig",
        digest(&[("p", p), ("a", a)]),
        digest(&[("p", reference.0), ("a", reference.1)]),
        point.value,
        C64::new(rhs, 0.0),
        const_fit,
        rel * point.value.norm(),
        GW_TOLERANCE,
        cfg.seed,
        start,
    )
    .with("samples", cfg.samples as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        assert_eq!(partitions(4, 2), vec![vec![4, 0], vec![3, 1], vec![2, 2]]);
        assert_eq!(partitions(0, 3), vec![vec![0, 0, 0]]);
        assert_eq!(partitions(5, 3).len(), 5);
    }

    #[test]
    fn series_matches_direct_form() {
        let p = [0.9, 0.4];
        let a = [0.7, 0.2];
        let n2 = p.len();
        let m = ComplexMatrix::from_fn(n2, n2, |i, j| C64::new(bessel_j0(2.0 * p[i] * a[j]), 0.0));
        let sq = |v: &[f64]| vandermonde(&v.iter().map(|x| x * x).collect::<Vec<_>>());
        let direct = det(&m).re / (sq(&p) * sq(&a));
        let series = bessel_det_ratio_series(&p, &a);
        assert!((direct - series).abs() < 1e-10 * series.abs(), "{direct} {series}");
    }

    #[test]
    fn small_argument_limit_is_minus_one() {
        // leading Schur term: f_1 f_0 s_0 s_0 = -1 for n = 2
        let v = bessel_det_ratio(&[1e-3, 2e-3], &[1.5e-3, 0.5e-3]);
        assert!((v + 1.0).abs() < 1e-5);
    }
}
