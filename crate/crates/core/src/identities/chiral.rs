use std::f64::consts::PI;
use std::time::Instant;

use super::{check_distinct, digest, IdentityReport};
use crate::error::{Error, Result};
use crate::linalg::{signed_permutations, vandermonde};
use crate::quadrature::{adaptive_1d, gauss_hermite_tensor, GaussianWeight};
use crate::specfun::{bessel_j0, weber_integral};
use crate::{ComplexMatrix, C64};

const FLAT_TOLERANCE: f64 = 1e-8;
const HS_TOLERANCE: f64 = 1e-6;
pub const MAX_CHIRAL_FLAT_DIM: usize = 2;
pub const MAX_CHIRAL_HS_DIM: usize = 3;

/// ∫ dx dy e^{-x²-y²-2i(xα+yβ)} for one entry α + iβ.
fn flat_entry(a: C64, order: usize) -> Result<C64> {
    let est = gauss_hermite_tensor(
        |p| C64::from_polar(1.0, -2.0 * (p[0] * a.re + p[1] * a.im)),
        2,
        order,
        GaussianWeight::Hermite,
    )?;
    Ok(est.value)
}

fn flat_lhs(a: &ComplexMatrix, order: usize) -> Result<C64> {
    // the flat Gaussian factorizes over the n² complex entries
    let mut v = C64::new(1.0, 0.0);
    for z in a.iter() {
        v *= flat_entry(*z, order)?;
    }
    Ok(v)
}

/// Checks ∫ dR e^{-Tr RR^† - iTr(RA^† + AR^†)} ∝ e^{-Tr AA^†}, anchored at A = 0.
pub fn verify_chiral_flat(a: &ComplexMatrix, order: usize) -> Result<IdentityReport> {
    let start = Instant::now();
    let n = a.nrows();
    if n == 0 || n != a.ncols() || n > MAX_CHIRAL_FLAT_DIM {
        return Err(Error::Dimension(format!(
            "chiral flat check needs a square matrix of size 1..={MAX_CHIRAL_FLAT_DIM}"
        )));
    }
    let zero = ComplexMatrix::zeros(n, n);
    let const_fit = flat_lhs(&zero, order)?;
    let lhs = flat_lhs(a, order)?;
    let rhs = C64::new((-a.iter().map(|z| z.norm_sqr()).sum::<f64>()).exp(), 0.0);
    let flat: Vec<f64> = a.iter().flat_map(|z| [z.re, z.im]).collect();
    Ok(IdentityReport::build(
        "chiral_flat",
        digest(&[("a", &flat)]),
        "a=0".into(),
        lhs,
        rhs,
        const_fit,
        0.0,
        FLAT_TOLERANCE,
        0,
        start,
    )
    .with(
        "exact_constant_deviation",
        (const_fit / PI.powi((n * n) as i32) - 1.0).norm(),
    ))
}

/// ∫_0^∞ p^{2s+1} e^{-p²} J0(2pa) dp by adaptive quadrature.
pub fn chiral_moment(s: usize, a: f64) -> Result<f64> {
    let est = adaptive_1d(
        |p| C64::new(p.powi(2 * s as i32 + 1) * (-p * p).exp() * bessel_j0(2.0 * p * a), 0.0),
        0.0,
        f64::INFINITY,
        1e-14,
    )?;
    Ok(est.value.re)
}

/// det[I_{n-1-j}(a_l)] / Δ(a²), the radial left side.
fn chiral_lhs(a: &[f64]) -> Result<f64> {
    let n = a.len();
    let mut moments = vec![vec![0.0; n]; n];
    for (l, al) in a.iter().enumerate() {
        for (s, m) in moments[l].iter_mut().enumerate() {
            *m = chiral_moment(s, *al)?;
        }
    }
    let det: f64 = signed_permutations(n)
        .iter()
        .map(|(perm, sgn)| {
            sgn * perm
                .iter()
                .enumerate()
                .map(|(l, j)| moments[l][n - 1 - j])
                .product::<f64>()
        })
        .sum();
    let sq: Vec<f64> = a.iter().map(|x| x * x).collect();
    Ok(det / vandermonde(&sq))
}

fn check_spectrum(a: &[f64], what: &str) -> Result<()> {
    if a.is_empty() || a.len() > MAX_CHIRAL_HS_DIM {
        return Err(Error::Dimension(format!(
            "{what}: length {} not in 1..={MAX_CHIRAL_HS_DIM}",
            a.len()
        )));
    }
    if let Some(x) = a.iter().find(|x| !(**x > 0.0)) {
        return Err(Error::ConstraintViolation(format!(
            "{what}: entries must be positive, got {x}"
        )));
    }
    check_distinct(a, 1e-6, what)
}

/// Checks the radial chiral identity ∝ e^{-Σ a_l²}, the constant fitted at
/// `reference`.
pub fn verify_chiral_hs(a: &[f64], reference: &[f64]) -> Result<IdentityReport> {
    let start = Instant::now();
    check_spectrum(a, "a")?;
    check_spectrum(reference, "reference")?;
    if a.len() != reference.len() {
        return Err(Error::Dimension("spectrum and reference lengths differ".into()));
    }
    let n = a.len();
    let rhs_of = |v: &[f64]| (-v.iter().map(|x| x * x).sum::<f64>()).exp();
    let lhs_ref = chiral_lhs(reference)?;
    let lhs = chiral_lhs(a)?;
    let const_fit = lhs_ref / rhs_of(reference);
    let exact = if (n * (n - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 } / 2f64.powi(n as i32);
    let sq = |v: &[f64]| vandermonde(&v.iter().map(|x| x * x).collect::<Vec<_>>());
    // ratio drift had the Vandermonde been squared
    let squared_drift = sq(reference) / sq(a) - 1.0;
    let mut weber: f64 = 0.0;
    for x in a {
        let w = weber_integral(1.0, 2.0 * x)?;
        weber = weber.max((chiral_moment(0, *x)? - w).abs() / w);
    }
    Ok(IdentityReport::build(
        "chiral_hs",
        digest(&[("a", a)]),
        digest(&[("reference", reference)]),
        C64::new(lhs, 0.0),
        C64::new(rhs_of(a), 0.0),
        C64::new(const_fit, 0.0),
        0.0,
        HS_TOLERANCE,
        0,
        start,
    )
    .with("exact_constant_deviation", (const_fit / exact - 1.0).abs())
    .with("squared_vandermonde_drift", squared_drift)
    .with("weber_deviation", weber))
}
