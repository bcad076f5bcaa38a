use std::f64::consts::PI;
use std::time::Instant;

use super::{check_distinct, digest, IdentityReport};
use crate::error::{Error, Result};
use crate::linalg::{signed_permutations, vandermonde};
use crate::specfun::gauss_fourier_moment;
use crate::C64;

pub const MAX_IZ_DIM: usize = 4;
const IZ_TOLERANCE: f64 = 1e-10;

/// ∫ dP Δ[P] e^{-½ Tr P² + sign·i Tr PΛ}, expanding Δ[P] = det[p_i^{n-j}]
/// into monomials and integrating each coordinate in closed form.
pub fn iz_moment_lhs(lambda: &[f64], sign: f64) -> Result<C64> {
    let n = lambda.len();
    if n == 0 || n > MAX_IZ_DIM {
        return Err(Error::Dimension(format!("spectrum length {n} not in 1..={MAX_IZ_DIM}")));
    }
    // the +i form is the -i form at -λ
    let lam: Vec<f64> = lambda.iter().map(|l| if sign > 0.0 { -l } else { *l }).collect();
    let mut moments = vec![vec![C64::new(0.0, 0.0); n]; n];
    for (i, l) in lam.iter().enumerate() {
        for (k, m) in moments[i].iter_mut().enumerate() {
            *m = gauss_fourier_moment(k, *l)?;
        }
    }
    let mut total = C64::new(0.0, 0.0);
    for (perm, sgn) in signed_permutations(n) {
        let mut term = C64::new(sgn, 0.0);
        for (i, s) in perm.iter().enumerate() {
            term *= moments[i][n - 1 - s];
        }
        total += term;
    }
    Ok(total)
}

fn iz_rhs(lambda: &[f64]) -> C64 {
    let q: f64 = lambda.iter().map(|l| l * l).sum();
    C64::new(vandermonde(lambda) * (-0.5 * q).exp(), 0.0)
}

/// (2π)^{n/2} (-i)^{n(n-1)/2}, the constant of the -i form.
pub(crate) fn iz_exact_constant(n: usize) -> C64 {
    let phase = C64::new(0.0, -1.0).powu((n * (n - 1) / 2) as u32);
    phase * (2.0 * PI).powf(n as f64 / 2.0)
}

/// Checks ∫ dP Δ[P] e^{-½TrP² - iTr PΛ} ∝ Δ[Λ] e^{-½TrΛ²}, the constant fitted
/// at `reference`.
pub fn verify_iz_moment_identity(lambda: &[f64], reference: &[f64]) -> Result<IdentityReport> {
    let start = Instant::now();
    if lambda.len() != reference.len() {
        return Err(Error::Dimension(format!(
            "spectrum has {} entries, reference {}",
            lambda.len(),
            reference.len()
        )));
    }
    check_distinct(lambda, 1e-6, "lambda")?;
    check_distinct(reference, 1e-6, "reference")?;
    let lhs_ref = iz_moment_lhs(reference, -1.0)?;
    let const_fit = lhs_ref / iz_rhs(reference);
    let lhs = iz_moment_lhs(lambda, -1.0)?;
    let rhs = iz_rhs(lambda);
    let exact = iz_exact_constant(lambda.len());
    Ok(IdentityReport::build(
        "izmoment",
        digest(&[("lambda", lambda)]),
        digest(&[("reference", reference)]),
        lhs,
        rhs,
        const_fit,
        0.0,
        IZ_TOLERANCE,
        0,
        start,
    )
    .with("exact_constant_deviation", (const_fit / exact - 1.0).norm()))
}
