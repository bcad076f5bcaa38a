use std::f64::consts::PI;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{digest, Expectation, IdentityReport};
use crate::error::{Error, Result};
use crate::quadrature::adaptive_1d;
use crate::specfun::k0_imaginary;
use crate::C64;

const PO_TOLERANCE: f64 = 1e-6;
const MODULUS_TOLERANCE: f64 = 1e-2;
const QUAD_TOL: f64 = 1e-13;

/// -4iπ^{3/2}.
pub const PO_EXACT_CONSTANT: C64 = C64::new(0.0, -4.0 * 5.568_327_996_831_708);

/// Shorthands of the θ-integral at fixed p_- = p1 - p2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthoReduction {
    pub alpha: f64,
    pub beta: f64,
    pub u: f64,
    pub psi: f64,
    pub s_a: f64,
}

impl OrthoReduction {
    pub fn new(a1: f64, a2: f64, a: f64, p_minus: f64) -> Result<Self> {
        let s_a = check_constraints(a1, a2, a)?;
        let alpha = 0.5 * (a1 + a2) * p_minus;
        let beta = a * p_minus;
        let u = p_minus * s_a;
        let psi = if alpha == 0.0 { 0.0 } else { (beta / alpha).atanh() };
        Ok(Self {
            alpha,
            beta,
            u,
            psi,
            s_a,
        })
    }
}

/// s_a = sqrt(((a1+a2)/2)² - a²) once a1 > 0, a2 > 0, |a| < sqrt(a1 a2) hold.
fn check_constraints(a1: f64, a2: f64, a: f64) -> Result<f64> {
    if !(a1 > 0.0 && a2 > 0.0 && a.abs() < (a1 * a2).sqrt()) {
        return Err(Error::ConstraintViolation(format!(
            "need a1 > 0, a2 > 0, |a| < sqrt(a1 a2); got ({a1}, {a2}, {a})"
        )));
    }
    Ok((0.25 * (a1 + a2).powi(2) - a * a).sqrt())
}

fn tr_a2(a1: f64, a2: f64, a: f64) -> f64 {
    a1 * a1 + a2 * a2 - 2.0 * a * a
}

/// The p_- integral split by half-line: ∫_0^∞ g(p) dp and ∫_0^∞ g(-p) dp with
/// g(p) = m(p) e^{-p²/4} K0(i p s_a), m the chosen measure factor.
fn p_minus_halves(s_a: f64, modulus: bool) -> Result<(C64, C64)> {
    let g = |p: f64| -> C64 {
        let m = if modulus { p.abs() } else { p };
        match k0_imaginary(p * s_a) {
            Ok(k) => k * (m * (-0.25 * p * p).exp()),
            Err(_) => C64::new(0.0, 0.0),
        }
    };
    let pos = adaptive_1d(g, 0.0, f64::INFINITY, QUAD_TOL)?;
    let neg = adaptive_1d(|p| g(-p), 0.0, f64::INFINITY, QUAD_TOL)?;
    Ok((pos.value, neg.value))
}

fn p_plus_integral(a1: f64, a2: f64) -> f64 {
    // ∫ e^{-p²/4 - i p (a1-a2)/2} dp
    2.0 * PI.sqrt() * (-0.25 * (a1 - a2).powi(2)).exp()
}

/// Left side of the 2x2 pseudoorthogonal identity with the signed measure
/// p_- dp_+ dp_- dθ; also returns the relative size of the Y0 (real) part
/// before cancellation between the half-lines.
pub fn pseudoorthogonal_lhs(a1: f64, a2: f64, a: f64) -> Result<(C64, f64)> {
    let s_a = check_constraints(a1, a2, a)?;
    let (pos, neg) = p_minus_halves(s_a, false)?;
    let total = (pos + neg) * p_plus_integral(a1, a2);
    let y0_residual = (pos.re + neg.re).abs() * p_plus_integral(a1, a2) / total.norm();
    Ok((total, y0_residual))
}

/// Checks the value -4iπ^{3/2} e^{-½Tr A²} with no fitted constant.
pub fn verify_pseudoorthogonal_2x2(a1: f64, a2: f64, a: f64) -> Result<IdentityReport> {
    let start = Instant::now();
    let (lhs, y0) = pseudoorthogonal_lhs(a1, a2, a)?;
    let rhs = C64::new((-0.5 * tr_a2(a1, a2, a)).exp(), 0.0);
    Ok(IdentityReport::build(
        "po5",
        digest(&[("a", &[a1, a2, a])]),
        "exact".into(),
        lhs,
        rhs,
        PO_EXACT_CONSTANT,
        0.0,
        PO_TOLERANCE,
        0,
        start,
    )
    .with("y0_contribution", y0)
    .with("real_part_fraction", lhs.re.abs() / lhs.norm()))
}

fn modulus_lhs(a1: f64, a2: f64, a: f64) -> Result<(C64, f64)> {
    let s_a = check_constraints(a1, a2, a)?;
    let (pos, neg) = p_minus_halves(s_a, true)?;
    let total = (pos + neg) * p_plus_integral(a1, a2);
    // J0 enters as the imaginary part; odd under the modulus measure
    let j0_part = (pos.im + neg.im).abs() / pos.im.abs().max(1e-300);
    Ok((total, j0_part))
}

/// Same pipeline with |p_-| in place of p_-. The anchor is the first triple;
/// the report shows the worst-deviating other triple and passes when the
/// identity demonstrably fails: deviation above 10x tolerance with a real
/// value.
pub fn negative_control_modulus_measure(triples: &[(f64, f64, f64)]) -> Result<IdentityReport> {
    let start = Instant::now();
    if triples.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "triples".into(),
            reason: "need an anchor and at least one more triple".into(),
        });
    }
    let mut evals = Vec::with_capacity(triples.len());
    for &(a1, a2, a) in triples {
        let (v, j0) = modulus_lhs(a1, a2, a)?;
        let rhs = C64::new((-0.5 * tr_a2(a1, a2, a)).exp(), 0.0);
        evals.push((v, rhs, j0));
    }
    let const_fit = evals[0].0 / evals[0].1;
    let ratios: Vec<C64> = evals.iter().map(|(v, r, _)| v / (const_fit * r)).collect();
    let worst = (1..ratios.len())
        .max_by(|&i, &j| (ratios[i] - 1.0).norm().total_cmp(&(ratios[j] - 1.0).norm()))
        .expect("at least two triples");
    let spread = ratios.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max)
        - ratios.iter().map(|r| r.re).fold(f64::INFINITY, f64::min);
    let imag = evals.iter().map(|(v, _, _)| v.im.abs() / v.norm()).fold(0.0, f64::max);
    let j0 = evals.iter().map(|e| e.2).fold(0.0, f64::max);
    let (a1, a2, a) = triples[worst];
    let (b1, b2, b) = triples[0];
    let mut r = IdentityReport::build(
        "po_modulus",
        digest(&[("a", &[a1, a2, a])]),
        digest(&[("a", &[b1, b2, b])]),
        evals[worst].0,
        evals[worst].1,
        const_fit,
        0.0,
        MODULUS_TOLERANCE,
        0,
        start,
    );
    r.expectation = Expectation::Fails;
    r.pass = (ratios[worst] - 1.0).norm() > 10.0 * MODULUS_TOLERANCE && imag < 1e-10;
    Ok(r.with("ratio_spread", spread)
        .with("max_imag_fraction", imag)
        .with("j0_component", j0)
        .with("custom_pass", 1.0))
}
