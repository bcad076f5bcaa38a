use std::f64::consts::{PI, TAU};
use std::time::Instant;

use super::{digest, IdentityReport};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::quadrature::{damped_oscillatory, DampedEstimate, DampedOptions, DampingSchedule};
use crate::C64;

const DH_TOLERANCE: f64 = 1e-3;
const MIN_GAP: f64 = 1e-6;

fn check_point(p: [f64; 2], lambda: [f64; 2]) -> Result<()> {
    if (p[0] - p[1]).abs() <= MIN_GAP {
        return Err(Error::DegenerateSpectrum(format!(
            "p1 = {} and p2 = {} coincide",
            p[0], p[1]
        )));
    }
    if !(lambda[0] > 0.0 && lambda[1] < 0.0) {
        return Err(Error::ConstraintViolation(format!(
            "need lambda1 > 0 > lambda2, got ({}, {})",
            lambda[0], lambda[1]
        )));
    }
    Ok(())
}

/// ∫_0^∞ sinh2θ dθ ∫_0^{2π} dφ e^{-i Tr[T0^{-1} P T0 Λ]} with P = diag(p1 - iδg,
/// p2 + iδg), g = min(1, ½|p1 - p2|), for every δ of the schedule.
///
/// In these coordinates Tr[T0^{-1} P T0 Λ] = ½(p1+p2)(λ1+λ2) + ½(p1-p2)(λ1-λ2) cosh2θ,
/// with no φ dependence. The damped value has a pole at δ = ½|p1 - p2| / g,
/// so the unit g keeps it at δ >= 1 for nearly degenerate p.
fn dh_damped(p: [f64; 2], lambda: [f64; 2], schedule: &DampingSchedule, exec: Execution) -> Result<DampedEstimate> {
    let sum = 0.5 * (p[0] + p[1]) * (lambda[0] + lambda[1]);
    let w = 0.5 * (p[0] - p[1]) * (lambda[0] - lambda[1]);
    let dl = (lambda[0] - lambda[1]) * gap_unit(p);
    let f = move |th: f64, d: f64| {
        let x = (2.0 * th).cosh();
        let s = (2.0 * th).sinh();
        C64::from_polar(TAU * s * (-d * dl * x).exp(), -(sum + w * x))
    };
    let env = move |th: f64, d: f64| TAU * (2.0 * th).sinh() * (-d * dl * (2.0 * th).cosh()).exp();
    damped_oscillatory(
        f,
        env,
        0.0,
        f64::INFINITY,
        schedule,
        DampedOptions {
            abs_tol: 1e-10,
            // relative to |value| = π / |w| for large values
            target_tol: 1e-4 * (PI / w.abs()).max(1.0),
            exec,
        },
    )
}

fn gap_unit(p: [f64; 2]) -> f64 {
    (0.5 * (p[0] - p[1]).abs()).min(1.0)
}

/// Closed form of the damped coset integral: π e^{-ia} e^{-i w_δ} / (i w_δ),
/// δ in the units of the schedule.
pub fn dh_closed_form(p: [f64; 2], lambda: [f64; 2], delta: f64) -> C64 {
    let a = 0.5 * (p[0] + p[1]) * (lambda[0] + lambda[1]);
    let w = C64::new(
        0.5 * (p[0] - p[1]) * (lambda[0] - lambda[1]),
        -delta * gap_unit(p) * (lambda[0] - lambda[1]),
    );
    let i = C64::new(0.0, 1.0);
    C64::from_polar(PI, -a) * (-i * w).exp() / (i * w)
}

fn dh_rhs(p: [f64; 2], lambda: [f64; 2]) -> C64 {
    C64::from_polar(1.0, -(p[0] * lambda[0] + p[1] * lambda[1])) / ((p[0] - p[1]) * (lambda[0] - lambda[1]))
}

/// Checks the n1 = n2 = 1 coset formula against e^{-i(p1λ1+p2λ2)}/((p1-p2)(λ1-λ2)),
/// fitting the constant at `reference`.
pub fn verify_dh_coset_u11(
    p: [f64; 2],
    lambda: [f64; 2],
    reference: ([f64; 2], [f64; 2]),
    schedule: &DampingSchedule,
    exec: Execution,
) -> Result<IdentityReport> {
    let start = Instant::now();
    check_point(p, lambda)?;
    check_point(reference.0, reference.1)?;
    let anchor = dh_damped(reference.0, reference.1, schedule, exec)?;
    let point = dh_damped(p, lambda, schedule, exec)?;
    let const_fit = anchor.estimate.value / dh_rhs(reference.0, reference.1);
    let mut r = IdentityReport::build(
        "dh_u11",
        digest(&[("p", &p), ("lambda", &lambda)]),
        digest(&[("p", &reference.0), ("lambda", &reference.1)]),
        point.estimate.value,
        dh_rhs(p, lambda),
        const_fit,
        0.0,
        DH_TOLERANCE,
        0,
        start,
    )
    .with("extrapolation_step", point.estimate.stderr)
    .with("anchor_extrapolation_step", anchor.estimate.stderr)
    .with(
        "exact_constant_deviation",
        (const_fit / C64::new(0.0, -TAU) - 1.0).norm(),
    );
    for (d, v) in &point.per_delta {
        let exact = dh_closed_form(p, lambda, *d);
        r = r.with(&format!("damped_error_delta_{d}"), (v - exact).norm() / exact.norm());
    }
    Ok(r)
}
