use std::f64::consts::{PI, TAU};
use std::time::Instant;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::{digest, IdentityReport};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::HermitianPD;
use crate::quadrature::{
    damped_oscillatory, gauss_hermite_tensor, DampedEstimate, DampedOptions, DampingSchedule, GaussianWeight,
};
use crate::{ComplexMatrix, C64};

const HS_TOLERANCE: f64 = 2e-2;
/// Beyond this |Y|² the p-integral is below e^{-50} and is set to zero
/// rather than sampled by an aliasing Gauss-Hermite rule.
const GAUSS_CUTOFF: f64 = 50.0;

/// Point (θ, φ) of the U(1,1)/(U(1)×U(1)) coset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosetPointU11 {
    pub theta: f64,
    pub phi: f64,
}

impl CosetPointU11 {
    /// T0 = [[cosh θ, e^{iφ} sinh θ], [e^{-iφ} sinh θ, cosh θ]].
    pub fn boost(&self) -> ComplexMatrix {
        let b = self.boost2();
        ComplexMatrix::from_fn(2, 2, |i, j| b[(i, j)])
    }

    fn boost2(&self) -> Matrix2<C64> {
        let (c, s) = (self.theta.cosh(), self.theta.sinh());
        Matrix2::new(
            C64::new(c, 0.0),
            C64::from_polar(s, self.phi),
            C64::from_polar(s, -self.phi),
            C64::new(c, 0.0),
        )
    }

    /// T0^{-1} = L T0^† L.
    fn boost2_inverse(&self) -> Matrix2<C64> {
        let l = metric2();
        l * self.boost2().adjoint() * l
    }
}

fn metric2() -> Matrix2<C64> {
    Matrix2::new(
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(-1.0, 0.0),
    )
}

/// R = T0^{-1} diag(p1, p2) T0.
pub fn u11_coset_point(p: [f64; 2], at: CosetPointU11) -> ComplexMatrix {
    let r = rotated_diag(p, at);
    ComplexMatrix::from_fn(2, 2, |i, j| r[(i, j)])
}

fn rotated_diag(p: [f64; 2], at: CosetPointU11) -> Matrix2<C64> {
    let d = Matrix2::new(
        C64::new(p[0], 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(p[1], 0.0),
    );
    at.boost2_inverse() * d * at.boost2()
}

/// |det| of the Jacobian of (p1, p2, θ, φ) -> (R11, R22, Re R12, Im R12),
/// by central differences with step `h`. Equals ½ (p1-p2)² sinh 2θ.
pub fn u11_jacobian(p: [f64; 2], at: CosetPointU11, h: f64) -> f64 {
    let coords = |x: [f64; 4]| {
        let r = rotated_diag([x[0], x[1]], CosetPointU11 { theta: x[2], phi: x[3] });
        [r[(0, 0)].re, r[(1, 1)].re, r[(0, 1)].re, r[(0, 1)].im]
    };
    let x0 = [p[0], p[1], at.theta, at.phi];
    let mut jac = nalgebra::Matrix4::<f64>::zeros();
    for k in 0..4 {
        let (mut up, mut dn) = (x0, x0);
        up[k] += h;
        dn[k] -= h;
        let (fu, fd) = (coords(up), coords(dn));
        for i in 0..4 {
            jac[(i, k)] = (fu[i] - fd[i]) / (2.0 * h);
        }
    }
    jac.determinant().abs()
}

/// [[a11, a12], [conj a12, a22]].
pub fn a_plus_matrix(a11: f64, a22: f64, a12: C64) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[C64::new(a11, 0.0), a12, a12.conj(), C64::new(a22, 0.0)])
}

#[derive(Debug, Clone, Copy)]
pub struct HsU11Options {
    /// Gauss-Hermite order per p coordinate.
    pub gh_order: usize,
    /// Periodic trapezoid points in φ.
    pub phi_points: usize,
    pub abs_tol: f64,
    pub exec: Execution,
}

impl Default for HsU11Options {
    fn default() -> Self {
        Self {
            gh_order: 40,
            phi_points: 48,
            abs_tol: 1e-8,
            exec: Execution::Parallel,
        }
    }
}

struct HsProblem {
    /// εL + A with A = A_+ L.
    shifted: Matrix2<C64>,
    eps: f64,
    /// ½(α1+α2), ½(α1-α2) and |b| for the envelope.
    mean: f64,
    half_diff: f64,
    off: f64,
}

impl HsProblem {
    fn new(a_plus: &ComplexMatrix, eps: f64) -> Self {
        let ap = Matrix2::new(a_plus[(0, 0)], a_plus[(0, 1)], a_plus[(1, 0)], a_plus[(1, 1)]);
        let l = metric2();
        let shifted = l * C64::new(eps, 0.0) + ap * l;
        let (a1, a2) = (a_plus[(0, 0)].re + eps, a_plus[(1, 1)].re + eps);
        Self {
            shifted,
            eps,
            mean: 0.5 * (a1 + a2),
            half_diff: 0.5 * (a1 - a2),
            off: a_plus[(0, 1)].norm(),
        }
    }

    /// ∫ dp1 dp2 (p1-p2)² e^{-½Tr(R+iεL)² - iTr AR} at fixed (θ, φ), with the
    /// contour shifted to p1 - iδ, p2 + iδ.
    fn p_integral(&self, at: CosetPointU11, delta: f64, order: usize) -> Result<C64> {
        // Tr(εL + A) R is linear in p: p1 t1 + p2 t2
        let t1 = (self.shifted * rotated_diag([1.0, 0.0], at)).trace().re;
        let t2 = (self.shifted * rotated_diag([0.0, 1.0], at)).trace().re;
        let y = 0.5 * (t1 - t2);
        if y * y > GAUSS_CUTOFF {
            return Ok(C64::new(0.0, 0.0));
        }
        let i = C64::new(0.0, 1.0);
        let shift = (delta * delta - 2.0 * delta * y).exp();
        let est = gauss_hermite_tensor(
            |p| {
                let m = C64::new(p[0] - p[1], -2.0 * delta);
                m * m * (i * (delta * (p[0] - p[1]) - p[0] * t1 - p[1] * t2)).exp()
            },
            2,
            order,
            GaussianWeight::Normal,
        )?;
        Ok(est.value * shift * (self.eps * self.eps).exp())
    }

    fn envelope(&self, theta: f64) -> f64 {
        let (x, s) = ((2.0 * theta).cosh(), (2.0 * theta).sinh());
        let y_min = self.mean * x - self.off * s;
        let y_max = self.mean * x + self.off * s;
        let c = self.half_diff.abs() + y_max;
        let decay = if y_min > 0.0 { (-y_min * y_min).exp() } else { 1.0 };
        TAU * s * 2.0 * PI * (2.0 + 4.0 * c * c) * decay * (self.eps * self.eps).exp()
    }
}

fn hs_damped(
    a_plus: &ComplexMatrix,
    eps: f64,
    schedule: &DampingSchedule,
    opts: &HsU11Options,
) -> Result<DampedEstimate> {
    let prob = HsProblem::new(a_plus, eps);
    let n_phi = if prob.off == 0.0 { 1 } else { opts.phi_points.max(1) };
    let exec = opts.exec;
    let order = opts.gh_order;
    let f = |theta: f64, delta: f64| {
        let vals = exec.map(n_phi, |j| {
            let at = CosetPointU11 {
                theta,
                phi: TAU * j as f64 / n_phi as f64,
            };
            prob.p_integral(at, delta, order).unwrap_or(C64::new(f64::NAN, 0.0))
        });
        let mean: C64 = vals.iter().sum::<C64>() / n_phi as f64;
        mean * TAU * (2.0 * theta).sinh()
    };
    let env = |theta: f64, _delta: f64| prob.envelope(theta);
    let est = damped_oscillatory(
        f,
        env,
        0.0,
        f64::INFINITY,
        schedule,
        DampedOptions {
            abs_tol: opts.abs_tol,
            target_tol: opts.abs_tol * 100.0,
            exec,
        },
    )?;
    if !est.estimate.value.is_finite() {
        return Err(Error::InvalidParameter {
            name: "gh_order".into(),
            reason: format!("order {order} outside the tensor rule range"),
        });
    }
    Ok(est)
}

fn hs_rhs(a_plus: &ComplexMatrix, eps: f64) -> C64 {
    let (a1, a2, b) = (a_plus[(0, 0)].re, a_plus[(1, 1)].re, a_plus[(0, 1)].norm());
    let tr_la = a1 + a2;
    let tr_a2 = a1 * a1 + a2 * a2 - 2.0 * b * b;
    C64::new((-eps * tr_la - 0.5 * tr_a2).exp(), 0.0)
}

fn check_a_plus(a_plus: &ComplexMatrix) -> Result<()> {
    if a_plus.nrows() != 2 || a_plus.ncols() != 2 {
        return Err(Error::Dimension(format!(
            "A_+ must be 2x2, got {}x{}",
            a_plus.nrows(),
            a_plus.ncols()
        )));
    }
    let m = HermitianPD::new_semidefinite(a_plus.clone())?;
    let min = m.min_eigenvalue();
    if min < -1e-12 {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(())
}

/// Checks ∫ DR e^{-½Tr(R+iεL)² - iTr AR} = C e^{-εTr LA} e^{-½Tr A²} with
/// A = A_+ L at n1 = n2 = 1, the normalization C fixed at A_+ = 1.
///
/// `a_plus` may be semidefinite, which admits the nilpotent case.
pub fn verify_pseudounitary_hs_11(
    a_plus: &ComplexMatrix,
    eps: f64,
    schedule: &DampingSchedule,
    opts: &HsU11Options,
) -> Result<IdentityReport> {
    let start = Instant::now();
    if !(eps > 0.0) {
        return Err(Error::Domain {
            function: "verify_pseudounitary_hs_11",
            name: "eps",
            value: eps,
        });
    }
    check_a_plus(a_plus)?;
    let anchor_a = ComplexMatrix::identity(2, 2);
    let anchor = hs_damped(&anchor_a, eps, schedule, opts)?;
    let point = hs_damped(a_plus, eps, schedule, opts)?;
    let const_fit = anchor.estimate.value / hs_rhs(&anchor_a, eps);
    let flat: Vec<f64> = vec![
        a_plus[(0, 0)].re,
        a_plus[(1, 1)].re,
        a_plus[(0, 1)].re,
        a_plus[(0, 1)].im,
    ];
    let mut r = IdentityReport::build(
        "hs_u11",
        digest(&[("a_plus", &flat), ("eps", &[eps])]),
        digest(&[("a_plus", &[1.0, 1.0, 0.0, 0.0]), ("eps", &[eps])]),
        point.estimate.value,
        hs_rhs(a_plus, eps),
        const_fit,
        0.0,
        HS_TOLERANCE,
        0,
        start,
    )
    .with("extrapolation_step", point.estimate.stderr)
    .with(
        "exact_constant_deviation",
        (const_fit / C64::new(-4.0 * PI * PI, 0.0) - 1.0).norm(),
    );
    for (d, v) in &point.per_delta {
        r = r
            .with(&format!("damped_re_delta_{d}"), v.re)
            .with(&format!("damped_im_delta_{d}"), v.im);
    }
    Ok(r)
}
