//! Zero-order Bessel, Neumann and Macdonald functions, plus the closed-form
//! one-dimensional integrals used as kernels and oracles.
//!
//! Small arguments use the defining power series. Large arguments use the
//! exact integral representations
//!
//! H0(x) = sqrt(2/(pi x)) e^{i(x - pi/4)} pi^{-1/2} ∫ e^{-s^2} (1 + i s^2/(2x))^{-1/2} ds
//! K0(x) = sqrt(pi/(2x)) e^{-x} pi^{-1/2} ∫ e^{-s^2} (1 + s^2/(2x))^{-1/2} ds
//!
//! evaluated by Gauss-Hermite quadrature. Their term-by-term expansion is the
//! familiar asymptotic series, but unlike the truncated series they keep full
//! double precision right down to the switchover points.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::quadrature::rules::gauss_hermite;
use crate::C64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const BESSEL_SWITCH: f64 = 8.0;
const K0_SWITCH: f64 = 2.0;
const HANKEL_ORDER: usize = 80;
const SERIES_TERMS: usize = 60;

/// Bessel function of the first kind of order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= BESSEL_SWITCH {
        j0_series(ax)
    } else {
        hankel0(ax).re
    }
}

/// Neumann (Bessel second kind) function of order zero.
pub fn bessel_y0(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            function: "bessel_y0",
            name: "x",
            value: x,
        });
    }
    Ok(if x <= BESSEL_SWITCH {
        y0_series(x)
    } else {
        hankel0(x).im
    })
}

/// Macdonald (modified Bessel second kind) function of order zero.
pub fn macdonald_k0(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            function: "macdonald_k0",
            name: "x",
            value: x,
        });
    }
    if x <= K0_SWITCH {
        return Ok(k0_series(x));
    }
    let rule = gauss_hermite(HANKEL_ORDER);
    let s: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(t, w)| w / (1.0 + t * t / (2.0 * x)).sqrt())
        .sum();
    Ok((PI / (2.0 * x)).sqrt() * (-x).exp() * s / PI.sqrt())
}

/// K0 on the imaginary axis, composed from J0 and Y0:
/// K0(iu) = -(pi/2) [Y0(|u|) + i sgn(u) J0(|u|)].
pub fn k0_imaginary(u: f64) -> Result<C64> {
    if u == 0.0 || !u.is_finite() {
        return Err(Error::Domain {
            function: "k0_imaginary",
            name: "u",
            value: u,
        });
    }
    let au = u.abs();
    let y = bessel_y0(au)?;
    let j = bessel_j0(au);
    Ok(C64::new(-FRAC_PI_2 * y, -FRAC_PI_2 * u.signum() * j))
}

/// ∫_0^∞ p e^{-b p^2} J0(c p) dp = e^{-c^2/(4b)} / (2b).
pub fn weber_integral(b: f64, c: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::Domain {
            function: "weber_integral",
            name: "b",
            value: b,
        });
    }
    if !(c >= 0.0) {
        return Err(Error::Domain {
            function: "weber_integral",
            name: "c",
            value: c,
        });
    }
    Ok((-c * c / (4.0 * b)).exp() / (2.0 * b))
}

pub const MAX_MOMENT_ORDER: usize = 16;

/// ∫ p^k e^{-p^2/2 - i p lambda} dp = sqrt(2 pi) (-i)^k He_k(lambda) e^{-lambda^2/2}.
pub fn gauss_fourier_moment(k: usize, lambda: f64) -> Result<C64> {
    if k > MAX_MOMENT_ORDER {
        return Err(Error::Domain {
            function: "gauss_fourier_moment",
            name: "k",
            value: k as f64,
        });
    }
    let he = hermite_he(k, lambda);
    let phase = match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    };
    Ok(phase * ((2.0 * PI).sqrt() * he * (-0.5 * lambda * lambda).exp()))
}

/// Probabilists' Hermite polynomial He_k(x).
pub fn hermite_he(k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let next = x * cur - j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Laguerre polynomial L_n(x).
pub fn laguerre(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 0 {
        return prev;
    }
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 - x) * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..SERIES_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn y0_series(x: f64) -> f64 {
    // Y0 = (2/pi) [ (ln(x/2) + gamma) J0(x) + sum_{k>=1} (-1)^{k+1} H_k (x^2/4)^k / (k!)^2 ]
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..SERIES_TERMS {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        let add = -term * harmonic;
        tail += add;
        if add.abs() < 1e-18 * tail.abs().max(1e-300) && k > 3 {
            break;
        }
    }
    (2.0 / PI) * (((0.5 * x).ln() + EULER_GAMMA) * j0_series(x) + tail)
}

fn k0_series(x: f64) -> f64 {
    // K0 = -(ln(x/2) + gamma) I0(x) + sum_{k>=1} H_k (x^2/4)^k / (k!)^2
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut i0 = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for k in 1..SERIES_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term * harmonic < 1e-18 * tail {
            break;
        }
    }
    -((0.5 * x).ln() + EULER_GAMMA) * i0 + tail
}

fn hankel0(x: f64) -> C64 {
    let rule = gauss_hermite(HANKEL_ORDER);
    let mut acc = C64::new(0.0, 0.0);
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        let z = C64::new(1.0, t * t / (2.0 * x));
        acc += *w / z.sqrt();
    }
    let pref = (2.0 / (PI * x)).sqrt() / PI.sqrt();
    acc * C64::from_polar(pref, x - FRAC_PI_4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(bessel_j0(0.0), 1.0);
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!(bessel_j0(2.404_825_557_695_773).abs() < 1e-10);
        assert!((bessel_y0(1.0).unwrap() - 0.088_256_964_215_676_96).abs() < 1e-15);
        assert!((macdonald_k0(1.0).unwrap() - 0.421_024_438_240_708_34).abs() < 1e-15);
    }

    #[test]
    fn switchover_is_continuous() {
        {
            let &x = &BESSEL_SWITCH;
            let (lo, hi) = (x, x.next_up());
            assert!((bessel_j0(lo) - bessel_j0(hi)).abs() < 1e-12);
            assert!((bessel_y0(lo).unwrap() - bessel_y0(hi).unwrap()).abs() < 1e-12);
        }
        let (lo, hi) = (K0_SWITCH, K0_SWITCH.next_up());
        let d = macdonald_k0(lo).unwrap() - macdonald_k0(hi).unwrap();
        assert!(d.abs() < 1e-14, "{d}");
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_y0(0.0).is_err());
        assert!(bessel_y0(-1.0).is_err());
        assert!(macdonald_k0(0.0).is_err());
        assert!(k0_imaginary(0.0).is_err());
        assert!(weber_integral(0.0, 1.0).is_err());
        assert!(gauss_fourier_moment(17, 0.0).is_err());
    }

    #[test]
    fn hermite_and_laguerre() {
        assert_eq!(hermite_he(2, 0.0), -1.0);
        assert_eq!(hermite_he(3, 2.0), 2.0);
        assert!((laguerre(2, 1.0) - (-0.5)).abs() < 1e-15);
        assert!((laguerre(3, 0.5) - (1.0 - 1.5 + 0.375 - 0.125 / 6.0)).abs() < 1e-15);
    }
}
