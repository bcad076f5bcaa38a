use serde::{Deserialize, Serialize};

use super::adaptive::{adaptive_1d_with, AdaptiveOptions};
use super::IntegralEstimate;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::C64;

/// Descending positive damping strengths, extrapolated to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DampingSchedule {
    deltas: Vec<f64>,
}

impl Default for DampingSchedule {
    fn default() -> Self {
        Self {
            deltas: vec![0.2, 0.1, 0.05, 0.025],
        }
    }
}

impl DampingSchedule {
    pub fn new(deltas: Vec<f64>) -> Result<Self> {
        if deltas.len() < 3 {
            return Err(Error::ConstraintViolation(format!(
                "damping schedule needs at least 3 entries, got {}",
                deltas.len()
            )));
        }
        if deltas.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
            return Err(Error::ConstraintViolation(
                "damping strengths must be finite and positive".into(),
            ));
        }
        if deltas.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(Error::ConstraintViolation(
                "damping schedule must be strictly descending".into(),
            ));
        }
        Ok(Self { deltas })
    }

    /// `count` halvings starting at `start`.
    pub fn geometric(start: f64, count: usize) -> Result<Self> {
        Self::new((0..count).map(|j| start * 0.5f64.powi(j as i32)).collect())
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }
}

#[derive(Debug, Clone)]
pub struct DampedEstimate {
    /// Extrapolated value; `stderr` holds the last extrapolation step.
    pub estimate: IntegralEstimate,
    pub per_delta: Vec<(f64, C64)>,
    /// Extrapolants of increasing order, each built from the smallest deltas.
    pub extrapolants: Vec<C64>,
    /// Integration interval used at each delta after truncation.
    pub domains: Vec<(f64, f64)>,
}

/// Polynomial extrapolation to delta = 0 (Neville tableau). Returns the
/// extrapolant of every order, order m using the m+1 smallest deltas.
pub fn neville_extrapolate(deltas: &[f64], values: &[C64]) -> Vec<C64> {
    assert_eq!(deltas.len(), values.len());
    let n = deltas.len();
    let mut row: Vec<C64> = values.to_vec();
    let mut out = vec![row[n - 1]];
    for m in 1..n {
        let next: Vec<C64> = (0..n - m)
            .map(|i| (row[i + 1] * deltas[i] - row[i] * deltas[i + m]) / (deltas[i] - deltas[i + m]))
            .collect();
        out.push(next[n - m - 1]);
        row = next;
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct DampedOptions {
    /// Absolute tolerance of each damped integral; also sets truncation.
    pub abs_tol: f64,
    /// Target accuracy of the extrapolant.
    pub target_tol: f64,
    pub exec: Execution,
}

impl Default for DampedOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            target_tol: 1e-5,
            exec: Execution::Parallel,
        }
    }
}

fn truncate<E: Fn(f64) -> f64>(envelope: &E, start: f64, dir: f64, cutoff: f64) -> f64 {
    let mut step = 1.0;
    let mut x = start + dir * step;
    for _ in 0..200 {
        if envelope(x) < cutoff {
            return x;
        }
        step *= 1.5;
        x = start + dir * step;
    }
    x
}

/// Integrates `f(x, delta)` over [a, b] for every delta in the schedule and
/// extrapolates to delta = 0.
///
/// `envelope(x, delta)` bounds |f(x, delta)| and is used to truncate infinite
/// endpoints where it drops below `abs_tol / 100`.
pub fn damped_oscillatory<F, E>(
    f: F,
    envelope: E,
    a: f64,
    b: f64,
    schedule: &DampingSchedule,
    opts: DampedOptions,
) -> Result<DampedEstimate>
where
    F: Fn(f64, f64) -> C64 + Sync + Send,
    E: Fn(f64, f64) -> f64 + Sync + Send,
{
    let cutoff = opts.abs_tol / 100.0;
    let deltas = schedule.deltas();
    let runs = opts.exec.map(deltas.len(), |i| {
        let d = deltas[i];
        let env = |x: f64| envelope(x, d);
        let lo = if a.is_finite() {
            a
        } else {
            truncate(&env, if b.is_finite() { b.min(0.0) } else { 0.0 }, -1.0, cutoff)
        };
        let hi = if b.is_finite() {
            b
        } else {
            truncate(&env, lo.max(0.0), 1.0, cutoff)
        };
        let integ = adaptive_1d_with(
            |x| f(x, d),
            lo,
            hi,
            AdaptiveOptions {
                abs_tol: opts.abs_tol,
                initial_panels: 16,
                ..AdaptiveOptions::default()
            },
        );
        integ.map(|r| (r, (lo, hi)))
    });
    let mut per_delta = Vec::with_capacity(deltas.len());
    let mut domains = Vec::with_capacity(deltas.len());
    let mut evals = 0;
    let mut quad_err: f64 = 0.0;
    for (run, d) in runs.into_iter().zip(deltas) {
        let (r, dom) = run?;
        per_delta.push((*d, r.value));
        domains.push(dom);
        evals += r.n_evals;
        quad_err = quad_err.max(r.abs_tol + cutoff);
    }
    let values: Vec<C64> = per_delta.iter().map(|p| p.1).collect();
    let extrapolants = neville_extrapolate(deltas, &values);
    let n = extrapolants.len();
    let step = (extrapolants[n - 1] - extrapolants[n - 2]).norm();
    let limit = 10.0 * opts.target_tol.max(quad_err);
    if !(step <= limit) {
        return Err(Error::NonConvergentExtrapolation { step, limit });
    }
    Ok(DampedEstimate {
        estimate: IntegralEstimate {
            value: extrapolants[n - 1],
            stderr: step,
            abs_tol: quad_err,
            n_evals: evals,
        },
        per_delta,
        extrapolants,
        domains,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_validation() {
        assert!(DampingSchedule::new(vec![0.2, 0.1]).is_err());
        assert!(DampingSchedule::new(vec![0.1, 0.2, 0.05]).is_err());
        assert!(DampingSchedule::new(vec![0.2, 0.1, -0.05]).is_err());
        assert_eq!(DampingSchedule::default().deltas(), &[0.2, 0.1, 0.05, 0.025]);
        assert_eq!(DampingSchedule::geometric(0.2, 4).unwrap(), DampingSchedule::default());
    }

    #[test]
    fn neville_is_exact_on_polynomials() {
        let ds = [0.4, 0.2, 0.1, 0.05];
        let vals: Vec<C64> = ds
            .iter()
            .map(|d| C64::new(3.0 - 2.0 * d + 5.0 * d * d * d, d * d))
            .collect();
        let ex = neville_extrapolate(&ds, &vals);
        assert!((ex[3] - C64::new(3.0, 0.0)).norm() < 1e-12);
    }
}
