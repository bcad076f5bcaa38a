use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::rules::{GAUSS7_W, KRONROD_W, KRONROD_X};
use super::IntegralEstimate;
use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    /// Relative tolerance against |estimate|; 0 disables it.
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Initial uniform split of the (mapped) interval.
    pub initial_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_panels: 1 << 16,
            initial_panels: 1,
        }
    }
}

impl AdaptiveOptions {
    pub fn abs(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: C64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * KRONROD_W[7];
    let mut g = fc * GAUSS7_W[3];
    for j in 0..7 {
        let dx = h * KRONROD_X[j];
        let s = f(c - dx) + f(c + dx);
        k += s * KRONROD_W[j];
        if j % 2 == 1 {
            g += s * GAUSS7_W[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).norm())
}

/// Adaptive quadrature of a complex integrand on [a, b]; infinite endpoints
/// are mapped onto finite intervals.
pub fn adaptive_1d<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<IntegralEstimate>
where
    F: Fn(f64) -> C64,
{
    adaptive_1d_with(f, a, b, AdaptiveOptions::abs(abs_tol))
}

pub fn adaptive_1d_with<F>(f: F, a: f64, b: f64, opts: AdaptiveOptions) -> Result<IntegralEstimate>
where
    F: Fn(f64) -> C64,
{
    if !(a < b) {
        return Err(Error::Dimension(format!("adaptive_1d needs a < b, got [{a}, {b}]")));
    }
    match (a.is_finite(), b.is_finite()) {
        (true, true) => global_adaptive(&f, a, b, opts),
        (true, false) => {
            // x = a + t/(1-t)
            let g = |t: f64| {
                let u = 1.0 - t;
                f(a + t / u) / (u * u)
            };
            global_adaptive(&g, 0.0, 1.0, opts)
        }
        (false, true) => {
            let g = |t: f64| {
                let u = 1.0 - t;
                f(b - t / u) / (u * u)
            };
            global_adaptive(&g, 0.0, 1.0, opts)
        }
        (false, false) => {
            // x = t/(1-t^2)
            let g = |t: f64| {
                let u = 1.0 - t * t;
                f(t / u) * ((1.0 + t * t) / (u * u))
            };
            global_adaptive(&g, -1.0, 1.0, opts)
        }
    }
}

fn global_adaptive<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, opts: AdaptiveOptions) -> Result<IntegralEstimate> {
    let mut heap = BinaryHeap::new();
    let mut total = C64::new(0.0, 0.0);
    let mut err = 0.0;
    let m = opts.initial_panels.max(1);
    let w = (b - a) / m as f64;
    for i in 0..m {
        let pa = a + w * i as f64;
        let pb = if i + 1 == m { b } else { pa + w };
        let (v, e) = kronrod(f, pa, pb);
        total += v;
        err += e;
        heap.push(Panel {
            a: pa,
            b: pb,
            value: v,
            err: e,
        });
    }
    let mut evals = 15 * m as u64;
    let target = |total: C64| opts.abs_tol.max(opts.rel_tol * total.norm());

    while err > target(total) {
        if heap.len() >= opts.max_panels {
            return Err(Error::ToleranceNotReached {
                estimate: total,
                achieved: err,
                requested: target(total),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval can no longer be split in floating point
            return Err(Error::ToleranceNotReached {
                estimate: total,
                achieved: err,
                requested: target(total),
            });
        }
        let (v1, e1) = kronrod(f, worst.a, mid);
        let (v2, e2) = kronrod(f, mid, worst.b);
        evals += 30;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }
    // re-sum in interval order to keep the reduction independent of the
    // refinement history
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().fold(C64::new(0.0, 0.0), |s, p| s + p.value);
    let err = panels.iter().map(|p| p.err).sum();
    Ok(IntegralEstimate {
        value,
        stderr: 0.0,
        abs_tol: err,
        n_evals: evals,
    })
}
