use serde::{Deserialize, Serialize};

use super::IntegralEstimate;
use crate::exec::Execution;
use crate::sampling::RngStream;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Samples per chunk; chunk c draws from stream `stream_offset + c`.
    pub chunk: u64,
    #[serde(default)]
    pub stream_offset: u64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            chunk: 10_000,
            stream_offset: 0,
        }
    }

    /// Same budget and seed on a disjoint range of streams.
    pub fn with_stream_offset(self, offset: u64) -> Self {
        Self {
            stream_offset: offset,
            ..self
        }
    }

    pub fn chunks(&self) -> Vec<(u64, u64)> {
        let chunk = self.chunk.max(1);
        let n = self.samples.div_ceil(chunk);
        (0..n)
            .map(|c| (self.stream_offset + c, chunk.min(self.samples - c * chunk)))
            .collect()
    }
}

/// Running sums of a complex sample.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanAccumulator {
    pub n: u64,
    pub sum: C64,
    pub sum_sq_re: f64,
    pub sum_sq_im: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: C64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq_re += x.re * x.re;
        self.sum_sq_im += x.im * x.im;
    }

    pub fn merge(&mut self, other: &Self) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq_re += other.sum_sq_re;
        self.sum_sq_im += other.sum_sq_im;
    }

    pub fn mean(&self) -> C64 {
        self.sum / self.n.max(1) as f64
    }

    /// Standard error of the mean: max of the component standard errors.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let m = self.mean();
        let var_re = ((self.sum_sq_re - n * m.re * m.re) / (n - 1.0)).max(0.0);
        let var_im = ((self.sum_sq_im - n * m.im * m.im) / (n - 1.0)).max(0.0);
        (var_re.max(var_im) / n).sqrt()
    }

    pub fn estimate(&self) -> IntegralEstimate {
        IntegralEstimate {
            value: self.mean(),
            stderr: self.stderr(),
            abs_tol: 0.0,
            n_evals: self.n.max(1),
        }
    }
}

/// Mean of `f(sampler(rng))` with chunked, order-preserving reduction.
pub fn monte_carlo<T, S, F>(sampler: S, f: F, cfg: &McConfig, exec: Execution) -> IntegralEstimate
where
    S: Fn(&mut RngStream) -> T + Sync + Send,
    F: Fn(&T) -> C64 + Sync + Send,
{
    let chunks = cfg.chunks();
    let parts = exec.map(chunks.len(), |c| {
        let (stream, count) = chunks[c];
        let mut rng = RngStream::new(cfg.seed, stream);
        let mut acc = MeanAccumulator::default();
        for _ in 0..count {
            let s = sampler(&mut rng);
            acc.push(f(&s));
        }
        acc
    });
    let mut total = MeanAccumulator::default();
    for p in &parts {
        total.merge(p);
    }
    total.estimate()
}

#[derive(Debug, Clone, Copy)]
pub struct WeightedEstimate {
    pub estimate: IntegralEstimate,
    /// (Σ|w f|)² / Σ|w f|², the effective number of contributing samples.
    pub ess: f64,
}

/// Importance-sampled integral: mean of `exp(log_weight) * f(point)`.
///
/// The sampler returns `(point, log_weight)`. The target measure is
/// unnormalized, so the estimator is the plain mean of weighted values and
/// the effective sample size is computed from their magnitudes.
pub fn weighted_monte_carlo<T, S, F>(sampler: S, f: F, cfg: &McConfig, exec: Execution) -> WeightedEstimate
where
    S: Fn(&mut RngStream) -> (T, f64) + Sync + Send,
    F: Fn(&T) -> C64 + Sync + Send,
{
    let chunks = cfg.chunks();
    let parts = exec.map(chunks.len(), |c| {
        let (stream, count) = chunks[c];
        let mut rng = RngStream::new(cfg.seed, stream);
        let mut acc = MeanAccumulator::default();
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..count {
            let (point, lw) = sampler(&mut rng);
            let v = f(&point) * lw.exp();
            let a = v.norm();
            s1 += a;
            s2 += a * a;
            acc.push(v);
        }
        (acc, s1, s2)
    });
    let mut total = MeanAccumulator::default();
    let (mut s1, mut s2) = (0.0, 0.0);
    for (acc, a, b) in &parts {
        total.merge(acc);
        s1 += a;
        s2 += b;
    }
    WeightedEstimate {
        estimate: total.estimate(),
        ess: if s2 > 0.0 { s1 * s1 / s2 } else { 0.0 },
    }
}
