//! Reproducible random streams and the matrix samplers built on them.
//!
//! The generator is ChaCha8 (`rand_chacha`): `seed` feeds `seed_from_u64` and
//! `stream_id` selects the ChaCha stream, so every (seed, stream_id) pair
//! names a fixed, platform-independent sequence.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::vandermonde;
use crate::{ComplexMatrix, C64};

pub const MAX_SAMPLER_DIM: usize = 8;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Standard complex Gaussian, E|z|^2 = 1.
    pub fn complex_normal(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(self.normal() * s, self.normal() * s)
    }

    /// Index drawn from a cumulative table whose last entry is the total.
    pub fn categorical(&mut self, cumulative: &[f64]) -> usize {
        let total = *cumulative.last().expect("non-empty table");
        let u = self.uniform() * total;
        cumulative.partition_point(|c| *c <= u).min(cumulative.len() - 1)
    }
}

fn check_dim(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::Dimension(format!("sampler size {n} not in 1..={max}")));
    }
    Ok(())
}

/// n x n matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(n: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    check_dim(n, MAX_SAMPLER_DIM)?;
    Ok(DMatrix::from_fn(n, n, |_, _| rng.complex_normal()))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with R's diagonal made
/// real positive.
pub fn haar_unitary(n: usize, rng: &mut RngStream) -> Result<ComplexMatrix> {
    let z = ginibre(n, rng)?;
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

#[derive(Debug, Clone)]
pub struct WeightedSample {
    pub point: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub log_weight: f64,
}

pub const MAX_GL_DIM: usize = 3;

/// Importance sample of the invariant measure dT dT^† det(T T^†)^{-n} on
/// GL(n, C), in SVD coordinates T = U diag(t) V^†.
///
/// In these coordinates the measure has density Δ²(t²) ∏ t_i^{1-2n} (up to a
/// global constant) against dt dμ(U) dμ(V). The t_i are drawn log-normal
/// with log-scale `scale`, and `log_weight` is the log of density over
/// proposal.
pub fn gl_invariant_sample(n: usize, scale: f64, rng: &mut RngStream) -> Result<WeightedSample> {
    check_dim(n, MAX_GL_DIM)?;
    if !(scale > 0.0) {
        return Err(Error::Domain {
            function: "gl_invariant_sample",
            name: "scale",
            value: scale,
        });
    }
    let u = haar_unitary(n, rng)?;
    let v = haar_unitary(n, rng)?;
    let logs: Vec<f64> = (0..n).map(|_| scale * rng.normal()).collect();
    let t: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    let log_proposal: f64 = logs
        .iter()
        .map(|l| -l * l / (2.0 * scale * scale) - l - (scale * (2.0 * std::f64::consts::PI).sqrt()).ln())
        .sum();
    let t2: Vec<f64> = t.iter().map(|x| x * x).collect();
    let vd = vandermonde(&t2);
    let log_density = 2.0 * vd.abs().ln() + (1.0 - 2.0 * n as f64) * logs.iter().sum::<f64>();
    let mut point = u.clone();
    for j in 0..n {
        for i in 0..n {
            point[(i, j)] *= t[j];
        }
    }
    let point = point * v.adjoint();
    Ok(WeightedSample {
        point,
        singular_values: t,
        log_weight: log_density - log_proposal,
    })
}

/// Variance profile of the k-orbital chain: J/k inside a block, V/k² between
/// neighbouring blocks, zero otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceProfile {
    pub j: f64,
    pub v: f64,
    pub k: usize,
    pub r: usize,
}

pub const MAX_HAMILTONIAN_DIM: usize = 64;

impl VarianceProfile {
    pub fn new(j: f64, v: f64, k: usize, r: usize) -> Result<Self> {
        if !(j > 0.0) {
            return Err(Error::ConstraintViolation(format!("J must be positive, got {j}")));
        }
        if !(v >= 0.0) {
            return Err(Error::ConstraintViolation(format!("V must be non-negative, got {v}")));
        }
        if k == 0 || r == 0 || k * r > MAX_HAMILTONIAN_DIM {
            return Err(Error::ConstraintViolation(format!(
                "need k, r >= 1 and r*k <= {MAX_HAMILTONIAN_DIM}, got k={k}, r={r}"
            )));
        }
        Ok(Self { j, v, k, r })
    }

    pub fn size(&self) -> usize {
        self.k * self.r
    }

    /// Variance E|H_lm|^2 of entry (l, m).
    pub fn variance(&self, l: usize, m: usize) -> f64 {
        let (bl, bm) = (l / self.k, m / self.k);
        if bl == bm {
            self.j / self.k as f64
        } else if bl.abs_diff(bm) == 1 {
            self.v / (self.k * self.k) as f64
        } else {
            0.0
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.size();
        DMatrix::from_fn(n, n, |l, m| self.variance(l, m))
    }
}

/// Hermitian k-orbital Hamiltonian: independent complex Gaussian upper
/// triangle with the profile variances, real Gaussian diagonal of variance J/k.
pub fn korbital_hamiltonian(profile: &VarianceProfile, rng: &mut RngStream) -> ComplexMatrix {
    let n = profile.size();
    let mut h = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for l in 0..n {
        h[(l, l)] = C64::new(rng.normal() * profile.variance(l, l).sqrt(), 0.0);
        for m in l + 1..n {
            let var = profile.variance(l, m);
            if var == 0.0 {
                continue;
            }
            let z = rng.complex_normal() * var.sqrt();
            h[(l, m)] = z;
            h[(m, l)] = z.conj();
        }
    }
    h
}
