//! Small dense complex algebra: indefinite-metric diagonalization, the
//! chiral pair decomposition, SVD and Vandermonde products.
//!
//! Everything is O(n^3) dense on matrices of size at most 8, backed by
//! nalgebra's Hermitian eigensolver, SVD and LU.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{ComplexMatrix, C64};

pub const MAX_DIM: usize = 8;
pub const DEGENERACY_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Real diagonal entries (P, Λ, a, x, y in the identities).
pub type DiagonalSpectrum = Vec<f64>;

/// ∏_{i<j} (b_i - b_j); 1 for fewer than two entries.
pub fn vandermonde(b: &[f64]) -> f64 {
    let mut p = 1.0;
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            p *= b[i] - b[j];
        }
    }
    p
}

/// All permutations of 0..n with their parity sign.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, sign: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if rest.is_empty() {
            out.push((prefix.clone(), sign));
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            // moving element i to the front takes i transpositions
            rec(prefix, rest, if i % 2 == 0 { sign } else { -sign }, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n).collect(), 1.0, &mut out);
    out
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn from_real_diagonal(d: &[f64]) -> ComplexMatrix {
    DMatrix::from_diagonal(&DVector::from_iterator(d.len(), d.iter().map(|x| C64::new(*x, 0.0))))
}

/// Metric L = diag(1_{n1}, -1_{n2}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub n1: usize,
    pub n2: usize,
}

impl Signature {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 < 1 || n2 < 1 || n1 + n2 > MAX_DIM {
            return Err(Error::ConstraintViolation(format!(
                "signature ({n1}, {n2}) needs n1, n2 >= 1 and n1 + n2 <= {MAX_DIM}"
            )));
        }
        Ok(Self { n1, n2 })
    }

    pub fn size(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.size()).map(|i| if i < self.n1 { 1.0 } else { -1.0 }).collect()
    }

    pub fn metric(&self) -> ComplexMatrix {
        from_real_diagonal(&self.diagonal())
    }
}

fn check_square(m: &ComplexMatrix, n: usize, what: &str) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Dimension(format!(
            "{what}: expected {n}x{n}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// True iff ‖T L T^† L - 1‖_max < tol, i.e. T^{-1} = L T^† L.
pub fn is_pseudounitary(t: &ComplexMatrix, sig: Signature, tol: f64) -> Result<bool> {
    let n = sig.size();
    check_square(t, n, "is_pseudounitary")?;
    let l = sig.metric();
    let d = t * &l * t.adjoint() * &l - ComplexMatrix::identity(n, n);
    Ok(max_abs(&d) < tol)
}

fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// True iff `m` is Hermitian to `tol` and its smallest eigenvalue exceeds `tol`.
pub fn is_positive_definite(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "{}x{} matrix is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = hermitian_deviation(m);
    if dev > tol.max(HERMITIAN_TOL) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let (vals, _) = hermitian_eigen(m);
    Ok(vals.iter().all(|v| *v > tol))
}

/// Strictly positive-definite Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianPD(ComplexMatrix);

impl HermitianPD {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 || m.nrows() > MAX_DIM {
            return Err(Error::Dimension(format!(
                "{}x{} is not a supported square size",
                m.nrows(),
                m.ncols()
            )));
        }
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let (vals, _) = hermitian_eigen(&m);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
        }
        Ok(Self(m))
    }

    /// Builds from a Hermitian matrix without the positivity check, for
    /// semidefinite inputs handled by callers that tolerate them.
    pub fn new_semidefinite(m: ComplexMatrix) -> Result<Self> {
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigen(&self.0).0.into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Hermitian square root and its inverse.
    fn sqrt_and_inverse(&self) -> (ComplexMatrix, ComplexMatrix) {
        let (vals, vecs) = hermitian_eigen(&self.0);
        let s = from_real_diagonal(&vals.iter().map(|v| v.sqrt()).collect::<Vec<_>>());
        let si = from_real_diagonal(&vals.iter().map(|v| 1.0 / v.sqrt()).collect::<Vec<_>>());
        (&vecs * s * vecs.adjoint(), &vecs * si * vecs.adjoint())
    }
}

/// A = T Λ T^{-1} with T pseudounitary for the given signature.
#[derive(Debug, Clone)]
pub struct PseudoDiag {
    pub t_matrix: ComplexMatrix,
    pub spectrum: DiagonalSpectrum,
    pub signature: Signature,
}

impl PseudoDiag {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let l = self.signature.metric();
        let t_inv = &l * self.t_matrix.adjoint() * &l;
        &self.t_matrix * from_real_diagonal(&self.spectrum) * t_inv
    }
}

/// Diagonalizes A = A_+ L by a pseudounitary T.
///
/// Works through the Hermitian pencil S L S with S = A_+^{1/2}: if
/// S L S = W D W^† then the columns of S W |D|^{-1/2} are eigenvectors of A
/// normalized to ⟨v, L v⟩ = sgn(d). Columns are ordered by descending
/// eigenvalue, so the positive block comes first.
pub fn t_diagonalize(a_plus: &HermitianPD, sig: Signature) -> Result<PseudoDiag> {
    let n = sig.size();
    check_square(a_plus.matrix(), n, "t_diagonalize")?;
    let min = a_plus.min_eigenvalue();
    if min < DEGENERACY_TOL {
        return Err(Error::NotTDiagonalizable(format!(
            "A_+ is not strictly positive definite (smallest eigenvalue {min:.3e})"
        )));
    }
    let (s, _) = a_plus.sqrt_and_inverse();
    let l = sig.metric();
    let pencil = &s * &l * &s;
    let (vals, w) = hermitian_eigen(&pencil);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let spectrum: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    if let Some(d) = spectrum.iter().find(|d| d.abs() < DEGENERACY_TOL) {
        return Err(Error::NotTDiagonalizable(format!(
            "indefinite norm degenerates (eigenvalue {d:.3e})"
        )));
    }
    let positives = spectrum.iter().filter(|d| **d > 0.0).count();
    if positives != sig.n1 {
        // cannot happen for positive definite A_+ (Sylvester inertia)
        return Err(Error::NotTDiagonalizable(format!(
            "{positives} positive eigenvalues for signature ({}, {})",
            sig.n1, sig.n2
        )));
    }
    let v = &s * &w;
    let mut t = ComplexMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let scale = 1.0 / vals[i].abs().sqrt();
        let mut c = v.column(i) * C64::new(scale, 0.0);
        // gauge: largest-modulus component real positive
        let (k, _) = c.iter().enumerate().fold(
            (0, 0.0),
            |best, (k, z)| if z.norm() > best.1 + 1e-14 { (k, z.norm()) } else { best },
        );
        let ph = c[k] / c[k].norm();
        c *= ph.conj();
        t.set_column(col, &c);
    }
    Ok(PseudoDiag {
        t_matrix: t,
        spectrum,
        signature: sig,
    })
}

/// A = T_A a T_A^†, B = (T_A^†)^{-1} a T_A^{-1}.
#[derive(Debug, Clone)]
pub struct ChiralPairDecomp {
    pub t_matrix: ComplexMatrix,
    pub a_spectrum: DiagonalSpectrum,
}

impl ChiralPairDecomp {
    pub fn reconstruct(&self) -> (ComplexMatrix, ComplexMatrix) {
        let a = from_real_diagonal(&self.a_spectrum);
        let t_inv = self.t_matrix.clone().try_inverse().expect("T_A is invertible");
        (
            &self.t_matrix * &a * self.t_matrix.adjoint(),
            t_inv.adjoint() * &a * t_inv,
        )
    }
}

/// Simultaneous decomposition of two positive-definite matrices.
///
/// a² is the spectrum of AB, computed from the similar Hermitian matrix
/// C = B^{1/2} A B^{1/2} = W a² W^†; then T_A = B^{-1/2} W D with the
/// diagonal D fixed by |d_j|² = a_j (A-reconstruction) and the phase that
/// makes diag(T_A) real positive.
pub fn chiral_pair_decompose(a: &HermitianPD, b: &HermitianPD) -> Result<ChiralPairDecomp> {
    let n = a.dim();
    check_square(b.matrix(), n, "chiral_pair_decompose")?;
    let (bs, bsi) = b.sqrt_and_inverse();
    let c = &bs * a.matrix() * &bs;
    let (vals, w) = hermitian_eigen(&c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let sq: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    if sq[0] - sq[n - 1] < DEGENERACY_TOL * sq[0].max(1.0) {
        // AB proportional to the identity: any W works, take W = 1
        let a0 = (sq.iter().sum::<f64>() / n as f64).sqrt();
        return Ok(ChiralPairDecomp {
            t_matrix: bsi * C64::new(a0.sqrt(), 0.0),
            a_spectrum: vec![a0; n],
        });
    }
    for k in 1..n {
        if (sq[k - 1] - sq[k]).abs() < DEGENERACY_TOL {
            return Err(Error::DegenerateSpectrum(format!(
                "AB has nearly equal eigenvalues {} and {}",
                sq[k - 1],
                sq[k]
            )));
        }
    }
    let spectrum: Vec<f64> = sq.iter().map(|v| v.sqrt()).collect();
    let base = &bsi * &w;
    let mut t = ComplexMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let diag = base[(col, i)];
        if diag.norm() < DEGENERACY_TOL {
            return Err(Error::DegenerateSpectrum(
                "diagonal gauge undefined: vanishing diagonal entry of T_A".into(),
            ));
        }
        let d = (diag.conj() / diag.norm()) * spectrum[col].sqrt();
        t.set_column(col, &(base.column(i) * d));
    }
    Ok(ChiralPairDecomp {
        t_matrix: t,
        a_spectrum: spectrum,
    })
}

/// M = U diag(s) V^†, s descending.
#[derive(Debug, Clone)]
pub struct SingularDecomp {
    pub u_matrix: ComplexMatrix,
    pub v_matrix: ComplexMatrix,
    pub singular_values: DiagonalSpectrum,
}

impl SingularDecomp {
    pub fn reconstruct(&self) -> ComplexMatrix {
        &self.u_matrix * from_real_diagonal(&self.singular_values) * self.v_matrix.adjoint()
    }
}

pub fn svd_complex(m: &ComplexMatrix) -> Result<SingularDecomp> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "svd_complex needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^T").adjoint();
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let mut uo = ComplexMatrix::zeros(n, n);
    let mut vo = ComplexMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        uo.set_column(col, &u.column(i));
        vo.set_column(col, &v.column(i));
    }
    Ok(SingularDecomp {
        u_matrix: uo,
        v_matrix: vo,
        singular_values: order.iter().map(|&i| s[i]).collect(),
    })
}

/// log|det M| via LU, avoiding overflow of the product of pivots.
pub fn log_abs_det(m: &ComplexMatrix) -> f64 {
    let lu = m.clone().lu();
    let u = lu.u();
    (0..u.nrows()).map(|i| u[(i, i)].norm().ln()).sum()
}

pub fn det(m: &ComplexMatrix) -> C64 {
    m.clone().determinant()
}
