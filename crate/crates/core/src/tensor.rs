//! Dense square complex matrices.
//!
//! [`ComplexMatrix`] is the carrier for states, observables and Kraus
//! operators. Values are immutable: every operation returns a new matrix, so
//! matrices can be shared freely between threads.
//!
//! Arithmetic operators (`&a * &b`, `&a + &b`, `&a - &b`) panic on dimension
//! mismatch, like slice indexing. The `checked_*` methods return
//! [`Error::DimensionMismatch`] instead.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64;

use crate::tolerance;
use crate::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// A `dim × dim` complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data. The length must be a non-zero
    /// perfect square.
    pub fn from_vec(data: Vec<Complex64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != data.len() {
            return Err(Error::NotSquare { len: data.len() });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix with real entries from row-major data.
    pub fn from_real(data: &[f64]) -> Result<Self> {
        Self::from_vec(data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| ZERO)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        Self::from_fn(entries.len(), |i, j| if i == j { entries[i] } else { ZERO })
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        assert_eq!(u.len(), v.len(), "outer product of unequal vectors");
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    /// Density matrix of the pure state `psi`, normalized first.
    pub fn pure_state(psi: &[Complex64]) -> Self {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let unit: Vec<_> = psi.iter().map(|z| z / norm).collect();
        Self::outer(&unit, &unit)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length does not match matrix");
        (0..self.dim)
            .map(|i| {
                let row = &self.data[i * self.dim..(i + 1) * self.dim];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    fn ensure_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.ensure_same_dim(other)?;
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            let out_row = &mut out[i * d..(i + 1) * d];
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * d..(k + 1) * d];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { dim: d, data: out })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ensure_same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.ensure_same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Self { dim: self.dim, data }
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    /// Entry-wise complex conjugate (equal to the transpose for Hermitian
    /// matrices).
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(self · other)` in O(d²) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        self.ensure_same_dim(other)?;
        let d = self.dim;
        let mut acc = ZERO;
        for i in 0..d {
            for k in 0..d {
                acc += self.data[i * d + k] * other.data[k * d + i];
            }
        }
        Ok(acc)
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut data = vec![ZERO; d * d];
        for i in 0..da {
            for j in 0..da {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..db {
                    let row = (i * db + k) * d + j * db;
                    for l in 0..db {
                        data[row + l] = a * other.data[k * db + l];
                    }
                }
            }
        }
        Self { dim: d, data }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of `self - other`; infinite when dimensions differ.
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim;
        (0..d).all(|i| (i..d).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = self.hermitian_part();
        let m = DMatrix::from_row_slice(h.dim, h.dim, &h.data);
        let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues()[0]
    }

    /// Smallest eigenvalue of the Hermitian part is at least `-tol`.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Hermitian, unit trace and positive semidefinite within `tol`.
    pub fn is_density_matrix(&self, tol: f64) -> bool {
        let tr = self.trace();
        self.is_hermitian(tol)
            && (tr.re - 1.0).abs() <= tol
            && tr.im.abs() <= tol
            && self.is_positive_semidefinite(tol)
    }

    /// Hermitian, squares to the identity, and has both eigenvalues `+1` and
    /// `-1` (so `±I` is excluded).
    pub fn is_dichotomic(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && (self * self).frobenius_distance(&Self::identity(self.dim)) <= tol
            && self.trace().re.abs() <= self.dim as f64 - 2.0 + tol
    }

    pub fn purity(&self) -> f64 {
        self.trace_product(self).map(|z| z.re).unwrap_or(f64::NAN)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_mul(rhs).expect("matrix product dimension mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_add(rhs).expect("matrix sum dimension mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_sub(rhs).expect("matrix difference dimension mismatch")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

/// `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Kronecker product of a non-empty sequence, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut iter = factors.into_iter();
    let first = iter.next().expect("kron_all needs at least one factor").clone();
    iter.fold(first, |acc, m| acc.kron(m))
}

/// `Tr(op · rho)` for a Hermitian `op`, returned as a real number.
pub fn expectation(op: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    op.ensure_same_dim(rho)?;
    if !op.is_hermitian(tolerance::PHYSICS) {
        return Err(Error::NonHermitianObservable);
    }
    let value = op.trace_product(rho)?;
    if value.im.abs() > tolerance::PHYSICS {
        return Err(Error::ImaginaryResidualExceeded(value.im));
    }
    Ok(value.re)
}

/// `ab + ba`.
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let ab = a.checked_mul(b)?;
    let ba = b.checked_mul(a)?;
    ab.checked_add(&ba)
}

/// Places `op` on subsystem `site` of a register with local dimensions
/// `dims`, i.e. `I ⊗ … ⊗ op ⊗ … ⊗ I`.
pub fn embed(op: &ComplexMatrix, dims: &[usize], site: usize) -> Result<ComplexMatrix> {
    if site >= dims.len() {
        return Err(Error::InvalidSubsystem { site, count: dims.len() });
    }
    if op.dim() != dims[site] {
        return Err(Error::DimensionMismatch { left: op.dim(), right: dims[site] });
    }
    let left: usize = dims[..site].iter().product();
    let right: usize = dims[site + 1..].iter().product();
    let mut out = op.clone();
    if left > 1 {
        out = ComplexMatrix::identity(left).kron(&out);
    }
    if right > 1 {
        out = out.kron(&ComplexMatrix::identity(right));
    }
    Ok(out)
}

/// Partial trace keeping the subsystems listed in `keep` (in register order).
pub fn partial_trace(rho: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: total });
    }
    if let Some(&site) = keep.iter().find(|&&s| s >= dims.len()) {
        return Err(Error::InvalidSubsystem { site, count: dims.len() });
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|s| !keep.contains(s)).collect();
    let kept_dims: Vec<usize> = keep.iter().map(|&s| dims[s]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&s| dims[s]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    let compose = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut digits = vec![0usize; dims.len()];
        scatter(kept_idx, &kept_dims, keep, &mut digits);
        scatter(traced_idx, &traced_dims, &traced, &mut digits);
        digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
    };

    let mut out = vec![ZERO; kept_total * kept_total];
    for a in 0..kept_total {
        for b in 0..kept_total {
            let mut acc = ZERO;
            for t in 0..traced_total {
                acc += rho.get(compose(a, t), compose(b, t));
            }
            out[a * kept_total + b] = acc;
        }
    }
    ComplexMatrix::from_vec(out)
}

fn scatter(mut index: usize, local_dims: &[usize], sites: &[usize], digits: &mut [usize]) {
    for (&d, &site) in local_dims.iter().zip(sites).rev() {
        digits[site] = index % d;
        index /= d;
    }
}

/// Pauli matrices.
pub mod pauli {
    use super::{Complex64, ComplexMatrix, I, ONE, ZERO};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_vec(vec![ZERO, ONE, ONE, ZERO]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_vec(vec![ZERO, -I, I, ZERO]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_vec(vec![ONE, ZERO, ZERO, -ONE]).unwrap()
    }

    /// `|0⟩` and `|1⟩` as vectors.
    pub fn basis(bit: usize) -> Vec<Complex64> {
        if bit == 0 {
            vec![ONE, ZERO]
        } else {
            vec![ZERO, ONE]
        }
    }
}
