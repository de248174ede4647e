//! Dense complex-matrix kernel for small Hilbert spaces.
//!
//! Everything in this crate stores operators and states as row-major dense
//! [`CMatrix`] values; the shipped models use dimensions 2, 3, 4, and 8, so
//! no sparsity or blocking is attempted. The kernel provides Hermitian
//! eigendecomposition (cyclic Jacobi, see [`eig`]), matrix functions on the
//! spectrum, the support-restricted logarithm, partial traces, and the usual
//! commutator/expectation helpers.
//!
//! Conventions: qubit basis states are ordered by occupation, `|0⟩` = ground,
//! `|1⟩` = excited (see [`qubit`]); a bipartite index is `a·d_B + b`, i.e. the
//! first tensor factor is the most significant.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

pub mod eig;
pub mod qubit;

pub use eig::{eig_hermitian, EigenSystem};

/// Eigenvalues of a density matrix at or below this cutoff are treated as
/// lying outside its support. The same cutoff guards every `1/pₙ` and
/// `ln pₙ` appearing downstream (logarithms, SLD and Γ denominators).
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Errors from the matrix kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum QmatError {
    /// Input was required to be Hermitian; `defect` is the measured
    /// `‖M − M†‖_F / max(‖M‖_F, ε)`.
    NotHermitian { defect: f64, tol: f64 },
    /// Two operands have incompatible dimensions.
    DimMismatch { left: usize, right: usize },
    /// Bipartite factor dimensions do not multiply to the matrix dimension.
    BadFactorDims { dim: usize, d_a: usize, d_b: usize },
    /// Ground state degenerate where a nondegenerate one is required.
    DegenerateGround { gap: f64 },
}

impl fmt::Display for QmatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QmatError::NotHermitian { defect, tol } => write!(
                f,
                "matrix is not Hermitian: relative asymmetry {defect:.3e} exceeds tolerance {tol:.1e}"
            ),
            QmatError::DimMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            QmatError::BadFactorDims { dim, d_a, d_b } => write!(
                f,
                "factor dimensions {d_a}x{d_b} do not match matrix dimension {dim}"
            ),
            QmatError::DegenerateGround { gap } => {
                write!(f, "ground state is degenerate (gap {gap:.3e})")
            }
        }
    }
}

impl core::error::Error for QmatError {}

/// Square dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix(dim={})", self.dim)?;
        for i in 0..self.dim {
            write!(f, "  [")?;
            for j in 0..self.dim {
                let z = self.at(i, j);
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::ONE;
        }
        m
    }

    /// Build from a row-major flat vector; panics unless `data.len() == dim²`.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), dim * dim, "CMatrix::from_vec length");
        CMatrix { dim, data }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMatrix { dim, data }
    }

    /// Diagonal matrix from real entries.
    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Projector `|ψ⟩⟨ψ|` from a (not necessarily normalized) ket.
    pub fn outer(ket: &[Complex64]) -> Self {
        let dim = ket.len();
        Self::from_fn(dim, |i, j| ket[i] * ket[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose `M†`.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.at(j, i).conj())
    }

    /// Hermitian part `(M + M†)/2`.
    pub fn hermitized(&self) -> Self {
        Self::from_fn(self.dim, |i, j| {
            0.5 * (self.at(i, j) + self.at(j, i).conj())
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.at(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Absolute Hermiticity defect `‖M − M†‖_F`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += (self.at(i, j) - self.at(j, i).conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Relative Hermiticity defect `‖M − M†‖_F / max(‖M‖_F, ε)`.
    pub fn hermiticity_defect_rel(&self) -> f64 {
        self.hermiticity_defect() / self.frobenius_norm().max(1e-300)
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect_rel() <= rel_tol
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scaled_re(&self, c: f64) -> Self {
        self.scaled(Complex64::new(c, 0.0))
    }

    /// Kronecker product; `self` is the most significant factor.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (da, db) = (self.dim, other.dim);
        CMatrix::from_fn(da * db, |i, j| {
            self.at(i / db, j / db) * other.at(i % db, j % db)
        })
    }

    /// Matrix product.
    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// `Tr(self · other)`.
    pub fn trace_product(&self, other: &CMatrix) -> Complex64 {
        assert_eq!(self.dim, other.dim, "trace_product dimension mismatch");
        let n = self.dim;
        let mut s = Complex64::ZERO;
        for i in 0..n {
            for k in 0..n {
                s += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        s
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scaled_re(-1.0)
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.dim, rhs.dim, "add_assign dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&CMatrix> for CMatrix {
    fn sub_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.dim, rhs.dim, "sub_assign dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// `[A, B] = AB − BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, QmatError> {
    check_dims(a, b)?;
    Ok(&a.matmul(b) - &b.matmul(a))
}

/// `{A, B} = AB + BA`.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, QmatError> {
    check_dims(a, b)?;
    Ok(&a.matmul(b) + &b.matmul(a))
}

/// `⟨O⟩ = Tr(ρO)` for Hermitian `O`; returns the real part.
pub fn expval(rho: &CMatrix, o: &CMatrix) -> Result<f64, QmatError> {
    check_dims(rho, o)?;
    check_hermitian(o, 1e-8)?;
    Ok(rho.trace_product(o).re)
}

/// `σ² = ⟨O²⟩ − ⟨O⟩²`, clamped to 0 when rounding drives it slightly
/// negative.
pub fn variance(rho: &CMatrix, o: &CMatrix) -> Result<f64, QmatError> {
    check_dims(rho, o)?;
    check_hermitian(o, 1e-8)?;
    let mean = rho.trace_product(o).re;
    let sq = rho.trace_product(&o.matmul(o)).re;
    Ok((sq - mean * mean).max(0.0))
}

/// Which bipartite factor to keep in [`partial_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace of a bipartite state with factor dimensions `(d_a, d_b)`;
/// indices follow `a·d_b + b`.
pub fn partial_trace(
    rho: &CMatrix,
    keep: Subsystem,
    dims: (usize, usize),
) -> Result<CMatrix, QmatError> {
    let (da, db) = dims;
    if da * db != rho.dim() {
        return Err(QmatError::BadFactorDims {
            dim: rho.dim(),
            d_a: da,
            d_b: db,
        });
    }
    let out = match keep {
        Subsystem::B => CMatrix::from_fn(db, |b, bp| {
            (0..da).map(|a| rho.at(a * db + b, a * db + bp)).sum()
        }),
        Subsystem::A => CMatrix::from_fn(da, |a, ap| {
            (0..db).map(|b| rho.at(a * db + b, ap * db + b)).sum()
        }),
    };
    Ok(out)
}

/// Apply a real function to the full spectrum of a Hermitian matrix:
/// `f(M) = Σ f(λₙ)|n⟩⟨n|`.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix, QmatError> {
    let es = eig_hermitian(m)?;
    let mapped: Vec<f64> = es.values().iter().map(|&v| f(v)).collect();
    Ok(es.from_eigenbasis(&CMatrix::from_diag(&mapped)))
}

/// Support-restricted logarithm of a density matrix:
/// `Σ_{pₙ > cutoff} ln(pₙ) |n⟩⟨n|`; eigenvalues at or below `cutoff`
/// contribute zero.
pub fn log_on_support(rho: &CMatrix, cutoff: f64) -> Result<CMatrix, QmatError> {
    let es = eig_hermitian(rho)?;
    let mapped: Vec<f64> = es
        .values()
        .iter()
        .map(|&p| if p > cutoff { p.ln() } else { 0.0 })
        .collect();
    Ok(es.from_eigenbasis(&CMatrix::from_diag(&mapped)))
}

/// Von Neumann entropy `−Σ pₙ ln pₙ` over the support.
pub fn entropy(rho: &CMatrix, cutoff: f64) -> Result<f64, QmatError> {
    let es = eig_hermitian(rho)?;
    Ok(es
        .values()
        .iter()
        .filter(|&&p| p > cutoff)
        .map(|&p| -p * p.ln())
        .sum())
}

pub(crate) fn check_dims(a: &CMatrix, b: &CMatrix) -> Result<(), QmatError> {
    if a.dim() != b.dim() {
        return Err(QmatError::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

pub(crate) fn check_hermitian(m: &CMatrix, rel_tol: f64) -> Result<(), QmatError> {
    let defect = m.hermiticity_defect_rel();
    if defect > rel_tol {
        return Err(QmatError::NotHermitian {
            defect,
            tol: rel_tol,
        });
    }
    Ok(())
}
