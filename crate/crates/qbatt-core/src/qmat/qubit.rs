//! Standard qubit operators and ket helpers.
//!
//! Basis states are ordered by occupation: index 0 is the ground state
//! `|0⟩`, index 1 the excited state `|1⟩`. The Pauli operators here use the
//! convention in which the *excited* state is the +1 eigenstate of `σ_z`, so
//! a qubit Hamiltonian reads `H = (ω₀/2)(σ_z + 1) = ω₀|1⟩⟨1|` with ground
//! energy zero, and `σ₊ = |1⟩⟨0|` raises. The triple satisfies
//! `[σ_x, σ_y] = 2iσ_z` and `σ± = (σ_x ± iσ_y)/2`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::CMatrix;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::ZERO;

pub fn sigma_x() -> CMatrix {
    CMatrix::from_vec(2, vec![ZERO, ONE, ONE, ZERO])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_vec(2, vec![ZERO, I, -I, ZERO])
}

/// `σ_z = diag(−1, +1)`: excited state is the +1 eigenstate.
pub fn sigma_z() -> CMatrix {
    CMatrix::from_vec(2, vec![-ONE, ZERO, ZERO, ONE])
}

/// Raising operator `σ₊ = |1⟩⟨0|`.
pub fn sigma_plus() -> CMatrix {
    CMatrix::from_vec(2, vec![ZERO, ZERO, ONE, ZERO])
}

/// Lowering operator `σ₋ = |0⟩⟨1|`.
pub fn sigma_minus() -> CMatrix {
    CMatrix::from_vec(2, vec![ZERO, ONE, ZERO, ZERO])
}

/// Occupation `n̂ = |1⟩⟨1| = (σ_z + 1)/2`.
pub fn number_op() -> CMatrix {
    CMatrix::from_vec(2, vec![ZERO, ZERO, ZERO, ONE])
}

/// Qubit battery Hamiltonian `ω₀ n̂ = diag(0, ω₀)`.
pub fn battery_hamiltonian(omega0: f64) -> CMatrix {
    number_op().scaled_re(omega0)
}

pub fn ket_ground() -> Vec<Complex64> {
    vec![ONE, ZERO]
}

pub fn ket_excited() -> Vec<Complex64> {
    vec![ZERO, ONE]
}

/// `(|0⟩ + |1⟩)/√2`.
pub fn ket_plus() -> Vec<Complex64> {
    let s = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    vec![s, s]
}

/// Tensor product of two kets; the first factor is most significant.
pub fn kron_ket(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &ai in a {
        for &bj in b {
            out.push(ai * bj);
        }
    }
    out
}

/// Embed a single-site operator at `site` of an `n_sites` qubit register
/// (site 0 is most significant).
pub fn op_on_site(op: &CMatrix, site: usize, n_sites: usize) -> CMatrix {
    assert!(site < n_sites);
    let mut out = if site == 0 {
        op.clone()
    } else {
        CMatrix::identity(2)
    };
    for s in 1..n_sites {
        let factor = if s == site {
            op.clone()
        } else {
            CMatrix::identity(2)
        };
        out = out.kron(&factor);
    }
    out
}
