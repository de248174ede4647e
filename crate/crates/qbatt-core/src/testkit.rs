//! Deterministic generators and assertion helpers shared by the test suites.
//!
//! A small splitmix64 generator keeps the randomized property checks
//! reproducible across platforms and independent of external RNG crates;
//! frozen oracle values in the tests rely on that stability.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::qmat::{eig_hermitian, CMatrix};

/// splitmix64; passes through the full 2⁶⁴ state space, good enough for
/// sampling test matrices.
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn complex(&mut self, scale: f64) -> Complex64 {
        Complex64::new(
            self.uniform(-scale, scale),
            self.uniform(-scale, scale),
        )
    }

    /// Unstructured complex matrix with entries in the unit box.
    pub fn matrix(&mut self, dim: usize) -> CMatrix {
        CMatrix::from_fn(dim, |_, _| self.complex(1.0))
    }

    /// Random Hermitian matrix `(G + G†)/2`.
    pub fn hermitian(&mut self, dim: usize) -> CMatrix {
        self.matrix(dim).hermitized()
    }

    /// Random density matrix `G G†/Tr`, optionally mixed with the maximally
    /// mixed state so every eigenvalue is at least roughly `floor`.
    pub fn density(&mut self, dim: usize, floor: f64) -> CMatrix {
        let g = self.matrix(dim);
        let raw = g.matmul(&g.dagger());
        let tr = raw.trace().re;
        let mut rho = raw.scaled_re(1.0 / tr);
        if floor > 0.0 {
            let mix = floor * dim as f64;
            rho = &rho.scaled_re(1.0 - mix) + &CMatrix::identity(dim).scaled_re(floor);
        }
        rho.hermitized()
    }

    /// Normalized random ket.
    pub fn ket(&mut self, dim: usize) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = (0..dim).map(|_| self.complex(1.0)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= norm;
        }
        v
    }

    /// Hermitian traceless matrix, usable as a density-matrix flow `ρ̇`.
    pub fn traceless_hermitian(&mut self, dim: usize) -> CMatrix {
        let h = self.hermitian(dim);
        let shift = h.trace().re / dim as f64;
        &h - &CMatrix::identity(dim).scaled_re(shift)
    }
}

#[track_caller]
pub fn assert_close(got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol,
        "assert_close failed: got {got:.17e}, want {want:.17e}, |diff| {:.3e} > tol {tol:.1e}",
        (got - want).abs()
    );
}

#[track_caller]
pub fn assert_rel_close(got: f64, want: f64, rel_tol: f64) {
    let scale = want.abs().max(got.abs()).max(1e-300);
    assert!(
        (got - want).abs() / scale <= rel_tol,
        "assert_rel_close failed: got {got:.17e}, want {want:.17e}, rel {:.3e} > {rel_tol:.1e}",
        (got - want).abs() / scale
    );
}

#[track_caller]
pub fn assert_mat_close(got: &CMatrix, want: &CMatrix, tol: f64) {
    assert_eq!(got.dim(), want.dim(), "matrix dims differ");
    let diff = (got - want).frobenius_norm();
    assert!(
        diff <= tol,
        "assert_mat_close failed: ‖diff‖_F = {diff:.3e} > tol {tol:.1e}\ngot: {got:?}\nwant: {want:?}"
    );
}

/// Smallest eigenvalue of a Hermitian matrix; panics on non-Hermitian input.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    eig_hermitian(m).expect("min_eigenvalue: not Hermitian").values()[0]
}
