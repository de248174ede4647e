//! Three-qubit Heisenberg XX chain with periodic boundary; the middle qubit
//! is the battery, the outer two act as its environment.
//!
//! In the single-excitation sector spanned by `|001⟩, |010⟩, |100⟩` the
//! interaction
//!
//! ```text
//! V = (J/2) Σₙ (σˣₙσˣₙ₊₁ + σʸₙσʸₙ₊₁) + B Σₙ σᶻₙ,   σ₄ = σ₁,
//! ```
//!
//! evolves an initial `α|001⟩ + β|010⟩ + γ|100⟩` into amplitudes
//!
//! ```text
//! a(t) = [e^{it(J+B)}(2α−β−γ) + K(t)]/3,
//! b(t) = [e^{it(J+B)}(2β−α−γ) + K(t)]/3,
//! c(t) = [e^{it(J+B)}(2γ−α−β) + K(t)]/3,   K(t) = e^{−it(2J−B)}(α+β+γ),
//! ```
//!
//! all in closed form, including the exact time derivatives. The reduced
//! battery state is `diag(1−|b|², |b|²)`, so at T = 0 the charging power is
//! `ℙ = ω₀(ḃb* + bḃ*)` and the geometric bound is saturated identically.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::qmat::{qubit, CMatrix};

use super::ModelError;

/// XX-chain parameters; `alpha/beta_c/gamma_c` are the single-excitation
/// amplitudes of the initial state (the `_c` suffix keeps them apart from
/// the inverse temperature and reservoir coupling elsewhere).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XXChainParams {
    pub omega0: f64,
    /// Exchange interaction constant.
    pub j: f64,
    /// Uniform magnetic field.
    pub b_field: f64,
    pub alpha: Complex64,
    pub beta_c: Complex64,
    pub gamma_c: Complex64,
}

impl XXChainParams {
    pub fn new(
        omega0: f64,
        j: f64,
        b_field: f64,
        alpha: Complex64,
        beta_c: Complex64,
        gamma_c: Complex64,
    ) -> Result<Self, ModelError> {
        let norm_sq = alpha.norm_sqr() + beta_c.norm_sqr() + gamma_c.norm_sqr();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(ModelError::NotNormalized { norm_sq });
        }
        Ok(XXChainParams {
            omega0,
            j,
            b_field,
            alpha,
            beta_c,
            gamma_c,
        })
    }

    /// Battery Hamiltonian `ω₀|1⟩⟨1|` of the middle qubit.
    pub fn battery_hamiltonian(&self) -> CMatrix {
        qubit::battery_hamiltonian(self.omega0)
    }
}

/// Amplitudes and their exact time derivatives.
#[derive(Debug, Clone, Copy)]
pub struct XXAmplitudes {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub da: Complex64,
    pub db: Complex64,
    pub dc: Complex64,
}

impl XXAmplitudes {
    pub fn norm_sq(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr()
    }

    /// Battery excited-state population `|b|²`.
    pub fn population(&self) -> f64 {
        self.b.norm_sqr()
    }

    /// `d|b|²/dt = ḃb* + bḃ*`.
    pub fn population_rate(&self) -> f64 {
        2.0 * (self.db * self.b.conj()).re
    }
}

/// Closed-form single-excitation amplitudes at time `t`.
pub fn xx_amplitudes(p: &XXChainParams, t: f64) -> XXAmplitudes {
    let i = Complex64::new(0.0, 1.0);
    let w_plus = p.j + p.b_field;
    let w_minus = -(2.0 * p.j - p.b_field);
    let e_plus = (i * w_plus * t).exp();
    let e_minus = (i * w_minus * t).exp();

    let s = p.alpha + p.beta_c + p.gamma_c;
    let k = e_minus * s;
    let dk = i * w_minus * k;

    let third = 1.0 / 3.0;
    let coeff_a = 2.0 * p.alpha - p.beta_c - p.gamma_c;
    let coeff_b = 2.0 * p.beta_c - p.alpha - p.gamma_c;
    let coeff_c = 2.0 * p.gamma_c - p.alpha - p.beta_c;

    XXAmplitudes {
        a: (e_plus * coeff_a + k) * third,
        b: (e_plus * coeff_b + k) * third,
        c: (e_plus * coeff_c + k) * third,
        da: (i * w_plus * e_plus * coeff_a + dk) * third,
        db: (i * w_plus * e_plus * coeff_b + dk) * third,
        dc: (i * w_plus * e_plus * coeff_c + dk) * third,
    }
}

/// Reduced battery (middle-qubit) state and its exact time derivative.
pub fn xx_battery_state(p: &XXChainParams, t: f64) -> (CMatrix, CMatrix) {
    let amps = xx_amplitudes(p, t);
    let pop = amps.population();
    let rate = amps.population_rate();
    (
        CMatrix::from_diag(&[1.0 - pop, pop]),
        CMatrix::from_diag(&[-rate, rate]),
    )
}

/// Full three-qubit ket `a|001⟩ + b|010⟩ + c|100⟩` (site 0 most
/// significant).
pub fn xx_full_ket(p: &XXChainParams, t: f64) -> Vec<Complex64> {
    let amps = xx_amplitudes(p, t);
    let mut ket = vec![Complex64::ZERO; 8];
    ket[0b001] = amps.a;
    ket[0b010] = amps.b;
    ket[0b100] = amps.c;
    ket
}

/// The chain interaction `V` as an 8×8 matrix (periodic boundary,
/// `σᶻ` with the excited state as +1 eigenstate).
pub fn xx_interaction(p: &XXChainParams) -> CMatrix {
    let n = 3;
    let mut v = CMatrix::zeros(8);
    for site in 0..n {
        let next = (site + 1) % n;
        let xx = qubit::op_on_site(&qubit::sigma_x(), site, n)
            .matmul(&qubit::op_on_site(&qubit::sigma_x(), next, n));
        let yy = qubit::op_on_site(&qubit::sigma_y(), site, n)
            .matmul(&qubit::op_on_site(&qubit::sigma_y(), next, n));
        v += &(&xx + &yy).scaled_re(0.5 * p.j);
        v += &qubit::op_on_site(&qubit::sigma_z(), site, n).scaled_re(p.b_field);
    }
    v
}

/// Free Hamiltonian `H₀ = (ω₀/2) Σₙ (σᶻₙ + 1)`, ground energy zero.
pub fn xx_free_hamiltonian(p: &XXChainParams) -> CMatrix {
    let n = 3;
    let mut h = CMatrix::zeros(8);
    for site in 0..n {
        h += &qubit::op_on_site(&qubit::number_op(), site, n).scaled_re(p.omega0);
    }
    h
}
