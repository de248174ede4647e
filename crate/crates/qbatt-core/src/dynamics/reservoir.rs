//! Time-dependent decay rate of a qubit coupled to a Lorentzian reservoir.
//!
//! For a spectral density of width `λ` centered at detuning `Δ` from the
//! qubit with effective coupling `γ₀`, the exact single-excitation
//! propagator is
//!
//! ```text
//! C(t) = e^{−(λ−iΔ)t/2} [cosh(dt/2) + ((λ−iΔ)/d) sinh(dt/2)],
//! d    = √((λ−iΔ)² − 2γ₀λ),
//! ```
//!
//! and the decay rate entering the master equation is
//! `f(t) = −2 Re{Ċ(t)/C(t)}`. `C(0) = 1` here; any other normalization
//! cancels in the ratio. The ratio is evaluated through `tanh`, which keeps
//! it finite for arbitrarily large `|d|t` where `cosh`/`sinh` would
//! overflow:
//!
//! ```text
//! Ċ/C = −(γ₀λ/2) · t·τ / (1 + u·t·τ),   u = (λ−iΔ)/2,  τ = tanh(dt/2)/(dt/2).
//! ```
//!
//! The ratio `R = γ₀/λ` separates weak coupling (`R ≪ 1`, `f ≥ 0`,
//! Markovian) from strong coupling (`R ≫ 1`), where `f(t)` takes negative
//! values in some intervals and `C(t)` can develop zeros; evaluation halts
//! with a domain error once `|C(t)|` falls below the representable floor.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::DynamicsError;

/// `ln` of the smallest |C| accepted before evaluation halts (≈ ln 1e-300).
const LOG_ABS_C_FLOOR: f64 = -690.0;

/// Lorentzian reservoir parameters, in units of frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirParams {
    /// Effective coupling constant (sets the relaxation time ≈ 1/γ₀).
    pub gamma0: f64,
    /// Spectral width (sets the reservoir correlation time ≈ 1/λ).
    pub lambda: f64,
    /// Detuning of the spectral peak from the qubit frequency.
    pub delta: f64,
    /// Mean photon number of the reservoir modes (an independent input).
    pub n_photon: f64,
}

impl ReservoirParams {
    pub fn new(gamma0: f64, lambda: f64, delta: f64, n_photon: f64) -> Self {
        assert!(gamma0 > 0.0, "gamma0 must be positive");
        assert!(lambda > 0.0, "lambda must be positive");
        assert!(n_photon >= 0.0, "n_photon must be nonnegative");
        ReservoirParams {
            gamma0,
            lambda,
            delta,
            n_photon,
        }
    }

    /// Markovianity ratio `R = γ₀/λ`; `R ≫ 1` is the strong-coupling,
    /// non-Markovian regime.
    pub fn markovianity(&self) -> f64 {
        self.gamma0 / self.lambda
    }
}

/// `tanh(z)/z`, stable near zero and for large `|Re z|`.
fn tanh_over_z(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r < 1e-4 {
        // tanh(z)/z = 1 − z²/3 + 2z⁴/15 + O(z⁶)
        let z2 = z * z;
        Complex64::ONE - z2 / 3.0 + z2 * z2 * (2.0 / 15.0)
    } else {
        safe_tanh(z) / z
    }
}

/// Complex tanh that stays finite when `cosh(2·Re z)` would overflow.
fn safe_tanh(z: Complex64) -> Complex64 {
    if z.re > 20.0 {
        let w = (-2.0 * z).exp(); // |w| ≤ e^{−40}
        (Complex64::ONE - w) / (Complex64::ONE + w)
    } else if z.re < -20.0 {
        -safe_tanh(-z)
    } else {
        z.tanh()
    }
}

/// `ln|cosh z|` without overflow.
fn ln_abs_cosh(z: Complex64) -> f64 {
    let x = z.re.abs();
    if x > 20.0 {
        // cosh z = e^{|x|}(1 + e^{−2|x|±2iy})/2
        x - core::f64::consts::LN_2
    } else {
        z.cosh().norm().max(1e-300).ln()
    }
}

/// The decay rate `f(t) = −2 Re{Ċ(t)/C(t)}`, from the closed forms of `C`
/// and its analytic derivative.
///
/// Errors when `|C(t)|` has decayed or cancelled below ~1e-300 — in
/// particular near the zeros `C` develops in the strongly non-Markovian
/// regime — since the rate diverges there.
pub fn rate_function_f(p: &ReservoirParams, t: f64) -> Result<f64, DynamicsError> {
    debug_assert!(t >= 0.0, "rate_function_f expects t ≥ 0");
    let u = Complex64::new(p.lambda, -p.delta) * 0.5;
    let d_half = (u * u - p.gamma0 * p.lambda * 0.5).sqrt(); // d/2, principal branch
    let tau = tanh_over_z(d_half * t);
    let denom = Complex64::ONE + u * t * tau;

    // ln|C| = −(λ/2)t + ln|cosh(dt/2)| + ln|1 + u·t·τ|; the last factor
    // carries the zeros of C, so it is also checked on its own scale
    let log_abs_c =
        -0.5 * p.lambda * t + ln_abs_cosh(d_half * t) + denom.norm().max(1e-300).ln();
    if log_abs_c < LOG_ABS_C_FLOOR || denom.norm() < 1e-12 {
        return Err(DynamicsError::ReservoirDomain { t, log_abs_c });
    }

    let ratio = t * tau / denom; // sinh(dt/2) / [ (d/2)cosh(dt/2) + u sinh(dt/2) ]
    Ok(p.gamma0 * p.lambda * ratio.re)
}
