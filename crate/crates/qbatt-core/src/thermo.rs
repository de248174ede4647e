//! Thermodynamics of the battery: Gibbs state, non-equilibrium free energy,
//! the activity operator, maximum extractable work, charging power, and
//! heat/entropy rates.
//!
//! The central object is the activity operator
//! `𝒜 = β⁻¹(ln ρ − ln τ_β)`, whose expectation in the state `ρ` equals the
//! maximum extractable work `W_max = F(ρ) − F(τ_β)`; it vanishes exactly at
//! thermal equilibrium. The charging power is `ℙ = Tr(ρ̇ 𝒜) = dW_max/dt`.
//!
//! At zero temperature the `β⁻¹ ln ρ` term drops out and the limits used
//! here are `𝒜 = H_B − E₀·1` and `W_max = Tr(ρ H_B) − E₀`, which reproduce
//! the closed-form power of the XX-chain battery exactly.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::qmat::{
    self, check_dims, eig_hermitian, hermitian_fn, log_on_support, CMatrix, QmatError,
    SUPPORT_CUTOFF,
};

/// Bath temperature: finite inverse temperature or the T = 0 limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Finite { beta: f64 },
    Zero,
}

impl Temperature {
    pub fn beta(&self) -> Option<f64> {
        match self {
            Temperature::Finite { beta } => Some(*beta),
            Temperature::Zero => None,
        }
    }

    pub fn is_zero_t(&self) -> bool {
        matches!(self, Temperature::Zero)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ThermoError {
    /// Operation needs a finite β; the caller should take the T = 0 path.
    ZeroTemperature,
    /// β must be positive and finite.
    BadBeta { beta: f64 },
    /// Mean photon number must be nonnegative and finite.
    BadPhotonNumber { n: f64 },
    /// Finite-difference power needs at least three grid samples.
    TooFewSamples { n: usize },
    Matrix(QmatError),
}

impl fmt::Display for ThermoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThermoError::ZeroTemperature => {
                write!(f, "operation requires finite β; use the T = 0 path")
            }
            ThermoError::BadBeta { beta } => {
                write!(f, "inverse temperature must be positive and finite, got {beta}")
            }
            ThermoError::BadPhotonNumber { n } => {
                write!(f, "mean photon number must be nonnegative and finite, got {n}")
            }
            ThermoError::TooFewSamples { n } => {
                write!(f, "finite-difference power needs at least 3 samples, got {n}")
            }
            ThermoError::Matrix(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ThermoError {}

impl From<QmatError> for ThermoError {
    fn from(e: QmatError) -> Self {
        ThermoError::Matrix(e)
    }
}

/// Immutable thermodynamic context for a battery Hamiltonian at a fixed
/// temperature.
#[derive(Debug, Clone)]
pub struct ThermoContext {
    pub temperature: Temperature,
    /// Battery Hamiltonian (time independent).
    pub h_b: CMatrix,
    /// Thermal state `τ_β = e^{−βH_B}/Z`; the ground-state projector at T = 0.
    pub tau_beta: CMatrix,
    /// Equilibrium free energy `F(τ_β) = −β⁻¹ ln Z` (ground energy at T = 0).
    pub f_eq: f64,
    /// Ground-state energy of `H_B`.
    pub e_ground: f64,
    /// Mean reservoir photon number; an independent input, not derived from
    /// the temperature.
    pub n_photon: f64,
    /// `ln τ_β` cached for the activity operator (finite β only).
    log_tau: Option<CMatrix>,
}

impl ThermoContext {
    pub fn new(
        h_b: CMatrix,
        temperature: Temperature,
        n_photon: f64,
    ) -> Result<Self, ThermoError> {
        if !n_photon.is_finite() || n_photon < 0.0 {
            return Err(ThermoError::BadPhotonNumber { n: n_photon });
        }
        let es = eig_hermitian(&h_b)?;
        let e_ground = es.values()[0];
        match temperature {
            Temperature::Finite { beta } => {
                if !beta.is_finite() || beta <= 0.0 {
                    return Err(ThermoError::BadBeta { beta });
                }
                // shift by the ground energy before exponentiating
                let weights: Vec<f64> = es
                    .values()
                    .iter()
                    .map(|&e| (-beta * (e - e_ground)).exp())
                    .collect();
                let z: f64 = weights.iter().sum();
                let probs: Vec<f64> = weights.iter().map(|w| w / z).collect();
                let tau = es.from_eigenbasis(&CMatrix::from_diag(&probs)).hermitized();
                let f_eq = e_ground - z.ln() / beta;
                let log_tau = hermitian_fn(&tau, |p| p.ln())?;
                Ok(ThermoContext {
                    temperature,
                    h_b,
                    tau_beta: tau,
                    f_eq,
                    e_ground,
                    n_photon,
                    log_tau: Some(log_tau),
                })
            }
            Temperature::Zero => {
                let dim = h_b.dim();
                if dim > 1 {
                    let gap = es.values()[1] - e_ground;
                    let scale = es.values()[dim - 1].abs().max(1.0);
                    if gap <= 1e-12 * scale {
                        return Err(ThermoError::Matrix(QmatError::DegenerateGround { gap }));
                    }
                }
                let ground = es.vector(0);
                Ok(ThermoContext {
                    temperature,
                    h_b,
                    tau_beta: CMatrix::outer(&ground),
                    f_eq: e_ground,
                    e_ground,
                    n_photon,
                    log_tau: None,
                })
            }
        }
    }

    pub fn beta(&self) -> Option<f64> {
        self.temperature.beta()
    }
}

/// Non-equilibrium free energy `F(ρ) = Tr(ρH_B) − β⁻¹S(ρ)`.
///
/// Errors at T = 0, where the free energy degenerates to the plain energy;
/// callers take `Tr(ρH_B)` directly on that path.
pub fn free_energy(rho: &CMatrix, ctx: &ThermoContext) -> Result<f64, ThermoError> {
    let beta = ctx.beta().ok_or(ThermoError::ZeroTemperature)?;
    check_dims(rho, &ctx.h_b)?;
    let u = rho.trace_product(&ctx.h_b).re;
    let s = qmat::entropy(rho, SUPPORT_CUTOFF)?;
    Ok(u - s / beta)
}

/// Activity operator `𝒜 = β⁻¹(ln ρ − ln τ_β)` on the support of ρ;
/// `H_B − E₀·1` at T = 0.
pub fn activity_operator(rho: &CMatrix, ctx: &ThermoContext) -> Result<CMatrix, ThermoError> {
    check_dims(rho, &ctx.h_b)?;
    match ctx.temperature {
        Temperature::Finite { beta } => {
            let log_rho = log_on_support(rho, SUPPORT_CUTOFF)?;
            let log_tau = ctx.log_tau.as_ref().expect("finite-β context caches ln τ");
            Ok((&log_rho - log_tau).scaled_re(1.0 / beta).hermitized())
        }
        Temperature::Zero => {
            let dim = ctx.h_b.dim();
            Ok(&ctx.h_b - &CMatrix::identity(dim).scaled_re(ctx.e_ground))
        }
    }
}

/// Maximum extractable work `W_max = F(ρ) − F(τ_β) = Tr(ρ𝒜)`, computed as
/// `β⁻¹ D(ρ‖τ_β)` at finite β and `Tr(ρH_B) − E₀` at T = 0. Nonnegative up
/// to rounding.
pub fn max_work(rho: &CMatrix, ctx: &ThermoContext) -> Result<f64, ThermoError> {
    check_dims(rho, &ctx.h_b)?;
    match ctx.temperature {
        Temperature::Finite { beta } => {
            let tr_rho_ln_rho = -qmat::entropy(rho, SUPPORT_CUTOFF)?;
            let log_tau = ctx.log_tau.as_ref().expect("finite-β context caches ln τ");
            let tr_rho_ln_tau = rho.trace_product(log_tau).re;
            Ok((tr_rho_ln_rho - tr_rho_ln_tau) / beta)
        }
        Temperature::Zero => Ok(rho.trace_product(&ctx.h_b).re - ctx.e_ground),
    }
}

/// Instantaneous charging power `ℙ = Tr(ρ̇ 𝒜)`.
pub fn power(rho_dot: &CMatrix, activity: &CMatrix) -> f64 {
    rho_dot.trace_product(activity).re
}

/// How `ρ̇` is obtained for a power series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeScheme {
    /// Generator evaluations supplied alongside the states.
    Generator,
    /// Second-order finite differences on the stored state grid (central in
    /// the interior, one-sided 3-point at the ends).
    CentralDiff,
}

/// Charging power along a uniformly sampled trajectory.
///
/// With [`DerivativeScheme::Generator`], `rho_dots` must hold one generator
/// evaluation per state; with [`DerivativeScheme::CentralDiff`] the
/// derivative is taken numerically from the states themselves (at least
/// three samples required).
pub fn charging_power_series(
    states: &[CMatrix],
    rho_dots: Option<&[CMatrix]>,
    ctx: &ThermoContext,
    scheme: DerivativeScheme,
    dt: f64,
) -> Result<Vec<f64>, ThermoError> {
    let n = states.len();
    let mut out = Vec::with_capacity(n);
    match scheme {
        DerivativeScheme::Generator => {
            let dots = rho_dots.expect("Generator scheme requires rho_dots");
            assert_eq!(dots.len(), n, "one generator evaluation per state");
            for (rho, dot) in states.iter().zip(dots) {
                let a = activity_operator(rho, ctx)?;
                out.push(power(dot, &a));
            }
        }
        DerivativeScheme::CentralDiff => {
            if n < 3 {
                return Err(ThermoError::TooFewSamples { n });
            }
            for k in 0..n {
                let dot = fd_derivative(states, k, dt);
                let a = activity_operator(&states[k], ctx)?;
                out.push(power(&dot, &a));
            }
        }
    }
    Ok(out)
}

/// Second-order finite difference of a matrix series at index `k`.
pub fn fd_derivative(states: &[CMatrix], k: usize, dt: f64) -> CMatrix {
    let n = states.len();
    if k == 0 {
        // (−3f₀ + 4f₁ − f₂)/(2dt)
        (&(&states[1].scaled_re(4.0) - &states[0].scaled_re(3.0)) - &states[2])
            .scaled_re(1.0 / (2.0 * dt))
    } else if k == n - 1 {
        (&(&states[n - 1].scaled_re(3.0) - &states[n - 2].scaled_re(4.0)) + &states[n - 3])
            .scaled_re(1.0 / (2.0 * dt))
    } else {
        (&states[k + 1] - &states[k - 1]).scaled_re(1.0 / (2.0 * dt))
    }
}

/// Heat and entropy rates of the population (diagonal) part of the motion.
#[derive(Debug, Clone, Copy)]
pub struct HeatEntropyRates {
    /// `Q̇ = Tr(D_d[ρ] H_B)`.
    pub q_dot: f64,
    /// `Ṡ = −Σ Ṗₙ ln Pₙ` over the support (zero at T = 0, where the entropy
    /// term is dropped).
    pub s_dot: f64,
    /// Irreversible entropy production rate `β|Q̇ − β⁻¹Ṡ|`; NaN at T = 0.
    pub s_irr_rate: f64,
    /// The power-units term entering the thermodynamic bound:
    /// `|Q̇ − β⁻¹Ṡ|` at finite β, `|Q̇|` at T = 0.
    pub bound_term: f64,
}

/// Rates from the diagonal dissipator part `D_d[ρ]` (in ρ's eigenbasis,
/// `Ṗₙ = ⟨n|D_d|n⟩`).
pub fn heat_and_entropy_rates(
    rho: &CMatrix,
    d_diag: &CMatrix,
    ctx: &ThermoContext,
) -> Result<HeatEntropyRates, ThermoError> {
    check_dims(rho, d_diag)?;
    let es = eig_hermitian(rho)?;
    let pops = es.values();
    let q_dot = d_diag.trace_product(&ctx.h_b).re;
    match ctx.temperature {
        Temperature::Finite { beta } => {
            let mut s_dot = 0.0;
            for (n, &p) in pops.iter().enumerate() {
                if p > SUPPORT_CUTOFF {
                    let p_dot = es.sandwich(d_diag, n, n).re;
                    s_dot -= p_dot * p.ln();
                }
            }
            let bound_term = (q_dot - s_dot / beta).abs();
            Ok(HeatEntropyRates {
                q_dot,
                s_dot,
                s_irr_rate: beta * bound_term,
                bound_term,
            })
        }
        Temperature::Zero => Ok(HeatEntropyRates {
            q_dot,
            s_dot: 0.0,
            s_irr_rate: f64::NAN,
            bound_term: q_dot.abs(),
        }),
    }
}
