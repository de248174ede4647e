//! Time evolution of density matrices under Lindblad generators with
//! time-dependent rates.
//!
//! The master equation integrated here is
//!
//! ```text
//! ρ̇ = −i[H(t), ρ] + Σ_α γ_α(t) (L_α ρ L_α† − ½{L_α†L_α, ρ})
//! ```
//!
//! with classical fixed-step RK4. Rates may go negative (non-Markovian
//! backflow); nothing here assumes a sign. After every step the state is
//! re-Hermitized and its trace renormalized; the raw pre-correction drift is
//! kept as a diagnostic, and positivity is monitored (not projected) at the
//! recorded samples — a violation beyond threshold aborts with the offending
//! time.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::qmat::{check_dims, eig_hermitian, CMatrix, QmatError};

pub mod reservoir;

pub use reservoir::{rate_function_f, ReservoirParams};

/// Raw per-step trace drift allowed before the run aborts.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-8;
/// Raw per-step Hermiticity defect allowed before the run aborts.
pub const HERMITICITY_LIMIT: f64 = 1e-10;
/// Most negative eigenvalue tolerated at a recorded sample.
pub const POSITIVITY_LIMIT: f64 = -1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    Matrix(QmatError),
    /// The reservoir propagator `C(t)` fell below the representable floor
    /// (it has zeros deep in the non-Markovian regime).
    ReservoirDomain { t: f64, log_abs_c: f64 },
    BadGrid { dt: f64, t_max: f64 },
    /// A physicality diagnostic left its envelope during integration.
    DiagnosticBreach {
        t: f64,
        what: &'static str,
        value: f64,
        limit: f64,
    },
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::Matrix(e) => write!(f, "{e}"),
            DynamicsError::ReservoirDomain { t, log_abs_c } => write!(
                f,
                "reservoir propagator C(t) vanished at t = {t:.6}: ln|C| = {log_abs_c:.1} \
                 (C has zeros in the strongly non-Markovian regime; shorten t_max)"
            ),
            DynamicsError::BadGrid { dt, t_max } => {
                write!(f, "invalid grid: dt = {dt}, t_max = {t_max}")
            }
            DynamicsError::DiagnosticBreach {
                t,
                what,
                value,
                limit,
            } => write!(
                f,
                "integration aborted at t = {t:.6}: {what} = {value:.3e} beyond {limit:.1e}"
            ),
        }
    }
}

impl core::error::Error for DynamicsError {}

impl From<QmatError> for DynamicsError {
    fn from(e: QmatError) -> Self {
        DynamicsError::Matrix(e)
    }
}

/// Decay rate of a Lindblad channel; time-dependent rates may fail (the
/// Lorentzian reservoir rate has a restricted domain).
#[derive(Clone)]
pub enum Rate {
    Constant(f64),
    TimeDependent(Arc<dyn Fn(f64) -> Result<f64, DynamicsError> + Send + Sync>),
}

impl Rate {
    pub fn at(&self, t: f64) -> Result<f64, DynamicsError> {
        match self {
            Rate::Constant(g) => Ok(*g),
            Rate::TimeDependent(f) => f(t),
        }
    }
}

impl fmt::Debug for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Constant(g) => write!(f, "Rate::Constant({g})"),
            Rate::TimeDependent(_) => write!(f, "Rate::TimeDependent(..)"),
        }
    }
}

/// A jump operator paired with its (possibly signed, possibly
/// time-dependent) rate.
#[derive(Debug, Clone)]
pub struct LindbladChannel {
    pub jump: CMatrix,
    pub rate: Rate,
}

impl LindbladChannel {
    pub fn constant(jump: CMatrix, gamma: f64) -> Self {
        LindbladChannel {
            jump,
            rate: Rate::Constant(gamma),
        }
    }

    pub fn time_dependent(
        jump: CMatrix,
        rate: impl Fn(f64) -> Result<f64, DynamicsError> + Send + Sync + 'static,
    ) -> Self {
        LindbladChannel {
            jump,
            rate: Rate::TimeDependent(Arc::new(rate)),
        }
    }
}

/// System Hamiltonian, static or supplied as a function of time.
#[derive(Clone)]
pub enum Hamiltonian {
    Static(CMatrix),
    TimeDependent(Arc<dyn Fn(f64) -> CMatrix + Send + Sync>),
}

impl Hamiltonian {
    pub fn at(&self, t: f64) -> CMatrix {
        match self {
            Hamiltonian::Static(h) => h.clone(),
            Hamiltonian::TimeDependent(f) => f(t),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Hamiltonian::Static(h) => h.dim(),
            Hamiltonian::TimeDependent(f) => f(0.0).dim(),
        }
    }
}

impl fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hamiltonian::Static(h) => write!(f, "Hamiltonian::Static(dim={})", h.dim()),
            Hamiltonian::TimeDependent(_) => write!(f, "Hamiltonian::TimeDependent(..)"),
        }
    }
}

/// Dissipator `D[ρ] = Σ_α γ_α(t)(L_α ρ L_α† − ½{L_α†L_α, ρ})`.
pub fn dissipator(
    rho: &CMatrix,
    channels: &[LindbladChannel],
    t: f64,
) -> Result<CMatrix, DynamicsError> {
    let mut d = CMatrix::zeros(rho.dim());
    for ch in channels {
        check_dims(&ch.jump, rho)?;
        let gamma = ch.rate.at(t)?;
        if gamma == 0.0 {
            continue;
        }
        let l = &ch.jump;
        let l_dag = l.dagger();
        let ldl = l_dag.matmul(l);
        let sandwich = l.matmul(rho).matmul(&l_dag);
        let anti = &ldl.matmul(rho) + &rho.matmul(&ldl);
        d += &(&sandwich - &anti.scaled_re(0.5)).scaled_re(gamma);
    }
    Ok(d)
}

/// Full Lindblad right-hand side `−i[H(t), ρ] + D[ρ]`.
pub fn lindblad_rhs(
    rho: &CMatrix,
    h: &CMatrix,
    channels: &[LindbladChannel],
    t: f64,
) -> Result<CMatrix, DynamicsError> {
    check_dims(h, rho)?;
    let comm = &h.matmul(rho) - &rho.matmul(h);
    let mut rhs = comm.scaled(Complex64::new(0.0, -1.0));
    rhs += &dissipator(rho, channels, t)?;
    Ok(rhs)
}

/// Uniform integration grid.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub dt: f64,
    pub t_max: f64,
    /// Analysis samples are taken every this many integrator steps.
    pub record_every: usize,
    /// Most negative eigenvalue tolerated at a checked sample. Defaults to
    /// [`POSITIVITY_LIMIT`]; local non-Markovian generators with negative
    /// rates are not completely positive and need a documented looser floor.
    pub positivity_floor: f64,
}

impl GridSpec {
    pub fn new(dt: f64, t_max: f64, record_every: usize) -> Result<Self, DynamicsError> {
        let grid_ok = dt.is_finite() && dt > 0.0 && t_max.is_finite() && t_max >= dt;
        if !grid_ok || record_every == 0 {
            return Err(DynamicsError::BadGrid { dt, t_max });
        }
        Ok(GridSpec {
            dt,
            t_max,
            record_every,
            positivity_floor: POSITIVITY_LIMIT,
        })
    }

    pub fn with_positivity_floor(mut self, floor: f64) -> Self {
        self.positivity_floor = floor;
        self
    }

    pub fn n_steps(&self) -> usize {
        // round-to-nearest keeps t_max/dt combinations like 20/1e-3 exact
        (self.t_max / self.dt + 0.5) as usize
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }
}

/// States at every integrator step plus raw physicality diagnostics.
#[derive(Debug, Clone)]
pub struct Integration {
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
    /// `|Tr ρ − 1|` of the raw RK4 update, before renormalization.
    pub raw_trace_drift: Vec<f64>,
    /// `‖ρ − ρ†‖_F` of the raw RK4 update, before re-Hermitization.
    pub raw_herm_defect: Vec<f64>,
    /// Smallest eigenvalue seen at the checked samples.
    pub min_eigenvalue: f64,
}

/// Integrate the Lindblad equation over a uniform grid with classical RK4.
///
/// Positivity is checked at every `record_every`-th step (and the last);
/// trace and Hermiticity drift are checked every step. Any breach aborts
/// with the offending time and diagnostic. Accuracy advisory: keep
/// `dt·max(‖H‖, |γ_α|‖L_α‖²) ≲ 0.1`.
pub fn integrate(
    rho0: &CMatrix,
    h: &Hamiltonian,
    channels: &[LindbladChannel],
    grid: &GridSpec,
) -> Result<Integration, DynamicsError> {
    let n_steps = grid.n_steps();
    let dt = grid.dt;
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut raw_trace_drift = Vec::with_capacity(n_steps + 1);
    let mut raw_herm_defect = Vec::with_capacity(n_steps + 1);
    let mut min_eig = f64::INFINITY;

    let static_h = match h {
        Hamiltonian::Static(m) => Some(m),
        Hamiltonian::TimeDependent(_) => None,
    };
    let h_at = |t: f64| -> CMatrix { h.at(t) };

    let mut rho = rho0.hermitized();
    let tr0 = rho.trace().re;
    rho = rho.scaled_re(1.0 / tr0);

    states.push(rho.clone());
    times.push(0.0);
    raw_trace_drift.push((tr0 - 1.0).abs());
    raw_herm_defect.push(rho0.hermiticity_defect());

    for step in 0..n_steps {
        let t = grid.time(step);
        let (h0, h1);
        let (hk, hk2): (&CMatrix, &CMatrix) = match static_h {
            Some(m) => (m, m),
            None => {
                h0 = h_at(t);
                h1 = h_at(t + 0.5 * dt);
                (&h0, &h1)
            }
        };
        let h_end;
        let hk4: &CMatrix = match static_h {
            Some(m) => m,
            None => {
                h_end = h_at(t + dt);
                &h_end
            }
        };

        let k1 = lindblad_rhs(&rho, hk, channels, t)?;
        let k2 = lindblad_rhs(
            &(&rho + &k1.scaled_re(0.5 * dt)),
            hk2,
            channels,
            t + 0.5 * dt,
        )?;
        let k3 = lindblad_rhs(
            &(&rho + &k2.scaled_re(0.5 * dt)),
            hk2,
            channels,
            t + 0.5 * dt,
        )?;
        let k4 = lindblad_rhs(&(&rho + &k3.scaled_re(dt)), hk4, channels, t + dt)?;

        let mut increment = k1;
        increment += &k2.scaled_re(2.0);
        increment += &k3.scaled_re(2.0);
        increment += &k4;
        let raw = &rho + &increment.scaled_re(dt / 6.0);

        let t_next = grid.time(step + 1);
        let drift = (raw.trace().re - 1.0).abs();
        let herm = raw.hermiticity_defect();
        if drift > TRACE_DRIFT_LIMIT {
            return Err(DynamicsError::DiagnosticBreach {
                t: t_next,
                what: "trace drift",
                value: drift,
                limit: TRACE_DRIFT_LIMIT,
            });
        }
        if herm > HERMITICITY_LIMIT {
            return Err(DynamicsError::DiagnosticBreach {
                t: t_next,
                what: "hermiticity defect",
                value: herm,
                limit: HERMITICITY_LIMIT,
            });
        }

        rho = raw.hermitized();
        let tr = rho.trace().re;
        rho = rho.scaled_re(1.0 / tr);

        let at_checkpoint = (step + 1) % grid.record_every == 0 || step + 1 == n_steps;
        if at_checkpoint {
            let lowest = eig_hermitian(&rho)?.values()[0];
            min_eig = min_eig.min(lowest);
            if lowest < grid.positivity_floor {
                return Err(DynamicsError::DiagnosticBreach {
                    t: t_next,
                    what: "min eigenvalue",
                    value: lowest,
                    limit: grid.positivity_floor,
                });
            }
        }

        states.push(rho.clone());
        times.push(t_next);
        raw_trace_drift.push(drift);
        raw_herm_defect.push(herm);
    }

    Ok(Integration {
        times,
        states,
        raw_trace_drift,
        raw_herm_defect,
        min_eigenvalue: min_eig,
    })
}
