//! Upper bounds on the charging power, evaluated pointwise along a
//! trajectory.
//!
//! Three bounds are computed against `|ℙ| = |Tr(ρ̇𝒜)|`:
//!
//! - geometric: `σ_𝒜 √I_Q` — activity-operator fluctuation times the QFI
//!   speed of the state;
//! - extended: `σ_𝒜 √I_Q^ext` with the extended QFI of the same flow, which
//!   dominates the geometric bound;
//! - thermodynamic: `W_diss + β⁻¹|dS_irr/dt|`, from the eigenbasis split of
//!   the flow — `W_diss = |Tr([ρ, H_eff] H_B)|` is the work rate of the
//!   coherence-moving part and the entropy term collects the population
//!   flow. At T = 0 the entropy term reduces to `|Q̇|`.
//!
//! The thermodynamic form is exact for battery-local Lindblad dynamics; for
//! a battery driven through a charger it is evaluated on the split of the
//! actual reduced flow `ρ̇_B`, which preserves the inequality (the split
//! reproduces the flow identically, so the triangle inequality applies
//! term by term).
//!
//! A fourth, reference bound `2σ_V σ_𝔽` — interaction-Hamiltonian
//! fluctuation on the full system times work-operator fluctuation
//! `𝔽 = H_B + β⁻¹ ln ρ` on the battery — is evaluated for comparison, not
//! re-derived.

use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::qgeom::{self, MotionSplit, QgeomError};
use crate::qmat::{variance, CMatrix, QmatError, SUPPORT_CUTOFF};
use crate::thermo::{self, ThermoContext, ThermoError};

/// `tol_bound = 1e-7·max(1, bound)`: slack below −tol_bound is a violation.
pub const BOUND_TOL_COEFF: f64 = 1e-7;

/// Slack within `1e-3·max(1, bound)` counts as saturation.
pub const SATURATION_COEFF: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum BoundsError {
    Matrix(QmatError),
    Thermo(ThermoError),
    Geometry(QgeomError),
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::Matrix(e) => write!(f, "{e}"),
            BoundsError::Thermo(e) => write!(f, "{e}"),
            BoundsError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for BoundsError {}

impl From<QmatError> for BoundsError {
    fn from(e: QmatError) -> Self {
        BoundsError::Matrix(e)
    }
}

impl From<ThermoError> for BoundsError {
    fn from(e: ThermoError) -> Self {
        BoundsError::Thermo(e)
    }
}

impl From<QgeomError> for BoundsError {
    fn from(e: QgeomError) -> Self {
        BoundsError::Geometry(e)
    }
}

/// Geometric bound `σ_𝒜(ρ) √I_Q(ρ, ρ̇)`.
pub fn bound_geometric(
    rho: &CMatrix,
    rho_dot: &CMatrix,
    ctx: &ThermoContext,
) -> Result<f64, BoundsError> {
    let activity = thermo::activity_operator(rho, ctx)?;
    let sigma = variance(rho, &activity)?.sqrt();
    let iq = qgeom::qfi_sld(rho, rho_dot, SUPPORT_CUTOFF)?;
    Ok(sigma * iq.sqrt())
}

/// Thermodynamic bound from an already-computed split of the flow moving
/// the battery state: `|Tr([ρ, H_eff] H_B)| + |Q̇ − β⁻¹Ṡ|`.
///
/// Returns `(bound, w_diss, rates)`.
pub fn bound_thermodynamic_from_split(
    rho: &CMatrix,
    split: &MotionSplit,
    ctx: &ThermoContext,
) -> Result<(f64, f64, thermo::HeatEntropyRates), BoundsError> {
    let comm = &rho.matmul(&split.h_eff) - &split.h_eff.matmul(rho);
    let w_diss = comm.trace_product(&ctx.h_b).norm();
    let rates = thermo::heat_and_entropy_rates(rho, &split.flow_diag, ctx)?;
    Ok((w_diss + rates.bound_term, w_diss, rates))
}

/// Thermodynamic bound of a battery-local generator
/// `ρ̇ = −i[H_coh_eff, ρ] + D[ρ]`; the dissipator enters through its split
/// and `h_coh_eff` is any coherent Hamiltonian beyond `H_B` (`None` for the
/// plain Lindblad form, where `[ρ, H_B]` contributes nothing to
/// `Tr([ρ,·]H_B)`).
pub fn bound_thermodynamic(
    rho: &CMatrix,
    ds: &qgeom::DissipatorSplit,
    h_coh_eff: Option<&CMatrix>,
    ctx: &ThermoContext,
) -> Result<f64, BoundsError> {
    match h_coh_eff {
        None => {
            let (bound, _, _) = bound_thermodynamic_from_split(rho, &ds.split, ctx)?;
            Ok(bound)
        }
        Some(h) => {
            let minus_i = num_complex::Complex64::new(0.0, -1.0);
            let comm = (&h.matmul(rho) - &rho.matmul(h)).scaled(minus_i);
            let flow = (&comm + &ds.d_full).hermitized();
            let split =
                qgeom::motion_split(rho, &flow, SUPPORT_CUTOFF, qgeom::DEGENERACY_CUTOFF)?;
            let (bound, _, _) = bound_thermodynamic_from_split(rho, &split, ctx)?;
            Ok(bound)
        }
    }
}

/// Reference bound `2 σ_V(ρ_full) σ_𝔽(ρ_B)` with the work operator
/// `𝔽 = H_B + β⁻¹ ln ρ` (just `H_B` at T = 0).
pub fn bound_reference(
    rho_full: &CMatrix,
    v: &CMatrix,
    rho_b: &CMatrix,
    ctx: &ThermoContext,
) -> Result<f64, BoundsError> {
    let sigma_v = variance(rho_full, v)?.sqrt();
    let f_op = work_operator(rho_b, ctx)?;
    let sigma_f = variance(rho_b, &f_op)?.sqrt();
    Ok(2.0 * sigma_v * sigma_f)
}

/// Work operator `𝔽 = H_B + β⁻¹ ln ρ` on the support; `H_B` at T = 0.
pub fn work_operator(rho: &CMatrix, ctx: &ThermoContext) -> Result<CMatrix, BoundsError> {
    match ctx.beta() {
        Some(beta) => {
            let log_rho = crate::qmat::log_on_support(rho, SUPPORT_CUTOFF)?;
            Ok((&ctx.h_b + &log_rho.scaled_re(1.0 / beta)).hermitized())
        }
        None => Ok(ctx.h_b.clone()),
    }
}

/// Power and bounds at one trajectory sample, with slacks. Disabled bounds
/// are NaN and keep NaN slacks.
#[derive(Debug, Clone, Copy)]
pub struct BoundReport {
    pub t: f64,
    pub p_abs: f64,
    pub bound_geo: f64,
    pub bound_ext: f64,
    pub bound_thermo: f64,
    pub bound_ref: f64,
    pub slack_geo: f64,
    pub slack_ext: f64,
    pub slack_thermo: f64,
    pub slack_ref: f64,
}

impl BoundReport {
    pub fn new(
        t: f64,
        p_abs: f64,
        bound_geo: f64,
        bound_ext: f64,
        bound_thermo: f64,
        bound_ref: f64,
    ) -> Self {
        let slack = |b: f64| b - p_abs;
        BoundReport {
            t,
            p_abs,
            bound_geo,
            bound_ext,
            bound_thermo,
            bound_ref,
            slack_geo: slack(bound_geo),
            slack_ext: slack(bound_ext),
            slack_thermo: slack(bound_thermo),
            slack_ref: slack(bound_ref),
        }
    }

    /// `tol_bound` at this sample's scale.
    pub fn tol(bound: f64) -> f64 {
        BOUND_TOL_COEFF * bound.abs().max(1.0)
    }

    /// Saturation: the geometric bound is within `1e-3·scale` of |ℙ|.
    pub fn saturates_geo(&self) -> bool {
        self.slack_geo.is_finite()
            && self.slack_geo <= SATURATION_COEFF * self.bound_geo.abs().max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, GridSpec, Hamiltonian, LindbladChannel};
    use crate::qmat::{qubit, CMatrix};
    use crate::testkit::{assert_close, Rng};
    use crate::thermo::Temperature;

    fn zero_t_ctx(omega0: f64) -> ThermoContext {
        ThermoContext::new(
            qubit::battery_hamiltonian(omega0),
            Temperature::Zero,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn equilibrium_state_gives_zero_bound_and_power() {
        let beta = 1.0;
        let ctx = ThermoContext::new(
            qubit::battery_hamiltonian(1.0),
            Temperature::Finite { beta },
            0.0,
        )
        .unwrap();
        let rho = ctx.tau_beta.clone();
        let zero = CMatrix::zeros(2);
        let b = bound_geometric(&rho, &zero, &ctx).unwrap();
        assert_close(b, 0.0, 1e-10);
        let a = thermo::activity_operator(&rho, &ctx).unwrap();
        assert_close(thermo::power(&zero, &a), 0.0, 1e-12);
    }

    #[test]
    fn diagonal_qubit_at_zero_t_saturates() {
        // bound = ω₀√(p(1−p))·|ṗ|/√(p(1−p)) = ω₀|ṗ| = |ℙ|
        let omega0 = 1.0;
        let ctx = zero_t_ctx(omega0);
        let (p, pd) = (0.3, -0.12);
        let rho = CMatrix::from_diag(&[1.0 - p, p]);
        let rho_dot = CMatrix::from_diag(&[-pd, pd]);
        let b = bound_geometric(&rho, &rho_dot, &ctx).unwrap();
        assert_close(b, omega0 * pd.abs(), 1e-10);
        let a = thermo::activity_operator(&rho, &ctx).unwrap();
        assert_close(thermo::power(&rho_dot, &a).abs(), omega0 * pd.abs(), 1e-12);
    }

    #[test]
    fn geometric_bound_invariant_under_activity_shift() {
        // σ(𝒜 + c·1) = σ(𝒜)
        let mut rng = Rng::new(0x5eed_0040);
        let ctx = ThermoContext::new(
            qubit::battery_hamiltonian(1.0),
            Temperature::Finite { beta: 0.7 },
            0.0,
        )
        .unwrap();
        for _ in 0..10 {
            let rho = rng.density(2, 0.05);
            let a = thermo::activity_operator(&rho, &ctx).unwrap();
            let shifted = &a + &CMatrix::identity(2).scaled_re(rng.uniform(-3.0, 3.0));
            let s0 = variance(&rho, &a).unwrap();
            let s1 = variance(&rho, &shifted).unwrap();
            assert_close(s0, s1, 1e-10 * s0.max(1.0));
        }
    }

    #[test]
    fn unitary_battery_evolution_has_zero_thermo_bound() {
        // ρ̇ = −i[H_B, ρ]: diagonal flow vanishes, Tr([ρ,H_eff]H_B) = 0
        let ctx = ThermoContext::new(
            qubit::battery_hamiltonian(1.0),
            Temperature::Finite { beta: 1.0 },
            0.0,
        )
        .unwrap();
        let mut rng = Rng::new(0x5eed_0041);
        let rho = rng.density(2, 0.05);
        let comm = &ctx.h_b.matmul(&rho) - &rho.matmul(&ctx.h_b);
        let flow = comm
            .scaled(num_complex::Complex64::new(0.0, -1.0))
            .hermitized();
        let split =
            qgeom::motion_split(&rho, &flow, SUPPORT_CUTOFF, qgeom::DEGENERACY_CUTOFF).unwrap();
        let (bound, _, _) = bound_thermodynamic_from_split(&rho, &split, &ctx).unwrap();
        assert_close(bound, 0.0, 1e-9);
        let a = thermo::activity_operator(&rho, &ctx).unwrap();
        assert_close(thermo::power(&flow, &a), 0.0, 1e-10);
    }

    #[test]
    fn thermo_bound_dominates_power_during_relaxation() {
        // detailed-balance relaxation from |1⟩⟨1| toward τ_β
        let omega0 = 1.0;
        let n_photon = 0.4;
        let beta = ((n_photon + 1.0) / n_photon).ln() / omega0;
        let h_b = qubit::battery_hamiltonian(omega0);
        let ctx = ThermoContext::new(h_b.clone(), Temperature::Finite { beta }, n_photon).unwrap();
        let gamma = 0.6;
        let channels = [
            LindbladChannel::constant(qubit::sigma_plus(), n_photon * gamma),
            LindbladChannel::constant(qubit::sigma_minus(), (n_photon + 1.0) * gamma),
        ];
        let rho0 = CMatrix::outer(&qubit::ket_excited());
        let grid = GridSpec::new(1e-2, 6.0, 10).unwrap();
        let run = integrate(&rho0, &Hamiltonian::Static(h_b), &channels, &grid).unwrap();
        for (k, rho) in run.states.iter().enumerate().step_by(10).skip(1) {
            let t = run.times[k];
            let ds = qgeom::split_dissipator(rho, &channels, t, SUPPORT_CUTOFF).unwrap();
            let bound = bound_thermodynamic(rho, &ds, None, &ctx).unwrap();
            let a = thermo::activity_operator(rho, &ctx).unwrap();
            let p = thermo::power(&ds.d_full, &a).abs();
            assert!(
                bound + BoundReport::tol(bound) >= p,
                "thermo bound {bound:.6e} < |P| {p:.6e} at t = {t}"
            );
        }
    }

    #[test]
    fn reference_bound_zero_forces_zero_power() {
        // V commuting with ρ_full and a pure battery eigenstate: both bound
        // and power vanish
        let ctx = zero_t_ctx(1.0);
        let battery = CMatrix::outer(&qubit::ket_ground());
        let charger = CMatrix::outer(&qubit::ket_excited());
        let rho_full = charger.kron(&battery);
        let v = qubit::number_op().kron(&CMatrix::identity(2));
        let b = bound_reference(&rho_full, &v, &battery, &ctx).unwrap();
        assert_close(b, 0.0, 1e-12);
    }

    #[test]
    fn bound_report_slacks() {
        let r = BoundReport::new(1.0, 0.5, 0.7, 0.9, f64::NAN, 1.1);
        assert_close(r.slack_geo, 0.2, 1e-15);
        assert_close(r.slack_ext, 0.4, 1e-15);
        assert!(r.slack_thermo.is_nan());
        assert!(!r.saturates_geo());
        let tight = BoundReport::new(0.0, 0.7, 0.7 + 1e-5, f64::NAN, f64::NAN, f64::NAN);
        assert!(tight.saturates_geo());
    }
}
