//! Per-trajectory analysis pipeline: evolve a [`Job`](crate::models::presets::Job),
//! reduce to the battery, and fill the derived series — work, power, the
//! three power bounds, speeds, rates, and physicality diagnostics — at every
//! recorded sample.
//!
//! Finite-difference quantities (the spectral QFI) always use the true
//! integrator step, independent of `record_every`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bounds::{self, BoundsError};
use crate::dynamics::{
    self, integrate, rate_function_f, DynamicsError, Hamiltonian,
};
use crate::models::charger_battery::build_charger_battery;
use crate::models::presets::{Job, SystemSpec};
use crate::models::xx_chain::{self, XXChainParams};
use crate::models::ModelError;
use crate::qgeom::{self, QgeomError};
use crate::qmat::{self, partial_trace, variance, CMatrix, QmatError, Subsystem, SUPPORT_CUTOFF};
use crate::thermo::{self, Temperature, ThermoContext, ThermoError};

/// Sample flags (bitmask in the `flags` column).
pub mod flags {
    /// Eigenvalue crossing defeated the spectral-QFI overlap matching.
    pub const SPECTRAL_CROSSING: u32 = 1;
    /// The flow split dropped lossy matrix elements at degenerate
    /// populations.
    pub const DEGENERATE_DROP: u32 = 2;
    /// Battery state near-pure at finite β inside the stencil;
    /// finite-difference identities are excluded here.
    pub const NEAR_PURE: u32 = 4;
    /// Raw `W_max` was a rounding-level negative and was clamped to 0.
    pub const W_CLAMPED: u32 = 8;
    /// T = 0: the thermodynamic bound omits the entropy term.
    pub const ZERO_T_THERMO: u32 = 16;
}

/// Battery eigenvalues below this mark a sample near-pure for
/// finite-difference purposes.
pub const NEAR_PURE_EIG: f64 = 1e-6;

/// The spectral-vs-SLD QFI gap diagnostic only accumulates where the
/// battery populations stay above this (the `(∂λ)²/λ` term is
/// ill-conditioned under finite differences at the support edge).
pub const SPECTRAL_WINDOW_EIG: f64 = 1e-4;

/// ... and where the eigenvectors rotate by no more than this per stencil
/// step, so the central difference actually resolves the motion.
pub const SPECTRAL_ROTATION_LIMIT: f64 = 0.02;

/// ... and where the eigenvalue curvature stays resolved,
/// `|λ̈|·h ≤ this · |λ̇|` (avoided crossings bend the eigenvalue
/// trajectories faster than a three-point stencil can follow).
pub const SPECTRAL_CURVATURE_LIMIT: f64 = 0.05;

#[derive(Debug)]
pub enum PipelineError {
    Model(ModelError),
    Dynamics(DynamicsError),
    Thermo(ThermoError),
    Geometry(QgeomError),
    Bounds(BoundsError),
    Matrix(QmatError),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Model(e) => write!(f, "{e}"),
            PipelineError::Dynamics(e) => write!(f, "{e}"),
            PipelineError::Thermo(e) => write!(f, "{e}"),
            PipelineError::Geometry(e) => write!(f, "{e}"),
            PipelineError::Bounds(e) => write!(f, "{e}"),
            PipelineError::Matrix(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PipelineError {}

impl From<ModelError> for PipelineError {
    fn from(e: ModelError) -> Self {
        PipelineError::Model(e)
    }
}
impl From<DynamicsError> for PipelineError {
    fn from(e: DynamicsError) -> Self {
        PipelineError::Dynamics(e)
    }
}
impl From<ThermoError> for PipelineError {
    fn from(e: ThermoError) -> Self {
        PipelineError::Thermo(e)
    }
}
impl From<QgeomError> for PipelineError {
    fn from(e: QgeomError) -> Self {
        PipelineError::Geometry(e)
    }
}
impl From<BoundsError> for PipelineError {
    fn from(e: BoundsError) -> Self {
        PipelineError::Bounds(e)
    }
}
impl From<QmatError> for PipelineError {
    fn from(e: QmatError) -> Self {
        PipelineError::Matrix(e)
    }
}

/// One recorded sample; fields mirror the CSV columns.
#[derive(Debug, Clone, Copy)]
pub struct SampleRow {
    pub t: f64,
    pub w_max: f64,
    pub dw: f64,
    pub p: f64,
    pub sigma_a: f64,
    pub sqrt_iq: f64,
    pub bound_geo: f64,
    pub sqrt_iq_ext: f64,
    pub bound_ext: f64,
    pub w_diss: f64,
    pub s_irr_rate: f64,
    pub bound_thermo: f64,
    pub bound_ref: f64,
    pub f_t: f64,
    pub trace_err: f64,
    pub min_eig: f64,
    pub flags: u32,
}

/// Whole-trajectory diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryDiagnostics {
    pub max_raw_trace_drift: f64,
    pub max_raw_herm_defect: f64,
    pub min_eigenvalue: f64,
    pub dropped_pairs_total: usize,
    pub flagged_samples: usize,
    /// Worst relative gap `|spectral − SLD|/max(1, I_Q)` over unflagged,
    /// well-conditioned interior samples (NaN when the spectral analysis is
    /// off or no sample qualified).
    pub max_spectral_gap: f64,
    /// Most negative raw `W_max` seen before clamping.
    pub raw_w_min: f64,
}

/// A fully analyzed trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub label: String,
    /// Recorded sample times.
    pub times: Vec<f64>,
    /// Full-system states at the recorded samples.
    pub states: Vec<CMatrix>,
    /// Battery-reduced states at the recorded samples.
    pub reduced: Vec<CMatrix>,
    pub rows: Vec<SampleRow>,
    pub diag: TrajectoryDiagnostics,
}

/// Run one job end to end.
pub fn run_job(job: &Job) -> Result<Trajectory, PipelineError> {
    match &job.system {
        SystemSpec::XxChain(p) => run_xx(job, p),
        SystemSpec::ChargerBattery(p) => run_charger_battery(job, p),
    }
}

struct SampleInput<'a> {
    idx: usize,
    t: f64,
    rho_full: &'a CMatrix,
    rho_b: &'a CMatrix,
    /// Full reduced flow ρ̇_B (generator evaluation).
    flow: &'a CMatrix,
    /// Stencil neighbors at the true integrator step, where available.
    stencil: Option<(&'a CMatrix, &'a CMatrix)>,
    f_t: f64,
    trace_err: f64,
}

struct Analyzer<'a> {
    job: &'a Job,
    ctx: ThermoContext,
    v_op: Option<CMatrix>,
    /// Battery Hamiltonian embedded in the full space (model-specific
    /// factor ordering).
    h_b_full: CMatrix,
    dt: f64,
    w0: f64,
    diag: TrajectoryDiagnostics,
}

impl<'a> Analyzer<'a> {
    fn new(job: &'a Job, ctx: ThermoContext, v_op: Option<CMatrix>, h_b_full: CMatrix) -> Self {
        Analyzer {
            job,
            ctx,
            v_op,
            h_b_full,
            dt: job.grid.dt,
            w0: 0.0,
            diag: TrajectoryDiagnostics {
                max_raw_trace_drift: 0.0,
                max_raw_herm_defect: 0.0,
                min_eigenvalue: f64::INFINITY,
                dropped_pairs_total: 0,
                flagged_samples: 0,
                max_spectral_gap: f64::NAN,
                raw_w_min: f64::INFINITY,
            },
        }
    }

    fn sample(&mut self, input: SampleInput<'_>) -> Result<SampleRow, PipelineError> {
        let toggles = &self.job.toggles;
        let mut flag_bits = 0u32;

        // physicality of the full state
        let full_eigs = qmat::eig_hermitian(input.rho_full)?;
        let min_eig = full_eigs.values()[0];
        self.diag.min_eigenvalue = self.diag.min_eigenvalue.min(min_eig);

        // work and power
        let raw_w = thermo::max_work(input.rho_b, &self.ctx)?;
        self.diag.raw_w_min = self.diag.raw_w_min.min(raw_w);
        let w_max = if (-1e-10..0.0).contains(&raw_w) {
            flag_bits |= flags::W_CLAMPED;
            0.0
        } else {
            raw_w
        };
        if input.idx == 0 {
            self.w0 = w_max;
        }
        let dw = w_max - self.w0;

        let activity = thermo::activity_operator(input.rho_b, &self.ctx)?;
        let sigma_a = variance(input.rho_b, &activity)?.sqrt();
        let p_val = thermo::power(input.flow, &activity);

        // near-pure stencil at finite β: finite-difference identities do not
        // apply (support-restricted logs have singular derivatives there)
        if !self.ctx.temperature.is_zero_t() {
            let mut near_pure = qmat::eig_hermitian(input.rho_b)?.values()[0] < NEAR_PURE_EIG;
            if let Some((rm, rp)) = input.stencil {
                near_pure = near_pure
                    || qmat::eig_hermitian(rm)?.values()[0] < NEAR_PURE_EIG
                    || qmat::eig_hermitian(rp)?.values()[0] < NEAR_PURE_EIG;
            }
            if near_pure {
                flag_bits |= flags::NEAR_PURE;
            }
        }

        // speeds and the geometric/extended bounds
        let (sqrt_iq, bound_geo, sqrt_iq_ext, bound_ext) = if toggles.ext {
            let report = qgeom::qfi_extended_from_flow(input.rho_b, input.flow)?;
            (
                report.i_q.sqrt(),
                sigma_a * report.i_q.sqrt(),
                report.i_q_ext.sqrt(),
                sigma_a * report.i_q_ext.sqrt(),
            )
        } else if toggles.geo {
            let iq = qgeom::qfi_sld(input.rho_b, input.flow, SUPPORT_CUTOFF)?;
            (iq.sqrt(), sigma_a * iq.sqrt(), f64::NAN, f64::NAN)
        } else {
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        };

        // thermodynamic bound from the split of the actual reduced flow
        let (w_diss, s_irr_rate, bound_thermo) = if toggles.thermo_bound {
            let split = qgeom::motion_split(
                input.rho_b,
                input.flow,
                SUPPORT_CUTOFF,
                qgeom::DEGENERACY_CUTOFF,
            )?;
            if split.dropped_pairs > 0 {
                flag_bits |= flags::DEGENERATE_DROP;
                self.diag.dropped_pairs_total += split.dropped_pairs;
            }
            let (bound, w_diss, rates) =
                bounds::bound_thermodynamic_from_split(input.rho_b, &split, &self.ctx)?;
            if self.ctx.temperature.is_zero_t() {
                flag_bits |= flags::ZERO_T_THERMO;
            }
            (w_diss, rates.s_irr_rate, bound)
        } else {
            (f64::NAN, f64::NAN, f64::NAN)
        };

        // reference bound 2σ_V σ_𝔽
        let bound_ref = if toggles.ref_bound {
            let v = self.v_op.as_ref().expect("ref bound requires V");
            if self.job.ref_f_on_battery {
                bounds::bound_reference(input.rho_full, v, input.rho_b, &self.ctx)?
            } else {
                let sigma_v = variance(input.rho_full, v)?.sqrt();
                let log_rho = qmat::log_on_support(input.rho_full, SUPPORT_CUTOFF)?;
                let f_op = match self.ctx.beta() {
                    Some(beta) => {
                        (&self.h_b_full + &log_rho.scaled_re(1.0 / beta)).hermitized()
                    }
                    None => self.h_b_full.clone(),
                };
                2.0 * sigma_v * variance(input.rho_full, &f_op)?.sqrt()
            }
        } else {
            f64::NAN
        };

        // spectral QFI cross-check at the true step; the comparison only
        // means something away from the support edge, where the
        // finite-difference eigenvalue terms are conditioned
        if toggles.spectral_qfi && sqrt_iq.is_finite() {
            if let Some((rm, rp)) = input.stencil {
                let spec = qgeom::qfi_spectral_stencil(
                    rm,
                    input.rho_b,
                    rp,
                    self.dt,
                    SUPPORT_CUTOFF,
                )?;
                if spec.flagged {
                    flag_bits |= flags::SPECTRAL_CROSSING;
                } else if flag_bits & flags::NEAR_PURE == 0
                    && spec.rotation_angle <= SPECTRAL_ROTATION_LIMIT
                    && spec.curvature_ratio <= SPECTRAL_CURVATURE_LIMIT
                    && qmat::eig_hermitian(input.rho_b)?.values()[0] >= SPECTRAL_WINDOW_EIG
                {
                    let iq = sqrt_iq * sqrt_iq;
                    let gap = (spec.value - iq).abs() / iq.max(1.0);
                    if !self.diag.max_spectral_gap.is_finite()
                        || gap > self.diag.max_spectral_gap
                    {
                        self.diag.max_spectral_gap = gap;
                    }
                }
            }
        }

        // annotation-only bits (T = 0 entropy omission, rounding clamps) do
        // not count a sample as anomalous
        if flag_bits & (flags::SPECTRAL_CROSSING | flags::DEGENERATE_DROP | flags::NEAR_PURE)
            != 0
        {
            self.diag.flagged_samples += 1;
        }

        Ok(SampleRow {
            t: input.t,
            w_max,
            dw,
            p: p_val,
            sigma_a,
            sqrt_iq,
            bound_geo,
            sqrt_iq_ext,
            bound_ext,
            w_diss,
            s_irr_rate,
            bound_thermo,
            bound_ref,
            f_t: input.f_t,
            trace_err: input.trace_err,
            min_eig,
            flags: flag_bits,
        })
    }
}

fn run_xx(job: &Job, p: &XXChainParams) -> Result<Trajectory, PipelineError> {
    let ctx = ThermoContext::new(p.battery_hamiltonian(), Temperature::Zero, 0.0)?;
    let v_op = job.toggles.ref_bound.then(|| xx_chain::xx_interaction(p));
    // the battery is the middle qubit of the chain
    let h_b_full = qmat::qubit::op_on_site(&qmat::qubit::number_op(), 1, 3).scaled_re(p.omega0);
    let mut analyzer = Analyzer::new(job, ctx, v_op, h_b_full);

    let n_steps = job.grid.n_steps();
    let dt = job.grid.dt;
    let mut recorded: Vec<usize> = (0..=n_steps).step_by(job.grid.record_every).collect();
    if *recorded.last().unwrap() != n_steps {
        recorded.push(n_steps);
    }

    let mut times = Vec::with_capacity(recorded.len());
    let mut states = Vec::with_capacity(recorded.len());
    let mut reduced = Vec::with_capacity(recorded.len());
    let mut rows = Vec::with_capacity(recorded.len());

    for (sample_idx, &step) in recorded.iter().enumerate() {
        let t = job.grid.time(step);
        let rho_full = CMatrix::outer(&xx_chain::xx_full_ket(p, t));
        let (rho_b, flow) = xx_chain::xx_battery_state(p, t);
        let stencil_states = (step > 0 && step < n_steps).then(|| {
            let (rm, _) = xx_chain::xx_battery_state(p, t - dt);
            let (rp, _) = xx_chain::xx_battery_state(p, t + dt);
            (rm, rp)
        });
        let row = analyzer.sample(SampleInput {
            idx: sample_idx,
            t,
            rho_full: &rho_full,
            rho_b: &rho_b,
            flow: &flow,
            stencil: stencil_states.as_ref().map(|(a, b)| (a, b)),
            f_t: f64::NAN,
            trace_err: 0.0,
        })?;
        times.push(t);
        states.push(rho_full);
        reduced.push(rho_b);
        rows.push(row);
    }

    let diag = analyzer.diag;
    Ok(Trajectory {
        label: job.label.clone(),
        times,
        states,
        reduced,
        rows,
        diag,
    })
}

fn run_charger_battery(
    job: &Job,
    p: &crate::models::charger_battery::ChargerBatteryParams,
) -> Result<Trajectory, PipelineError> {
    let model = build_charger_battery(p)?;
    let ctx = ThermoContext::new(model.h_b.clone(), p.temperature, p.reservoir.n_photon)?;
    let v_op = job.toggles.ref_bound.then(|| match &model.hamiltonian {
        Hamiltonian::Static(h) => h.clone(),
        Hamiltonian::TimeDependent(f) => f(0.0),
    });
    let h_b_full = CMatrix::identity(2).kron(&model.h_b);
    let mut analyzer = Analyzer::new(job, ctx, v_op, h_b_full);

    let run = integrate(&model.rho0, &model.hamiltonian, &model.channels, &job.grid)?;
    let n_steps = run.states.len() - 1;
    let mut recorded: Vec<usize> = (0..=n_steps).step_by(job.grid.record_every).collect();
    if *recorded.last().unwrap() != n_steps {
        recorded.push(n_steps);
    }

    let h_full = match &model.hamiltonian {
        Hamiltonian::Static(h) => h.clone(),
        Hamiltonian::TimeDependent(f) => f(0.0),
    };

    let reduced_all: Vec<CMatrix> = run
        .states
        .iter()
        .map(|s| partial_trace(s, Subsystem::B, (2, 2)))
        .collect::<Result<_, _>>()?;

    let mut times = Vec::with_capacity(recorded.len());
    let mut states = Vec::with_capacity(recorded.len());
    let mut reduced = Vec::with_capacity(recorded.len());
    let mut rows = Vec::with_capacity(recorded.len());

    for (sample_idx, &step) in recorded.iter().enumerate() {
        let t = run.times[step];
        let rho_full = &run.states[step];
        let rho_b = &reduced_all[step];

        // full reduced flow: ρ̇_B = Tr_A(−i[H,ρ] + D[ρ])
        let rhs = dynamics::lindblad_rhs(rho_full, &h_full, &model.channels, t)?;
        let flow = partial_trace(&rhs, Subsystem::B, (2, 2))?.hermitized();

        let stencil = (step > 0 && step < n_steps)
            .then(|| (&reduced_all[step - 1], &reduced_all[step + 1]));

        let f_t = rate_function_f(&p.reservoir, t)?;
        let trace_err = run.raw_trace_drift[step];
        analyzer.diag.max_raw_trace_drift =
            analyzer.diag.max_raw_trace_drift.max(trace_err);
        analyzer.diag.max_raw_herm_defect = analyzer
            .diag
            .max_raw_herm_defect
            .max(run.raw_herm_defect[step]);

        let row = analyzer.sample(SampleInput {
            idx: sample_idx,
            t,
            rho_full,
            rho_b,
            flow: &flow,
            stencil,
            f_t,
            trace_err,
        })?;
        times.push(t);
        states.push(rho_full.clone());
        reduced.push(rho_b.clone());
        rows.push(row);
    }

    let diag = analyzer.diag;
    Ok(Trajectory {
        label: job.label.clone(),
        times,
        states,
        reduced,
        rows,
        diag,
    })
}

/// Run every job of a preset.
pub fn run_preset(p: &crate::models::presets::Preset) -> Result<Vec<Trajectory>, PipelineError> {
    p.jobs.iter().map(run_job).collect()
}

/// Summary statistics of one trajectory, recomputable from its rows.
#[derive(Debug, Clone)]
pub struct Summary {
    pub label: String,
    pub max_dw: f64,
    pub t_at_max_dw: f64,
    pub max_abs_p: f64,
    pub t_at_max_abs_p: f64,
    /// Fraction of samples where the geometric bound is saturated.
    pub saturation_fraction: f64,
    pub min_slack_geo: f64,
    pub min_slack_ext: f64,
    pub min_slack_thermo: f64,
    pub min_slack_ref: f64,
    pub max_trace_err: f64,
    pub min_eig: f64,
    pub max_herm_defect: f64,
    pub max_spectral_gap: f64,
    pub flagged_samples: usize,
}

/// Reduce a trajectory to its summary record. Deterministic: ties in the
/// argmax resolve to the earliest sample.
pub fn summarize(traj: &Trajectory) -> Summary {
    let mut max_dw = f64::NEG_INFINITY;
    let mut t_at_max_dw = 0.0;
    let mut max_abs_p = f64::NEG_INFINITY;
    let mut t_at_max_abs_p = 0.0;
    let mut saturated = 0usize;
    let mut geo_samples = 0usize;
    let mut min_slack = [f64::INFINITY; 4];
    let mut any_slack = [false; 4];
    let mut max_trace_err = 0.0f64;

    for row in &traj.rows {
        if row.dw > max_dw {
            max_dw = row.dw;
            t_at_max_dw = row.t;
        }
        let abs_p = row.p.abs();
        if abs_p > max_abs_p {
            max_abs_p = abs_p;
            t_at_max_abs_p = row.t;
        }
        max_trace_err = max_trace_err.max(row.trace_err);
        let slacks = [
            row.bound_geo - abs_p,
            row.bound_ext - abs_p,
            row.bound_thermo - abs_p,
            row.bound_ref - abs_p,
        ];
        for (i, s) in slacks.into_iter().enumerate() {
            if s.is_finite() {
                any_slack[i] = true;
                min_slack[i] = min_slack[i].min(s);
            }
        }
        if row.bound_geo.is_finite() {
            geo_samples += 1;
            if row.bound_geo - abs_p <= bounds::SATURATION_COEFF * row.bound_geo.abs().max(1.0)
            {
                saturated += 1;
            }
        }
    }

    let pick = |i: usize| if any_slack[i] { min_slack[i] } else { f64::NAN };
    Summary {
        label: traj.label.clone(),
        max_dw,
        t_at_max_dw,
        max_abs_p,
        t_at_max_abs_p,
        saturation_fraction: if geo_samples > 0 {
            saturated as f64 / geo_samples as f64
        } else {
            f64::NAN
        },
        min_slack_geo: pick(0),
        min_slack_ext: pick(1),
        min_slack_thermo: pick(2),
        min_slack_ref: pick(3),
        max_trace_err,
        min_eig: traj.diag.min_eigenvalue,
        max_herm_defect: traj.diag.max_raw_herm_defect,
        max_spectral_gap: traj.diag.max_spectral_gap,
        flagged_samples: traj.diag.flagged_samples,
    }
}
