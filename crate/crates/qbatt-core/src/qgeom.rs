//! Quantum-information geometry of the battery state: symmetric logarithmic
//! derivative and quantum Fisher information, the spectral QFI formula,
//! eigenbasis splitting of a dissipative flow into population-moving and
//! coherence-moving parts, and the extended QFI with its classical/quantum
//! speed decomposition.
//!
//! # Flow splitting
//!
//! Any Hermitian traceless flow `X` (a dissipator value `D[ρ]`, or a full
//! generator evaluation `ρ̇`) decomposes in the eigenbasis
//! `ρ = Σ Pₙ|n⟩⟨n|` as
//!
//! ```text
//! X = X_d + X_nd,
//! X_d  = Σₙ Ṗₙ|n⟩⟨n| = −{Γ, ρ},      Γ = −½ Σₙ (Ṗₙ/Pₙ)|n⟩⟨n|,
//! X_nd = −i[H_eff, ρ],               (H_eff)ₙₘ = i Xₙₘ/(Pₘ − Pₙ),  n ≠ m,
//! ```
//!
//! with `Ṗₙ = ⟨n|X|n⟩`. The `Γ` identity holds on the support of ρ;
//! matrix elements across (near-)degenerate population pairs are undefined
//! and are dropped and counted. `Tr(ρ H_eff) = 0` by construction.
//!
//! # Extended QFI
//!
//! `L̃ = −2i(H_eff − iΓ)` satisfies `X = (L̃ρ + ρL̃†)/2` exactly, so it is a
//! valid non-Hermitian logarithmic derivative of the flow and
//!
//! ```text
//! I_Q ≤ I_Q^ext = Tr(L̃ ρ L̃†) = 4σ²(H_eff) + Σₙ Ṗₙ²/Pₙ = v_q² + v_cl².
//! ```
//!
//! The inequality is term-wise: each off-diagonal pair contributes
//! `4(Pₙ+Pₘ)|Xₙₘ|²/(Pₘ−Pₙ)²` here versus `4|Xₙₘ|²/(Pₙ+Pₘ)` in the QFI, and
//! `(Pₙ+Pₘ)² ≥ (Pₘ−Pₙ)²`. The quantum speed is `v_q = 2σ(H_eff)` (the
//! coherence-moving part), the classical speed `v_cl = √(Σ Ṗₙ²/Pₙ)` is the
//! classical Fisher information of the populations.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::{dissipator, DynamicsError, LindbladChannel};
use crate::qmat::{
    check_dims, check_hermitian, eig_hermitian, variance, CMatrix, EigenSystem, QmatError,
    SUPPORT_CUTOFF,
};

/// Population differences at or below this cutoff make an `H_eff` matrix
/// element undefined; such elements are zeroed and counted.
pub const DEGENERACY_CUTOFF: f64 = 1e-10;

/// Required relative agreement between the two evaluation routes of the
/// extended QFI.
pub const EXT_QFI_AGREEMENT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum QgeomError {
    Matrix(QmatError),
    Dynamics(DynamicsError),
    /// `ρ̇` must be traceless.
    NotTraceless { trace_abs: f64, tol: f64 },
    /// The two extended-QFI routes disagreed — a split or degeneracy
    /// problem upstream.
    ExtendedQfiMismatch { operator_form: f64, spectral_form: f64 },
}

impl fmt::Display for QgeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QgeomError::Matrix(e) => write!(f, "{e}"),
            QgeomError::Dynamics(e) => write!(f, "{e}"),
            QgeomError::NotTraceless { trace_abs, tol } => write!(
                f,
                "flow is not traceless: |Tr| = {trace_abs:.3e} exceeds {tol:.1e}"
            ),
            QgeomError::ExtendedQfiMismatch {
                operator_form,
                spectral_form,
            } => write!(
                f,
                "extended QFI routes disagree: Tr(L̃ρL̃†) = {operator_form:.12e} vs \
                 4σ²+ΣṖ²/P = {spectral_form:.12e}"
            ),
        }
    }
}

impl core::error::Error for QgeomError {}

impl From<QmatError> for QgeomError {
    fn from(e: QmatError) -> Self {
        QgeomError::Matrix(e)
    }
}

impl From<DynamicsError> for QgeomError {
    fn from(e: DynamicsError) -> Self {
        QgeomError::Dynamics(e)
    }
}

fn check_flow(rho: &CMatrix, flow: &CMatrix) -> Result<(), QgeomError> {
    check_dims(rho, flow)?;
    check_hermitian(flow, 1e-8)?;
    let tr = flow.trace().norm();
    let tol = 1e-10 * flow.frobenius_norm().max(1.0);
    if tr > tol {
        return Err(QgeomError::NotTraceless { trace_abs: tr, tol });
    }
    Ok(())
}

/// Symmetric logarithmic derivative: the Hermitian `L` with
/// `ρ̇ = ½(Lρ + ρL)` on the support of ρ. In ρ's eigenbasis
/// `Lₙₘ = 2 ρ̇ₙₘ/(Pₙ+Pₘ)` when `Pₙ+Pₘ > cutoff`, else 0.
pub fn sld(rho: &CMatrix, rho_dot: &CMatrix, cutoff: f64) -> Result<CMatrix, QgeomError> {
    check_flow(rho, rho_dot)?;
    let es = eig_hermitian(rho)?;
    Ok(sld_in_basis(&es, rho_dot, cutoff).1)
}

fn sld_in_basis(es: &EigenSystem, rho_dot: &CMatrix, cutoff: f64) -> (CMatrix, CMatrix) {
    let n = es.dim();
    let m = es.to_eigenbasis(rho_dot);
    let p = es.values();
    let mut l_eig = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let denom = p[i] + p[j];
            if denom > cutoff {
                l_eig.set(i, j, 2.0 * m.at(i, j) / denom);
            }
        }
    }
    let l = es.from_eigenbasis(&l_eig).hermitized();
    (l_eig, l)
}

/// Quantum Fisher information `I_Q = Tr(ρL²)` for time as the parameter.
pub fn qfi_sld(rho: &CMatrix, rho_dot: &CMatrix, cutoff: f64) -> Result<f64, QgeomError> {
    check_flow(rho, rho_dot)?;
    let es = eig_hermitian(rho)?;
    let (l_eig, _) = sld_in_basis(&es, rho_dot, cutoff);
    let p = es.values();
    let n = es.dim();
    let mut iq = 0.0;
    for i in 0..n {
        for j in 0..n {
            iq += p[i] * l_eig.at(i, j).norm_sqr();
        }
    }
    Ok(iq.max(0.0))
}

/// Eigenbasis-resolved decomposition of a Hermitian traceless flow; see the
/// module docs.
#[derive(Debug, Clone)]
pub struct MotionSplit {
    /// Eigensystem of ρ the split is resolved in.
    pub basis: EigenSystem,
    /// `Ṗₙ = ⟨n|X|n⟩`, for every basis index.
    pub pop_rates: Vec<f64>,
    /// Diagonal part `Σ Ṗₙ|n⟩⟨n|`, back in the original basis.
    pub flow_diag: CMatrix,
    /// Off-diagonal remainder `X − X_d`.
    pub flow_offdiag: CMatrix,
    /// `Γ = −½ Σ (Ṗₙ/Pₙ)|n⟩⟨n|` over the support.
    pub gamma_op: CMatrix,
    /// Effective Hamiltonian generating the off-diagonal flow.
    pub h_eff: CMatrix,
    /// Lossy matrix elements zeroed at (near-)degenerate population pairs.
    pub dropped_pairs: usize,
}

impl MotionSplit {
    /// Classical Fisher information of the populations, `Σ Ṗₙ²/Pₙ` over the
    /// support.
    pub fn classical_fisher(&self, cutoff: f64) -> f64 {
        self.basis
            .values()
            .iter()
            .zip(&self.pop_rates)
            .filter(|(&p, _)| p > cutoff)
            .map(|(&p, &pd)| pd * pd / p)
            .sum()
    }
}

/// Split a Hermitian traceless flow in the eigenbasis of ρ.
pub fn motion_split(
    rho: &CMatrix,
    flow: &CMatrix,
    support_cutoff: f64,
    degeneracy_cutoff: f64,
) -> Result<MotionSplit, QgeomError> {
    check_flow(rho, flow)?;
    let es = eig_hermitian(rho)?;
    let n = es.dim();
    let x_eig = es.to_eigenbasis(flow);
    let p = es.values();

    let pop_rates: Vec<f64> = (0..n).map(|i| x_eig.at(i, i).re).collect();
    let flow_diag = es.from_eigenbasis(&CMatrix::from_diag(&pop_rates)).hermitized();
    let flow_offdiag = flow - &flow_diag;

    let gamma_diag: Vec<f64> = (0..n)
        .map(|i| {
            if p[i] > support_cutoff {
                -0.5 * pop_rates[i] / p[i]
            } else {
                0.0
            }
        })
        .collect();
    let gamma_op = es
        .from_eigenbasis(&CMatrix::from_diag(&gamma_diag))
        .hermitized();

    let drop_tol = 1e-12 * flow.frobenius_norm().max(1.0);
    let mut dropped_pairs = 0usize;
    let mut h_eig = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dp = p[j] - p[i];
            if dp.abs() <= degeneracy_cutoff {
                if i < j && x_eig.at(i, j).norm() > drop_tol {
                    dropped_pairs += 1;
                }
            } else {
                h_eig.set(i, j, Complex64::new(0.0, 1.0) * x_eig.at(i, j) / dp);
            }
        }
    }
    let h_eff = es.from_eigenbasis(&h_eig).hermitized();

    Ok(MotionSplit {
        basis: es,
        pop_rates,
        flow_diag,
        flow_offdiag,
        gamma_op,
        h_eff,
        dropped_pairs,
    })
}

/// A dissipator value `D[ρ]` together with its eigenbasis split.
#[derive(Debug, Clone)]
pub struct DissipatorSplit {
    pub d_full: CMatrix,
    pub split: MotionSplit,
}

impl DissipatorSplit {
    pub fn d_diag(&self) -> &CMatrix {
        &self.split.flow_diag
    }

    pub fn d_nondiag(&self) -> &CMatrix {
        &self.split.flow_offdiag
    }

    pub fn gamma(&self) -> &CMatrix {
        &self.split.gamma_op
    }

    /// The dissipative Hamiltonian generating the coherence-moving part.
    pub fn h_diss(&self) -> &CMatrix {
        &self.split.h_eff
    }
}

/// Evaluate the channels' dissipator at `(ρ, t)` and split it.
pub fn split_dissipator(
    rho: &CMatrix,
    channels: &[LindbladChannel],
    t: f64,
    cutoff: f64,
) -> Result<DissipatorSplit, QgeomError> {
    let d_full = dissipator(rho, channels, t)?.hermitized();
    let split = motion_split(rho, &d_full, cutoff, DEGENERACY_CUTOFF)?;
    Ok(DissipatorSplit { d_full, split })
}

/// Speeds of the state's motion: QFI, extended QFI, and the
/// classical/quantum decomposition `I_Q^ext = v_cl² + v_q²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedReport {
    pub i_q: f64,
    pub i_q_ext: f64,
    pub v_cl: f64,
    pub v_q: f64,
}

/// Extended QFI of the flow `−i[H_coherent, ρ] + D[ρ]`.
///
/// With `h_coherent = None` this is the interaction-picture form: only the
/// dissipator moves the state, and `H_eff` reduces to the dissipative
/// Hamiltonian of the split.
pub fn qfi_extended(
    rho: &CMatrix,
    h_coherent: Option<&CMatrix>,
    ds: &DissipatorSplit,
) -> Result<SpeedReport, QgeomError> {
    match h_coherent {
        None => qfi_extended_from_flow(rho, &ds.d_full),
        Some(h) => {
            check_dims(h, rho)?;
            let comm = &h.matmul(rho) - &rho.matmul(h);
            let flow = &comm.scaled(Complex64::new(0.0, -1.0)) + &ds.d_full;
            qfi_extended_from_flow(rho, &flow.hermitized())
        }
    }
}

/// Extended QFI of an arbitrary Hermitian traceless flow (e.g. a full
/// generator evaluation `ρ̇`, reduced-state flows included).
///
/// Computes both routes — the literal `Tr(L̃ρL̃†)` with
/// `L̃ = −2i(H_eff − iΓ)`, and the eigen-sum `4σ²(H_eff) + Σ Ṗₙ²/Pₙ` —
/// and errors if they disagree beyond [`EXT_QFI_AGREEMENT`].
pub fn qfi_extended_from_flow(rho: &CMatrix, flow: &CMatrix) -> Result<SpeedReport, QgeomError> {
    let ms = motion_split(rho, flow, SUPPORT_CUTOFF, DEGENERACY_CUTOFF)?;
    let i_q = qfi_sld(rho, flow, SUPPORT_CUTOFF)?;

    // route (i): L̃ = −2i(H_eff − iΓ) = −2Γ − 2iH_eff as literal matrices
    let l_tilde = &ms.gamma_op.scaled_re(-2.0) + &ms.h_eff.scaled(Complex64::new(0.0, -2.0));
    let operator_form = l_tilde
        .matmul(rho)
        .matmul(&l_tilde.dagger())
        .trace()
        .re;

    // route (ii): 4σ²(H_eff) + classical Fisher information
    let sigma_sq = variance(rho, &ms.h_eff)?;
    let v_cl_sq = ms.classical_fisher(SUPPORT_CUTOFF);
    let spectral_form = 4.0 * sigma_sq + v_cl_sq;

    let scale = operator_form.abs().max(spectral_form.abs()).max(1.0);
    if (operator_form - spectral_form).abs() > EXT_QFI_AGREEMENT * scale {
        return Err(QgeomError::ExtendedQfiMismatch {
            operator_form,
            spectral_form,
        });
    }

    Ok(SpeedReport {
        i_q,
        i_q_ext: spectral_form,
        v_cl: v_cl_sq.max(0.0).sqrt(),
        v_q: 2.0 * sigma_sq.max(0.0).sqrt(),
    })
}

/// Spectral-formula QFI evaluated by central differences on the
/// eigensystem, with smooth labeling across the stencil.
#[derive(Debug, Clone, Copy)]
pub struct SpectralQfi {
    pub value: f64,
    /// Set when an eigenvalue crossing (or near-degeneracy) defeated the
    /// overlap matching; flagged samples are excluded from comparisons.
    pub flagged: bool,
    /// Worst squared overlap used in the matching.
    pub min_overlap_sq: f64,
    /// Largest estimated eigenvector rotation angle across the stencil,
    /// `max |ρ̇ᵢⱼ|·h/|λᵢ−λⱼ|`; central differences are only accurate for
    /// small angles.
    pub rotation_angle: f64,
    /// Largest `|λ̈|·h/|λ̇|` across the supported eigenvalues; eigenvalue
    /// trajectories curve sharply through avoided crossings, which defeats
    /// the derivative stencil well before the vectors misbehave.
    pub curvature_ratio: f64,
}

/// Spectral QFI from a three-point stencil `ρ(t−h), ρ(t), ρ(t+h)`:
///
/// ```text
/// I_Q = Σ (∂λᵢ)²/λᵢ + 4Σ λᵢ⟨∂ᵢ|∂ᵢ⟩ − 8Σ λᵢλⱼ/(λᵢ+λⱼ) |⟨∂ᵢ|j⟩|²
/// ```
///
/// with all sums over the support of ρ(t). Side eigensystems are matched
/// to the center by maximal eigenvector overlap and phase-aligned before
/// differencing.
pub fn qfi_spectral_stencil(
    rho_minus: &CMatrix,
    rho_center: &CMatrix,
    rho_plus: &CMatrix,
    step: f64,
    cutoff: f64,
) -> Result<SpectralQfi, QgeomError> {
    let es_c = eig_hermitian(rho_center)?;
    let es_m = eig_hermitian(rho_minus)?;
    let es_p = eig_hermitian(rho_plus)?;
    let n = es_c.dim();

    let (idx_m, ov_m) = match_columns(&es_c, &es_m);
    let (idx_p, ov_p) = match_columns(&es_c, &es_p);
    let min_overlap_sq = ov_m.min(ov_p);

    // conditioning: the stencil must resolve the eigenvector rotation,
    // whose angle per step is ~ |ρ̇ᵢⱼ|·h/|λᵢ−λⱼ|; near-crossings with
    // coupling defeat the central difference long before the overlap
    // matching becomes ambiguous
    let flow_est = (rho_plus - rho_minus).scaled_re(1.0 / (2.0 * step));
    let m_est = es_c.to_eigenbasis(&flow_est);
    let mut rotation_angle: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            if es_c.values()[i] + es_c.values()[j] <= cutoff {
                continue;
            }
            let coupling = m_est.at(i, j).norm();
            let gap = (es_c.values()[j] - es_c.values()[i]).abs().max(1e-300);
            rotation_angle = rotation_angle.max(coupling * step / gap);
        }
    }
    let flagged = min_overlap_sq < 0.6 || rotation_angle > 0.3;

    let mut curvature_ratio: f64 = 0.0;
    for i in 0..n {
        if es_c.values()[i] <= cutoff {
            continue;
        }
        let (mi, pi) = (idx_m[i], idx_p[i]);
        let first = (es_p.values()[pi] - es_m.values()[mi]).abs() * 0.5;
        let second =
            (es_p.values()[pi] - 2.0 * es_c.values()[i] + es_m.values()[mi]).abs();
        curvature_ratio = curvature_ratio.max(second / first.max(1e-300));
    }

    let lam = es_c.values();
    let mut dlam = Vec::with_capacity(n);
    let mut dvec: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for i in 0..n {
        let (mi, pi) = (idx_m[i], idx_p[i]);
        dlam.push((es_p.values()[pi] - es_m.values()[mi]) / (2.0 * step));
        let vm = aligned_column(&es_c, i, &es_m, mi);
        let vp = aligned_column(&es_c, i, &es_p, pi);
        dvec.push(
            vm.iter()
                .zip(&vp)
                .map(|(a, b)| (b - a) / (2.0 * step))
                .collect(),
        );
    }

    let support: Vec<usize> = (0..n).filter(|&i| lam[i] > cutoff).collect();
    let mut t1 = 0.0;
    let mut t2 = 0.0;
    let mut t3 = 0.0;
    for &i in &support {
        t1 += dlam[i] * dlam[i] / lam[i];
        let norm_sq: f64 = dvec[i].iter().map(|z| z.norm_sqr()).sum();
        t2 += 4.0 * lam[i] * norm_sq;
        for &j in &support {
            let mut inner = Complex64::ZERO;
            for k in 0..n {
                inner += dvec[i][k].conj() * es_c.vectors().at(k, j);
            }
            t3 -= 8.0 * lam[i] * lam[j] / (lam[i] + lam[j]) * inner.norm_sqr();
        }
    }
    let raw = t1 + t2 + t3;
    let value = if raw < 0.0 && raw > -1e-9 * raw.abs().max(1.0) {
        0.0
    } else {
        raw
    };

    Ok(SpectralQfi {
        value,
        flagged,
        min_overlap_sq,
        rotation_angle,
        curvature_ratio,
    })
}

/// Spectral QFI of a state-valued function of time, differenced at `t ± step`.
pub fn qfi_spectral(
    rho_of_t: impl Fn(f64) -> CMatrix,
    t: f64,
    step: f64,
    cutoff: f64,
) -> Result<SpectralQfi, QgeomError> {
    let rm = rho_of_t(t - step);
    let rc = rho_of_t(t);
    let rp = rho_of_t(t + step);
    qfi_spectral_stencil(&rm, &rc, &rp, step, cutoff)
}

/// Greedy injective matching of `other`'s columns onto `center`'s by
/// maximal overlap; returns the assignment and the worst squared overlap.
fn match_columns(center: &EigenSystem, other: &EigenSystem) -> (Vec<usize>, f64) {
    let n = center.dim();
    let mut used = alloc::vec![false; n];
    let mut assign = alloc::vec![0usize; n];
    let mut worst: f64 = 1.0;
    for i in 0..n {
        let mut best = 0.0;
        let mut best_j = usize::MAX;
        for j in 0..n {
            if used[j] {
                continue;
            }
            let mut inner = Complex64::ZERO;
            for k in 0..n {
                inner += other.vectors().at(k, j).conj() * center.vectors().at(k, i);
            }
            let ov = inner.norm_sqr();
            if ov > best || best_j == usize::MAX {
                best = ov;
                best_j = j;
            }
        }
        used[best_j] = true;
        assign[i] = best_j;
        worst = worst.min(best);
    }
    (assign, worst)
}

/// Column `col` of `other`, re-phased so its overlap with `center`'s column
/// `ref_col` is real and nonnegative.
fn aligned_column(
    center: &EigenSystem,
    ref_col: usize,
    other: &EigenSystem,
    col: usize,
) -> Vec<Complex64> {
    let n = center.dim();
    let mut inner = Complex64::ZERO;
    for k in 0..n {
        inner += center.vectors().at(k, ref_col).conj() * other.vectors().at(k, col);
    }
    let phase = if inner.norm() > 1e-300 {
        inner.conj() / inner.norm()
    } else {
        Complex64::ONE
    };
    (0..n).map(|k| other.vectors().at(k, col) * phase).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::LindbladChannel;
    use crate::qmat::qubit;
    use crate::testkit::{assert_close, assert_mat_close, assert_rel_close, Rng};

    #[test]
    fn sld_of_stationary_state_is_zero() {
        let rho = CMatrix::from_diag(&[0.7, 0.3]);
        let zero = CMatrix::zeros(2);
        let l = sld(&rho, &zero, SUPPORT_CUTOFF).unwrap();
        assert_close(l.frobenius_norm(), 0.0, 1e-14);
        assert_close(qfi_sld(&rho, &zero, SUPPORT_CUTOFF).unwrap(), 0.0, 1e-14);
    }

    #[test]
    fn sld_diagonal_closed_form() {
        // ρ = diag(p, 1−p), ρ̇ = diag(ṗ, −ṗ): L = diag(ṗ/p, −ṗ/(1−p))
        let (p, pd) = (0.3, 0.17);
        let rho = CMatrix::from_diag(&[p, 1.0 - p]);
        let rho_dot = CMatrix::from_diag(&[pd, -pd]);
        let l = sld(&rho, &rho_dot, SUPPORT_CUTOFF).unwrap();
        let expect = CMatrix::from_diag(&[pd / p, -pd / (1.0 - p)]);
        assert_mat_close(&l, &expect, 1e-13);
        // classical Fisher information ṗ²/(p(1−p))
        let iq = qfi_sld(&rho, &rho_dot, SUPPORT_CUTOFF).unwrap();
        assert_rel_close(iq, pd * pd / (p * (1.0 - p)), 1e-12);
    }

    #[test]
    fn sld_reconstructs_unitary_flow() {
        // ρ̇ = −i[H, ρ] for a full-rank qubit: ½(Lρ+ρL) = ρ̇ exactly
        let mut rng = Rng::new(0x5eed_0030);
        for _ in 0..20 {
            let rho = rng.density(2, 0.05);
            let h = rng.hermitian(2);
            let comm = &h.matmul(&rho) - &rho.matmul(&h);
            let rho_dot = comm.scaled(Complex64::new(0.0, -1.0)).hermitized();
            let l = sld(&rho, &rho_dot, SUPPORT_CUTOFF).unwrap();
            let rec = (&l.matmul(&rho) + &rho.matmul(&l)).scaled_re(0.5);
            assert_mat_close(&rec, &rho_dot, 1e-10);
        }
    }

    #[test]
    fn sld_reconstruction_on_support_random_flows() {
        // full-rank states: reconstruction within 1e-9 for 200 random pairs
        let mut rng = Rng::new(0x5eed_0031);
        for i in 0..200 {
            let dim = if i % 2 == 0 { 2 } else { 4 };
            let rho = rng.density(dim, 0.02);
            let rho_dot = rng.traceless_hermitian(dim);
            let l = sld(&rho, &rho_dot, SUPPORT_CUTOFF).unwrap();
            let rec = (&l.matmul(&rho) + &rho.matmul(&l)).scaled_re(0.5);
            let defect = (&rec - &rho_dot).frobenius_norm()
                / rho_dot.frobenius_norm().max(1e-300);
            assert!(defect <= 1e-9, "reconstruction defect {defect:.3e}");
        }
    }

    #[test]
    fn sld_rejects_traceful_flow() {
        let rho = CMatrix::from_diag(&[0.5, 0.5]);
        let bad = CMatrix::from_diag(&[0.3, 0.3]);
        assert!(matches!(
            sld(&rho, &bad, SUPPORT_CUTOFF),
            Err(QgeomError::NotTraceless { .. })
        ));
    }

    #[test]
    fn qfi_pure_state_matches_fidelity_curvature() {
        // |ψ(t)⟩ = cos(ηt)|0⟩ − i sin(ηt)|1⟩:
        // I_Q = 4(⟨ψ̇|ψ̇⟩ − |⟨ψ|ψ̇⟩|²) = 4η², also the limit
        // 8(1 − |⟨ψ(t)|ψ(t+ε)⟩|)/ε²
        let eta = 0.8;
        let t0 = 0.37;
        let psi = |t: f64| {
            alloc::vec![
                Complex64::new((eta * t).cos(), 0.0),
                Complex64::new(0.0, -(eta * t).sin()),
            ]
        };
        let h = (&qubit::sigma_plus() + &qubit::sigma_minus()).scaled_re(eta);
        let rho = CMatrix::outer(&psi(t0));
        let comm = &h.matmul(&rho) - &rho.matmul(&h);
        let rho_dot = comm.scaled(Complex64::new(0.0, -1.0)).hermitized();
        let iq = qfi_sld(&rho, &rho_dot, SUPPORT_CUTOFF).unwrap();
        assert_rel_close(iq, 4.0 * eta * eta, 1e-10);

        // fidelity finite-difference oracle
        let eps = 1e-5;
        let overlap: Complex64 = psi(t0)
            .iter()
            .zip(&psi(t0 + eps))
            .map(|(a, b)| a.conj() * b)
            .sum();
        let oracle = 8.0 * (1.0 - overlap.norm()) / (eps * eps);
        assert_rel_close(iq, oracle, 1e-4);
    }

    #[test]
    fn split_diagonal_dissipator() {
        // ρ and D[ρ] diagonal in the same basis: H_eff = 0, Γ from Ṗ/P
        let rho = CMatrix::from_diag(&[0.8, 0.2]);
        let channels = [LindbladChannel::constant(qubit::sigma_minus(), 0.5)];
        let ds = split_dissipator(&rho, &channels, 0.0, SUPPORT_CUTOFF).unwrap();
        assert_close(ds.h_diss().frobenius_norm(), 0.0, 1e-12);
        // D[ρ] = γ(ρ₁₁|0⟩⟨0| − ρ₁₁|1⟩⟨1|); eigenvalues sort ascending, so
        // index 0 is the excited state (P = 0.2) with Ṗ = −γρ₁₁
        let pd = 0.5 * 0.2;
        assert_close(ds.split.pop_rates[0], -pd, 1e-12);
        assert_close(ds.split.pop_rates[1], pd, 1e-12);
        let gamma_expect = CMatrix::from_diag(&[-0.5 * pd / 0.8, 0.5 * pd / 0.2]);
        assert_mat_close(ds.gamma(), &gamma_expect, 1e-12);
        assert_close(ds.split.dropped_pairs as f64, 0.0, 0.0);
    }

    #[test]
    fn split_identities_random_amplitude_damping() {
        let mut rng = Rng::new(0x5eed_0032);
        for _ in 0..50 {
            let rho = rng.density(2, 0.03);
            let channels = [
                LindbladChannel::constant(qubit::sigma_minus(), 0.7),
                LindbladChannel::constant(qubit::sigma_plus(), 0.2),
            ];
            let ds = split_dissipator(&rho, &channels, 0.0, SUPPORT_CUTOFF).unwrap();

            // D_d + D_nd = D
            let sum = ds.d_diag() + ds.d_nondiag();
            assert_mat_close(&sum, &ds.d_full, 1e-10);

            // D_d = −{Γ, ρ} on the support (full rank here)
            let anti = &ds.gamma().matmul(&rho) + &rho.matmul(ds.gamma());
            assert_mat_close(&anti.scaled_re(-1.0), ds.d_diag(), 1e-9);

            // D_nd = −i[H_diss, ρ]
            let comm = &ds.h_diss().matmul(&rho) - &rho.matmul(ds.h_diss());
            let rec = comm.scaled(Complex64::new(0.0, -1.0));
            assert_mat_close(&rec, ds.d_nondiag(), 1e-9);

            // Tr(ρ H_diss) = 0
            assert_close(rho.trace_product(ds.h_diss()).re, 0.0, 1e-9);
        }
    }

    #[test]
    fn extended_qfi_zero_for_empty_dissipator() {
        let rho = CMatrix::from_diag(&[0.6, 0.4]);
        let ds = split_dissipator(&rho, &[], 0.0, SUPPORT_CUTOFF).unwrap();
        let report = qfi_extended(&rho, None, &ds).unwrap();
        assert_close(report.i_q_ext, 0.0, 1e-14);
        assert_close(report.i_q, 0.0, 1e-14);
    }

    #[test]
    fn extended_qfi_diagonal_dissipation_is_classical() {
        let rho = CMatrix::from_diag(&[0.8, 0.2]);
        let channels = [LindbladChannel::constant(qubit::sigma_minus(), 0.5)];
        let ds = split_dissipator(&rho, &channels, 0.0, SUPPORT_CUTOFF).unwrap();
        let report = qfi_extended(&rho, None, &ds).unwrap();
        assert_close(report.v_q, 0.0, 1e-12);
        assert_rel_close(report.i_q_ext, report.v_cl * report.v_cl, 1e-12);
        // diagonal flows: QFI equals the classical Fisher information
        assert_rel_close(report.i_q, report.i_q_ext, 1e-9);
    }

    #[test]
    fn extended_qfi_dominates_qfi_random_generators() {
        let mut rng = Rng::new(0x5eed_0033);
        for i in 0..100 {
            let dim = if i % 2 == 0 { 2 } else { 4 };
            let rho = rng.density(dim, 0.02);
            // random channel, sometimes with a negative rate
            let l = rng.matrix(dim);
            let rate = if i % 5 == 0 { -0.3 } else { rng.uniform(0.1, 1.0) };
            let channels = [LindbladChannel::constant(l, rate)];
            let ds = split_dissipator(&rho, &channels, 0.0, SUPPORT_CUTOFF).unwrap();
            let report = qfi_extended(&rho, None, &ds).unwrap();
            assert!(
                report.i_q_ext >= report.i_q - 1e-9,
                "I_Q_ext {:.6e} < I_Q {:.6e}",
                report.i_q_ext,
                report.i_q
            );
            assert_rel_close(
                report.i_q_ext,
                report.v_cl * report.v_cl + report.v_q * report.v_q,
                1e-9,
            );
        }
    }

    #[test]
    fn spectral_qfi_stationary_and_diagonal() {
        let rho = CMatrix::from_diag(&[0.7, 0.3]);
        let r = qfi_spectral(|_| rho.clone(), 1.0, 1e-3, SUPPORT_CUTOFF).unwrap();
        assert_close(r.value, 0.0, 1e-12);
        assert!(!r.flagged);

        // diagonal trajectory: only the classical term survives
        let p_of_t = |t: f64| 0.3 + 0.2 * (t).sin();
        let rho_of_t = |t: f64| CMatrix::from_diag(&[p_of_t(t), 1.0 - p_of_t(t)]);
        let t0 = 0.9;
        let h = 1e-4;
        let r = qfi_spectral(rho_of_t, t0, h, SUPPORT_CUTOFF).unwrap();
        let p = p_of_t(t0);
        let pd = 0.2 * (t0).cos();
        let expect = pd * pd / p + pd * pd / (1.0 - p);
        assert_rel_close(r.value, expect, 1e-6);
    }

    #[test]
    fn spectral_qfi_matches_sld_for_rotating_state() {
        // mixed state rotated by a drive: both routes agree to O(h²)
        let eta = 0.6;
        let h_op = (&qubit::sigma_plus() + &qubit::sigma_minus()).scaled_re(eta);
        let rho0 = CMatrix::from_diag(&[0.75, 0.25]);
        let rho_of_t = |t: f64| {
            // U = exp(−iHt) built from the eigensystem of H
            let es = eig_hermitian(&h_op).unwrap();
            let phases: Vec<Complex64> = es
                .values()
                .iter()
                .map(|&e| Complex64::new(0.0, -e * t).exp())
                .collect();
            let mut d = CMatrix::zeros(2);
            for (i, ph) in phases.iter().enumerate() {
                d.set(i, i, *ph);
            }
            let u = es.vectors().matmul(&d).matmul(&es.vectors().dagger());
            u.matmul(&rho0).matmul(&u.dagger()).hermitized()
        };
        let t0 = 0.4;
        let step = 1e-4;
        let rho = rho_of_t(t0);
        let comm = &h_op.matmul(&rho) - &rho.matmul(&h_op);
        let rho_dot = comm.scaled(Complex64::new(0.0, -1.0)).hermitized();
        let iq = qfi_sld(&rho, &rho_dot, SUPPORT_CUTOFF).unwrap();
        let spec = qfi_spectral(rho_of_t, t0, step, SUPPORT_CUTOFF).unwrap();
        assert!(!spec.flagged);
        assert_rel_close(spec.value, iq, 1e-6);
    }
}
