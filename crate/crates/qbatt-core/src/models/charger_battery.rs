//! Driven charger–battery pair in a dissipative/heating reservoir.
//!
//! Two qubits: the charger A is resonantly driven with amplitude `η` and
//! exchanges excitations with the battery B at coupling `κ`; only the
//! battery couples to the bath. In the rotating frame the master equation
//! is
//!
//! ```text
//! ρ̇ = −i[κ(σ₊ᴬσ₋ᴮ + σ₋ᴬσ₊ᴮ) + η(σ₊ᴬ + σ₋ᴬ), ρ]
//!      + (γ₁(t)/2)(σ₊ᴮρσ₋ᴮ − ½{σ₋ᴮσ₊ᴮ, ρ})
//!      + (γ₂(t)/2)(σ₋ᴮρσ₊ᴮ − ½{σ₊ᴮσ₋ᴮ, ρ}),
//! ```
//!
//! with heating rate `γ₁/2 = N·f(t)` and dissipation rate
//! `γ₂/2 = (N+1)·f(t)`; the heating channel switches off at zero
//! temperature (`N = 0`). `f(t)` is the Lorentzian-reservoir rate of
//! [`crate::dynamics::reservoir`].

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dynamics::{rate_function_f, Hamiltonian, LindbladChannel, ReservoirParams};
use crate::qmat::{qubit, CMatrix};
use crate::thermo::Temperature;

use super::ModelError;

/// Initial product state of charger ⊗ battery.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialKet {
    /// `|1⟩ ⊗ |0⟩`: charger excited, battery empty.
    ExcitedGround,
    /// `|+⟩ ⊗ |+⟩`: coherence in both.
    PlusPlus,
    /// `|+⟩ ⊗ |0⟩`: coherent charger, empty battery.
    PlusGround,
    /// `|1⟩ ⊗ |+⟩`: excited charger, coherent battery.
    ExcitedPlus,
    /// Arbitrary product ket.
    Product {
        charger: [Complex64; 2],
        battery: [Complex64; 2],
    },
}

impl InitialKet {
    pub fn ket(&self) -> Result<Vec<Complex64>, ModelError> {
        let (charger, battery): (Vec<Complex64>, Vec<Complex64>) = match self {
            InitialKet::ExcitedGround => (qubit::ket_excited(), qubit::ket_ground()),
            InitialKet::PlusPlus => (qubit::ket_plus(), qubit::ket_plus()),
            InitialKet::PlusGround => (qubit::ket_plus(), qubit::ket_ground()),
            InitialKet::ExcitedPlus => (qubit::ket_excited(), qubit::ket_plus()),
            InitialKet::Product { charger, battery } => {
                (charger.to_vec(), battery.to_vec())
            }
        };
        let ket = qubit::kron_ket(&charger, &battery);
        let norm_sq: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(ModelError::NotNormalized { norm_sq });
        }
        Ok(ket)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargerBatteryParams {
    pub omega0: f64,
    /// Drive amplitude on the charger.
    pub eta: f64,
    /// Charger–battery exchange coupling.
    pub kappa: f64,
    pub reservoir: ReservoirParams,
    pub temperature: Temperature,
    pub initial: InitialKet,
}

/// Assembled model: rotating-frame Hamiltonian, the two reservoir channels,
/// the initial state, and the battery-local Hamiltonian.
#[derive(Debug, Clone)]
pub struct ChargerBatteryModel {
    pub hamiltonian: Hamiltonian,
    pub channels: Vec<LindbladChannel>,
    pub rho0: CMatrix,
    /// Battery Hamiltonian `ω₀|1⟩⟨1|` on the 2-dim battery factor.
    pub h_b: CMatrix,
}

pub fn build_charger_battery(p: &ChargerBatteryParams) -> Result<ChargerBatteryModel, ModelError> {
    let id2 = CMatrix::identity(2);
    let sp_a = qubit::sigma_plus().kron(&id2);
    let sm_a = qubit::sigma_minus().kron(&id2);
    let sp_b = id2.kron(&qubit::sigma_plus());
    let sm_b = id2.kron(&qubit::sigma_minus());

    let exchange = &sp_a.matmul(&sm_b) + &sm_a.matmul(&sp_b);
    let drive = &sp_a + &sm_a;
    let h = &exchange.scaled_re(p.kappa) + &drive.scaled_re(p.eta);

    let n = p.reservoir.n_photon;
    let heating_res = p.reservoir;
    let dissipation_res = p.reservoir;
    let channels = vec![
        LindbladChannel::time_dependent(sp_b, move |t| {
            Ok(n * rate_function_f(&heating_res, t)?)
        }),
        LindbladChannel::time_dependent(sm_b, move |t| {
            Ok((n + 1.0) * rate_function_f(&dissipation_res, t)?)
        }),
    ];

    Ok(ChargerBatteryModel {
        hamiltonian: Hamiltonian::Static(h),
        channels,
        rho0: CMatrix::outer(&p.initial.ket()?),
        h_b: qubit::battery_hamiltonian(p.omega0),
    })
}
