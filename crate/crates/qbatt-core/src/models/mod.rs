//! The two bundled systems: a three-qubit XX chain whose middle qubit is
//! the battery (closed-form evolution), and a driven charger–battery qubit
//! pair with the battery coupled to a Lorentzian dissipative/heating
//! reservoir. [`presets`] pins the parameter sets behind the named example
//! scenarios.

use core::fmt;

use crate::dynamics::DynamicsError;
use crate::qmat::QmatError;
use crate::thermo::ThermoError;

pub mod charger_battery;
pub mod presets;
pub mod xx_chain;

pub use charger_battery::{build_charger_battery, ChargerBatteryModel, ChargerBatteryParams, InitialKet};
pub use xx_chain::{xx_amplitudes, xx_battery_state, XXAmplitudes, XXChainParams};

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// Initial amplitudes must be normalized.
    NotNormalized { norm_sq: f64 },
    Matrix(QmatError),
    Thermo(ThermoError),
    Dynamics(DynamicsError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::NotNormalized { norm_sq } => {
                write!(f, "initial state is not normalized: ‖ψ‖² = {norm_sq:.12}")
            }
            ModelError::Matrix(e) => write!(f, "{e}"),
            ModelError::Thermo(e) => write!(f, "{e}"),
            ModelError::Dynamics(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ModelError {}

impl From<QmatError> for ModelError {
    fn from(e: QmatError) -> Self {
        ModelError::Matrix(e)
    }
}

impl From<ThermoError> for ModelError {
    fn from(e: ThermoError) -> Self {
        ModelError::Thermo(e)
    }
}

impl From<DynamicsError> for ModelError {
    fn from(e: DynamicsError) -> Self {
        ModelError::Dynamics(e)
    }
}
