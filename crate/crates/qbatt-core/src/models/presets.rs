//! Named example scenarios with pinned parameter tables.
//!
//! `fig1a`/`fig1b` are the XX-chain saturation scenarios; `fig3-*` and
//! `fig4a..d` are the four zero-temperature charger–battery regimes
//! (Markovian/non-Markovian × overdamped/underdamped); `fig5` runs the
//! finite-temperature strongly driven pair against both the non-Markovian
//! and the Markovian underdamped reservoir; `fig6a..c` vary the initial
//! coherence of charger and battery.
//!
//! Everything is expressed in units of the qubit frequency `ω₀ = 1`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dynamics::{GridSpec, ReservoirParams};
use crate::thermo::Temperature;

use super::charger_battery::{ChargerBatteryParams, InitialKet};
use super::xx_chain::XXChainParams;

/// Which per-sample analyses a job computes.
#[derive(Debug, Clone, Copy)]
pub struct AnalysisToggles {
    pub geo: bool,
    pub ext: bool,
    pub thermo_bound: bool,
    pub ref_bound: bool,
    pub spectral_qfi: bool,
}

impl AnalysisToggles {
    pub fn all_off() -> Self {
        AnalysisToggles {
            geo: false,
            ext: false,
            thermo_bound: false,
            ref_bound: false,
            spectral_qfi: false,
        }
    }
}

/// The system a job evolves.
#[derive(Debug, Clone)]
pub enum SystemSpec {
    XxChain(XXChainParams),
    ChargerBattery(ChargerBatteryParams),
}

/// One trajectory to run and analyze.
#[derive(Debug, Clone)]
pub struct Job {
    /// File-name stem and summary key.
    pub label: String,
    pub system: SystemSpec,
    pub grid: GridSpec,
    pub toggles: AnalysisToggles,
    /// Evaluate the work-operator fluctuation of the reference bound on the
    /// reduced battery state (default) or on the full state.
    pub ref_f_on_battery: bool,
}

/// A named scenario; most expand to a single job, `fig5` to two.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub jobs: Vec<Job>,
}

pub const PRESET_NAMES: [&str; 15] = [
    "fig1a", "fig1b", "fig3-mo", "fig3-mu", "fig3-nmo", "fig3-nmu", "fig4a", "fig4b", "fig4c",
    "fig4d", "fig5", "fig6a", "fig6b", "fig6c", "xx-uniform",
];

fn xx_toggles() -> AnalysisToggles {
    AnalysisToggles {
        geo: true,
        ext: true,
        thermo_bound: false,
        ref_bound: true,
        spectral_qfi: true,
    }
}

fn cb_toggles() -> AnalysisToggles {
    AnalysisToggles {
        geo: true,
        ext: true,
        thermo_bound: true,
        ref_bound: false,
        spectral_qfi: true,
    }
}

fn xx_job(label: &str, alpha: f64, beta_c: f64, gamma_c: f64) -> Job {
    let p = XXChainParams::new(
        1.0,
        1.0,
        0.0,
        Complex64::new(alpha, 0.0),
        Complex64::new(beta_c, 0.0),
        Complex64::new(gamma_c, 0.0),
    )
    .expect("preset amplitudes normalized");
    Job {
        label: String::from(label),
        system: SystemSpec::XxChain(p),
        grid: GridSpec::new(1e-3, 20.0, 10).expect("preset grid"),
        toggles: xx_toggles(),
        ref_f_on_battery: true,
    }
}

/// The four zero-temperature regimes: (γ₀, λ, κ) with Δ = 3ω₀, η = 0.1ω₀.
fn fig3_reservoir(regime: &str) -> (f64, f64, f64) {
    match regime {
        // Markovian overdamped (R = 0.01)
        "mo" => (1.0, 100.0, 0.001),
        // Markovian underdamped (R = 0.01)
        "mu" => (0.1, 10.0, 0.2),
        // non-Markovian overdamped (R = 10)
        "nmo" => (10.0, 1.0, 0.001),
        // non-Markovian underdamped (R = 10)
        "nmu" => (0.1, 0.01, 0.2),
        _ => unreachable!("unknown fig3 regime"),
    }
}

fn fig3_job(label: &str, regime: &str) -> Job {
    let (gamma0, lambda, kappa) = fig3_reservoir(regime);
    let p = ChargerBatteryParams {
        omega0: 1.0,
        eta: 0.1,
        kappa,
        reservoir: ReservoirParams::new(gamma0, lambda, 3.0, 0.0),
        temperature: Temperature::Zero,
        initial: InitialKet::ExcitedGround,
    };
    // The strongly coupled (R = 10) regimes need two accommodations: their
    // rate spikes break the |f|·dt ≤ 0.1 advisory at dt = 1e-2, so they run
    // at 1e-3 (thinned back to the 1e-2 sample grid); and the local
    // negative-rate generator itself leaks positivity at the 1e-7..1e-4
    // scale (step-size independent), so the abort floor is widened while
    // the actual excursion stays visible in the min-eigenvalue column.
    let grid = if gamma0 / lambda > 1.0 {
        GridSpec::new(1e-3, 20.0, 10)
            .expect("preset grid")
            .with_positivity_floor(-1e-3)
    } else {
        GridSpec::new(1e-2, 20.0, 1).expect("preset grid")
    };
    Job {
        label: String::from(label),
        system: SystemSpec::ChargerBattery(p),
        grid,
        toggles: cb_toggles(),
        ref_f_on_battery: true,
    }
}

/// Strongly driven finite-temperature pair (η = 10ω₀, κ = 50ω₀, N = 5,
/// βω₀ = 0.1); `lambda` selects the reservoir width. The κ = 50ω₀ exchange
/// makes this the stiff family: fig5 runs at dt = 10⁻³ over one time unit;
/// the fig6 coherence study needs the longer window in which the local
/// negative-rate generator leaks positivity at the 1e-5 scale
/// (step-size independent), so those jobs run on a finer step with the
/// widened abort floor and the excursion visible in the min-eigenvalue
/// column.
fn fig5_job(label: &str, lambda: f64, initial: InitialKet) -> Job {
    let p = ChargerBatteryParams {
        omega0: 1.0,
        eta: 10.0,
        kappa: 50.0,
        reservoir: ReservoirParams::new(0.1, lambda, 3.0, 5.0),
        temperature: Temperature::Finite { beta: 0.1 },
        initial,
    };
    Job {
        label: String::from(label),
        system: SystemSpec::ChargerBattery(p),
        grid: GridSpec::new(1e-3, 1.0, 1).expect("preset grid"),
        toggles: cb_toggles(),
        ref_f_on_battery: true,
    }
}

fn fig6_job(label: &str, initial: InitialKet) -> Job {
    let p = ChargerBatteryParams {
        omega0: 1.0,
        eta: 10.0,
        kappa: 50.0,
        reservoir: ReservoirParams::new(0.1, 0.01, 3.0, 5.0),
        temperature: Temperature::Finite { beta: 0.1 },
        initial,
    };
    Job {
        label: String::from(label),
        system: SystemSpec::ChargerBattery(p),
        grid: GridSpec::new(2.5e-4, 3.0, 4)
            .expect("preset grid")
            .with_positivity_floor(-1e-3),
        toggles: cb_toggles(),
        ref_f_on_battery: true,
    }
}

/// Look up a preset by name.
pub fn preset(name: &str) -> Option<Preset> {
    let p = match name {
        "fig1a" => Preset {
            name: "fig1a",
            description: "XX chain, excitation on the third qubit (α=0, β=0, γ=1); J=ω₀, B=0, T=0",
            jobs: vec![xx_job("fig1a", 0.0, 0.0, 1.0)],
        },
        "fig1b" => Preset {
            name: "fig1b",
            description: "XX chain, α=0, β=1/√2, γ=1/√2; J=ω₀, B=0, T=0",
            jobs: vec![xx_job(
                "fig1b",
                0.0,
                core::f64::consts::FRAC_1_SQRT_2,
                core::f64::consts::FRAC_1_SQRT_2,
            )],
        },
        "xx-uniform" => Preset {
            name: "xx-uniform",
            description: "XX chain, stationary uniform superposition (α=β=γ=1/√3)",
            jobs: vec![{
                let s = 1.0 / 3f64.sqrt();
                xx_job("xx-uniform", s, s, s)
            }],
        },
        "fig3-mo" => Preset {
            name: "fig3-mo",
            description: "charger–battery, Markovian overdamped: γ₀=ω₀, λ=100ω₀, κ=0.001ω₀; T=0",
            jobs: vec![fig3_job("fig3-mo", "mo")],
        },
        "fig3-mu" => Preset {
            name: "fig3-mu",
            description: "charger–battery, Markovian underdamped: γ₀=0.1ω₀, λ=10ω₀, κ=0.2ω₀; T=0",
            jobs: vec![fig3_job("fig3-mu", "mu")],
        },
        "fig3-nmo" => Preset {
            name: "fig3-nmo",
            description: "charger–battery, non-Markovian overdamped: γ₀=10ω₀, λ=ω₀, κ=0.001ω₀; T=0",
            jobs: vec![fig3_job("fig3-nmo", "nmo")],
        },
        "fig3-nmu" => Preset {
            name: "fig3-nmu",
            description: "charger–battery, non-Markovian underdamped: γ₀=0.1ω₀, λ=0.01ω₀, κ=0.2ω₀; T=0",
            jobs: vec![fig3_job("fig3-nmu", "nmu")],
        },
        "fig4a" => Preset {
            name: "fig4a",
            description: "power and geometric bound, Markovian overdamped (same dynamics as fig3-mo)",
            jobs: vec![fig3_job("fig4a", "mo")],
        },
        "fig4b" => Preset {
            name: "fig4b",
            description: "power and geometric bound, Markovian underdamped (same dynamics as fig3-mu)",
            jobs: vec![fig3_job("fig4b", "mu")],
        },
        "fig4c" => Preset {
            name: "fig4c",
            description: "power and geometric bound, non-Markovian overdamped (same dynamics as fig3-nmo)",
            jobs: vec![fig3_job("fig4c", "nmo")],
        },
        "fig4d" => Preset {
            name: "fig4d",
            description: "power and geometric bound, non-Markovian underdamped (same dynamics as fig3-nmu)",
            jobs: vec![fig3_job("fig4d", "nmu")],
        },
        "fig5" => Preset {
            name: "fig5",
            description: "finite-T strongly driven pair (η=10ω₀, κ=50ω₀, N=5, βω₀=0.1): \
                          non-Markovian (λ=0.01ω₀) vs Markovian (λ=10ω₀) underdamped reservoir",
            jobs: vec![
                fig5_job("fig5-nm", 0.01, InitialKet::ExcitedGround),
                fig5_job("fig5-m", 10.0, InitialKet::ExcitedGround),
            ],
        },
        "fig6a" => Preset {
            name: "fig6a",
            description: "fig5 non-Markovian reservoir, initial |+⟩⊗|+⟩ (coherence in both)",
            jobs: vec![fig6_job("fig6a", InitialKet::PlusPlus)],
        },
        "fig6b" => Preset {
            name: "fig6b",
            description: "fig5 non-Markovian reservoir, initial |+⟩⊗|0⟩ (coherent charger)",
            jobs: vec![fig6_job("fig6b", InitialKet::PlusGround)],
        },
        "fig6c" => Preset {
            name: "fig6c",
            description: "fig5 non-Markovian reservoir, initial |1⟩⊗|+⟩ (coherent battery)",
            jobs: vec![fig6_job("fig6c", InitialKet::ExcitedPlus)],
        },
        _ => return None,
    };
    Some(p)
}
