//! Simulation kernel for open quantum batteries.
//!
//! The crate computes, along the evolution of a small open quantum system,
//! the maximum extractable work, the charging power, and three upper bounds
//! on that power:
//!
//! - the geometric bound `σ_𝒜 √I_Q` (activity-operator fluctuation times the
//!   quantum Fisher information speed),
//! - its extension `σ_𝒜 √I_Q_ext` built from the non-Hermitian logarithmic
//!   derivative of the dissipative flow,
//! - the thermodynamic form `W_diss + β⁻¹|dS_irr/dt|` in terms of dissipative
//!   work and irreversible entropy production.
//!
//! Two concrete systems are bundled in [`models`]: a three-qubit XX chain
//! whose middle qubit acts as the battery (closed-form evolution), and a
//! driven charger–battery qubit pair whose battery couples to a Lorentzian
//! dissipative/heating reservoir with time-dependent rates (integrated with
//! fixed-step RK4).
//!
//! All operators are dense complex matrices of dimension ≤ 8; see [`qmat`]
//! for the matrix kernel. The crate is `no_std`-compatible (requires `alloc`);
//! the `std` feature (default) only switches the float backend.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod bounds;
pub mod dynamics;
pub mod models;
pub mod qgeom;
pub mod qmat;
pub mod testkit;
pub mod thermo;

pub use num_complex::Complex64;
