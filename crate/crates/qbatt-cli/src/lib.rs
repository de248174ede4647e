//! Command-line front end for the open-quantum-battery simulation kernel:
//! configuration files, bundled presets, parameter sweeps, and CSV output.

#![deny(unsafe_code)]

pub mod config;
pub mod output;
pub mod runner;
