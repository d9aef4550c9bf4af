//! Intrinsic fidelity limits of driven qubit operations.
//!
//! A logical qubit driven by a bosonic mode ends up entangled with it; after
//! the drive is traced out the qubit is mixed, and no target pure state can be
//! reached with fidelity above the largest eigenvalue of the reduced state
//! (its *eigenfidelity*). This crate provides:
//!
//! - [`densmat`]: density matrices, eigenfidelity, purity bounds, Schatten norms,
//!   passive states and effective temperatures.
//! - [`haar`]: seeded Haar-random pure states and Monte Carlo averaging.
//! - [`channel`]: qubit CPTP maps stored by their basis images, average purity,
//!   Choi matrices and average gate fidelity.
//! - [`jcdrive`]: exact Jaynes-Cummings channels for Poisson, binomial, Fock and
//!   custom drives, the second-order expansion and the asymptotic error laws.
//! - [`qsl`]: Mandelstam-Tamm / Margolus-Levitin times and the speed-limited
//!   error bound.
//! - [`experiments`]: parameter sweeps (scaling, concatenation, split pulses).
//!
//! Energies are expressed in units of ħ, i.e. as angular frequencies.

#![forbid(unsafe_code)]

pub mod channel;
pub mod densmat;
pub mod error;
pub mod experiments;
pub mod haar;
pub mod jcdrive;
pub mod qsl;
pub mod validation;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
