//! Inverse design of 2D HP lattice proteins, with exact enumeration oracles
//! and simulated quantum-annealing dynamics.
//!
//! The crate is organized around the two halves of the problem:
//!
//! - **Design**: [`lattice`] (structures, contact maps, energies),
//!   [`ising`] (QUBO/Ising encoding and exact spectra), [`enumerate`]
//!   (self-avoiding-walk census, exact folding, designability, the
//!   fixed-composition minimum-energy oracle) and [`design`] (the two-step
//!   optimize-then-fold pipeline).
//! - **Annealing analysis**: [`anneal`] (time-dependent Schrödinger
//!   integration with Crank-Nicolson + conjugate gradients) and [`noise`]
//!   (control-error ensembles and their sweeps).
//!
//! Energies are exact rationals throughout the design half ([`rational`]);
//! floating point appears only inside the simulator and noise ensembles.

pub mod anneal;
pub mod design;
pub mod enumerate;
pub mod error;
pub mod io;
pub mod ising;
pub mod lattice;
pub mod noise;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rat;
