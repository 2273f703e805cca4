//! Simulation and analytics for monitored Haar-random quantum dots.
//!
//! A "dot" is a register of `L` qubits evolved by alternating layers of
//! global Haar-random unitaries and single-qubit measurements. The library
//! simulates the resulting Kraus-operator products along quantum
//! trajectories, extracts singular-value statistics (Lyapunov spectra,
//! purification times, Born probabilities, Rényi entropies), and evaluates
//! the matching closed-form predictions, including the exactly solvable
//! Fokker-Planck description of the weak-measurement variant.

pub mod born;
pub mod circuit;
pub mod density;
pub mod entropy;
pub mod numerics;
pub mod spectral;
pub mod weak;

pub use numerics::linalg::{CMatrix, C64};
pub use numerics::rng::RngStream;
