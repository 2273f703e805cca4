//! Lyapunov spectra, purification times, and level densities.
