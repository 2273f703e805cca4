//! Rényi entropies along trajectories.
