//! Kraus-operator products for monitored Haar-random dots.
//!
//! A time step is one global Haar-random unitary layer followed by one
//! measurement layer. Model I measures each qubit independently with
//! probability p (the rank of the running product can collapse); Model II
//! measures a fixed set of pL qubits per layer (the rank is pinned at
//! M = 2^{(1-p)L}); the weak model replaces projectors by near-identity
//! single-qubit operators diag(1±ε)/2.
//!
//! Singular-value statistics do not depend on measurement outcomes (the
//! unitary group acts transitively on outcome patterns), so the default
//! policy fixes all outcomes to +1. In that gauge a projective layer acts
//! on the surviving subspace through a k×m corner block of the Haar
//! unitary, which this module samples directly as rows of a Haar isometry;
//! the full 2^L-dimensional unitary is never materialized. Outcome
//! sampling (with the true Born weights) is retained as an explicit policy
//! for equivalence tests; it evolves the full-space product.

mod product;
mod trajectory;

pub use product::{LayerMeta, StabilizedProduct};
pub use trajectory::{
    ginibre_product_spectra, rank_collapse_time_mc, run_ensemble, run_trajectory, TrajectoryRecord,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("rank-zero product: all singular values fell below the floor")]
    RankZero,
    #[error("rank collapse time is infinite for p = 0")]
    InfiniteStoppingTime,
    #[error("Born-probability sampling is not defined for the weak model (no outcome convention)")]
    WeakBornUndefined,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    ModelI,
    ModelII,
    Weak,
}

/// How measurement outcomes are chosen along a trajectory.
///
/// `FixedPlus` pins every outcome to +1; per-layer Born factors then follow
/// the fixed-record ensemble (Beta(M, N−M) for Model II). `Sampled` draws
/// outcomes with their conditional Born probabilities; recorded factors are
/// then size-biased relative to the fixed-record law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OutcomePolicy {
    #[default]
    FixedPlus,
    Sampled,
}

/// Which time steps get a recorded singular spectrum.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RecordSchedule {
    /// Powers of two plus the final step.
    #[default]
    Geometric,
    /// An explicit ascending list of steps.
    Explicit(Vec<u64>),
    /// Every step.
    All,
}

impl RecordSchedule {
    pub fn times(&self, t_max: u64) -> Vec<u64> {
        match self {
            RecordSchedule::Geometric => {
                let mut ts = Vec::new();
                let mut t = 1u64;
                while t < t_max {
                    ts.push(t);
                    t *= 2;
                }
                ts.push(t_max);
                ts
            }
            RecordSchedule::Explicit(ts) => {
                let mut ts: Vec<u64> = ts.iter().copied().filter(|&t| t <= t_max).collect();
                ts.sort_unstable();
                ts.dedup();
                ts
            }
            RecordSchedule::All => (1..=t_max).collect(),
        }
    }
}

/// Full experiment specification for one circuit ensemble.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitConfig {
    /// Qubit count L; the Hilbert space dimension is N = 2^L.
    pub l: u32,
    /// Measurement density p in [0, 1].
    pub p: f64,
    pub model: Model,
    /// Weak-measurement strength ε in [0, 1] (weak model only).
    pub epsilon: f64,
    pub t_max: u64,
    pub n_traj: u64,
    pub seed: u64,
    #[serde(default)]
    pub outcomes: OutcomePolicy,
    #[serde(default)]
    pub record: RecordSchedule,
    /// Modes more than this many natural-log units below σ₁ count as
    /// rank-deficient when reporting ranks.
    #[serde(default = "default_rank_floor")]
    pub rank_floor: f64,
}

fn default_rank_floor() -> f64 {
    200.0
}

impl CircuitConfig {
    pub fn new(l: u32, p: f64, model: Model) -> Result<Self, CircuitError> {
        let cfg = Self {
            l,
            p,
            model,
            epsilon: 0.0,
            t_max: 1,
            n_traj: 1,
            seed: 0,
            outcomes: OutcomePolicy::default(),
            record: RecordSchedule::default(),
            rank_floor: default_rank_floor(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.l == 0 || self.l > 24 {
            return Err(CircuitError::InvalidConfig(format!("L = {} out of range", self.l)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(CircuitError::InvalidConfig(format!("p = {} outside [0,1]", self.p)));
        }
        if matches!(self.model, Model::ModelII | Model::Weak) {
            let pl = self.p * self.l as f64;
            if (pl - pl.round()).abs() > 1e-9 {
                return Err(CircuitError::InvalidConfig(format!(
                    "pL = {pl} must be an integer for this model"
                )));
            }
        }
        if matches!(self.model, Model::Weak) && !(0.0..=1.0).contains(&self.epsilon) {
            return Err(CircuitError::InvalidConfig(format!(
                "epsilon = {} outside [0,1]",
                self.epsilon
            )));
        }
        if self.rank_floor <= 0.0 {
            return Err(CircuitError::InvalidConfig("rank_floor must be positive".into()));
        }
        Ok(())
    }

    /// Hilbert-space dimension N = 2^L.
    pub fn n(&self) -> usize {
        1usize << self.l
    }

    /// Measurements per layer, pL (Model II / weak).
    pub fn measured_per_layer(&self) -> u32 {
        (self.p * self.l as f64).round() as u32
    }

    /// Kraus rank M = 2^{(1−p)L} for Model II.
    pub fn m_rank(&self) -> usize {
        1usize << (self.l - self.measured_per_layer())
    }

    /// Single-qubit weak layer factors on the computational basis, outcome
    /// +1 on every measured qubit: entry i is Π_q (1 ± ε)/2.
    pub fn weak_layer_diagonal(&self) -> Vec<f64> {
        let n = self.n();
        let k = self.measured_per_layer();
        let up = 0.5 * (1.0 + self.epsilon);
        let down = 0.5 * (1.0 - self.epsilon);
        (0..n)
            .map(|i| {
                let mut d = 1.0;
                for q in 0..k {
                    d *= if (i >> q) & 1 == 0 { up } else { down };
                }
                d
            })
            .collect()
    }
}

/// Singular spectrum of the running product at one recorded step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularSpectrum {
    pub t: u64,
    /// log σ_n, descending.
    pub log_sigma: Vec<f64>,
    /// Modes within `rank_floor` log units of σ₁.
    pub rank: usize,
}

impl SingularSpectrum {
    pub fn new(t: u64, log_sigma: Vec<f64>, rank_floor: f64) -> Self {
        debug_assert!(log_sigma.windows(2).all(|w| w[0] >= w[1]));
        let top = log_sigma.first().copied().unwrap_or(f64::NEG_INFINITY);
        let rank = log_sigma.iter().filter(|&&s| top - s < rank_floor).count();
        Self { t, log_sigma, rank }
    }

    /// ν(t) = σ₂²/σ₁², the purity deficit ratio.
    pub fn log_nu(&self) -> Option<f64> {
        if self.log_sigma.len() >= 2 {
            Some(2.0 * (self.log_sigma[1] - self.log_sigma[0]))
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_non_integer_pl() {
        let r = CircuitConfig::new(3, 0.5, Model::ModelII);
        assert!(matches!(r, Err(CircuitError::InvalidConfig(_))));
        assert!(CircuitConfig::new(3, 1.0 / 3.0, Model::ModelII).is_ok());
        assert!(CircuitConfig::new(3, 0.5, Model::ModelI).is_ok());
    }

    #[test]
    fn derived_quantities() {
        let cfg = CircuitConfig::new(6, 0.5, Model::ModelII).unwrap();
        assert_eq!(cfg.n(), 64);
        assert_eq!(cfg.measured_per_layer(), 3);
        assert_eq!(cfg.m_rank(), 8);
    }

    #[test]
    fn geometric_schedule() {
        assert_eq!(RecordSchedule::Geometric.times(10), vec![1, 2, 4, 8, 10]);
        assert_eq!(RecordSchedule::Geometric.times(8), vec![1, 2, 4, 8]);
    }

    #[test]
    fn weak_layer_diagonal_multiset() {
        // L=2, p=1/2, ε=0.3: one measured qubit; eigenvalues {1.3/2 x2, 0.7/2 x2}
        let mut cfg = CircuitConfig::new(2, 0.5, Model::Weak).unwrap();
        cfg.epsilon = 0.3;
        let mut d = cfg.weak_layer_diagonal();
        d.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let want = [0.65, 0.65, 0.35, 0.35];
        for (a, b) in d.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn spectrum_rank_uses_floor() {
        let s = SingularSpectrum::new(3, vec![0.0, -1.0, -250.0], 200.0);
        assert_eq!(s.rank, 2);
        assert_eq!(s.log_nu(), Some(-2.0));
    }
}
