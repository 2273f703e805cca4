//! Whole-trajectory evolution and ensemble runners.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::product::{projective_layer, weak_layer, BornState, StabilizedProduct};
use super::{CircuitConfig, CircuitError, Model, SingularSpectrum};
use crate::numerics::ensembles::sample_ginibre;
use crate::numerics::linalg::{C64, GradedColumns};
use crate::numerics::rng::RngStream;

/// Everything recorded along one quantum trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub stream_id: u64,
    /// Subsampled singular spectra of the running Kraus product.
    pub spectra: Vec<SingularSpectrum>,
    /// Running log Born probability of the trajectory's outcome record
    /// (absent for the weak model, which has no outcome convention here).
    pub born_log_prob: Option<f64>,
    /// Per-layer conditional log factors, log p(m_t | m_{<t}).
    pub born_log_factors: Vec<f64>,
    /// Qubits measured in each layer.
    pub outcome_counts: Vec<u32>,
    /// First step at which the product rank reached 1 (Model I).
    pub stopping_time: Option<u64>,
}

impl TrajectoryRecord {
    pub fn spectrum_at(&self, t: u64) -> Option<&SingularSpectrum> {
        self.spectra.iter().find(|s| s.t == t)
    }
}

/// Evolve one trajectory for `cfg.t_max` steps (or to rank collapse for
/// Model I), recording subsampled spectra and the running Born probability.
pub fn run_trajectory(cfg: &CircuitConfig, stream_id: u64) -> Result<TrajectoryRecord, CircuitError> {
    cfg.validate()?;
    let mut rng = RngStream::new(cfg.seed, stream_id);
    let record_at = cfg.record.times(cfg.t_max);
    let mut next_record = 0usize;
    let mut state = StabilizedProduct::identity(cfg.n());
    let mut born = match cfg.model {
        Model::Weak => None,
        _ => Some(BornState::ground(cfg.n())),
    };
    let mut rec = TrajectoryRecord {
        stream_id,
        spectra: Vec::with_capacity(record_at.len()),
        born_log_prob: None,
        born_log_factors: Vec::new(),
        outcome_counts: Vec::new(),
        stopping_time: None,
    };
    for t in 1..=cfg.t_max {
        let meta = match cfg.model {
            Model::Weak => weak_layer(&mut state, cfg, &mut rng)?,
            _ => projective_layer(&mut state, &mut born, cfg, &mut rng)?,
        };
        rec.outcome_counts.push(meta.measured);
        let mut record_now = false;
        while next_record < record_at.len() && record_at[next_record] <= t {
            record_now |= record_at[next_record] == t;
            next_record += 1;
        }
        let collapsed = cfg.model == Model::ModelI && state.rank() == 1;
        if record_now || collapsed {
            rec.spectra.push(SingularSpectrum::new(t, state.log_r().to_vec(), cfg.rank_floor));
        }
        if collapsed {
            rec.stopping_time = Some(t);
            break;
        }
    }
    if let Some(b) = born {
        rec.born_log_prob = Some(b.log_p);
        rec.born_log_factors = b.log_factors;
    }
    Ok(rec)
}

/// Run `cfg.n_traj` independent trajectories in parallel. Stream ids are
/// trajectory indices, so results do not depend on the worker count.
pub fn run_ensemble(cfg: &CircuitConfig) -> Result<Vec<TrajectoryRecord>, CircuitError> {
    cfg.validate()?;
    (0..cfg.n_traj)
        .into_par_iter()
        .map(|id| run_trajectory(cfg, id))
        .collect()
}

/// Monte-Carlo mean and standard error of the Model I rank-collapse
/// stopping time.
///
/// Uses the combinatorial shortcut: a layer wipes out the rank iff all L
/// qubits are measured, an event of probability p^L i.i.d. across layers,
/// so the stopping time is geometric and no matrix algebra is needed.
pub fn rank_collapse_time_mc(cfg: &CircuitConfig) -> Result<(f64, f64), CircuitError> {
    cfg.validate()?;
    if cfg.model != Model::ModelI {
        return Err(CircuitError::InvalidConfig(
            "rank-collapse sampling applies to Model I only".into(),
        ));
    }
    if cfg.p == 0.0 {
        return Err(CircuitError::InfiniteStoppingTime);
    }
    let q = cfg.p.powi(cfg.l as i32);
    let n = cfg.n_traj.max(1);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    let mut rng = RngStream::new(cfg.seed, 0);
    for _ in 0..n {
        let t = if q >= 1.0 {
            1.0
        } else {
            let u: f64 = rng.random::<f64>();
            // inverse-CDF geometric sample on {1, 2, ...}
            ((1.0 - u).ln() / (1.0 - q).ln()).ceil().max(1.0)
        };
        sum += t;
        sum2 += t * t;
    }
    let mean = sum / n as f64;
    let var = (sum2 / n as f64 - mean * mean).max(0.0);
    let stderr = (var / n as f64).sqrt();
    Ok((mean, stderr))
}

/// Spectra of products of rescaled Ginibre matrices
/// G(t) = B_{t−1} ... B_1, B = A/√N: the thermodynamic-limit proxy for
/// Model II Kraus products at rank M.
///
/// The time convention matches the circuit: G(1) is the identity, so the
/// spectrum at time t reflects t−1 Ginibre factors.
pub fn ginibre_product_spectra(
    m: usize,
    n_scale: usize,
    t_max: u64,
    n_traj: u64,
    seed: u64,
    record: &super::RecordSchedule,
) -> Result<Vec<TrajectoryRecord>, CircuitError> {
    let record_at = record.times(t_max);
    (0..n_traj)
        .into_par_iter()
        .map(|id| {
            let mut rng = RngStream::new(seed, id);
            let mut graded = GradedColumns::identity(m);
            let scale = C64::new(1.0 / (n_scale as f64).sqrt(), 0.0);
            let mut spectra = Vec::with_capacity(record_at.len());
            if record_at.contains(&1) {
                spectra.push(SingularSpectrum::new(1, vec![0.0; m], 200.0));
            }
            for t in 2..=t_max {
                let b = sample_ginibre(m, m, &mut rng) * scale;
                graded.apply_left(m, |q| &b * q)?;
                if record_at.contains(&t) {
                    spectra.push(SingularSpectrum::new(t, graded.log_singular_values().to_vec(), 200.0));
                }
            }
            Ok(TrajectoryRecord {
                stream_id: id,
                spectra,
                born_log_prob: None,
                born_log_factors: Vec::new(),
                outcome_counts: Vec::new(),
                stopping_time: None,
            })
        })
        .collect()
}
