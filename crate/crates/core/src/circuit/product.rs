//! The numerically stabilized running Kraus product and single-layer steps.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Bernoulli, Distribution};

use super::{CircuitConfig, CircuitError, Model, OutcomePolicy};
use crate::numerics::ensembles::{sample_haar_corner, sample_haar_unitary};
use crate::numerics::linalg::{C64, CMatrix, GradedColumns};
use crate::numerics::rng::RngStream;

/// Per-layer bookkeeping returned by the step functions.
#[derive(Debug, Clone)]
pub struct LayerMeta {
    /// Number of qubits measured in this layer.
    pub measured: u32,
    /// Dimension of the projector image (2^{L−measured}); N for weak layers.
    pub pattern_dim: usize,
    /// log of the conditional Born factor for this layer, when a state
    /// vector is being tracked.
    pub born_log_factor: Option<f64>,
}

/// Row space of the compressed product representation.
#[derive(Debug, Clone, PartialEq, Eq)]
enum ImageSpace {
    /// Full computational basis.
    Full,
    /// Leading-index projector image of the given dimension (fixed-outcome
    /// gauge; any fixed pattern is equivalent by Haar invariance).
    Leading(usize),
    /// Explicit row indices of the projector image (sampled outcomes).
    Rows(Vec<usize>),
}

impl ImageSpace {
    fn dim(&self, n: usize) -> usize {
        match self {
            ImageSpace::Full => n,
            ImageSpace::Leading(r) => *r,
            ImageSpace::Rows(rows) => rows.len(),
        }
    }
}

/// QR-stabilized running Kraus product.
///
/// The product is held as `Q · diag(e^{log_r}) · Ω†` with orthonormal `Q`
/// and the irrelevant right unitary factor dropped, so `log_r` are the
/// exact log singular values at every step regardless of how far they
/// spread. For projective models the rows of `Q` live in the image of the
/// most recent measurement layer, never the full space.
#[derive(Debug, Clone)]
pub struct StabilizedProduct {
    graded: GradedColumns,
    t: u64,
    image: ImageSpace,
}

impl StabilizedProduct {
    /// The identity product at t = 0 on the full N-dimensional space.
    pub fn identity(n: usize) -> Self {
        Self { graded: GradedColumns::identity(n), t: 0, image: ImageSpace::Full }
    }

    /// Current orthonormal frame (the left factor `Q`).
    pub fn frame(&self) -> &CMatrix {
        &self.graded.cols
    }

    /// Accumulated log-scale factors = exact log singular values, descending.
    pub fn log_r(&self) -> &[f64] {
        self.graded.log_singular_values()
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn rank(&self) -> usize {
        self.graded.rank()
    }

    fn check_rank(&self) -> Result<(), CircuitError> {
        if self.rank() == 0 {
            Err(CircuitError::RankZero)
        } else {
            Ok(())
        }
    }
}

/// One projective step: a Haar unitary layer then a measurement layer, with
/// re-orthonormalization of the running product.
pub fn step_projective(
    state: &mut StabilizedProduct,
    cfg: &CircuitConfig,
    rng: &mut RngStream,
) -> Result<LayerMeta, CircuitError> {
    let mut no_state = None;
    projective_layer(state, &mut no_state, cfg, rng)
}

/// One weak-measurement step: a Haar unitary layer followed by the
/// tensor-product weak layer on the pL designated qubits.
pub fn step_weak(
    state: &mut StabilizedProduct,
    cfg: &CircuitConfig,
    rng: &mut RngStream,
) -> Result<LayerMeta, CircuitError> {
    weak_layer(state, cfg, rng)
}

fn draw_measured_count<R: Rng + ?Sized>(cfg: &CircuitConfig, rng: &mut R) -> u32 {
    match cfg.model {
        Model::ModelI => {
            if cfg.p == 0.0 {
                return 0;
            }
            let bern = Bernoulli::new(cfg.p).expect("validated p");
            (0..cfg.l).filter(|_| bern.sample(rng)).count() as u32
        }
        Model::ModelII | Model::Weak => cfg.measured_per_layer(),
    }
}

/// Tracked pure state for Born-probability accumulation. With fixed
/// outcomes the amplitudes live in the current projector image; with
/// sampled outcomes they are carried in the image coordinates as well, but
/// the full unitary connects them.
#[derive(Debug, Clone)]
pub struct BornState {
    pub psi: DVector<C64>,
    pub log_p: f64,
    pub log_factors: Vec<f64>,
}

impl BornState {
    /// |0...0> in the full computational basis.
    pub fn ground(n: usize) -> Self {
        let mut psi = DVector::zeros(n);
        psi[0] = C64::new(1.0, 0.0);
        Self { psi, log_p: 0.0, log_factors: Vec::new() }
    }

    fn absorb(&mut self, unnormalized: DVector<C64>) {
        let norm = unnormalized.norm();
        let factor = norm * norm;
        self.log_p += factor.ln();
        self.log_factors.push(factor.ln());
        self.psi = unnormalized / C64::new(norm, 0.0);
    }
}

pub(super) fn projective_layer(
    state: &mut StabilizedProduct,
    born: &mut Option<BornState>,
    cfg: &CircuitConfig,
    rng: &mut RngStream,
) -> Result<LayerMeta, CircuitError> {
    state.check_rank()?;
    let n = cfg.n();
    let measured = draw_measured_count(cfg, rng);
    let r_new = 1usize << (cfg.l - measured);
    match cfg.outcomes {
        OutcomePolicy::FixedPlus => {
            let r_old = state.graded.dim();
            // corner block of a Haar unitary connecting the old projector
            // image to the new one
            let block = sample_haar_corner(n, r_new, r_old, rng);
            if state.t == 0 {
                // P U applied to the identity has orthonormal rows: all M
                // singular values equal 1 in the image basis.
                state.graded = GradedColumns::identity(r_new);
            } else {
                state.graded.apply_left(r_new, |q| &block * q)?;
            }
            if let Some(b) = born {
                b.absorb(&block * &b.psi);
            }
            state.image = ImageSpace::Leading(r_new);
        }
        OutcomePolicy::Sampled => {
            let u = sample_haar_unitary(n, rng);
            let b = born.as_mut().ok_or_else(|| {
                CircuitError::InvalidConfig("sampled outcomes require a tracked state".into())
            })?;
            // lift the state out of the old image and apply the unitary
            let mut psi: DVector<C64> = match &state.image {
                ImageSpace::Full => &u * &b.psi,
                ImageSpace::Leading(r_old) => &u.columns(0, *r_old) * &b.psi,
                ImageSpace::Rows(rows) => {
                    let mut acc = DVector::zeros(n);
                    for (j, &row) in rows.iter().enumerate() {
                        acc += u.column(row) * b.psi[j];
                    }
                    acc
                }
            };
            // measure the first `measured` qubits one by one
            let mut pattern_bits: usize = 0;
            let mut log_factor = 0.0;
            for q in 0..measured as usize {
                let mut w_up = 0.0;
                let mut total = 0.0;
                for i in 0..n {
                    let w = psi[i].norm_sqr();
                    total += w;
                    if (i >> q) & 1 == 0 {
                        w_up += w;
                    }
                }
                let p_up = (w_up / total).clamp(0.0, 1.0);
                let up = rng.random_bool(p_up);
                log_factor += if up { p_up.ln() } else { (1.0 - p_up).ln() };
                let keep_bit = usize::from(!up);
                pattern_bits |= keep_bit << q;
                for i in 0..n {
                    if (i >> q) & 1 != keep_bit {
                        psi[i] = C64::new(0.0, 0.0);
                    }
                }
            }
            let mask = (1usize << measured) - 1;
            let rows: Vec<usize> = (0..n).filter(|i| i & mask == pattern_bits).collect();
            debug_assert_eq!(rows.len(), r_new);
            // new-image rows, old-image columns of the explicit unitary
            let block = match &state.image {
                ImageSpace::Full => CMatrix::from_fn(r_new, n, |i, j| u[(rows[i], j)]),
                ImageSpace::Leading(r_old) => {
                    CMatrix::from_fn(r_new, *r_old, |i, j| u[(rows[i], j)])
                }
                ImageSpace::Rows(old) => {
                    CMatrix::from_fn(r_new, old.len(), |i, j| u[(rows[i], old[j])])
                }
            };
            let cap = r_new.min(state.rank());
            if state.t == 0 {
                state.graded = GradedColumns::identity(r_new);
            } else {
                state.graded.apply_left(cap, |qm| &block * qm)?;
            }
            let norm = psi.norm();
            let compact = DVector::from_fn(r_new, |i, _| psi[rows[i]] / C64::new(norm, 0.0));
            b.log_p += log_factor;
            b.log_factors.push(log_factor);
            b.psi = compact;
            state.image = ImageSpace::Rows(rows);
        }
    }
    state.t += 1;
    state.check_rank()?;
    Ok(LayerMeta {
        measured,
        pattern_dim: r_new,
        born_log_factor: born.as_ref().and_then(|b| b.log_factors.last().copied()),
    })
}

pub(super) fn weak_layer(
    state: &mut StabilizedProduct,
    cfg: &CircuitConfig,
    rng: &mut RngStream,
) -> Result<LayerMeta, CircuitError> {
    state.check_rank()?;
    if state.image != ImageSpace::Full {
        return Err(CircuitError::InvalidConfig(
            "weak layers act on the full space; do not mix with projective layers".into(),
        ));
    }
    let n = cfg.n();
    let diag = cfg.weak_layer_diagonal();
    let cap = diag.iter().filter(|&&d| d > 0.0).count();
    let u = sample_haar_unitary(n, rng);
    state.graded.apply_left(cap, |q| {
        let mut w = &u * q;
        for j in 0..w.ncols() {
            for i in 0..n {
                w[(i, j)] *= diag[i];
            }
        }
        w
    })?;
    state.t += 1;
    state.check_rank()?;
    Ok(LayerMeta { measured: cfg.measured_per_layer(), pattern_dim: n, born_log_factor: None })
}
