//! Shared numerical machinery: complex dense linear algebra, random-matrix
//! ensembles, special functions, quadrature, and reproducible RNG streams.

pub mod ensembles;
pub mod linalg;
pub mod quad;
pub mod rng;
pub mod special;
