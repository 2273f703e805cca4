//! Born-probability distributions.
