//! Weak-measurement theory.
