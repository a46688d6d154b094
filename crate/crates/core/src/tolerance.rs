//! Numerical tolerances shared by every module.
//!
//! All quantities handled by the crate are O(1), so plain `f64` leaves at
//! least five digits of headroom below these thresholds.

/// Physics-level checks: Hermiticity of observables, dichotomy, effect
/// completeness, positivity floors and expectation imaginary residuals.
pub const PHYSICS: f64 = 1e-10;

/// Pure algebra identities (associativity, trace factorization, ...).
pub const ALGEBRA: f64 = 1e-12;

/// Smallest outcome probability a Lüders update will condition on.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Below this an SOS normalization `omega` is treated as singular.
pub const DEGENERATE_OMEGA: f64 = 1e-8;

/// Margin applied to `S > bound` so that a value sitting on the classical
/// bound up to rounding is not reported as a violation.
pub const VIOLATION_MARGIN: f64 = 1e-10;
