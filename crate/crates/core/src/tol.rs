//! Centralized numerical tolerances.
//!
//! Three tiers, ordered: construction invariants are checked at machine-level
//! accuracy, quantities derived through longer floating-point chains get an
//! order of magnitude more slack, and eigenvalue positivity (which goes
//! through an iterative solver) gets another one.

/// Construction-time invariants: normalization, orthonormality, completeness.
pub const CONSTRUCTION: f64 = 1e-12;

/// Derived-quantity invariants: traces, Hermiticity of products, cross-route
/// agreement between independent evaluations.
pub const DERIVED: f64 = 1e-10;

/// Floor for eigenvalue positivity checks.
pub const EIGEN_FLOOR: f64 = 1e-8;

/// Tolerance bundle for constructors that allow overriding the defaults.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub construction: f64,
    pub derived: f64,
    pub eigen_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            construction: CONSTRUCTION,
            derived: DERIVED,
            eigen_floor: EIGEN_FLOOR,
        }
    }
}
