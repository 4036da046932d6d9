//! Tolerances used by state validation and self-checks.
//!
//! These are fixed here rather than scattered as magic numbers so the
//! invariants enforced by constructors match the ones quoted in the tests.

/// Normalization tolerance for pure states: |Σ|c|² + tail − 1|.
pub const PURE_NORM: f64 = 1e-10;

/// Normalization tolerance for the brute-force propagation states, which
/// accumulate only a handful of rounding steps per splitter.
pub const ORACLE_NORM: f64 = 1e-12;

/// Unit-norm tolerance for split vectors: |Σ τ² − 1|.
pub const SPLIT_UNIT: f64 = 1e-12;

/// Hermiticity tolerance for density matrices: max |ρ − ρ†| entrywise.
pub const HERMITICITY: f64 = 1e-10;

/// Trace tolerance for density matrices: |tr ρ − 1|.
pub const TRACE: f64 = 1e-10;

/// Diagnostic positive-semidefiniteness floor: smallest eigenvalue ≥ −PSD.
pub const PSD: f64 = 1e-9;

/// Mixture weight tolerance: |Σ p_n + tail − 1|.
pub const MIXTURE_WEIGHT: f64 = 1e-10;

/// Default certified truncation budget for infinite-dimensional inputs.
pub const DEFAULT_TAIL_EPSILON: f64 = 1e-12;

/// Relative change threshold below which a quadrature refinement is
/// considered converged.
pub const QUADRATURE_CONVERGENCE: f64 = 1e-6;
