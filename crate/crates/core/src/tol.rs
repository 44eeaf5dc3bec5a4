//! Numerical thresholds shared across modules.

/// Absolute slack allowed in the triangle inequality and symmetry checks.
pub const METRIC: f64 = 1e-9;

/// Two dictionary evaluations closer than this do not separate points.
pub const SEPARATION: f64 = 1e-9;

/// Rank threshold (relative to the largest singular value) for span tests.
pub const RANK: f64 = 1e-9;

/// An LP optimum above this counts as a strict inequality (hull exclusion,
/// exposure margin, non-betweenness). All such LPs normalize coefficients
/// by a unit box or the unit sup-norm ball, so one absolute cutoff suffices.
pub const STRICT: f64 = 1e-7;

/// Gap in `f − φ` below which two values are considered tied.
pub const TIE: f64 = 1e-9;

/// Primal feasibility tolerance of the simplex kernel.
pub const LP_FEASIBILITY: f64 = 1e-8;

/// Smallest admissible pivot element in the simplex kernel.
pub const LP_PIVOT: f64 = 1e-10;

/// Relative tolerance for Gâteaux difference quotients.
pub const GATEAUX: f64 = 1e-6;
