//! Numerical tolerances shared by every check in the crate.

/// Structural invariants: normalization, Hermiticity, trace, PSD floor.
pub const STRUCTURAL: f64 = 1e-10;

/// Equalities and inequalities derived through a chain of floating-point
/// operations (fidelity identities, channel monotonicity, bound checks).
pub const DERIVED: f64 = 1e-9;

/// Slack granted to optimizer outputs when compared against an analytic
/// bound.
pub const CERTIFICATE: f64 = 1e-6;

/// Floor on the minimum eigenvalue of `A - B` for `A ⪰ B`.
pub const DOMINANCE: f64 = 1e-9;

/// Unitarity and trace-preservation of supplied operators.
pub const OPERATOR: f64 = 1e-9;

/// Probabilities below this are treated as unreachable branches.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;
