//! Numeric tolerances shared by the library and its tests.

/// Maximum elementwise deviation of `rho - rho^dagger` for a valid density matrix.
pub const HERMITICITY: f64 = 1e-9;

/// Smallest eigenvalue accepted for a positive semidefinite density matrix.
pub const EIGEN_FLOOR: f64 = -1e-9;

/// Norm tolerance for pure states after normalisation.
pub const NORM: f64 = 1e-10;

/// Allowed mismatch between a density matrix trace and its carried weight.
pub const TRACE: f64 = 1e-9;

/// Maximum norm lost to Fock truncation when building coherent or cat states.
pub const TRUNCATION_DEFICIT: f64 = 1e-6;

/// Entries with magnitude at or below this are treated as structural zeros
/// when deciding which excitation sectors a state occupies.
pub const SUPPORT: f64 = 1e-300;
