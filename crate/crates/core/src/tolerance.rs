//! Numerical tolerances shared by the engines and their tests.

/// Entrywise agreement for exact algebra (products, traces, kron).
pub const ALGEBRA: f64 = 1e-12;

/// Agreement for results of an iterative decomposition.
pub const DECOMPOSITION: f64 = 1e-10;

/// Smallest eigenvalue an operator may have and still count as PSD.
pub const PSD: f64 = -1e-10;

/// Allowed deviation of a POVM sum from the identity.
pub const COMPLETENESS: f64 = 1e-10;

/// Jacobi sweeps stop once the off-diagonal Frobenius mass falls below this.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-14;

/// Hard cap on Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Largest matrix dimension the eigensolver accepts.
pub const MAX_EIG_DIM: usize = 64;
