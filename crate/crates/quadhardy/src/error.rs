//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide error enum.
///
/// Validation failures (wrong shapes, broken structural invariants) and
/// numeric failures (singular blocks, overflow, aliasing) are kept as
/// separate variants so callers can map them to distinct exit paths.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix or vector had the wrong shape for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// `S^T J S - J` exceeded the allowed residual.
    #[error("matrix is not symplectic: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotSymplectic { residual: f64, tol: f64 },

    /// A matrix that must be symmetric was not, beyond tolerance.
    #[error("matrix is not symmetric: asymmetry {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotSymmetric { residual: f64, tol: f64 },

    /// A matrix that must be positive definite had a non-positive spectrum.
    #[error("matrix is not positive definite: smallest eigenvalue {min_eig:.3e}")]
    NotPositiveDefinite { min_eig: f64 },

    /// A block that must be invertible was numerically singular.
    #[error("singular block: |det| = {det_abs:.3e} is at or below the floor {floor:.3e}")]
    SingularBlock { det_abs: f64, floor: f64 },

    /// An operation that requires a free symplectic matrix (invertible
    /// upper-right block) was handed one that is not free.
    #[error("matrix is not free: |det B| = {det_b_abs:.3e} is at or below the floor {floor:.3e}")]
    NotFree { det_b_abs: f64, floor: f64 },

    /// A scalar argument was out of its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A computation produced non-finite entries.
    #[error("numeric overflow: {0}")]
    NumericOverflow(String),

    /// Sampled data does not live on the lattice the operation expects.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Too much signal energy near the window edge for a trustworthy
    /// discrete transform.
    #[error("aliasing detected: {0}")]
    Aliasing(String),

    /// A computed object failed its own post-condition residual check,
    /// usually a sign of severe ill-conditioning in the input.
    #[error("{what}: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    VerificationFailed {
        what: String,
        residual: f64,
        tol: f64,
    },

    /// A claimed phase-space decay bound failed at a lattice point.
    #[error(
        "decay bound violated at (x, xi) = ({x:.6}, {xi:.6}): |W| = {wigner_abs:.6e} exceeds bound {bound:.6e}"
    )]
    DecayViolation {
        x: f64,
        xi: f64,
        wigner_abs: f64,
        bound: f64,
    },

    /// An underlying write or read failed while dumping grids.
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
