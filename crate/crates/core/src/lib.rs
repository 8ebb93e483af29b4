//! Fluid-structure interaction on periodic staggered grids.
//!
//! Implements the conventional staggered-grid immersed-boundary method
//! (IBMAC) and the divergence-free variant (DFIB) in which velocity
//! interpolation goes through a discrete vector potential and force
//! spreading is the adjoint of that interpolation. The fluid solver is a
//! spectral Crank-Nicolson / Adams-Bashforth scheme on a fully periodic
//! domain.

pub mod coupling;
pub mod diagnostics;
pub mod fluid;
pub mod grid;
pub mod kernels;
pub mod poisson;
pub mod scenario;
pub mod stepper;
pub mod structures;

pub use error::{Error, Result};

mod error {
    use thiserror::Error;

    #[derive(Debug, Error)]
    pub enum Error {
        #[error("grid geometry mismatch: {0}")]
        GeometryMismatch(String),
        #[error("expected a scalar field (Cell or Node), got {0}")]
        ScalarInputExpected(String),
        #[error("expected a vector field (Face or Edge), got {0}")]
        VectorInputExpected(String),
        #[error("subgrid {0} not valid for this operation")]
        InvalidSubgrid(String),
        #[error("invalid grid geometry: {0}")]
        InvalidGeometry(String),
        #[error("Poisson right-hand side has non-zero mean {mean:e} (tolerance {tol:e})")]
        NonZeroMeanRhs { mean: f64, tol: f64 },
        #[error("time step must be positive, got {0}")]
        ZeroDt(f64),
        #[error("input velocity is not discretely divergence-free (residual {0:e})")]
        NonDivFreeInput(f64),
        #[error("adjacent markers coincide (segment {0})")]
        DegenerateSegment(usize),
        #[error("degenerate (zero-area) face {0}")]
        DegenerateFace(usize),
        #[error("periodic spline system is singular")]
        SplineSingular,
        #[error("time step requires AB2 history; run the bootstrap step first")]
        MissingHistory,
        #[error("config error: {0}")]
        Config(String),
    }

    pub type Result<T> = std::result::Result<T, Error>;
}
