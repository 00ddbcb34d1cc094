//! Sparse diagonal canonical correlation analysis by sampling the span of the
//! leading singular vectors.
//!
//! Given a cross-covariance `M` (m×n), the solver approximately maximizes
//! `uᵀ M v` over unit vectors `u`, `v` drawn from structured feasible sets
//! (cardinality, group sparsity, or the whole sphere). It works on a rank-`r`
//! surrogate `B` of `M`: each round samples a point on the `r`-sphere, maps it
//! into the range of `B`, and solves two exact projection problems. The best
//! of `T` rounds is returned together with the data-dependent bound terms.
//!
//! [`oracles`] provides exhaustive and thresholding reference solvers.

pub mod cli;
pub mod dense;
pub mod error;
pub mod linalg;
pub mod matrix_io;
pub mod oracles;
pub mod projections;
pub mod rng;
pub mod solver;

pub use dense::Matrix;
pub use error::{Error, Result};
pub use linalg::{RankRFactors, SpectralEstimates, SvdOptions};
pub use matrix_io::{CrossCov, DataMatrix};
pub use oracles::OracleResult;
pub use projections::{ConstraintSpec, Groups, Projection, SparseVector};
pub use solver::{Candidate, Samples, SolveReport, SolverConfig};
