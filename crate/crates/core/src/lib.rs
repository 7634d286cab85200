//! Kernel dynamic mode decomposition.
//!
//! Snapshot pairs `(x_i, F(x_i))` of a discrete dynamical system define a
//! finite-rank representation of the Koopman operator `K_F g = g o F` on a
//! reproducing kernel Hilbert space. Its eigenvalues, eigenfunctions and
//! modes give a linear model of the (possibly nonlinear) dynamics:
//!
//! ```text
//! x_{i+1} ~ Re sum_j xi_j lambda_j^i phi_j(x_1)
//! ```
//!
//! The Koopman operator over an RKHS is in general only densely defined and
//! unbounded; nothing here assumes compactness. All computations go through
//! kernel evaluations, never explicit feature vectors.
//!
//! ```
//! use kdmd::{fit, reconstruct, KernelSpec, RegularizationPolicy, SnapshotSet};
//! use nalgebra::DMatrix;
//!
//! // a quarter-turn rotation visiting four points
//! let x = DMatrix::from_column_slice(2, 5, &[1., 0., 0., 1., -1., 0., 0., -1., 1., 0.]);
//! let snapshots = SnapshotSet::time_series(x).unwrap();
//! let model = fit(&snapshots, &KernelSpec::gaussian_rbf(2.0), &RegularizationPolicy::none()).unwrap();
//! let forecast = reconstruct(&model, 8).unwrap();
//! assert!((forecast.states[(0, 4)] - 1.0).abs() < 1e-6);
//! ```

pub mod error;
pub mod forecast;
pub mod io;
pub mod kernels;
pub mod koopman;
pub mod numerics;
pub mod synth;
pub mod vvrkhs;

pub use error::{DmdError, Result};
pub use forecast::{eigen_residuals, pointwise_error_bound, predict_from, reconstruct, Forecast};
pub use kernels::{KernelKind, KernelSpec};
pub use koopman::{eigenfunction_values, fit, modes, KoopmanModel, SnapshotSet};
pub use numerics::{
    eig_general, project, solve_gram, Eigensystem, RegularizationKind, RegularizationPolicy,
};
pub use vvrkhs::{block_gram, fit_vector_valued, BlockGram};
