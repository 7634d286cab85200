//! Dense linear algebra used by the decomposition: regularized solves against
//! Gram matrices, RKHS projection weights, and the general real eigensolver.

mod eig;
mod schur;

pub use eig::{eig_general, Eigensystem};

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{DmdError, Result};
use crate::kernels::{self, KernelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularizationKind {
    /// Solve `(G + lambda * s_max * I) W = B`, `s_max` the largest Gram eigenvalue.
    Tikhonov,
    /// Pseudo-inverse discarding eigenvalues below `svd_rtol * s_max`.
    TruncatedSvd,
    /// Exact solve; numerically singular systems are rejected.
    None,
}

impl RegularizationKind {
    pub fn name(self) -> &'static str {
        match self {
            RegularizationKind::Tikhonov => "tikhonov",
            RegularizationKind::TruncatedSvd => "truncated_svd",
            RegularizationKind::None => "none",
        }
    }
}

impl fmt::Display for RegularizationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegularizationKind {
    type Err = DmdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tikhonov" => Ok(RegularizationKind::Tikhonov),
            "truncated_svd" | "tsvd" | "svd" => Ok(RegularizationKind::TruncatedSvd),
            "none" => Ok(RegularizationKind::None),
            other => Err(DmdError::input(format!("unknown regularization '{other}'"))),
        }
    }
}

/// How the (typically ill-conditioned) Gram systems are solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizationPolicy {
    pub kind: RegularizationKind,
    /// Relative to the largest Gram eigenvalue.
    pub tikhonov_lambda: f64,
    /// Relative singular-value cutoff in `[0, 1)`.
    pub svd_rtol: f64,
}

impl Default for RegularizationPolicy {
    fn default() -> Self {
        RegularizationPolicy::tikhonov(1e-10)
    }
}

impl RegularizationPolicy {
    pub fn tikhonov(lambda: f64) -> Self {
        RegularizationPolicy {
            kind: RegularizationKind::Tikhonov,
            tikhonov_lambda: lambda,
            svd_rtol: 1e-12,
        }
    }

    pub fn truncated_svd(rtol: f64) -> Self {
        RegularizationPolicy {
            kind: RegularizationKind::TruncatedSvd,
            tikhonov_lambda: 0.0,
            svd_rtol: rtol,
        }
    }

    pub fn none() -> Self {
        RegularizationPolicy {
            kind: RegularizationKind::None,
            tikhonov_lambda: 0.0,
            svd_rtol: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tikhonov_lambda.is_finite() && self.tikhonov_lambda >= 0.0) {
            return Err(DmdError::input(format!(
                "tikhonov lambda must be nonnegative, got {}",
                self.tikhonov_lambda
            )));
        }
        if !(self.svd_rtol >= 0.0 && self.svd_rtol < 1.0) {
            return Err(DmdError::input(format!(
                "svd rtol must lie in [0, 1), got {}",
                self.svd_rtol
            )));
        }
        Ok(())
    }
}

/// Reciprocal condition number below which a system counts as singular.
fn singular_rcond(p: usize) -> f64 {
    (p.max(1) as f64) * f64::EPSILON
}

/// Solves `G W = B` for a symmetric positive semidefinite `G` under `policy`.
pub fn solve_gram(
    g: &DMatrix<f64>,
    b: &DMatrix<f64>,
    policy: &RegularizationPolicy,
) -> Result<DMatrix<f64>> {
    policy.validate()?;
    let p = g.nrows();
    if !g.is_square() || p == 0 {
        return Err(DmdError::input(format!(
            "gram matrix must be square and non-empty, got {}x{}",
            g.nrows(),
            g.ncols()
        )));
    }
    if b.nrows() != p {
        return Err(DmdError::input(format!(
            "right-hand side has {} rows, gram matrix is {p}x{p}",
            b.nrows()
        )));
    }
    let scale = g.amax();
    let asym = (g - g.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(DmdError::input(format!(
            "gram matrix is not symmetric (max asymmetry {asym:.3e})"
        )));
    }

    match policy.kind {
        RegularizationKind::None => {
            let spectrum = g.clone().symmetric_eigenvalues();
            let s_max = spectrum.amax();
            let s_min = spectrum.min();
            if s_max == 0.0 || s_min <= singular_rcond(p) * s_max {
                return Err(DmdError::Singular {
                    context: format!("{p}x{p} gram matrix without regularization"),
                    condition: condition(s_max, s_min),
                });
            }
            if let Some(chol) = g.clone().cholesky() {
                return Ok(chol.solve(b));
            }
            g.clone().lu().solve(b).ok_or_else(|| DmdError::Singular {
                context: format!("{p}x{p} gram matrix without regularization"),
                condition: condition(s_max, s_min),
            })
        }
        RegularizationKind::Tikhonov => {
            let spectrum = g.clone().symmetric_eigenvalues();
            let s_max = spectrum.amax();
            let shift = policy.tikhonov_lambda * s_max;
            let mut shifted = g.clone();
            for i in 0..p {
                shifted[(i, i)] += shift;
            }
            shifted
                .cholesky()
                .map(|c| c.solve(b))
                .ok_or_else(|| DmdError::Singular {
                    context: format!(
                        "{p}x{p} gram matrix with tikhonov lambda {}",
                        policy.tikhonov_lambda
                    ),
                    condition: condition(s_max, spectrum.min() + shift),
                })
        }
        RegularizationKind::TruncatedSvd => {
            let eig = g.clone().symmetric_eigen();
            let s_max = eig.eigenvalues.amax();
            let cutoff = policy.svd_rtol * s_max;
            let inv = eig.eigenvalues.map(|s| {
                if s.abs() > cutoff && s.abs() > 0.0 {
                    1.0 / s
                } else {
                    0.0
                }
            });
            let q = &eig.eigenvectors;
            let qtb = q.transpose() * b;
            let scaled = DMatrix::from_fn(p, b.ncols(), |i, j| inv[i] * qtb[(i, j)]);
            Ok(q * scaled)
        }
    }
}

fn condition(s_max: f64, s_min: f64) -> f64 {
    if s_min > 0.0 {
        s_max / s_min
    } else {
        f64::INFINITY
    }
}

/// Weights `w` of the projection `P g = sum_i w_i K(., x_i)` onto the span of
/// kernel sections centred at `centers` (columns), given samples
/// `g_values[i] = g(x_i)`.
pub fn project(
    kernel: &KernelSpec,
    centers: &DMatrix<f64>,
    g_values: &[f64],
    policy: &RegularizationPolicy,
) -> Result<Vec<f64>> {
    if g_values.len() != centers.ncols() {
        return Err(DmdError::input(format!(
            "{} samples for {} centers",
            g_values.len(),
            centers.ncols()
        )));
    }
    let g = kernels::gram_symmetric(kernel, centers)?;
    let rhs = DMatrix::from_column_slice(g_values.len(), 1, g_values);
    let w = solve_gram(&g, &rhs, policy)?;
    Ok(w.column(0).iter().copied().collect())
}

/// Inverse of a square complex matrix.
///
/// With `RegularizationKind::None` a numerically singular matrix is an error;
/// other policies fall back to a truncated pseudo-inverse.
pub(crate) fn invert_complex(
    m: &DMatrix<Complex64>,
    policy: &RegularizationPolicy,
    context: &str,
) -> Result<DMatrix<Complex64>> {
    let p = m.nrows();
    let svd = m.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    if s_max > 0.0 && s_min > singular_rcond(p) * s_max {
        if let Some(inv) = m.clone().try_inverse() {
            return Ok(inv);
        }
    }
    if policy.kind == RegularizationKind::None {
        return Err(DmdError::Singular {
            context: context.to_string(),
            condition: condition(s_max, s_min),
        });
    }
    log::warn!(
        "{context}: condition {:.3e}, using truncated pseudo-inverse",
        condition(s_max, s_min)
    );
    let eps = (policy.svd_rtol.max(singular_rcond(p))) * s_max;
    svd.pseudo_inverse(eps)
        .map_err(|e| DmdError::Input(format!("{context}: {e}")))
}
