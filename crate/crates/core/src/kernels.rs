//! Positive-definite kernels and Gram-matrix assembly.
//!
//! Every inner product between kernel sections `K_x`, `K_y` in the native
//! space reduces to a kernel evaluation `K(x, y)`, so the rest of the crate
//! only ever touches snapshot data through [`eval`] and [`gram`].
//!
//! The Gaussian kernel is parameterized as `exp(-|x - y|^2 / mu)`. Some texts
//! normalize the exponent by `2 mu` instead; pass `mu = 2 sigma^2` to recover
//! that convention (`mu = 2` gives `exp(-|x - y|^2 / 2)`).

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{DmdError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `exp(-|x - y|^2 / mu)`
    GaussianRbf,
    /// `exp(x . y / mu)`
    ExpDotProduct,
    /// `(x . y + offset)^degree`
    Polynomial,
    /// `x . y`
    Linear,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::GaussianRbf => "gaussian_rbf",
            KernelKind::ExpDotProduct => "exp_dot_product",
            KernelKind::Polynomial => "polynomial",
            KernelKind::Linear => "linear",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = DmdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian_rbf" | "gaussian" | "rbf" => Ok(KernelKind::GaussianRbf),
            "exp_dot_product" | "exp_dot" => Ok(KernelKind::ExpDotProduct),
            "polynomial" | "poly" => Ok(KernelKind::Polynomial),
            "linear" => Ok(KernelKind::Linear),
            other => Err(DmdError::input(format!("unknown kernel '{other}'"))),
        }
    }
}

/// A kernel choice together with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// Width for `GaussianRbf`, scale for `ExpDotProduct`. Ignored otherwise.
    pub mu: f64,
    /// Polynomial degree. Ignored unless `kind == Polynomial`.
    pub degree: u32,
    /// Polynomial offset. Ignored unless `kind == Polynomial`.
    pub offset: f64,
}

impl KernelSpec {
    pub fn gaussian_rbf(mu: f64) -> Self {
        KernelSpec {
            kind: KernelKind::GaussianRbf,
            mu,
            degree: 1,
            offset: 0.0,
        }
    }

    pub fn exp_dot_product(mu: f64) -> Self {
        KernelSpec {
            kind: KernelKind::ExpDotProduct,
            mu,
            degree: 1,
            offset: 0.0,
        }
    }

    pub fn polynomial(degree: u32, offset: f64) -> Self {
        KernelSpec {
            kind: KernelKind::Polynomial,
            mu: 1.0,
            degree,
            offset,
        }
    }

    pub fn linear() -> Self {
        KernelSpec {
            kind: KernelKind::Linear,
            mu: 1.0,
            degree: 1,
            offset: 0.0,
        }
    }

    /// Checks the hyperparameter invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(DmdError::input(format!(
                "kernel mu must be positive, got {}",
                self.mu
            )));
        }
        if self.degree < 1 {
            return Err(DmdError::input("polynomial degree must be at least 1"));
        }
        if !(self.offset.is_finite() && self.offset >= 0.0) {
            return Err(DmdError::input(format!(
                "polynomial offset must be nonnegative, got {}",
                self.offset
            )));
        }
        Ok(())
    }

    /// Kernel value without any input checking. `x` and `y` must have equal length.
    #[inline]
    pub(crate) fn apply(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.kind {
            KernelKind::GaussianRbf => (-squared_distance(x, y) / self.mu).exp(),
            KernelKind::ExpDotProduct => (dot(x, y) / self.mu).exp(),
            KernelKind::Polynomial => (dot(x, y) + self.offset).powi(self.degree as i32),
            KernelKind::Linear => dot(x, y),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            KernelKind::GaussianRbf | KernelKind::ExpDotProduct => {
                write!(f, "{}(mu={})", self.kind, self.mu)
            }
            KernelKind::Polynomial => {
                write!(
                    f,
                    "polynomial(degree={}, offset={})",
                    self.degree, self.offset
                )
            }
            KernelKind::Linear => f.write_str("linear"),
        }
    }
}

#[inline]
fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

// Direct differences: never negative, and bitwise symmetric in (x, y).
#[inline]
fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

/// Evaluates `K(x, y)`.
pub fn eval(kernel: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    kernel.validate()?;
    if x.len() != y.len() {
        return Err(DmdError::input(format!(
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(DmdError::input("points must have dimension at least 1"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(DmdError::input("non-finite coordinate"));
    }
    Ok(kernel.apply(x, y))
}

/// Gram matrix between two point sets stored as columns.
///
/// Entry `(i, j)` is `K(rows_i, cols_j)`. Each entry is computed on its own,
/// so a symmetric call (`rows == cols`) yields an exactly symmetric matrix.
pub fn gram(kernel: &KernelSpec, rows: &DMatrix<f64>, cols: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    kernel.validate()?;
    if rows.ncols() == 0 || cols.ncols() == 0 {
        return Err(DmdError::input(
            "gram needs at least one point on each side",
        ));
    }
    if rows.nrows() != cols.nrows() {
        return Err(DmdError::input(format!(
            "dimension mismatch: {} vs {}",
            rows.nrows(),
            cols.nrows()
        )));
    }
    if rows.nrows() == 0 {
        return Err(DmdError::input("points must have dimension at least 1"));
    }
    if rows.iter().chain(cols.iter()).any(|v| !v.is_finite()) {
        return Err(DmdError::input("non-finite coordinate"));
    }
    Ok(DMatrix::from_fn(rows.ncols(), cols.ncols(), |i, j| {
        kernel.apply(rows.column(i).as_slice(), cols.column(j).as_slice())
    }))
}

/// Symmetric Gram matrix of a single point set.
pub fn gram_symmetric(kernel: &KernelSpec, points: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    gram(kernel, points, points)
}
