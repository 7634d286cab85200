//! Finite-rank Koopman representation built from kernel sections centred at
//! snapshots, with its eigenfunctions and modes.
//!
//! For centers `x_1..x_p` with images `y_i = F(x_i)` the Koopman operator
//! acts on a kernel section through its adjoint, `K_F^* K_x = K_{F(x)}`, so
//! projecting `K_F K_{x_i}` back onto `span{K_{x_1}, .., K_{x_p}}` only needs
//! kernel values:
//!
//! ```text
//! G   = (K(x_i, x_l))      Gram matrix over the centers
//! A   = (K(y_i, x_j))      interaction matrix
//! rep = G^{-1} A           matrix of P K_F in the basis {K_{x_i}}
//! ```
//!
//! An eigenvector `v_j` of `rep` gives the eigenfunction
//! `phi_j(x) = sum_i (v_j)_i K(x, x_i)`. Eigenvectors are stored scaled so
//! that `v_j^H G v_j = 1` (unit RKHS norm), and the Koopman modes are
//! `xi = X (V^T G)^{-1}`, the coefficients of the full state observable
//! `g(x) = x` along the eigenfunctions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{DmdError, Result};
use crate::kernels::{self, KernelSpec};
use crate::numerics::{self, RegularizationPolicy};

/// Eigenvector matrices worse conditioned than this are reported as near-defective.
pub const DEFECTIVE_CONDITION: f64 = 1e12;

/// Paired state data `(x_i, y_i = F(x_i))`, states stored as columns.
///
/// Without explicit images the columns of `x` are read as a time series and
/// the pairs are `(x_i, x_{i+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSet {
    x: DMatrix<f64>,
    y: Option<DMatrix<f64>>,
}

impl SnapshotSet {
    /// Time-ordered snapshots `x_1..x_m` with `x_{i+1} = F(x_i)`.
    pub fn time_series(x: DMatrix<f64>) -> Result<Self> {
        check_finite(&x, "snapshot")?;
        if x.nrows() == 0 {
            return Err(DmdError::input("snapshots must have dimension at least 1"));
        }
        if x.ncols() < 2 {
            return Err(DmdError::input("a time series needs at least 2 snapshots"));
        }
        Ok(SnapshotSet { x, y: None })
    }

    /// Arbitrary pairs with `y[:, i] = F(x[:, i])`.
    pub fn pairs(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        check_finite(&x, "snapshot")?;
        check_finite(&y, "image")?;
        if x.shape() != y.shape() {
            return Err(DmdError::input(format!(
                "snapshot shape {:?} differs from image shape {:?}",
                x.shape(),
                y.shape()
            )));
        }
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(DmdError::input("need at least one pair of dimension >= 1"));
        }
        Ok(SnapshotSet { x, y: Some(y) })
    }

    pub fn dim(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_pairs(&self) -> usize {
        match self.y {
            Some(_) => self.x.ncols(),
            None => self.x.ncols() - 1,
        }
    }

    pub fn is_time_series(&self) -> bool {
        self.y.is_none()
    }

    /// The raw snapshot matrix.
    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> Option<&DMatrix<f64>> {
        self.y.as_ref()
    }

    /// Pair domain points, one per column.
    pub fn domain(&self) -> DMatrix<f64> {
        match self.y {
            Some(_) => self.x.clone(),
            None => self.x.columns(0, self.x.ncols() - 1).into_owned(),
        }
    }

    /// Pair images, aligned column-for-column with [`Self::domain`].
    pub fn images(&self) -> DMatrix<f64> {
        match &self.y {
            Some(y) => y.clone(),
            None => self.x.columns(1, self.x.ncols() - 1).into_owned(),
        }
    }
}

fn check_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if let Some(idx) = m.iter().position(|v| !v.is_finite()) {
        let (r, c) = (idx % m.nrows().max(1), idx / m.nrows().max(1));
        return Err(DmdError::input(format!(
            "non-finite {what} entry at ({r}, {c})"
        )));
    }
    Ok(())
}

/// A fitted kernel DMD model. Immutable once built.
#[derive(Debug, Clone)]
pub struct KoopmanModel {
    pub(crate) kernel: KernelSpec,
    pub(crate) policy: RegularizationPolicy,
    pub(crate) centers: DMatrix<f64>,
    pub(crate) gram: DMatrix<f64>,
    pub(crate) rep: DMatrix<f64>,
    pub(crate) lambdas: DVector<Complex64>,
    pub(crate) eigvecs: DMatrix<Complex64>,
    pub(crate) modes: DMatrix<Complex64>,
}

impl KoopmanModel {
    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn policy(&self) -> &RegularizationPolicy {
        &self.policy
    }

    /// Basis centers, one per column.
    pub fn centers(&self) -> &DMatrix<f64> {
        &self.centers
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Matrix of the projected Koopman operator in the kernel basis.
    pub fn rep(&self) -> &DMatrix<f64> {
        &self.rep
    }

    pub fn lambdas(&self) -> &DVector<Complex64> {
        &self.lambdas
    }

    /// Columns normalized to `v^H G v = 1`.
    pub fn eigvecs(&self) -> &DMatrix<Complex64> {
        &self.eigvecs
    }

    /// Koopman modes, one column per eigenvalue.
    pub fn modes(&self) -> &DMatrix<Complex64> {
        &self.modes
    }

    /// Anchor for trajectory reconstruction: the first center.
    pub fn first_center(&self) -> DVector<f64> {
        self.centers.column(0).into_owned()
    }

    pub fn state_dim(&self) -> usize {
        self.centers.nrows()
    }

    /// Basis size `p`.
    pub fn rank(&self) -> usize {
        self.centers.ncols()
    }

    /// Reassembles a model from stored parts, recomputing the Gram matrix
    /// and checking shapes. Used when loading serialized models.
    pub fn from_parts(
        kernel: KernelSpec,
        policy: RegularizationPolicy,
        centers: DMatrix<f64>,
        rep: DMatrix<f64>,
        lambdas: DVector<Complex64>,
        eigvecs: DMatrix<Complex64>,
        modes: DMatrix<Complex64>,
    ) -> Result<Self> {
        let p = centers.ncols();
        let n = centers.nrows();
        if rep.shape() != (p, p) || lambdas.len() != p || eigvecs.shape() != (p, p) {
            return Err(DmdError::input(format!(
                "inconsistent model parts for {p} centers"
            )));
        }
        if modes.shape() != (n, p) {
            return Err(DmdError::input(format!(
                "mode matrix is {:?}, expected ({n}, {p})",
                modes.shape()
            )));
        }
        let gram = kernels::gram_symmetric(&kernel, &centers)?;
        Ok(KoopmanModel {
            kernel,
            policy,
            centers,
            gram,
            rep,
            lambdas,
            eigvecs,
            modes,
        })
    }

    /// Eigensystem, RKHS normalization and modes for a solved representation.
    pub(crate) fn assemble(
        kernel: KernelSpec,
        policy: RegularizationPolicy,
        centers: DMatrix<f64>,
        gram: DMatrix<f64>,
        rep: DMatrix<f64>,
    ) -> Result<Self> {
        let eig = numerics::eig_general(&rep)?;
        let eigvecs = normalize_in_rkhs(eig.vectors, &gram);
        warn_if_near_defective(&eigvecs);
        let lambdas = eig.values;
        let modes = compute_modes(&centers, &gram, &eigvecs, &lambdas, &policy)?;
        Ok(KoopmanModel {
            kernel,
            policy,
            centers,
            gram,
            rep,
            lambdas,
            eigvecs,
            modes,
        })
    }
}

/// Centers and images with exact duplicate centers removed (first occurrence wins).
pub(crate) fn distinct_pairs(snapshots: &SnapshotSet) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let domain = snapshots.domain();
    let images = snapshots.images();
    let mut keep: Vec<usize> = Vec::with_capacity(domain.ncols());
    for j in 0..domain.ncols() {
        let dup = keep.iter().find(|&&k| domain.column(k) == domain.column(j));
        match dup {
            Some(&k) => log::warn!("snapshot pair {j} duplicates center {k}; dropped"),
            None => keep.push(j),
        }
    }
    if keep.len() < 2 {
        return Err(DmdError::input(format!(
            "need at least 2 distinct centers, got {}",
            keep.len()
        )));
    }
    Ok((domain.select_columns(&keep), images.select_columns(&keep)))
}

/// Fits the finite-rank Koopman representation to `snapshots`.
pub fn fit(
    snapshots: &SnapshotSet,
    kernel: &KernelSpec,
    policy: &RegularizationPolicy,
) -> Result<KoopmanModel> {
    kernel.validate()?;
    policy.validate()?;
    if snapshots.n_pairs() < 2 {
        return Err(DmdError::input(format!(
            "need at least 2 snapshot pairs, got {}",
            snapshots.n_pairs()
        )));
    }
    let (centers, images) = distinct_pairs(snapshots)?;
    let gram = kernels::gram_symmetric(kernel, &centers)?;
    let interaction = kernels::gram(kernel, &images, &centers)?;
    let rep = numerics::solve_gram(&gram, &interaction, policy)?;
    KoopmanModel::assemble(*kernel, *policy, centers, gram, rep)
}

/// `V` rescaled column-wise so that `v_j^H G v_j = 1`.
pub(crate) fn normalize_in_rkhs(
    mut v: DMatrix<Complex64>,
    gram: &DMatrix<f64>,
) -> DMatrix<Complex64> {
    let gc = gram.map(|x| Complex64::new(x, 0.0));
    for mut col in v.column_iter_mut() {
        let norm_sq = (col.adjoint() * &gc * &col)[(0, 0)].re;
        if norm_sq > 0.0 && norm_sq.is_finite() {
            col /= Complex64::new(norm_sq.sqrt(), 0.0);
        } else {
            log::warn!("eigenvector has non-positive RKHS norm {norm_sq:.3e}; left unnormalized");
        }
    }
    v
}

fn warn_if_near_defective(v: &DMatrix<Complex64>) {
    let sv = v.clone().singular_values();
    let (max, min) = (sv.max(), sv.min());
    let cond = if min > 0.0 { max / min } else { f64::INFINITY };
    if cond > DEFECTIVE_CONDITION {
        log::warn!("representation is near-defective: eigenvector condition {cond:.3e}");
    }
}

/// `xi = X (V^T G)^{-1}` with a plain (non-conjugating) transpose.
pub(crate) fn compute_modes(
    centers: &DMatrix<f64>,
    gram: &DMatrix<f64>,
    eigvecs: &DMatrix<Complex64>,
    lambdas: &DVector<Complex64>,
    policy: &RegularizationPolicy,
) -> Result<DMatrix<Complex64>> {
    let gc = gram.map(|x| Complex64::new(x, 0.0));
    let vtg = eigvecs.transpose() * gc;
    let inv = numerics::invert_complex(&vtg, policy, "eigenfunction values at centers (V^T G)")?;
    let mut modes = centers.map(|x| Complex64::new(x, 0.0)) * inv;
    conjugate_partner_columns(lambdas, &mut modes);
    Ok(modes)
}

/// Overwrites the column of each `conj(lambda)` partner with the conjugate of
/// the `lambda` column (`Im lambda > 0`), so real data gives real forecasts.
pub(crate) fn conjugate_partner_columns(
    lambdas: &DVector<Complex64>,
    modes: &mut DMatrix<Complex64>,
) {
    for j in 0..lambdas.len() {
        if lambdas[j].im <= 0.0 {
            continue;
        }
        if let Some(k) = (0..lambdas.len()).find(|&k| k != j && lambdas[k] == lambdas[j].conj()) {
            let col = modes.column(j).map(|c| c.conj());
            modes.set_column(k, &col);
        }
    }
}

/// Recomputes the Koopman modes of a fitted model.
pub fn modes(model: &KoopmanModel) -> Result<DMatrix<Complex64>> {
    compute_modes(
        model.centers(),
        model.gram(),
        model.eigvecs(),
        model.lambdas(),
        model.policy(),
    )
}

/// Values of the normalized eigenfunctions at `points` (columns).
///
/// Entry `(j, t)` is `phi_j(p_t) = sum_i (v_j)_i K(p_t, x_i)`.
pub fn eigenfunction_values(
    model: &KoopmanModel,
    points: &DMatrix<f64>,
) -> Result<DMatrix<Complex64>> {
    if points.nrows() != model.state_dim() {
        return Err(DmdError::input(format!(
            "points have dimension {}, model expects {}",
            points.nrows(),
            model.state_dim()
        )));
    }
    if points.ncols() == 0 {
        return Ok(DMatrix::zeros(model.rank(), 0));
    }
    let k = kernels::gram(model.kernel(), model.centers(), points)?;
    Ok(model.eigvecs().transpose() * k.map(|x| Complex64::new(x, 0.0)))
}
