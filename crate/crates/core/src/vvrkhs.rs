//! Vector-valued RKHS with the diagonal operator kernel
//! `K(x, y) = diag(k(x, y), .., k(x, y))`.
//!
//! The basis `{K_{x_i} e_d}` has a block-diagonal Gram matrix with one copy
//! of the scalar Gram matrix per state dimension, and the interaction matrix
//! has the same structure. The vector-valued representation therefore
//! splits into `n` identical scalar problems, and the vector-valued mode of
//! eigenfunction `s` is `xi_s = sum_d w_{s,d} e_d` where `w_{., d}` projects
//! the `d`-th coordinate function. [`fit_vector_valued`] takes that route
//! and lands on the same model as [`crate::koopman::fit`].

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{DmdError, Result};
use crate::kernels::{self, KernelSpec};
use crate::koopman::{self, conjugate_partner_columns, distinct_pairs, KoopmanModel, SnapshotSet};
use crate::numerics::{self, RegularizationPolicy};

/// Block-diagonal Gram matrix `diag(G, .., G)` stored as its single block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGram {
    pub scalar_gram: DMatrix<f64>,
    pub n_blocks: usize,
}

impl BlockGram {
    pub fn block_size(&self) -> usize {
        self.scalar_gram.nrows()
    }

    /// Dense `(n p) x (n p)` matrix. Only for inspection and tests.
    pub fn materialize(&self) -> DMatrix<f64> {
        let p = self.block_size();
        let mut full = DMatrix::zeros(p * self.n_blocks, p * self.n_blocks);
        for b in 0..self.n_blocks {
            full.view_mut((b * p, b * p), (p, p))
                .copy_from(&self.scalar_gram);
        }
        full
    }

    /// Solves `diag(G, .., G) W = B` one block at a time; `rhs` holds one
    /// `p x q` block per dimension.
    pub fn solve(
        &self,
        rhs: &[DMatrix<f64>],
        policy: &RegularizationPolicy,
    ) -> Result<Vec<DMatrix<f64>>> {
        if rhs.len() != self.n_blocks {
            return Err(DmdError::input(format!(
                "{} right-hand blocks for {} gram blocks",
                rhs.len(),
                self.n_blocks
            )));
        }
        rhs.iter()
            .map(|b| numerics::solve_gram(&self.scalar_gram, b, policy))
            .collect()
    }
}

pub fn block_gram(
    kernel: &KernelSpec,
    centers: &DMatrix<f64>,
    n_blocks: usize,
) -> Result<BlockGram> {
    if n_blocks < 1 {
        return Err(DmdError::input("block gram needs at least one block"));
    }
    Ok(BlockGram {
        scalar_gram: kernels::gram_symmetric(kernel, centers)?,
        n_blocks,
    })
}

/// Fits the Koopman model through the vector-valued block reduction.
pub fn fit_vector_valued(
    snapshots: &SnapshotSet,
    kernel: &KernelSpec,
    policy: &RegularizationPolicy,
) -> Result<KoopmanModel> {
    if snapshots.dim() == 1 {
        return koopman::fit(snapshots, kernel, policy);
    }
    kernel.validate()?;
    policy.validate()?;
    if snapshots.n_pairs() < 2 {
        return Err(DmdError::input(format!(
            "need at least 2 snapshot pairs, got {}",
            snapshots.n_pairs()
        )));
    }
    let n = snapshots.dim();
    let (centers, images) = distinct_pairs(snapshots)?;
    let grams = block_gram(kernel, &centers, n)?;
    let interaction = kernels::gram(kernel, &images, &centers)?;
    let blocks = vec![interaction; n];
    let reps = grams.solve(&blocks, policy)?;

    // every block carries the same scalar representation
    let rep = reps[0].clone();
    debug_assert!(reps.iter().all(|r| *r == rep));

    let mut model =
        KoopmanModel::assemble(*kernel, *policy, centers, grams.scalar_gram.clone(), rep)?;

    // per-dimension projection of the coordinate functions
    let gc = grams.scalar_gram.map(|x| Complex64::new(x, 0.0));
    let vtg = model.eigvecs.transpose() * gc;
    let inv = numerics::invert_complex(&vtg, policy, "eigenfunction values at centers (V^T G)")?;
    let p = model.rank();
    let mut modes = DMatrix::<Complex64>::zeros(n, p);
    for d in 0..n {
        let coord = model.centers.row(d).map(|x| Complex64::new(x, 0.0));
        let weights = coord * &inv;
        modes.row_mut(d).copy_from(&weights);
    }
    conjugate_partner_columns(&model.lambdas, &mut modes);
    model.modes = modes;
    Ok(model)
}
