//! Synthetic dynamical systems for desk-scale checks, and a brute-force
//! reference implementation of the decomposition.
//!
//! Only forward-complete maps are offered (rotations and affine maps);
//! maps with finite escape time have no well-defined Koopman operator.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::error::{DmdError, Result};
use crate::kernels::{self, KernelSpec};
use crate::koopman::SnapshotSet;

/// Largest snapshot count [`oracle_dmd`] accepts.
pub const ORACLE_MAX_SNAPSHOTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum SystemKind {
    /// Planar rotation by `theta` radians.
    Rotation { theta: f64 },
    /// `x -> A x + b`.
    Affine { a: DMatrix<f64>, b: DVector<f64> },
    /// `x -> a x` in one dimension.
    ScalarGeometric { a: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSystem {
    kind: SystemKind,
    x0: DVector<f64>,
    m: usize,
}

impl SynthSystem {
    pub fn rotation(theta: f64, x0: [f64; 2], m: usize) -> Result<Self> {
        Self::new(
            SystemKind::Rotation { theta },
            DVector::from_row_slice(&x0),
            m,
        )
    }

    pub fn affine(a: DMatrix<f64>, b: DVector<f64>, x0: DVector<f64>, m: usize) -> Result<Self> {
        Self::new(SystemKind::Affine { a, b }, x0, m)
    }

    pub fn scalar_geometric(a: f64, x0: f64, m: usize) -> Result<Self> {
        Self::new(
            SystemKind::ScalarGeometric { a },
            DVector::from_element(1, x0),
            m,
        )
    }

    pub fn new(kind: SystemKind, x0: DVector<f64>, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(DmdError::input("need at least 2 snapshots"));
        }
        let n = x0.len();
        match &kind {
            SystemKind::Rotation { theta } if n != 2 || !theta.is_finite() => {
                return Err(DmdError::input(
                    "rotation needs a finite angle and a 2D state",
                ));
            }
            SystemKind::Affine { a, b } if a.shape() != (n, n) || b.len() != n => {
                return Err(DmdError::input(format!(
                    "affine map {:?} + {} does not match state dimension {n}",
                    a.shape(),
                    b.len()
                )));
            }
            SystemKind::ScalarGeometric { .. } if n != 1 => {
                return Err(DmdError::input("scalar system needs a 1D state"));
            }
            _ => {}
        }
        if n == 0 || x0.iter().any(|v| !v.is_finite()) {
            return Err(DmdError::input(
                "initial state must be finite and non-empty",
            ));
        }
        Ok(SynthSystem { kind, x0, m })
    }

    pub fn kind(&self) -> &SystemKind {
        &self.kind
    }

    /// One application of the map.
    pub fn step(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.kind {
            SystemKind::Rotation { theta } => {
                let (s, c) = theta.sin_cos();
                DVector::from_row_slice(&[c * x[0] - s * x[1], s * x[0] + c * x[1]])
            }
            SystemKind::Affine { a, b } => a * x + b,
            SystemKind::ScalarGeometric { a } => x * *a,
        }
    }
}

/// Time series `x0, F(x0), .., F^{m-1}(x0)`.
pub fn generate(system: &SynthSystem) -> SnapshotSet {
    let n = system.x0.len();
    let mut x = DMatrix::zeros(n, system.m);
    let mut state = system.x0.clone();
    x.set_column(0, &state);
    for i in 1..system.m {
        state = system.step(&state);
        x.set_column(i, &state);
    }
    SnapshotSet::time_series(x).expect("validated system produces a valid series")
}

/// Output of the reference implementation.
#[derive(Debug, Clone)]
pub struct OracleDmd {
    pub rep: DMatrix<f64>,
    pub lambdas: Vec<Complex64>,
    /// Normalized to `v^H G v = 1`, largest entry real positive.
    pub eigvecs: DMatrix<Complex64>,
    pub modes: DMatrix<Complex64>,
}

/// Straightforward dense decomposition used only to cross-check
/// [`crate::koopman::fit`]: pseudo-inverse via SVD, eigenvalues from a
/// library Schur form, eigenvectors as SVD null vectors of `rep - lambda I`,
/// modes via an explicit inverse. Uses every pair, no deduplication.
pub fn oracle_dmd(snapshots: &SnapshotSet, kernel: &KernelSpec) -> Result<OracleDmd> {
    if snapshots.x().ncols() > ORACLE_MAX_SNAPSHOTS {
        return Err(DmdError::input(format!(
            "oracle limited to {ORACLE_MAX_SNAPSHOTS} snapshots, got {}",
            snapshots.x().ncols()
        )));
    }
    let centers = snapshots.domain();
    let images = snapshots.images();
    let g = kernels::gram(kernel, &centers, &centers)?;
    let a = kernels::gram(kernel, &images, &centers)?;
    let g_pinv = g
        .clone()
        .pseudo_inverse(1e-14 * g.amax())
        .map_err(|e| DmdError::input(e.to_string()))?;
    let rep = &g_pinv * &a;
    let p = rep.nrows();

    let lambdas: Vec<Complex64> = Schur::new(rep.clone())
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect();
    let eigvecs = null_vectors(&rep, &lambdas);

    let gc = g.map(|x| Complex64::new(x, 0.0));
    let mut eigvecs = eigvecs;
    for mut col in eigvecs.column_iter_mut() {
        let nrm = (col.adjoint() * &gc * &col)[(0, 0)].re.sqrt();
        col /= Complex64::new(nrm, 0.0);
        let (idx, _) = col.iter().enumerate().fold((0, -1.0), |(bi, bv), (i, c)| {
            if c.norm() > bv * (1.0 + 1e-12) {
                (i, c.norm())
            } else {
                (bi, bv)
            }
        });
        let ph = col[idx] / col[idx].norm();
        col /= ph;
    }

    let vtg = eigvecs.transpose() * &gc;
    let inv = vtg.try_inverse().ok_or_else(|| DmdError::Singular {
        context: "oracle V^T G".into(),
        condition: f64::INFINITY,
    })?;
    let modes = centers.map(|x| Complex64::new(x, 0.0)) * inv;
    debug_assert_eq!(modes.ncols(), p);

    Ok(OracleDmd {
        rep,
        lambdas,
        eigvecs,
        modes,
    })
}

// For each eigenvalue cluster of size k, the k right singular vectors of
// (M - lambda I) with the smallest singular values.
fn null_vectors(m: &DMatrix<f64>, lambdas: &[Complex64]) -> DMatrix<Complex64> {
    let p = m.nrows();
    let mc = m.map(|x| Complex64::new(x, 0.0));
    let scale = lambdas.iter().map(|l| l.norm()).fold(1.0, f64::max);
    let mut out = DMatrix::zeros(p, p);
    let mut done = vec![false; p];
    for i in 0..p {
        if done[i] {
            continue;
        }
        let cluster: Vec<usize> = (i..p)
            .filter(|&j| !done[j] && (lambdas[j] - lambdas[i]).norm() <= 1e-6 * scale)
            .collect();
        let mean = cluster.iter().map(|&j| lambdas[j]).sum::<Complex64>() / cluster.len() as f64;
        let shifted = &mc - DMatrix::<Complex64>::identity(p, p) * mean;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let mut idx: Vec<usize> = (0..p).collect();
        idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        for (slot, &j) in cluster.iter().enumerate() {
            let row = v_t.row(idx[slot]);
            let v = DVector::from_fn(p, |k, _| row[k].conj());
            out.set_column(j, &v);
            done[j] = true;
        }
    }
    out
}
