use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::schur::real_eigen;
use crate::error::{DmdError, Result};

/// Eigenvalues matched as conjugates when closer than this.
const CONJUGATE_PAIR_TOL: f64 = 1e-8;
/// Relative tolerance below which two sort keys count as a tie.
const ORDER_TIE_RTOL: f64 = 1e-9;

/// Eigenvalues and unit-norm eigenvectors of a real square matrix.
///
/// Column `j` of `vectors` belongs to `values[j]`. Ordering is by descending
/// modulus, then descending real part, then descending imaginary part (so
/// `+i` precedes `-i`). Each vector is scaled to unit 2-norm and rotated so
/// that its largest-magnitude entry is real and positive. Non-real
/// eigenvalues come in exact conjugate pairs with conjugate vectors.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: DVector<Complex64>,
    pub vectors: DMatrix<Complex64>,
}

impl Eigensystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Iterates `(lambda, v)` pairs in order.
    pub fn pairs(&self) -> impl Iterator<Item = (Complex64, DVector<Complex64>)> + '_ {
        self.values
            .iter()
            .zip(self.vectors.column_iter())
            .map(|(l, v)| (*l, v.into_owned()))
    }
}

/// Full eigendecomposition of a general real matrix.
pub fn eig_general(m: &DMatrix<f64>) -> Result<Eigensystem> {
    if !m.is_square() {
        return Err(DmdError::input(format!(
            "eig_general needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(DmdError::input("matrix has non-finite entries"));
    }
    let p = m.nrows();
    let raw = real_eigen(m)?;

    let mut values = Vec::with_capacity(p);
    let mut vectors: Vec<DVector<Complex64>> = Vec::with_capacity(p);
    let mut k = 0;
    while k < p {
        if raw.im[k] != 0.0 && k + 1 < p {
            let re = raw.vectors.column(k);
            let im = raw.vectors.column(k + 1);
            let v = DVector::from_fn(p, |i, _| Complex64::new(re[i], im[i]));
            let lambda = Complex64::new(raw.re[k], raw.im[k]);
            values.push(lambda);
            values.push(lambda.conj());
            // orientation of each slot is settled below by residual
            vectors.push(v.clone());
            vectors.push(v);
            k += 2;
        } else {
            values.push(Complex64::new(raw.re[k], 0.0));
            vectors.push(raw.vectors.column(k).map(|x| Complex64::new(x, 0.0)));
            k += 1;
        }
    }

    let mc = m.map(|x| Complex64::new(x, 0.0));
    for j in 0..p {
        if values[j].im != 0.0 {
            // choose whichever of v, conj(v) actually pairs with lambda
            let v = &vectors[j];
            let r1 = (&mc * v - v * values[j]).norm();
            let vc = v.map(|c| c.conj());
            let r2 = (&mc * &vc - &vc * values[j]).norm();
            if r2 < r1 {
                vectors[j] = vc;
            }
        }
        normalize_phase(&mut vectors[j]);
    }

    pair_conjugates(&mut values, &mut vectors);

    let order = sorted_order(&values);
    let values = DVector::from_iterator(p, order.iter().map(|&i| values[i]));
    let mut out = DMatrix::zeros(p, p);
    for (dst, &src) in order.iter().enumerate() {
        out.set_column(dst, &vectors[src]);
    }
    Ok(Eigensystem {
        values,
        vectors: out,
    })
}

/// Unit 2-norm, largest-magnitude entry rotated onto the positive real axis.
fn normalize_phase(v: &mut DVector<Complex64>) {
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return;
    }
    *v /= Complex64::new(norm, 0.0);
    let anchor = phase_anchor(v);
    let z = v[anchor];
    let phase = z / z.norm();
    *v /= phase;
    v[anchor] = Complex64::new(v[anchor].norm(), 0.0);
}

// First entry whose modulus is within a relative hair of the maximum, so that
// v and conj(v) pick the same anchor.
fn phase_anchor(v: &DVector<Complex64>) -> usize {
    let max = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    v.iter()
        .position(|c| c.norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0)
}

fn pair_conjugates(values: &mut [Complex64], vectors: &mut [DVector<Complex64>]) {
    let p = values.len();
    let mut paired = vec![false; p];
    for a in 0..p {
        if paired[a] || values[a].im <= 0.0 {
            continue;
        }
        let partner = (0..p)
            .filter(|&b| b != a && !paired[b] && values[b].im < 0.0)
            .map(|b| (b, (values[a] - values[b].conj()).norm()))
            .filter(|&(_, dist)| dist <= CONJUGATE_PAIR_TOL)
            .min_by(|x, y| x.1.total_cmp(&y.1));
        if let Some((b, _)) = partner {
            let mean = (values[a] + values[b].conj()) * 0.5;
            values[a] = mean;
            values[b] = mean.conj();
            vectors[b] = vectors[a].map(|c| c.conj());
            paired[a] = true;
            paired[b] = true;
        }
    }
}

fn ties(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= ORDER_TIE_RTOL * scale
}

/// `true` when `a` should come strictly before `b`.
fn precedes(a: Complex64, b: Complex64, scale: f64) -> bool {
    let (ma, mb) = (a.norm(), b.norm());
    if !ties(ma, mb, scale) {
        return ma > mb;
    }
    if !ties(a.re, b.re, scale) {
        return a.re > b.re;
    }
    if !ties(a.im, b.im, scale) {
        return a.im > b.im;
    }
    false
}

// Stable insertion sort: the tolerant comparator is not a total order, so
// the std sorts are avoided.
fn sorted_order(values: &[Complex64]) -> Vec<usize> {
    let scale = values
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut order: Vec<usize> = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        let pos = order
            .iter()
            .position(|&j| precedes(values[i], values[j], scale))
            .unwrap_or(order.len());
        order.insert(pos, i);
    }
    order
}
