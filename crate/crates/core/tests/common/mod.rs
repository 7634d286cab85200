//! Test-only oracles and helpers. Nothing here calls into the crate's
//! solver or eigen code; references come from nalgebra or closed forms.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut impl Rng, n: usize, p: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, p, |_, _| rng.gen_range(-scale..scale))
}

/// Smallest eigenvalue of a symmetric matrix (nalgebra's symmetric solver).
pub fn min_sym_eig(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().min()
}

/// Dense pseudo-inverse via nalgebra's SVD.
pub fn pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().pseudo_inverse(1e-15 * m.amax()).unwrap()
}

/// Eigenvalues from nalgebra's Schur form.
pub fn schur_eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    nalgebra::Schur::new(m.clone())
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for perm in permutations(k - 1) {
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, k - 1);
            out.push(p);
        }
    }
    out
}

/// Best matching between two eigenvalue lists: returns `(max distance, b-index for each a)`.
/// Exhaustive for up to 8 values, greedy beyond.
pub fn match_multisets(a: &[Complex64], b: &[Complex64]) -> (f64, Vec<usize>) {
    assert_eq!(a.len(), b.len());
    let k = a.len();
    if k <= 8 {
        let mut best = (f64::INFINITY, Vec::new());
        for perm in permutations(k) {
            let d = (0..k)
                .map(|i| (a[i] - b[perm[i]]).norm())
                .fold(0.0, f64::max);
            if d < best.0 {
                best = (d, perm);
            }
        }
        return best;
    }
    let mut used = vec![false; k];
    let mut assign = vec![0; k];
    let mut worst: f64 = 0.0;
    for i in 0..k {
        let (j, d) = (0..k)
            .filter(|&j| !used[j])
            .map(|j| (j, (a[i] - b[j]).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        used[j] = true;
        assign[i] = j;
        worst = worst.max(d);
    }
    (worst, assign)
}

/// `min_c |a - c b|` over unit-modulus `c`, relative to `scale`.
pub fn phase_aligned_distance_scaled(
    a: &DVector<Complex64>,
    b: &DVector<Complex64>,
    scale: f64,
) -> f64 {
    let inner: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let c = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    (a - b * c).norm() / scale.max(1e-300)
}

/// [`phase_aligned_distance_scaled`] relative to `|a|`.
pub fn phase_aligned_distance(a: &DVector<Complex64>, b: &DVector<Complex64>) -> f64 {
    phase_aligned_distance_scaled(a, b, a.norm())
}

pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Roots of unity `exp(2 pi i k / q)`.
pub fn roots_of_unity(q: usize) -> Vec<Complex64> {
    (0..q)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / q as f64))
        .collect()
}

/// Closed-form kernels written out independently of the crate.
pub fn gaussian(mu: f64) -> impl Fn(&[f64], &[f64]) -> f64 {
    move |x, y| (-x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / mu).exp()
}

pub fn exp_dot(mu: f64) -> impl Fn(&[f64], &[f64]) -> f64 {
    move |x, y| (x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / mu).exp()
}

/// Gram matrix of `k` over the columns of `points`.
pub fn oracle_gram(k: impl Fn(&[f64], &[f64]) -> f64, points: &DMatrix<f64>) -> DMatrix<f64> {
    let p = points.ncols();
    let cols: Vec<Vec<f64>> = (0..p)
        .map(|j| points.column(j).iter().copied().collect())
        .collect();
    DMatrix::from_fn(p, p, |i, j| k(&cols[i], &cols[j]))
}

pub fn sym_condition(m: &DMatrix<f64>) -> f64 {
    let ev = m.clone().symmetric_eigenvalues();
    let lo = ev.min();
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        ev.max() / lo
    }
}

/// Random `n x n` matrix rescaled to spectral radius `rho`.
pub fn random_with_radius(rng: &mut impl Rng, n: usize, rho: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let r = a
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    a * (rho / r.max(1e-12))
}
