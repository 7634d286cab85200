//! Trajectory reconstruction and prediction from a fitted model, plus
//! approximate-eigenfunction diagnostics.
//!
//! A state is advanced by advancing each eigenfunction value by its
//! eigenvalue:
//!
//! ```text
//! state(i) = Re sum_j xi_j lambda_j^(i-1) phi_j(x0),   i = 1, 2, ..
//! ```
//!
//! so `state(1)` is the model's interpolant of the anchor itself. If an
//! eigenfunction is only approximate, `|phi(F(x)) - lambda phi(x)| <= eps`,
//! the error along a trajectory grows at most like the geometric sum in
//! [`pointwise_error_bound`]. For the Gaussian kernel on the whole space the
//! pointwise-versus-RKHS-norm constant is `C = 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{DmdError, Result};
use crate::koopman::{eigenfunction_values, KoopmanModel, SnapshotSet};

/// Magnitude cap applied to `lambda^i` to keep long forecasts finite.
pub const POWER_CAP: f64 = 1e300;

#[derive(Debug, Clone, PartialEq)]
pub struct Forecast {
    /// One state per column, `n x steps`.
    pub states: DMatrix<f64>,
    /// Largest 2-norm of the discarded imaginary part over all emitted states.
    pub imag_residual: f64,
    /// Set when some `|lambda^i|` hit [`POWER_CAP`].
    pub lambda_powers_clamped: bool,
}

impl Forecast {
    pub fn steps(&self) -> usize {
        self.states.ncols()
    }

    pub fn state(&self, i: usize) -> DVector<f64> {
        self.states.column(i).into_owned()
    }
}

/// Reconstructs the trajectory starting at the model's first center.
pub fn reconstruct(model: &KoopmanModel, steps: usize) -> Result<Forecast> {
    predict_from(model, model.first_center().as_slice(), steps)
}

/// Forecasts `steps` states starting from an arbitrary anchor `x0`.
pub fn predict_from(model: &KoopmanModel, x0: &[f64], steps: usize) -> Result<Forecast> {
    if steps == 0 {
        return Err(DmdError::input("steps must be at least 1"));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(DmdError::input("non-finite initial state"));
    }
    let anchor = DMatrix::from_column_slice(x0.len(), 1, x0);
    let phi0 = eigenfunction_values(model, &anchor)?;
    let modes = model.modes();
    let lambdas = model.lambdas();
    let n = model.state_dim();

    let mut coeffs: Vec<Complex64> = phi0.column(0).iter().copied().collect();
    let mut states = DMatrix::zeros(n, steps);
    let mut imag_residual: f64 = 0.0;
    let mut clamped = false;

    for step in 0..steps {
        let state = modes * DVector::from_column_slice(&coeffs);
        let imag_norm = state.iter().map(|c| c.im * c.im).sum::<f64>().sqrt();
        imag_residual = imag_residual.max(imag_norm);
        for (dst, c) in states.column_mut(step).iter_mut().zip(state.iter()) {
            *dst = c.re;
        }
        // powers accumulated multiplicatively: coeff_j <- lambda_j * coeff_j
        for (c, l) in coeffs.iter_mut().zip(lambdas.iter()) {
            *c *= l;
            let mag = c.norm();
            if mag > POWER_CAP || !mag.is_finite() {
                clamped = true;
                *c = if mag.is_finite() && mag > 0.0 {
                    *c * (POWER_CAP / mag)
                } else {
                    Complex64::from_polar(POWER_CAP, l.arg())
                };
            }
        }
    }

    if clamped {
        log::warn!("eigenvalue powers exceeded {POWER_CAP:e} and were clamped");
    }
    Ok(Forecast {
        states,
        imag_residual,
        lambda_powers_clamped: clamped,
    })
}

/// Per-eigenfunction residual `max_pairs |phi_j(y) - lambda_j phi_j(x)|` over
/// held-out pairs, the measurable stand-in for `|K_F phi_j - lambda_j phi_j|`.
pub fn eigen_residuals(model: &KoopmanModel, test_pairs: &SnapshotSet) -> Result<Vec<f64>> {
    if test_pairs.n_pairs() == 0 {
        return Err(DmdError::input("empty test set"));
    }
    let phi_x = eigenfunction_values(model, &test_pairs.domain())?;
    let phi_y = eigenfunction_values(model, &test_pairs.images())?;
    Ok(model
        .lambdas()
        .iter()
        .enumerate()
        .map(|(j, l)| {
            (0..phi_x.ncols())
                .map(|t| (phi_y[(j, t)] - l * phi_x[(j, t)]).norm())
                .fold(0.0, f64::max)
        })
        .collect())
}

/// `C * eps * sum_{k=0}^{m} lambda^k`, the pointwise trajectory error bound
/// after `m + 1` steps of an eigenfunction with residual `eps`.
///
/// `lambda_abs` is a modulus; for complex eigenvalues pass `|lambda|`.
pub fn pointwise_error_bound(c: f64, eps: f64, lambda_abs: f64, m: u64) -> f64 {
    c * eps * geometric_sum(lambda_abs, m)
}

fn geometric_sum(lambda: f64, m: u64) -> f64 {
    if lambda == 1.0 {
        return (m + 1) as f64;
    }
    if lambda == 0.0 {
        return 1.0;
    }
    if m <= 4096 {
        // Horner form, no cancellation near lambda = 1
        let mut acc = 1.0;
        for _ in 0..m {
            acc = 1.0 + lambda * acc;
        }
        return acc;
    }
    let terms = (m + 1) as f64;
    (terms * lambda.ln()).exp_m1() / (lambda - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelSpec;
    use crate::koopman::fit;
    use crate::numerics::RegularizationPolicy;

    fn contraction_model() -> KoopmanModel {
        let x = DMatrix::from_row_slice(1, 6, &[1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125]);
        fit(
            &SnapshotSet::time_series(x).unwrap(),
            &KernelSpec::exp_dot_product(2.0),
            &RegularizationPolicy::none(),
        )
        .unwrap()
    }

    #[test]
    fn error_bound_values() {
        assert_eq!(pointwise_error_bound(2.0, 0.3, 0.0, 7), 0.6);
        assert!((pointwise_error_bound(1.5, 0.2, 1.0, 4) - 5.0 * 1.5 * 0.2).abs() < 1e-15);
        assert!((pointwise_error_bound(1.0, 0.1, 0.5, 3) - 0.1875).abs() < 1e-15);
    }

    #[test]
    fn error_bound_large_m_uses_closed_form() {
        let direct: f64 = (0..=10_000).map(|k| 0.999f64.powi(k)).sum();
        let got = pointwise_error_bound(1.0, 1.0, 0.999, 10_000);
        assert!((got - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn contraction_reconstruction_follows_closed_form() {
        let model = contraction_model();
        let f = reconstruct(&model, 10).unwrap();
        for i in 0..10 {
            assert!(
                (f.states[(0, i)] - 0.5f64.powi(i as i32)).abs() < 1e-6,
                "step {i}"
            );
        }
        assert!(f.imag_residual < 1e-6);
        assert!(!f.lambda_powers_clamped);
    }

    #[test]
    fn off_anchor_prediction() {
        let model = contraction_model();
        let f = predict_from(&model, &[0.7], 10).unwrap();
        for i in 0..10 {
            assert!((f.states[(0, i)] - 0.7 * 0.5f64.powi(i as i32)).abs() < 1e-5);
        }
    }

    #[test]
    fn predict_from_first_center_equals_reconstruct() {
        let model = contraction_model();
        assert_eq!(
            reconstruct(&model, 5).unwrap(),
            predict_from(&model, &[1.0], 5).unwrap()
        );
    }

    #[test]
    fn rejects_zero_steps_and_bad_anchor() {
        let model = contraction_model();
        assert!(reconstruct(&model, 0).is_err());
        assert!(predict_from(&model, &[1.0, 2.0], 3).is_err());
        assert!(predict_from(&model, &[f64::NAN], 3).is_err());
    }

    #[test]
    fn growth_is_clamped() {
        let x = DMatrix::from_row_slice(1, 5, &[1.0, 3.0, 9.0, 27.0, 81.0]);
        let model = fit(
            &SnapshotSet::time_series(x).unwrap(),
            &KernelSpec::linear(),
            &RegularizationPolicy::truncated_svd(1e-12),
        )
        .unwrap();
        let f = reconstruct(&model, 1000).unwrap();
        assert!(f.lambda_powers_clamped);
        assert!(f.states.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn held_out_residual_matches_recomputation() {
        let model = contraction_model();
        let pairs = SnapshotSet::pairs(
            DMatrix::from_element(1, 1, 0.8),
            DMatrix::from_element(1, 1, 0.4),
        )
        .unwrap();
        let r = eigen_residuals(&model, &pairs).unwrap();
        let k = model.kernel();
        for (j, rj) in r.iter().enumerate() {
            let v = model.eigvecs().column(j);
            let phi = |p: f64| -> Complex64 {
                (0..model.rank())
                    .map(|i| v[i] * k.apply(&[p], &[model.centers()[(0, i)]]))
                    .sum()
            };
            let expect = (phi(0.4) - model.lambdas()[j] * phi(0.8)).norm();
            assert!(rj.is_finite());
            assert!((rj - expect).abs() <= 1e-12 * expect.max(1.0));
        }
    }
}
