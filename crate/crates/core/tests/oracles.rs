mod common;

use std::f64::consts::FRAC_PI_2;

use common::*;
use kdmd::kernels::gram_symmetric;
use kdmd::synth::{generate, oracle_dmd, SynthSystem};
use kdmd::*;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

#[test]
fn tikhonov_solve_matches_dense_pseudo_inverse() {
    let mut r = rng(11);
    let pts = DMatrix::from_fn(2, 8, |row, c| {
        3.0 * c as f64 + if row == 0 { 0.0 } else { (c % 3) as f64 }
    });
    let g = oracle_gram(gaussian(2.0), &pts);
    let b = random_points(&mut r, 8, 3, 1.0);
    let expected = pinv(&g) * &b;
    let got = solve_gram(&g, &b, &RegularizationPolicy::tikhonov(1e-10)).unwrap();
    assert!((&got - &expected).norm() <= 1e-6 * expected.norm());
}

#[test]
fn random_gram_matrices_are_psd() {
    let mut r = rng(12);
    for t in 0..10 {
        let pts = random_points(&mut r, 3, 10, 1.0);
        for kernel in [
            KernelSpec::gaussian_rbf(0.5),
            KernelSpec::exp_dot_product(1.0),
        ] {
            let g = gram_symmetric(&kernel, &pts).unwrap();
            let min = min_sym_eig(&g);
            assert!(min >= -1e-10, "set {t}, {kernel}: {min}");
        }
    }
}

#[test]
fn gram_matches_closed_form_kernels() {
    let mut r = rng(13);
    let pts = random_points(&mut r, 3, 7, 1.0);
    let g = gram_symmetric(&KernelSpec::gaussian_rbf(0.7), &pts).unwrap();
    assert!((g - oracle_gram(gaussian(0.7), &pts)).amax() <= 1e-14);
    let g = gram_symmetric(&KernelSpec::exp_dot_product(1.3), &pts).unwrap();
    let o = oracle_gram(exp_dot(1.3), &pts);
    assert!((&g - &o).amax() <= 1e-14 * o.amax());
}

#[test]
fn projection_recovers_sparse_weights() {
    let centers = DMatrix::from_row_slice(1, 5, &[0.0, 5.0, 10.0, 15.0, 20.0]);
    let weights = [0.0, 2.0, 0.0, -1.0, 0.0];
    let g = oracle_gram(gaussian(1.0), &centers);
    let samples = &g * DVector::from_row_slice(&weights);
    let got = project(
        &KernelSpec::gaussian_rbf(1.0),
        &centers,
        samples.as_slice(),
        &RegularizationPolicy::none(),
    )
    .unwrap();
    for (a, b) in got.iter().zip(weights) {
        assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
    }
}

#[test]
fn companion_matrix_roots() {
    // z^4 - 1 = (z^2 - 1)(z^2 + 1)
    let c = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, 0.0, 1.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    );
    let es = eig_general(&c).unwrap();
    let (d, _) = match_multisets(es.values.as_slice(), &roots_of_unity(4));
    assert!(d <= 1e-12);
}

#[test]
fn rotation_fit_matches_oracle() {
    let s = generate(&SynthSystem::rotation(FRAC_PI_2, [1.0, 0.0], 5).unwrap());
    let kernel = KernelSpec::gaussian_rbf(2.0);
    let model = fit(&s, &kernel, &RegularizationPolicy::none()).unwrap();
    let o = oracle_dmd(&s, &kernel).unwrap();
    let (d, assign) = match_multisets(model.lambdas().as_slice(), &o.lambdas);
    assert!(d <= 1e-10);
    assert!((model.rep() - &o.rep).norm() <= 1e-10);
    for (j, &k) in assign.iter().enumerate() {
        let a = model.modes().column(j).into_owned();
        let b = o.modes.column(k).into_owned();
        assert!(phase_aligned_distance_scaled(&a, &b, model.modes().norm()) <= 1e-8);
    }
}

#[test]
fn scalar_affine_spectrum_matches_dense_eig() {
    // x_{i+1} = 0.8 x_i + 0.1, evaluated with an exp-dot kernel
    let s = generate(
        &SynthSystem::affine(
            DMatrix::from_element(1, 1, 0.8),
            DVector::from_element(1, 0.1),
            DVector::from_element(1, 2.0),
            6,
        )
        .unwrap(),
    );
    let kernel = KernelSpec::exp_dot_product(2.0);
    let model = fit(&s, &kernel, &RegularizationPolicy::none()).unwrap();
    let x = s.domain();
    let y = s.images();
    let k = exp_dot(2.0);
    let g = oracle_gram(&k, &x);
    let a = DMatrix::from_fn(x.ncols(), x.ncols(), |i, j| k(&[y[(0, i)]], &[x[(0, j)]]));
    let dense = g.lu().solve(&a).unwrap();
    let (d, _) = match_multisets(model.lambdas().as_slice(), &schur_eigenvalues(&dense));
    assert!(d <= 1e-6, "{d}");
}

#[test]
fn eigenvalues_of_real_fits_come_in_conjugate_pairs() {
    let s = generate(&SynthSystem::rotation(0.7, [1.0, 0.3], 8).unwrap());
    let model = fit(
        &s,
        &KernelSpec::gaussian_rbf(1.0),
        &RegularizationPolicy::default(),
    )
    .unwrap();
    let l = model.lambdas();
    for v in l.iter() {
        assert!(l
            .iter()
            .any(|w| (w - v.conj()).norm() <= 1e-10 * v.norm().max(1.0)));
    }
    let f = reconstruct(&model, 12).unwrap();
    let scale = f.states.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    assert!(f.imag_residual <= 1e-6 * scale);
}

#[test]
fn fitted_eigenfunctions_satisfy_the_representation() {
    // phi_j(y_i) = (A v_j)_i and lambda_j phi_j(x_i) = (G rep v_j)_i agree on training data
    let s = generate(&SynthSystem::rotation(FRAC_PI_2, [1.0, 0.0], 5).unwrap());
    let model = fit(
        &s,
        &KernelSpec::gaussian_rbf(2.0),
        &RegularizationPolicy::none(),
    )
    .unwrap();
    let res = eigen_residuals(&model, &s).unwrap();
    assert!(res.iter().all(|r| *r <= 1e-8), "{res:?}");
}

#[test]
fn identity_dynamics_have_zero_residuals() {
    let mut r = rng(14);
    let x = random_points(&mut r, 2, 4, 1.0);
    let s = SnapshotSet::pairs(x.clone(), x).unwrap();
    let model = fit(
        &s,
        &KernelSpec::gaussian_rbf(1.0),
        &RegularizationPolicy::none(),
    )
    .unwrap();
    let res = eigen_residuals(&model, &s).unwrap();
    assert!(res.iter().all(|v| *v <= 1e-8), "{res:?}");
}

#[test]
fn contraction_held_out_residual_matches_recomputation() {
    let x = DMatrix::from_row_slice(1, 6, &[1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125]);
    let s = SnapshotSet::time_series(x).unwrap();
    let model = fit(
        &s,
        &KernelSpec::exp_dot_product(2.0),
        &RegularizationPolicy::none(),
    )
    .unwrap();
    let held = SnapshotSet::pairs(
        DMatrix::from_element(1, 1, 0.8),
        DMatrix::from_element(1, 1, 0.4),
    )
    .unwrap();
    let res = eigen_residuals(&model, &held).unwrap();
    // recompute phi_j(p) = sum_i v_ij K(p, x_i) by hand
    let k = exp_dot(2.0);
    let centers = model.centers();
    let phi = |p: f64, j: usize| -> Complex64 {
        (0..centers.ncols())
            .map(|i| model.eigvecs()[(i, j)] * k(&[p], &[centers[(0, i)]]))
            .sum()
    };
    for (j, l) in model.lambdas().iter().enumerate() {
        let expected = (phi(0.4, j) - l * phi(0.8, j)).norm();
        assert!(res[j].is_finite());
        assert!((res[j] - expected).abs() <= 1e-9 * expected.max(1.0));
    }
}

#[test]
fn block_gram_spectrum_repeats_scalar_spectrum() {
    let mut r = rng(15);
    let pts = random_points(&mut r, 2, 4, 1.0);
    let kernel = KernelSpec::gaussian_rbf(1.0);
    let scalar = gram_symmetric(&kernel, &pts)
        .unwrap()
        .symmetric_eigenvalues();
    let block = block_gram(&kernel, &pts, 3).unwrap().materialize();
    let mut got: Vec<f64> = block.symmetric_eigenvalues().iter().copied().collect();
    let mut want: Vec<f64> = scalar.iter().flat_map(|v| [*v; 3]).collect();
    got.sort_by(f64::total_cmp);
    want.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn vector_valued_fit_agrees_with_scalar_fit() {
    let s = generate(&SynthSystem::rotation(0.9, [1.0, 0.5], 7).unwrap());
    let kernel = KernelSpec::gaussian_rbf(1.5);
    let policy = RegularizationPolicy::default();
    let a = fit(&s, &kernel, &policy).unwrap();
    let b = fit_vector_valued(&s, &kernel, &policy).unwrap();
    assert!((a.lambdas() - b.lambdas()).norm() <= 1e-12);
    assert!((a.modes() - b.modes()).norm() <= 1e-12 * a.modes().norm().max(1.0));
}
