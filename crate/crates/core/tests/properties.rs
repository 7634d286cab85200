mod common;

use common::*;
use kdmd::kernels::{gram, gram_symmetric};
use kdmd::*;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn matrix_strategy(max_p: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..=max_p).prop_flat_map(|p| {
        prop::collection::vec(-5.0..5.0f64, p * p).prop_map(move |v| DMatrix::from_vec(p, p, v))
    })
}

fn points_strategy(max_n: usize, max_p: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..=max_n, 1..=max_p).prop_flat_map(|(n, p)| {
        prop::collection::vec(-2.0..2.0f64, n * p).prop_map(move |v| DMatrix::from_vec(n, p, v))
    })
}

fn kernel_strategy() -> impl Strategy<Value = KernelSpec> {
    prop_oneof![
        (0.1..10.0f64).prop_map(KernelSpec::gaussian_rbf),
        (1.0..10.0f64).prop_map(KernelSpec::exp_dot_product),
        (1u32..4, 0.0..2.0f64).prop_map(|(d, c)| KernelSpec::polynomial(d, c)),
        Just(KernelSpec::linear()),
    ]
}

fn complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gram_is_symmetric_and_psd(points in points_strategy(5, 12), kernel in kernel_strategy()) {
        let g = gram_symmetric(&kernel, &points).unwrap();
        prop_assert_eq!(&g, &g.transpose());
        let scale = g.diagonal().max().max(1.0);
        prop_assert!(min_sym_eig(&g) >= -1e-10 * scale);
    }

    #[test]
    fn cross_gram_matches_symmetric_gram(points in points_strategy(4, 8), kernel in kernel_strategy()) {
        let a = gram(&kernel, &points, &points).unwrap();
        let g = gram_symmetric(&kernel, &points).unwrap();
        prop_assert_eq!(a, g);
    }

    #[test]
    fn eigenpairs_have_small_residuals(m in matrix_strategy(8)) {
        let es = eig_general(&m).unwrap();
        let mc = complex(&m);
        let norm = m.norm().max(1e-300);
        for (l, v) in es.pairs() {
            let r = (&mc * &v - &v * l).norm();
            prop_assert!(r <= 1e-8 * norm * v.norm(), "residual {r} for {l}");
        }
    }

    #[test]
    fn eigenvalues_survive_similarity(m in matrix_strategy(6), seed in any::<u64>()) {
        let p = m.nrows();
        let mut r = rng(seed);
        // well-conditioned similarity: identity plus a small perturbation
        let s = DMatrix::identity(p, p) + random_points(&mut r, p, p, 0.2);
        let s_inv = s.clone().try_inverse().unwrap();
        let similar = &s * &m * &s_inv;
        let a = eig_general(&m).unwrap();
        let b = eig_general(&similar).unwrap();
        let (d, _) = match_multisets(a.values.as_slice(), b.values.as_slice());
        prop_assert!(d <= 1e-7 * m.norm().max(1.0), "similarity drift {d}");
    }

    #[test]
    fn eigenvalues_match_library_schur(m in matrix_strategy(8)) {
        let es = eig_general(&m).unwrap();
        let (d, _) = match_multisets(es.values.as_slice(), &schur_eigenvalues(&m));
        prop_assert!(d <= 1e-8 * m.norm().max(1.0), "vs schur {d}");
    }

    #[test]
    fn projection_round_trip(
        weights in prop::collection::vec(-3.0..3.0f64, 2..=8),
        mu in 0.5..2.0f64,
    ) {
        let p = weights.len();
        // centers spread far apart relative to the bandwidth
        let centers = DMatrix::from_fn(2, p, |r, c| if r == 0 { 4.0 * c as f64 } else { (c % 2) as f64 });
        let k = gaussian(mu);
        let g = oracle_gram(&k, &centers);
        let samples = &g * DVector::from_vec(weights.clone());
        let got = project(&KernelSpec::gaussian_rbf(mu), &centers, samples.as_slice(), &RegularizationPolicy::none()).unwrap();
        for (a, b) in got.iter().zip(&weights) {
            prop_assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn geometric_sum_form(c in 0.1..3.0f64, eps in 0.0..1.0f64, lambda in 0.0..=2.0f64, m in 0u64..=100) {
        let direct: f64 = (0..=m).map(|k| lambda.powi(k as i32)).sum();
        let got = pointwise_error_bound(c, eps, lambda, m);
        let expected = c * eps * direct;
        prop_assert!((got - expected).abs() <= 1e-12 * expected.max(1.0), "{got} vs {expected}");
    }

    #[test]
    fn fit_is_invariant_under_pair_permutation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = 2;
        let p = 6;
        let a = random_with_radius(&mut r, n, 0.9);
        let x = random_points(&mut r, n, p, 1.5);
        let y = &a * &x;
        let kernel = KernelSpec::gaussian_rbf(1.0);
        let policy = RegularizationPolicy::none();
        let cond = sym_condition(&oracle_gram(gaussian(1.0), &x));
        prop_assume!(cond < 1e6);
        let base = fit(&SnapshotSet::pairs(x.clone(), y.clone()).unwrap(), &kernel, &policy).unwrap();
        let perm: Vec<usize> = (0..p).rev().collect();
        let xp = x.select_columns(&perm);
        let yp = y.select_columns(&perm);
        let shuffled = fit(&SnapshotSet::pairs(xp, yp).unwrap(), &kernel, &policy).unwrap();
        let (d, _) = match_multisets(base.lambdas().as_slice(), shuffled.lambdas().as_slice());
        prop_assert!(d <= 1e-8, "eigenvalue drift {d}");
        // the fitted eigenfunctions agree as functions, up to a phase
        let probe = random_points(&mut r, n, 4, 1.0);
        let fa = eigenfunction_values(&base, &probe).unwrap();
        let fb = eigenfunction_values(&shuffled, &probe).unwrap();
        let (_, assign) = match_multisets(base.lambdas().as_slice(), shuffled.lambdas().as_slice());
        for (j, &k) in assign.iter().enumerate() {
            let l = base.lambdas()[j];
            let isolated = base.lambdas().iter().enumerate().all(|(i, o)| i == j || (o - l).norm() > 1e-4);
            if isolated {
                let a_row = fa.row(j).transpose();
                let b_row = fb.row(k).transpose();
                prop_assert!(phase_aligned_distance(&a_row, &b_row) <= 1e-5);
            }
        }
    }

    #[test]
    fn bound_is_realized_along_chains(seed in any::<u64>(), steps in 2usize..8) {
        let mut r = rng(seed);
        let a = random_with_radius(&mut r, 2, 0.95);
        let x0 = random_points(&mut r, 2, 1, 1.5);
        let mut chain = DMatrix::zeros(2, steps + 1);
        chain.set_column(0, &x0.column(0));
        for i in 1..=steps {
            let next = &a * chain.column(i - 1);
            chain.set_column(i, &next);
        }
        // model fitted on unrelated data, so residuals are genuinely nonzero
        let train = random_points(&mut r, 2, 5, 1.5);
        let train_y = &a * &train + random_points(&mut r, 2, 5, 0.05);
        let model = fit(
            &SnapshotSet::pairs(train, train_y).unwrap(),
            &KernelSpec::gaussian_rbf(2.0),
            &RegularizationPolicy::default(),
        ).unwrap();
        let chain_set = SnapshotSet::time_series(chain.clone()).unwrap();
        let res = eigen_residuals(&model, &chain_set).unwrap();
        let ends = DMatrix::from_columns(&[chain.column(0), chain.column(steps)]);
        let phi = eigenfunction_values(&model, &ends).unwrap();
        for (j, l) in model.lambdas().iter().enumerate() {
            let lhs = (phi[(j, 1)] - l.powi(steps as i32) * phi[(j, 0)]).norm();
            let rhs = pointwise_error_bound(1.0, res[j], l.norm(), steps as u64 - 1) + 1e-9;
            prop_assert!(lhs <= rhs, "j={j}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn tikhonov_converges_to_exact_solve(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pts = random_points(&mut r, 2, 6, 3.0);
        let g = oracle_gram(gaussian(1.0), &pts);
        prop_assume!(sym_condition(&g) < 1e4);
        let b = random_points(&mut r, 6, 2, 1.0);
        let exact = solve_gram(&g, &b, &RegularizationPolicy::none()).unwrap();
        let mut prev = f64::INFINITY;
        for lambda in [1e-2, 1e-4, 1e-6, 1e-8, 1e-10] {
            let w = solve_gram(&g, &b, &RegularizationPolicy::tikhonov(lambda)).unwrap();
            let err = (&w - &exact).norm();
            prop_assert!(err <= prev * 1.0001 + 1e-13);
            prev = err;
        }
        prop_assert!(prev <= 1e-6 * exact.norm().max(1.0));
    }
}
