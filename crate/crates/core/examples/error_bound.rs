//! Measures eigenfunction residuals of a model fitted on noisy data and
//! compares the accumulated error along a trajectory with the geometric-sum
//! bound.

use kdmd::{
    eigen_residuals, eigenfunction_values, fit, pointwise_error_bound, KernelSpec,
    RegularizationPolicy, SnapshotSet,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> kdmd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = DMatrix::from_row_slice(2, 2, &[0.8, -0.3, 0.3, 0.8]);
    let train = DMatrix::from_fn(2, 8, |_, _| rng.gen_range(-1.5..1.5));
    let noise = DMatrix::from_fn(2, 8, |_, _| rng.gen_range(-0.02..0.02));
    let model = fit(
        &SnapshotSet::pairs(train.clone(), &a * &train + noise)?,
        &KernelSpec::gaussian_rbf(2.0),
        &RegularizationPolicy::default(),
    )?;

    let steps = 6;
    let mut chain = DMatrix::zeros(2, steps + 1);
    chain.set_column(0, &nalgebra::Vector2::new(1.0, 0.4));
    for i in 1..=steps {
        let next = &a * chain.column(i - 1);
        chain.set_column(i, &next);
    }
    let residuals = eigen_residuals(&model, &SnapshotSet::time_series(chain.clone())?)?;
    let ends = DMatrix::from_columns(&[chain.column(0), chain.column(steps)]);
    let phi = eigenfunction_values(&model, &ends)?;

    println!("  j   |lambda|    residual   realized    bound");
    for (j, l) in model.lambdas().iter().enumerate() {
        let realized = (phi[(j, 1)] - l.powi(steps as i32) * phi[(j, 0)]).norm();
        let bound = pointwise_error_bound(1.0, residuals[j], l.norm(), steps as u64 - 1);
        println!(
            "{j:3}   {:.4}    {:.3e}  {realized:.3e}  {bound:.3e}",
            l.norm(),
            residuals[j]
        );
    }
    Ok(())
}
