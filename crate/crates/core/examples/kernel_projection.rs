//! Projects a function onto kernel sections and recovers its weights, then
//! shows how regularization trades accuracy for stability on clustered
//! centers.

use kdmd::kernels::{gram_symmetric, KernelSpec};
use kdmd::{project, RegularizationPolicy};
use nalgebra::{DMatrix, DVector};

fn main() -> kdmd::Result<()> {
    let kernel = KernelSpec::gaussian_rbf(1.0);
    let centers = DMatrix::from_row_slice(1, 5, &[0.0, 5.0, 10.0, 15.0, 20.0]);
    let weights = DVector::from_row_slice(&[0.0, 2.0, 0.0, -1.0, 0.0]);
    let samples = gram_symmetric(&kernel, &centers)? * &weights;
    let w = project(
        &kernel,
        &centers,
        samples.as_slice(),
        &RegularizationPolicy::none(),
    )?;
    println!("separated centers, recovered weights: {w:.10?}");

    let clustered = DMatrix::from_row_slice(1, 5, &[0.0, 0.01, 0.02, 0.03, 0.04]);
    let samples = gram_symmetric(&kernel, &clustered)? * &weights;
    for policy in [
        RegularizationPolicy::none(),
        RegularizationPolicy::tikhonov(1e-10),
        RegularizationPolicy::truncated_svd(1e-12),
    ] {
        match project(&kernel, &clustered, samples.as_slice(), &policy) {
            Ok(w) => println!("clustered, {}: {w:.4?}", policy.kind.name()),
            Err(e) => println!("clustered, {}: {e}", policy.kind.name()),
        }
    }
    Ok(())
}
