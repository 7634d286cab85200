//! Fits the same data through the scalar route and through the block
//! (vector-valued) route and compares the results.

use kdmd::synth::{generate, SynthSystem};
use kdmd::{block_gram, fit, fit_vector_valued, KernelSpec, RegularizationPolicy};

fn main() -> kdmd::Result<()> {
    let snapshots = generate(&SynthSystem::rotation(0.9, [1.0, 0.5], 7)?);
    let kernel = KernelSpec::gaussian_rbf(1.5);
    let policy = RegularizationPolicy::default();

    let scalar = fit(&snapshots, &kernel, &policy)?;
    let block = fit_vector_valued(&snapshots, &kernel, &policy)?;
    let blocks = block_gram(&kernel, scalar.centers(), snapshots.dim())?;
    println!(
        "block gram is {0}x{0} ({1} blocks of {2}x{2})",
        blocks.block_size() * snapshots.dim(),
        snapshots.dim(),
        blocks.block_size()
    );

    let de = (scalar.lambdas() - block.lambdas())
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let dm = (scalar.modes() - block.modes())
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    println!("max eigenvalue difference: {de:.2e}");
    println!("max mode difference:       {dm:.2e}");
    Ok(())
}
