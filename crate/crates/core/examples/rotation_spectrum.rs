//! Fits a quarter-turn rotation cycle and prints the recovered spectrum and
//! an eight-step reconstruction.

use std::f64::consts::FRAC_PI_2;

use kdmd::synth::{generate, SynthSystem};
use kdmd::{fit, reconstruct, KernelSpec, RegularizationPolicy};

fn main() -> kdmd::Result<()> {
    let snapshots = generate(&SynthSystem::rotation(FRAC_PI_2, [1.0, 0.0], 5)?);
    let model = fit(
        &snapshots,
        &KernelSpec::gaussian_rbf(2.0),
        &RegularizationPolicy::default(),
    )?;

    println!("eigenvalues:");
    for l in model.lambdas().iter() {
        println!("  {:+.6} {:+.6}i   |l| = {:.6}", l.re, l.im, l.norm());
    }

    let f = reconstruct(&model, 8)?;
    println!("reconstruction:");
    for i in 0..f.steps() {
        let s = f.state(i);
        println!("  step {}: ({:+.6}, {:+.6})", i + 1, s[0], s[1]);
    }
    println!("largest discarded imaginary part: {:.2e}", f.imag_residual);
    Ok(())
}
