//! Forecasts the scalar map x -> x/2 from six snapshots, including from an
//! initial state that was never observed.

use kdmd::synth::{generate, SynthSystem};
use kdmd::{fit, predict_from, KernelSpec, RegularizationPolicy};

fn main() -> kdmd::Result<()> {
    let snapshots = generate(&SynthSystem::scalar_geometric(0.5, 1.0, 6)?);
    let model = fit(
        &snapshots,
        &KernelSpec::exp_dot_product(2.0),
        &RegularizationPolicy::default(),
    )?;

    for x0 in [1.0, 0.7] {
        let f = predict_from(&model, &[x0], 16)?;
        println!("x0 = {x0}");
        for i in 0..f.steps() {
            let truth = x0 * 0.5f64.powi(i as i32);
            let got = f.states[(0, i)];
            println!(
                "  step {:2}: {got:.8e}  error {:.1e}",
                i + 1,
                (got - truth).abs()
            );
        }
    }
    Ok(())
}
