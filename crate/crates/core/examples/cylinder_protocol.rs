//! Runs the 151-snapshot train/predict protocol on a user-supplied dataset:
//! fit on snapshots 1 to 31, predict 32 to 151, for both exponential
//! kernels with mu = 500.
//!
//! ```text
//! cargo run --release --example cylinder_protocol -- DATA FORMAT OUT [NXxNY]
//! ```

use std::path::PathBuf;

use kdmd::io::{run_pipeline, FieldGrid, IndexRange, RunConfig, SnapshotFormat};
use kdmd::{DmdError, KernelSpec, RegularizationPolicy};

fn main() -> kdmd::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() < 3 {
        return Err(DmdError::Input(
            "usage: cylinder_protocol DATA csv|raw_f64 OUT [NXxNY]".into(),
        ));
    }
    let input = PathBuf::from(&args[0]);
    let format: SnapshotFormat = args[1].parse()?;
    let out = PathBuf::from(&args[2]);
    let grid: Option<FieldGrid> = args.get(3).map(|g| g.parse()).transpose()?;

    for (tag, kernel) in [
        ("gaussian_rbf", KernelSpec::gaussian_rbf(500.0)),
        ("exp_dot_product", KernelSpec::exp_dot_product(500.0)),
    ] {
        let config = RunConfig {
            kernel,
            policy: RegularizationPolicy::default(),
            train: IndexRange::new(1, 30)?,
            predict: Some(IndexRange::new(32, 151)?),
            input: input.clone(),
            format,
            out_dir: out.join(tag),
            grid,
        };
        let report = run_pipeline(&config)?;
        println!("{kernel}");
        for (s, e) in &report.reconstruction_errors {
            println!("  snapshot {s:3}: relative error {e:.3e}");
        }
        println!("  predicted frames: {}", report.predicted_frames);
    }
    Ok(())
}
