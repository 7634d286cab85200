//! Runs the file-based pipeline on a synthetic travelling-wave field and
//! writes tables and PGM frames to a temporary directory (or the directory
//! given as the first argument).

use std::path::PathBuf;

use kdmd::io::{run_pipeline, save_snapshots, FieldGrid, IndexRange, RunConfig, SnapshotFormat};
use kdmd::{KernelSpec, RegularizationPolicy};
use nalgebra::DMatrix;

fn main() -> kdmd::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("kdmd-synthetic-pipeline"));
    std::fs::create_dir_all(&out)?;

    let (nx, ny) = (16, 8);
    let data = DMatrix::from_fn(nx * ny, 60, |k, t| {
        let (i, j) = ((k % nx) as f64, (k / nx) as f64);
        (-(j - 3.5).powi(2) / 6.0).exp() * (0.5 * i - 0.35 * t as f64).sin()
    });
    let input = out.join("field.bin");
    save_snapshots(&input, &data, SnapshotFormat::RawF64)?;

    let config = RunConfig {
        kernel: KernelSpec::gaussian_rbf(500.0),
        policy: RegularizationPolicy::default(),
        train: IndexRange::new(1, 20)?,
        predict: Some(IndexRange::new(22, 60)?),
        input,
        format: SnapshotFormat::RawF64,
        out_dir: out.join("run"),
        grid: Some(FieldGrid::new(nx, ny)?),
    };
    let report = run_pipeline(&config)?;
    println!("centers:                     {}", report.model.rank());
    println!(
        "max reconstruction error:    {:.3e}",
        report.max_reconstruction_error()
    );
    println!(
        "max prediction error:        {:.3e}",
        report.max_prediction_error()
    );
    println!("predicted frames:            {}", report.predicted_frames);
    println!("files written:               {}", report.written.len());
    println!("output directory:            {}", config.out_dir.display());
    Ok(())
}
