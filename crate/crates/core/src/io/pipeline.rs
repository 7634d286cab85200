//! Train-on-a-window, predict-the-rest protocol.
//!
//! Snapshots are indexed from 1. A training range `a:b` fits on the pairs
//! `(x_i, x_{i+1})` for `i = a..=b`, so snapshot `b + 1` must exist. The
//! forecast is anchored at `x_a`, and snapshot `s` is predicted with
//! eigenvalue power `s - a`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;

use super::{
    eigenvalue_table, error_table, load_snapshots, mode_table, relative_error, save_model,
    states_table, write_pgm, FieldGrid, SnapshotFormat,
};
use crate::error::{DmdError, Result};
use crate::forecast::{eigen_residuals, predict_from};
use crate::kernels::KernelSpec;
use crate::koopman::{fit, KoopmanModel, SnapshotSet};
use crate::numerics::RegularizationPolicy;

/// Inclusive 1-based snapshot index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexRange {
    pub start: usize,
    pub end: usize,
}

impl IndexRange {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start == 0 || end < start {
            return Err(DmdError::input(format!(
                "invalid index range {start}:{end}"
            )));
        }
        Ok(IndexRange { start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for IndexRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

impl FromStr for IndexRange {
    type Err = DmdError;

    /// `a:b` or `a-b`, both ends inclusive.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once([':', '-'])
            .ok_or_else(|| DmdError::input(format!("range '{s}' is not of the form a:b")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| DmdError::input(format!("bad range bound '{v}'")))
        };
        IndexRange::new(parse(a)?, parse(b)?)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kernel: KernelSpec,
    pub policy: RegularizationPolicy,
    /// Pair-domain indices used for fitting.
    pub train: IndexRange,
    pub predict: Option<IndexRange>,
    pub input: PathBuf,
    pub format: SnapshotFormat,
    pub out_dir: PathBuf,
    pub grid: Option<FieldGrid>,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub model: KoopmanModel,
    /// `(snapshot index, relative error)` over the training snapshots.
    pub reconstruction_errors: Vec<(usize, f64)>,
    pub prediction_errors: Vec<(usize, f64)>,
    pub predicted_frames: usize,
    pub imag_residual: f64,
    pub written: Vec<PathBuf>,
}

impl PipelineReport {
    pub fn max_reconstruction_error(&self) -> f64 {
        self.reconstruction_errors
            .iter()
            .map(|e| e.1)
            .fold(0.0, f64::max)
    }

    pub fn max_prediction_error(&self) -> f64 {
        self.prediction_errors
            .iter()
            .map(|e| e.1)
            .fold(0.0, f64::max)
    }
}

/// Loads the configured dataset and runs the protocol on it.
pub fn run_pipeline(config: &RunConfig) -> Result<PipelineReport> {
    let data = load_snapshots(&config.input, config.format)?;
    run_pipeline_on(&data, config)
}

/// Runs the protocol on an in-memory snapshot matrix (`config.input` unused).
pub fn run_pipeline_on(data: &DMatrix<f64>, config: &RunConfig) -> Result<PipelineReport> {
    let (n, m) = data.shape();
    let train = config.train;
    if train.len() < 2 {
        return Err(DmdError::input(format!(
            "training range {train} has fewer than 2 pairs"
        )));
    }
    if train.end + 1 > m {
        return Err(DmdError::input(format!(
            "training range {train} needs snapshot {} but the dataset has {m}",
            train.end + 1
        )));
    }
    if let Some(pr) = config.predict {
        if pr.end > m {
            return Err(DmdError::input(format!(
                "prediction range {pr} exceeds the {m} available snapshots"
            )));
        }
        if pr.start < train.start {
            return Err(DmdError::input(format!(
                "prediction range {pr} starts before the training anchor {}",
                train.start
            )));
        }
    }
    if let Some(grid) = &config.grid {
        grid.check_dim(n)?;
    }

    let window = data.columns(train.start - 1, train.len() + 1).into_owned();
    let snapshots = SnapshotSet::time_series(window)?;
    let model = fit(&snapshots, &config.kernel, &config.policy)?;
    let residuals = eigen_residuals(&model, &snapshots)?;

    let last = config
        .predict
        .map_or(train.end + 1, |p| p.end.max(train.end + 1));
    let anchor = data.column(train.start - 1).into_owned();
    let forecast = predict_from(&model, anchor.as_slice(), last - train.start + 1)?;
    let column_of = |snapshot: usize| snapshot - train.start;

    fs::create_dir_all(&config.out_dir)?;
    let out = &config.out_dir;
    let mut written = Vec::new();
    let mut emit = |name: &str, body: String| -> Result<()> {
        let path = out.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };

    emit(
        "eigenvalues.csv",
        eigenvalue_table(&model, Some(&residuals)),
    )?;
    emit("modes.csv", mode_table(model.modes()))?;

    let recon_range = train.start..=train.end + 1;
    let recon = forecast.states.columns(0, train.len() + 1).into_owned();
    emit("reconstruction.csv", states_table(&recon, train.start))?;
    let reconstruction_errors: Vec<(usize, f64)> = recon_range
        .clone()
        .map(|s| {
            let est = forecast.states.column(column_of(s));
            (
                s,
                relative_error(est.as_slice(), data.column(s - 1).as_slice()),
            )
        })
        .collect();
    emit(
        "reconstruction_error.csv",
        error_table(&reconstruction_errors),
    )?;

    let mut prediction_errors = Vec::new();
    let mut predicted_frames = 0;
    if let Some(pr) = config.predict {
        let pred = forecast
            .states
            .columns(column_of(pr.start), pr.len())
            .into_owned();
        emit("prediction.csv", states_table(&pred, pr.start))?;
        prediction_errors = (pr.start..=pr.end)
            .map(|s| {
                let est = forecast.states.column(column_of(s));
                (
                    s,
                    relative_error(est.as_slice(), data.column(s - 1).as_slice()),
                )
            })
            .collect();
        emit("prediction_error.csv", error_table(&prediction_errors))?;
        predicted_frames = pr.len();
    }

    let model_path = out.join("model.kdmd");
    save_model(&model_path, &model)?;
    written.push(model_path);

    if let Some(grid) = &config.grid {
        let frames = out.join("frames");
        fs::create_dir_all(&frames)?;
        let mut frame = |prefix: &str, s: usize| -> Result<()> {
            let path = frames.join(format!("{prefix}_{s:04}.pgm"));
            write_pgm(&path, forecast.states.column(column_of(s)).as_slice(), grid)?;
            written.push(path);
            Ok(())
        };
        for s in recon_range {
            frame("reconstruction", s)?;
        }
        if let Some(pr) = config.predict {
            for s in pr.start..=pr.end {
                frame("prediction", s)?;
            }
        }
    }

    log::info!(
        "pipeline: fitted {} centers, {} predicted frames, written to {}",
        model.rank(),
        predicted_frames,
        display(out)
    );
    Ok(PipelineReport {
        model,
        reconstruction_errors,
        prediction_errors,
        predicted_frames,
        imag_residual: forecast.imag_residual,
        written,
    })
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
