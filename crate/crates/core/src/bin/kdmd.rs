use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};

use kdmd::io::{self, FieldGrid, IndexRange, RunConfig, SnapshotFormat};
use kdmd::synth::{self, SynthSystem};
use kdmd::{
    DmdError, KernelKind, KernelSpec, RegularizationKind, RegularizationPolicy, SnapshotSet,
};

#[derive(Parser)]
#[command(name = "kdmd", version, about = "Kernel dynamic mode decomposition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct KernelArgs {
    /// gaussian_rbf, exp_dot_product, polynomial or linear
    #[arg(long, default_value = "gaussian_rbf")]
    kernel: String,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[arg(long, default_value_t = 2)]
    degree: u32,
    #[arg(long = "poly-offset", default_value_t = 1.0)]
    poly_offset: f64,
    /// tikhonov, truncated_svd or none
    #[arg(long, default_value = "tikhonov")]
    reg: String,
    /// Tikhonov weight relative to the largest Gram eigenvalue, or the SVD cutoff for truncated_svd.
    #[arg(long = "reg-lambda", default_value_t = 1e-10)]
    reg_lambda: f64,
}

impl KernelArgs {
    fn kernel(&self) -> Result<KernelSpec, DmdError> {
        let kind: KernelKind = self.kernel.parse()?;
        let spec = match kind {
            KernelKind::GaussianRbf => KernelSpec::gaussian_rbf(self.mu),
            KernelKind::ExpDotProduct => KernelSpec::exp_dot_product(self.mu),
            KernelKind::Polynomial => KernelSpec::polynomial(self.degree, self.poly_offset),
            KernelKind::Linear => KernelSpec::linear(),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn policy(&self) -> Result<RegularizationPolicy, DmdError> {
        let policy = match self.reg.parse()? {
            RegularizationKind::Tikhonov => RegularizationPolicy::tikhonov(self.reg_lambda),
            RegularizationKind::TruncatedSvd => {
                RegularizationPolicy::truncated_svd(self.reg_lambda)
            }
            RegularizationKind::None => RegularizationPolicy::none(),
        };
        policy.validate()?;
        Ok(policy)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Rotation,
    Affine,
    Scalar,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model to a snapshot file and save it.
    Fit {
        input: PathBuf,
        /// Image snapshots y_i = F(x_i); without it the input is a time series.
        #[arg(long)]
        images: Option<PathBuf>,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value = "csv")]
        format: String,
        /// Pair-domain index range a:b (1-based); defaults to all pairs.
        #[arg(long)]
        train: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct the training trajectory from a saved model.
    Reconstruct {
        model: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forecast from an arbitrary initial state.
    Predict {
        model: PathBuf,
        /// Comma-separated initial state.
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Eigenvalue table of a saved model.
    Eig {
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Koopman mode table of a saved model.
    Modes {
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-eigenfunction residuals on held-out pairs.
    Residuals {
        model: PathBuf,
        pairs: PathBuf,
        #[arg(long)]
        images: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate synthetic snapshots.
    Synth {
        #[arg(long, value_enum)]
        system: SystemArg,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        theta: f64,
        /// Affine matrix, rows separated by ';' (e.g. "0.5,0;0,0.5"), or the scalar factor.
        #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
        matrix: String,
        /// Affine offset vector.
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit on a training window, predict a later window, write all tables.
    Pipeline {
        input: PathBuf,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        train: String,
        #[arg(long)]
        predict: Option<String>,
        /// Field layout NXxNY for PGM frames.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_vector(s: &str) -> Result<Vec<f64>, DmdError> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| DmdError::Input(format!("bad number '{v}'")))
        })
        .collect()
}

fn parse_matrix(s: &str) -> Result<DMatrix<f64>, DmdError> {
    let rows: Vec<Vec<f64>> = s.split(';').map(parse_vector).collect::<Result<_, _>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(DmdError::Input(format!("matrix '{s}' is not square")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn emit(out: Option<&Path>, body: String) -> Result<(), DmdError> {
    match out {
        Some(p) => fs::write(p, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn load_pairs(
    input: &Path,
    images: Option<&Path>,
    format: SnapshotFormat,
) -> Result<SnapshotSet, DmdError> {
    let x = io::load_snapshots(input, format)?;
    match images {
        Some(y) => SnapshotSet::pairs(x, io::load_snapshots(y, format)?),
        None => SnapshotSet::time_series(x),
    }
}

fn run(cli: Cli) -> Result<(), DmdError> {
    match cli.command {
        Command::Fit {
            input,
            images,
            kernel,
            format,
            train,
            out,
        } => {
            let format: SnapshotFormat = format.parse()?;
            let mut set = load_pairs(&input, images.as_deref(), format)?;
            if let Some(range) = train {
                let r: IndexRange = range.parse()?;
                if r.end > set.n_pairs() {
                    return Err(DmdError::Input(format!(
                        "training range {r} exceeds {} pairs",
                        set.n_pairs()
                    )));
                }
                set = match set.y() {
                    Some(y) => SnapshotSet::pairs(
                        set.x().columns(r.start - 1, r.len()).into_owned(),
                        y.columns(r.start - 1, r.len()).into_owned(),
                    )?,
                    None => SnapshotSet::time_series(
                        set.x().columns(r.start - 1, r.len() + 1).into_owned(),
                    )?,
                };
            }
            let model = kdmd::fit(&set, &kernel.kernel()?, &kernel.policy()?)?;
            io::save_model(&out, &model)?;
            eprintln!(
                "fitted {} centers; model written to {}",
                model.rank(),
                out.display()
            );
        }
        Command::Reconstruct { model, steps, out } => {
            let model = io::load_model(model)?;
            let f = kdmd::reconstruct(&model, steps)?;
            emit(out.as_deref(), io::states_table(&f.states, 1))?;
        }
        Command::Predict {
            model,
            x0,
            steps,
            out,
        } => {
            let model = io::load_model(model)?;
            let f = kdmd::predict_from(&model, &parse_vector(&x0)?, steps)?;
            emit(out.as_deref(), io::states_table(&f.states, 1))?;
        }
        Command::Eig { model, out } => {
            let model = io::load_model(model)?;
            emit(out.as_deref(), io::eigenvalue_table(&model, None))?;
        }
        Command::Modes { model, out } => {
            let model = io::load_model(model)?;
            emit(out.as_deref(), io::mode_table(model.modes()))?;
        }
        Command::Residuals {
            model,
            pairs,
            images,
            format,
            out,
        } => {
            let model = io::load_model(model)?;
            let set = load_pairs(&pairs, images.as_deref(), format.parse()?)?;
            let r = kdmd::eigen_residuals(&model, &set)?;
            emit(out.as_deref(), io::eigenvalue_table(&model, Some(&r)))?;
        }
        Command::Synth {
            system,
            theta,
            matrix,
            offset,
            x0,
            m,
            format,
            out,
        } => {
            let x0 = parse_vector(&x0)?;
            let sys = match system {
                SystemArg::Rotation => {
                    let [a, b] = x0[..] else {
                        return Err(DmdError::Input("rotation needs a 2D --x0".into()));
                    };
                    SynthSystem::rotation(theta, [a, b], m)?
                }
                SystemArg::Affine => {
                    let a = parse_matrix(&matrix)?;
                    let b = match offset {
                        Some(o) => DVector::from_vec(parse_vector(&o)?),
                        None => DVector::zeros(a.nrows()),
                    };
                    SynthSystem::affine(a, b, DVector::from_vec(x0), m)?
                }
                SystemArg::Scalar => {
                    let [v] = x0[..] else {
                        return Err(DmdError::Input("scalar system needs a 1D --x0".into()));
                    };
                    let a = matrix
                        .trim()
                        .parse()
                        .map_err(|_| DmdError::Input(format!("bad factor '{matrix}'")))?;
                    SynthSystem::scalar_geometric(a, v, m)?
                }
            };
            let set = synth::generate(&sys);
            io::save_snapshots(&out, set.x(), format.parse()?)?;
        }
        Command::Pipeline {
            input,
            kernel,
            train,
            predict,
            grid,
            format,
            out,
        } => {
            let config = RunConfig {
                kernel: kernel.kernel()?,
                policy: kernel.policy()?,
                train: train.parse()?,
                predict: predict.map(|p| p.parse()).transpose()?,
                input,
                format: format.parse()?,
                out_dir: out,
                grid: grid.map(|g| g.parse::<FieldGrid>()).transpose()?,
            };
            let report = io::run_pipeline(&config)?;
            println!("centers: {}", report.model.rank());
            println!(
                "max reconstruction error: {:.6e}",
                report.max_reconstruction_error()
            );
            if report.predicted_frames > 0 {
                println!("predicted frames: {}", report.predicted_frames);
                println!(
                    "max prediction error: {:.6e}",
                    report.max_prediction_error()
                );
            }
            println!("output: {}", config.out_dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
