use std::path::{Path, PathBuf};
use std::process::ExitCode;

use attitude_fusion::config::RunConfig;
use attitude_fusion::estimate::EstimatorKind;
use attitude_fusion::pipeline::{self, PipelineError};
use clap::{Args, Parser, Subcommand};

/// Simulate noisy IMU data and compare pitch estimators.
#[derive(Debug, Parser)]
#[command(name = "attitude-eval", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write truth.csv and imu.csv for the configured trajectory and noise.
    Simulate(RunArgs),
    /// Run one estimator over an IMU CSV and write its estimates CSV.
    Fuse {
        /// IMU CSV (`t,ax,ay,az,gx,gy,gz`).
        imu: PathBuf,
        #[arg(long)]
        estimator: EstimatorKind,
        /// Config supplying gamma and Kalman tuning; defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory; defaults to the directory holding the IMU CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print rmse, final drift and max error of estimates against truth.
    Eval {
        /// Estimates CSV (`t,pitch_est`).
        estimates: PathBuf,
        /// Truth CSV (`t,pitch,pitch_rate`).
        truth: PathBuf,
    },
    /// Simulate, fuse with every configured estimator and evaluate.
    Experiment(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `noise.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, PipelineError> {
        let mut cfg = load(self.config.as_deref())?;
        if let Some(seed) = self.seed {
            cfg.noise.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(cfg)
    }
}

fn load(path: Option<&Path>) -> Result<RunConfig, PipelineError> {
    match path {
        Some(p) => pipeline::load_config(p),
        None => Ok(RunConfig::default()),
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Simulate(args) => {
            let cfg = args.resolve()?;
            pipeline::simulate_to_dir(&cfg, &cfg.output_dir)?;
            eprintln!("wrote {}", cfg.output_dir.display());
        }
        Command::Fuse {
            imu,
            estimator,
            config,
            out,
        } => {
            let cfg = load(config.as_deref())?;
            let dir = out.unwrap_or_else(|| {
                imu.parent()
                    .map(Path::to_path_buf)
                    .unwrap_or_else(|| PathBuf::from("."))
            });
            let path = dir.join(pipeline::estimates_file(estimator));
            pipeline::fuse_file(&imu, estimator, &cfg.estimator_params(), &path)?;
            eprintln!("wrote {}", path.display());
        }
        Command::Eval { estimates, truth } => {
            print!("{}", pipeline::eval_files(&estimates, &truth)?);
        }
        Command::Experiment(args) => {
            let cfg = args.resolve()?;
            let report = pipeline::run_experiment(&cfg, &cfg.output_dir)?;
            print!("{}", report.render());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
