//! File-level stages behind the command-line tool: simulate, fuse, evaluate
//! and the end-to-end experiment.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::attitude::ImuSample;
use crate::config::{ConfigError, RunConfig};
use crate::estimate::{
    evaluate, run_estimator, EstimateSeries, EstimatorKind, EstimatorParams, Metrics,
};
use crate::io::{self, CsvError};
use crate::series::uniform_step;
use crate::sim::{simulate, GroundTruthSample, NoiseConfig, Simulation};

pub const TRUTH_FILE: &str = "truth.csv";
pub const IMU_FILE: &str = "imu.csv";
pub const REPORT_FILE: &str = "report.txt";

pub fn estimates_file(kind: EstimatorKind) -> String {
    format!("estimates_{kind}.csv")
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: ConfigError },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: CsvError },
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Data {
        context: String,
        source: crate::Error,
    },
    #[error("{stage} stage: {source}")]
    Stage {
        stage: &'static str,
        source: Box<PipelineError>,
    },
}

impl PipelineError {
    /// 1 for configuration problems, 2 for data and output problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::ReadConfig { .. } | PipelineError::Config { .. } => 1,
            PipelineError::Stage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }

    fn in_stage(stage: &'static str) -> impl FnOnce(PipelineError) -> PipelineError {
        move |e| PipelineError::Stage {
            stage,
            source: Box::new(e),
        }
    }
}

fn data(context: impl Into<String>) -> impl FnOnce(crate::Error) -> PipelineError {
    let context = context.into();
    move |source| PipelineError::Data { context, source }
}

pub fn load_config(path: &Path) -> Result<RunConfig, PipelineError> {
    let text = fs::read_to_string(path).map_err(|source| PipelineError::ReadConfig {
        path: path.to_owned(),
        source,
    })?;
    text.parse().map_err(|source| PipelineError::Config {
        path: path.to_owned(),
        source,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, PipelineError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| PipelineError::Write {
            path: dir.to_owned(),
            source,
        })?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| PipelineError::Write {
            path: path.to_owned(),
            source,
        })
}

fn write_csv(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> Result<(), CsvError>,
) -> Result<(), PipelineError> {
    let mut w = create(path)?;
    f(&mut w).map_err(|source| PipelineError::Csv {
        path: path.to_owned(),
        source,
    })
}

fn open(path: &Path) -> Result<File, PipelineError> {
    File::open(path).map_err(|source| PipelineError::Csv {
        path: path.to_owned(),
        source: CsvError::Io(source),
    })
}

fn csv_err(path: &Path) -> impl FnOnce(CsvError) -> PipelineError + '_ {
    move |source| PipelineError::Csv {
        path: path.to_owned(),
        source,
    }
}

pub fn read_imu(path: &Path) -> Result<Vec<ImuSample>, PipelineError> {
    io::read_imu_csv(open(path)?).map_err(csv_err(path))
}

pub fn read_truth(path: &Path) -> Result<Vec<GroundTruthSample>, PipelineError> {
    io::read_truth_csv(open(path)?).map_err(csv_err(path))
}

pub fn read_estimates(path: &Path) -> Result<EstimateSeries, PipelineError> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    io::read_estimates_csv(open(path)?, &name).map_err(csv_err(path))
}

/// Simulates the configured run and writes `truth.csv` and `imu.csv` into
/// `out_dir`.
pub fn simulate_to_dir(cfg: &RunConfig, out_dir: &Path) -> Result<Simulation, PipelineError> {
    let sim = simulate(&cfg.trajectory, &cfg.noise).map_err(data("simulation"))?;
    write_csv(&out_dir.join(TRUTH_FILE), |w| {
        io::write_truth_csv(w, &sim.truth)
    })?;
    write_csv(&out_dir.join(IMU_FILE), |w| {
        io::write_imu_csv(w, &sim.noisy)
    })?;
    Ok(sim)
}

/// Runs one estimator over an IMU CSV and writes the estimates CSV.
pub fn fuse_file(
    imu_path: &Path,
    kind: EstimatorKind,
    params: &EstimatorParams,
    out_path: &Path,
) -> Result<EstimateSeries, PipelineError> {
    let samples = read_imu(imu_path)?;
    let series =
        run_estimator(&samples, kind, params).map_err(data(imu_path.display().to_string()))?;
    write_csv(out_path, |w| io::write_estimates_csv(w, &series))?;
    Ok(series)
}

/// Metrics of an estimates CSV against a truth CSV, rendered as a report.
pub fn eval_files(estimates_path: &Path, truth_path: &Path) -> Result<String, PipelineError> {
    let est = read_estimates(estimates_path)?;
    let truth = read_truth(truth_path)?;
    let ctx = format!("{} vs {}", estimates_path.display(), truth_path.display());
    let metrics = evaluate(&est, &truth).map_err(data(ctx.clone()))?;
    let times: Vec<f64> = truth.iter().map(|s| s.t).collect();
    let dt = uniform_step(&times).map_err(data(ctx))?;
    Ok(render_eval(&truth, dt, &metrics))
}

fn render_eval(truth: &[GroundTruthSample], dt: Option<f64>, m: &Metrics) -> String {
    let mut out = String::new();
    kv(&mut out, "samples", truth.len());
    kv(&mut out, "dt", dt.unwrap_or(0.0));
    kv(&mut out, "duration", duration(truth));
    kv(&mut out, "rmse", m.rmse);
    kv(&mut out, "final_drift", m.final_drift);
    kv(&mut out, "max_abs_error", m.max_abs_error);
    out
}

fn duration(truth: &[GroundTruthSample]) -> f64 {
    match truth {
        [first, .., last] => last.t - first.t,
        _ => 0.0,
    }
}

fn kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    writeln!(out, "{key} = {value}").expect("write to String");
}

/// Median of a non-empty slice; the mean of the two middle values for even
/// lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Per-estimator scores of a single seeded run.
#[derive(Debug, Clone)]
pub struct SeedResult {
    pub seed: u64,
    pub metrics: Vec<(EstimatorKind, Metrics)>,
}

impl SeedResult {
    pub fn get(&self, kind: EstimatorKind) -> Option<&Metrics> {
        self.metrics
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, m)| m)
    }
}

/// Simulates and scores every configured estimator for one seed, in memory.
pub fn score_seed(cfg: &RunConfig, seed: u64) -> Result<SeedResult, crate::Error> {
    let noise = NoiseConfig { seed, ..cfg.noise };
    let sim = simulate(&cfg.trajectory, &noise)?;
    let params = cfg.estimator_params();
    let metrics = cfg
        .estimators
        .iter()
        .map(|&kind| {
            let est = run_estimator(&sim.noisy, kind, &params)?;
            Ok((kind, evaluate(&est, &sim.truth)?))
        })
        .collect::<Result<_, crate::Error>>()?;
    Ok(SeedResult { seed, metrics })
}

/// Scores `runs` consecutive seeds starting at `first_seed`. Seeds are
/// evaluated in parallel; results come back in seed order.
pub fn monte_carlo(
    cfg: &RunConfig,
    first_seed: u64,
    runs: usize,
) -> Result<Vec<SeedResult>, crate::Error> {
    (0..runs as u64)
        .into_par_iter()
        .map(|i| score_seed(cfg, first_seed.wrapping_add(i)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub seed: u64,
    pub samples: usize,
    pub dt: f64,
    pub duration: f64,
    pub metrics: Vec<(EstimatorKind, Metrics)>,
    pub monte_carlo: Vec<SeedResult>,
}

impl ExperimentReport {
    /// Estimators ordered by ascending RMSE; ties keep configuration order.
    pub fn rmse_ranking(&self) -> Vec<EstimatorKind> {
        let mut ranked = self.metrics.clone();
        ranked.sort_by(|a, b| a.1.rmse.total_cmp(&b.1.rmse));
        ranked.into_iter().map(|(k, _)| k).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        kv(&mut out, "seed", self.seed);
        kv(&mut out, "samples", self.samples);
        kv(&mut out, "dt", self.dt);
        kv(&mut out, "duration", self.duration);
        for (kind, m) in &self.metrics {
            kv(&mut out, &format!("{kind}.rmse"), m.rmse);
            kv(&mut out, &format!("{kind}.final_drift"), m.final_drift);
            kv(&mut out, &format!("{kind}.max_abs_error"), m.max_abs_error);
        }
        let ranking: Vec<&str> = self.rmse_ranking().iter().map(|k| k.name()).collect();
        kv(&mut out, "ranking.rmse", ranking.join(","));

        if self.monte_carlo.len() > 1 {
            let runs = &self.monte_carlo;
            kv(&mut out, "monte_carlo.runs", runs.len());
            kv(&mut out, "monte_carlo.first_seed", runs[0].seed);
            for (kind, _) in &self.metrics {
                let col = |f: fn(&Metrics) -> f64| -> Vec<f64> {
                    runs.iter().filter_map(|r| r.get(*kind)).map(f).collect()
                };
                kv(
                    &mut out,
                    &format!("monte_carlo.{kind}.median_rmse"),
                    median(&col(|m| m.rmse)),
                );
                kv(
                    &mut out,
                    &format!("monte_carlo.{kind}.median_final_drift"),
                    median(&col(|m| m.final_drift)),
                );
            }
            for (a, _) in &self.metrics {
                for (b, _) in &self.metrics {
                    if a == b {
                        continue;
                    }
                    let wins = runs
                        .iter()
                        .filter(|r| match (r.get(*a), r.get(*b)) {
                            (Some(ma), Some(mb)) => ma.rmse < mb.rmse,
                            _ => false,
                        })
                        .count();
                    kv(&mut out, &format!("monte_carlo.rmse_wins.{a}_vs_{b}"), wins);
                }
            }
        }
        out
    }
}

/// Simulate, fuse with every configured estimator, evaluate, and write all
/// CSVs plus `report.txt` into `out_dir`. With `cfg.runs > 1` the report also
/// aggregates that many consecutive seeds.
pub fn run_experiment(cfg: &RunConfig, out_dir: &Path) -> Result<ExperimentReport, PipelineError> {
    cfg.validate().map_err(|source| PipelineError::Config {
        path: PathBuf::from("<config>"),
        source,
    })?;
    simulate_to_dir(cfg, out_dir).map_err(PipelineError::in_stage("simulate"))?;

    let imu_path = out_dir.join(IMU_FILE);
    let params = cfg.estimator_params();
    let mut estimates = Vec::new();
    for &kind in &cfg.estimators {
        let series = fuse_file(
            &imu_path,
            kind,
            &params,
            &out_dir.join(estimates_file(kind)),
        )
        .map_err(PipelineError::in_stage("fuse"))?;
        estimates.push((kind, series));
    }

    let eval =
        |estimates: &[(EstimatorKind, EstimateSeries)]| -> Result<ExperimentReport, PipelineError> {
            let truth = read_truth(&out_dir.join(TRUTH_FILE))?;
            let times: Vec<f64> = truth.iter().map(|s| s.t).collect();
            let dt = uniform_step(&times).map_err(data("truth"))?;
            let metrics = estimates
                .iter()
                .map(|(kind, est)| Ok((*kind, evaluate(est, &truth).map_err(data(kind.name()))?)))
                .collect::<Result<_, PipelineError>>()?;
            let monte_carlo = if cfg.runs > 1 {
                monte_carlo(cfg, cfg.noise.seed, cfg.runs).map_err(data("monte carlo"))?
            } else {
                Vec::new()
            };
            Ok(ExperimentReport {
                seed: cfg.noise.seed,
                samples: truth.len(),
                dt: dt.unwrap_or(cfg.trajectory.dt),
                duration: duration(&truth),
                metrics,
                monte_carlo,
            })
        };
    let report = eval(&estimates).map_err(PipelineError::in_stage("eval"))?;

    let report_path = out_dir.join(REPORT_FILE);
    let mut w = create(&report_path)?;
    std::io::Write::write_all(&mut w, report.render().as_bytes())
        .and_then(|_| std::io::Write::flush(&mut w))
        .map_err(|source| PipelineError::Write {
            path: report_path,
            source,
        })?;
    Ok(report)
}
