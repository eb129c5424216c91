//! Subcommands of the `qhpo` binary. Each one reads a TOML run configuration,
//! computes everything in memory and only then writes into the output directory.

pub mod config;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use qhpo::pipeline::{
    generate_sample_table, render_table, run_classical_baseline, run_quantum_hpo, BaselineOutcome,
};
use qhpo::{Assignment, Checkpoint, Surrogate};

pub use config::{FlagDefaults, RunConfig, OUTPUT_DIR_ENV};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    Optimize,
    Baseline,
    Surface,
}

pub const SAMPLES_CSV: &str = "samples.csv";
pub const SAMPLES_META: &str = "samples.meta.json";
pub const BASELINE_JSON: &str = "baseline.json";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_TXT: &str = "report.txt";
pub const BEST_JSON: &str = "best.json";
pub const MODEL_JSON: &str = "model.json";
pub const SURFACE_CSV: &str = "surface.csv";

/// Best configurations of an optimize run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestFile {
    pub proposed: Assignment,
    pub predicted_score: Option<f64>,
    pub proposed_cv_score: f64,
    pub baseline: Assignment,
    pub baseline_cv_score: f64,
}

struct Pending {
    files: Vec<(&'static str, String)>,
    /// Set when the run should exit non-zero after its outputs are written.
    failure: Option<CliError>,
}

impl Pending {
    fn ok(files: Vec<(&'static str, String)>) -> Self {
        Self { files, failure: None }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("outputs serialize");
    text.push('\n');
    text
}

/// Runs `command` and returns the paths it wrote.
pub fn run(command: Command, config: &RunConfig, verbose: u8) -> Result<Vec<PathBuf>, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = config.threads {
        builder = builder.num_threads(threads);
    }
    let pool = builder.build().map_err(runtime)?;
    let pending = pool.install(|| match command {
        Command::Generate => generate(config, verbose),
        Command::Baseline => baseline(config, verbose),
        Command::Optimize => optimize(config, verbose),
        Command::Surface => surface(config, verbose),
    })?;

    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| runtime(format!("{}: {e}", config.output_dir.display())))?;
    let mut written = Vec::with_capacity(pending.files.len());
    for (name, content) in pending.files {
        let path = config.output_dir.join(name);
        std::fs::write(&path, content).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
        if verbose > 0 {
            eprintln!("wrote {}", path.display());
        }
        written.push(path);
    }
    match pending.failure {
        Some(e) => Err(e),
        None => Ok(written),
    }
}

fn generate(config: &RunConfig, verbose: u8) -> Result<Pending, CliError> {
    let objective = config.objective()?;
    config.quantum.plan.validate(&config.space).map_err(|e| CliError::Config(e.to_string()))?;
    let generated = generate_sample_table(&objective, &config.space, &config.quantum.plan).map_err(runtime)?;
    if verbose > 0 {
        eprintln!(
            "scored {} samples in {:.3} s ({} failed)",
            generated.table.len(),
            generated.evaluation_time_s,
            generated.n_failed()
        );
    }
    Ok(Pending::ok(vec![
        (SAMPLES_CSV, generated.to_csv().map_err(runtime)?),
        (SAMPLES_META, to_json(&generated.metadata(&config.space, &config.quantum.plan))),
    ]))
}

fn run_baseline(config: &RunConfig, verbose: u8) -> Result<BaselineOutcome, CliError> {
    let objective = config.objective()?;
    let settings = &config.baseline;
    let outcome = run_classical_baseline(&objective, &config.space, &settings.method, settings.budget, settings.seed)
        .map_err(|e| match e {
            qhpo::pipeline::PipelineError::Config(m) => CliError::Config(m),
            other => runtime(other),
        })?;
    if verbose > 0 {
        eprintln!(
            "{} baseline: {} evaluations in {:.3} s, best {}",
            outcome.method, outcome.n_evaluations, outcome.elapsed_s, outcome.best_score
        );
    }
    Ok(outcome)
}

fn baseline(config: &RunConfig, verbose: u8) -> Result<Pending, CliError> {
    Ok(Pending::ok(vec![(BASELINE_JSON, to_json(&run_baseline(config, verbose)?))]))
}

fn optimize(config: &RunConfig, verbose: u8) -> Result<Pending, CliError> {
    let objective = config.objective()?;
    config.quantum.plan.validate(&config.space).map_err(|e| CliError::Config(e.to_string()))?;
    let reference = run_baseline(config, verbose)?;
    let outcome = run_quantum_hpo(&objective, &config.space, &config.quantum, &reference);
    let report = &outcome.report;

    let mut files = vec![
        (REPORT_JSON, {
            let mut text = report.to_json();
            text.push('\n');
            text
        }),
        (REPORT_TXT, render_table(std::slice::from_ref(report))),
        (BASELINE_JSON, to_json(&reference)),
    ];
    if let Some(table) = &outcome.table {
        files.push((SAMPLES_CSV, table.to_csv().map_err(runtime)?));
    }
    if let Some(checkpoint) = &outcome.checkpoint {
        files.push((MODEL_JSON, checkpoint.to_json() + "\n"));
    }
    if let Some(best) = &outcome.best {
        files.push((
            BEST_JSON,
            to_json(&BestFile {
                proposed: best.clone(),
                predicted_score: report.predicted_score,
                proposed_cv_score: report.proposed_cv_score,
                baseline: reference.best.clone(),
                baseline_cv_score: reference.best_score,
            }),
        ));
    }
    if verbose > 0 {
        eprint!("{}", render_table(std::slice::from_ref(report)));
    }
    let failure = match (&report.error, report.validate()) {
        (Some(e), _) => Some(CliError::Runtime(e.clone())),
        (None, Err(e)) => Some(CliError::Runtime(format!("report failed validation: {e}"))),
        (None, Ok(())) => None,
    };
    Ok(Pending { files, failure })
}

fn surface(config: &RunConfig, verbose: u8) -> Result<Pending, CliError> {
    let settings = config
        .surface
        .as_ref()
        .ok_or_else(|| CliError::Config("the surface command needs a [surface] section".into()))?;
    let text = std::fs::read_to_string(&settings.checkpoint)
        .map_err(|e| CliError::Config(format!("{}: {e}", settings.checkpoint.display())))?;
    let checkpoint = Checkpoint::from_json(&text).map_err(|e| CliError::Config(e.to_string()))?;
    checkpoint.check_space(&config.space).map_err(|e| CliError::Config(e.to_string()))?;
    let model: Surrogate = checkpoint.model().map_err(|e| CliError::Config(e.to_string()))?;

    let names = config.space.encoded_names();
    if !(1..=2).contains(&settings.axes.len()) {
        return Err(CliError::Config("surface needs one or two axes".into()));
    }
    if settings.points < 2 {
        return Err(CliError::Config("surface needs at least 2 points per axis".into()));
    }
    let mut axes = Vec::with_capacity(settings.axes.len());
    for axis in &settings.axes {
        let index = names
            .iter()
            .position(|n| n == axis)
            .ok_or_else(|| CliError::Config(format!("unknown encoded column `{axis}`; expected one of {names:?}")))?;
        if axes.contains(&index) {
            return Err(CliError::Config(format!("axis `{axis}` repeated")));
        }
        axes.push(index);
    }
    let mut base = vec![PI / 2.0; names.len()];
    for (name, value) in &settings.fixed {
        let index = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| CliError::Config(format!("unknown encoded column `{name}`")))?;
        if !(0.0..=PI).contains(value) {
            return Err(CliError::Config(format!("fixed value for `{name}` must lie in [0, π]")));
        }
        base[index] = *value;
    }

    let ticks: Vec<f64> = (0..settings.points).map(|j| PI * j as f64 / (settings.points - 1) as f64).collect();
    let points: Vec<Vec<f64>> = if axes.len() == 1 {
        ticks.iter().map(|&t| vec![t]).collect()
    } else {
        ticks.iter().flat_map(|&a| ticks.iter().map(move |&b| vec![a, b])).collect()
    };
    let values = points
        .par_iter()
        .map(|coords| {
            let mut x = base.clone();
            for (&axis, &c) in axes.iter().zip(coords) {
                x[axis] = c;
            }
            model.evaluate(&x)
        })
        .collect::<Result<Vec<f64>, _>>()
        .map_err(runtime)?;

    let mut out = settings.axes.join(",");
    out.push_str(",value");
    if checkpoint.score_bounds.is_some() {
        out.push_str(",score");
    }
    out.push('\n');
    for (coords, value) in points.iter().zip(&values) {
        let mut cells: Vec<String> = coords.iter().map(f64::to_string).collect();
        cells.push(value.to_string());
        if let Some(bounds) = checkpoint.score_bounds {
            cells.push(bounds.denormalize(*value).to_string());
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    if verbose > 0 {
        eprintln!("evaluated {} surface points", values.len());
    }
    Ok(Pending::ok(vec![(SURFACE_CSV, out)]))
}

/// Parses a surface CSV written by [`run`] into `(coordinates, value)` rows.
pub fn read_surface(path: &Path) -> Result<Vec<(Vec<f64>, f64)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(runtime)?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let n_axes = header.iter().position(|h| *h == "value").ok_or_else(|| runtime("surface file has no value column"))?;
    lines
        .map(|line| {
            let cells: Vec<f64> = line.split(',').map(str::parse).collect::<Result<_, _>>().map_err(runtime)?;
            Ok((cells[..n_axes].to_vec(), cells[n_axes]))
        })
        .collect()
}

/// Ordered `name → value` view of a JSON file's top-level object.
pub fn read_json_object(path: &Path) -> Result<IndexMap<String, serde_json::Value>, CliError> {
    let text = std::fs::read_to_string(path).map_err(runtime)?;
    serde_json::from_str(&text).map_err(runtime)
}
