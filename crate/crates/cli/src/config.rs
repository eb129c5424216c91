use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use qhpo::pipeline::{
    BaselineMethod, DatasetSource, ModelObjective, QuantumConfig, SamplingPlan,
};
use qhpo::toy_models::{Metric, ModelKind, SyntheticParams};
use qhpo::{SearchConfig, SearchSpace, TrainConfig};

use crate::CliError;

/// Values given on the command line. Anything the config file sets takes precedence.
#[derive(Debug, Clone, Default)]
pub struct FlagDefaults {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    threads: Option<usize>,
    n_layers: Option<usize>,
    objective: RawObjective,
    space: Option<SearchSpace>,
    sampling: Option<toml::Table>,
    train: Option<toml::Table>,
    search: Option<toml::Table>,
    baseline: Option<RawBaseline>,
    surface: Option<RawSurface>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObjective {
    model: ModelKind,
    metric: Metric,
    #[serde(default = "default_folds")]
    cv_folds: usize,
    cv_seed: Option<u64>,
    #[serde(default = "default_test_fraction")]
    test_fraction: f64,
    split_seed: Option<u64>,
    dataset: RawDataset,
}

fn default_folds() -> usize {
    3
}

fn default_test_fraction() -> f64 {
    0.25
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawDataset {
    Synthetic {
        n_samples: Option<usize>,
        n_features: Option<usize>,
        noise: Option<f64>,
        seed: Option<u64>,
    },
    Csv {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBaseline {
    #[serde(default = "default_method")]
    method: String,
    resolutions: Option<Vec<usize>>,
    #[serde(default = "default_budget")]
    budget: usize,
    rng_seed: Option<u64>,
}

fn default_method() -> String {
    "random".into()
}

fn default_budget() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSurface {
    checkpoint: Option<PathBuf>,
    axes: Vec<String>,
    #[serde(default = "default_points")]
    points: usize,
    #[serde(default)]
    fixed: BTreeMap<String, f64>,
}

fn default_points() -> usize {
    101
}

#[derive(Debug, Clone)]
pub struct BaselineSettings {
    pub method: BaselineMethod,
    pub budget: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SurfaceSettings {
    /// Defaults to the checkpoint an optimize run writes into the output directory.
    pub checkpoint: PathBuf,
    /// Encoded column names varied on the grid.
    pub axes: Vec<String>,
    pub points: usize,
    /// Encoded values of the remaining columns; unspecified ones sit at π/2.
    pub fixed: BTreeMap<String, f64>,
}

/// A fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub threads: Option<usize>,
    pub model: ModelKind,
    pub metric: Metric,
    pub cv_folds: usize,
    pub cv_seed: u64,
    pub test_fraction: f64,
    pub split_seed: u64,
    pub dataset: DatasetSource,
    pub space: SearchSpace,
    pub quantum: QuantumConfig,
    /// Start the search from the best sampled configuration.
    pub load_opt_bh: bool,
    pub baseline: BaselineSettings,
    pub surface: Option<SurfaceSettings>,
}

pub const OUTPUT_DIR_ENV: &str = "QHPO_OUTPUT_DIR";

fn config_error(path: &Path, message: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}: {message}", path.display()))
}

/// Fills `rng_seed` with the global seed when the section leaves it out, then
/// deserializes.
fn seeded<T: serde::de::DeserializeOwned>(
    table: Option<toml::Table>,
    seed: u64,
    defaults: &[(&str, toml::Value)],
) -> Result<T, toml::de::Error> {
    let mut table = table.unwrap_or_default();
    table.entry("rng_seed").or_insert(toml::Value::Integer(seed as i64));
    for (key, value) in defaults {
        table.entry(*key).or_insert(value.clone());
    }
    toml::Table::try_into(table)
}

impl RunConfig {
    pub fn load(path: &Path, flags: &FlagDefaults) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base, flags).map_err(|e| match e {
            CliError::Config(m) => config_error(path, m),
            other => other,
        })
    }

    /// Relative paths inside the file resolve against `base`.
    pub fn parse(text: &str, base: &Path, flags: &FlagDefaults) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };

        let seed = raw.seed.or(flags.seed).unwrap_or(0);
        let output_dir = match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => raw
                .output_dir
                .as_deref()
                .map(resolve)
                .or_else(|| flags.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("qhpo-out")),
        };
        let threads = raw.threads.or(flags.threads);
        if threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }

        let objective = raw.objective;
        let dataset = match objective.dataset {
            RawDataset::Synthetic { n_samples, n_features, noise, seed: data_seed } => {
                let defaults = SyntheticParams::default();
                DatasetSource::Synthetic(SyntheticParams {
                    n_samples: n_samples.unwrap_or(defaults.n_samples),
                    n_features: n_features.unwrap_or(defaults.n_features),
                    noise: noise.unwrap_or(defaults.noise),
                    seed: data_seed.unwrap_or(seed),
                })
            }
            RawDataset::Csv { path } => {
                let path = resolve(&path);
                if !path.is_file() {
                    return Err(CliError::Config(format!("dataset file {} does not exist", path.display())));
                }
                DatasetSource::Csv { path }
            }
        };
        let space = raw.space.unwrap_or_else(|| objective.model.default_space());

        let n_samples = toml::Value::Integer((10 * space.width()) as i64);
        let sampling: SamplingPlan = seeded(
            raw.sampling,
            seed,
            &[("n_samples", n_samples), ("strategy", toml::Value::String("uniform_random".into()))],
        )
        .map_err(|e| CliError::Config(format!("[sampling] {e}")))?;
        let train: TrainConfig =
            seeded(raw.train, seed, &[]).map_err(|e| CliError::Config(format!("[train] {e}")))?;
        let mut search_table = raw.search.unwrap_or_default();
        let load_opt_bh = match search_table.remove("load_opt_bh") {
            None => false,
            Some(toml::Value::Boolean(b)) => b,
            Some(other) => {
                return Err(CliError::Config(format!("[search] load_opt_bh must be a boolean, got {other}")))
            }
        };
        if search_table.contains_key("mode") {
            return Err(CliError::Config("[search] mode follows the objective metric and cannot be set".into()));
        }
        let search: SearchConfig =
            seeded(Some(search_table), seed, &[]).map_err(|e| CliError::Config(format!("[search] {e}")))?;
        let quantum = QuantumConfig {
            plan: sampling,
            n_layers: raw.n_layers.unwrap_or(2),
            train,
            search,
            warm_start_best_sample: load_opt_bh,
        };

        let baseline = match raw.baseline {
            None => BaselineSettings { method: BaselineMethod::Random, budget: default_budget(), seed },
            Some(b) => {
                let method = match b.method.as_str() {
                    "grid" => BaselineMethod::Grid { resolutions: b.resolutions },
                    "random" if b.resolutions.is_none() => BaselineMethod::Random,
                    "random" => {
                        return Err(CliError::Config("[baseline] resolutions only apply to grid".into()))
                    }
                    other => {
                        return Err(CliError::Config(format!("[baseline] unknown method `{other}`")))
                    }
                };
                BaselineSettings { method, budget: b.budget, seed: b.rng_seed.unwrap_or(seed) }
            }
        };

        let surface = raw.surface.map(|s| SurfaceSettings {
            checkpoint: s.checkpoint.as_deref().map_or_else(|| output_dir.join(crate::MODEL_JSON), resolve),
            axes: s.axes,
            points: s.points,
            fixed: s.fixed,
        });

        Ok(Self {
            seed,
            output_dir,
            threads,
            model: objective.model,
            metric: objective.metric,
            cv_folds: objective.cv_folds,
            cv_seed: objective.cv_seed.unwrap_or(seed),
            test_fraction: objective.test_fraction,
            split_seed: objective.split_seed.unwrap_or(seed),
            dataset,
            space,
            quantum,
            load_opt_bh,
            baseline,
            surface,
        })
    }

    pub fn objective(&self) -> Result<ModelObjective, CliError> {
        let objective = ModelObjective::new(self.model, self.dataset.clone(), self.metric)
            .map_err(|e| CliError::Config(e.to_string()))?
            .with_cv(self.cv_folds, self.cv_seed)
            .with_holdout(self.test_fraction, self.split_seed);
        // checked here so a bad fold count is a configuration error, not a failed sample
        qhpo::toy_models::fold_indices(objective.dataset().n_rows(), self.cv_folds, self.cv_seed)
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(objective)
    }
}
