use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::argmin_search::Mode;
use crate::encoding::Assignment;
use crate::toy_models::{
    kfold_cv_score, train_test_split, Dataset, FittedModel, Metric, ModelError, ModelKind,
    SyntheticParams, ToyModelSpec,
};

/// Train and held-out scores after refitting at one assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoldoutScores {
    pub train_score: f64,
    pub test_score: f64,
    /// Wall time spent materializing the full dataset.
    pub dataset_load_s: f64,
    /// Wall time spent fitting and scoring.
    pub training_s: f64,
}

/// The black box being tuned. The quantum pipeline and the classical baselines call the
/// same `cv_score`, so their results are directly comparable.
pub trait Objective: Send + Sync {
    fn name(&self) -> String;

    fn metric_name(&self) -> String;

    fn direction(&self) -> Mode;

    /// Mean k-fold cross-validation score at `assignment`.
    fn cv_score(&self, assignment: &Assignment) -> Result<f64, ModelError>;

    /// Refit on a training split and score on the held-out split.
    fn holdout(&self, assignment: &Assignment) -> Result<HoldoutScores, ModelError>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSource {
    Synthetic(SyntheticParams),
    Csv { path: PathBuf },
    #[serde(skip)]
    InMemory(Arc<Dataset>),
}

impl DatasetSource {
    pub fn load(&self) -> Result<Dataset, ModelError> {
        match self {
            DatasetSource::Synthetic(params) => Dataset::friedman(params),
            DatasetSource::Csv { path } => {
                let file = std::fs::File::open(path)
                    .map_err(|e| ModelError::Dataset(format!("{}: {e}", path.display())))?;
                Dataset::read_csv(std::io::BufReader::new(file))
            }
            DatasetSource::InMemory(data) => Ok(Dataset::clone(data)),
        }
    }
}

/// A toy model scored by seeded k-fold cross-validation on a dataset.
#[derive(Debug, Clone)]
pub struct ModelObjective {
    kind: ModelKind,
    metric: Metric,
    source: DatasetSource,
    dataset: Dataset,
    cv_folds: usize,
    cv_seed: u64,
    test_fraction: f64,
    split_seed: u64,
}

impl ModelObjective {
    /// Loads the dataset once; defaults to 3 folds and a 25 % holdout.
    pub fn new(kind: ModelKind, source: DatasetSource, metric: Metric) -> Result<Self, ModelError> {
        let dataset = source.load()?;
        Ok(Self { kind, metric, source, dataset, cv_folds: 3, cv_seed: 0, test_fraction: 0.25, split_seed: 0 })
    }

    pub fn with_cv(mut self, folds: usize, seed: u64) -> Self {
        self.cv_folds = folds;
        self.cv_seed = seed;
        self
    }

    pub fn with_holdout(mut self, test_fraction: f64, seed: u64) -> Self {
        self.test_fraction = test_fraction;
        self.split_seed = seed;
        self
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn cv_folds(&self) -> usize {
        self.cv_folds
    }

    pub fn cv_seed(&self) -> u64 {
        self.cv_seed
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }
}

impl Objective for ModelObjective {
    fn name(&self) -> String {
        self.kind.name().to_owned()
    }

    fn metric_name(&self) -> String {
        self.metric.name().to_owned()
    }

    fn direction(&self) -> Mode {
        self.metric.direction()
    }

    fn cv_score(&self, assignment: &Assignment) -> Result<f64, ModelError> {
        let spec = ToyModelSpec::from_assignment(self.kind, assignment)?;
        Ok(kfold_cv_score(&spec, &self.dataset, self.cv_folds, self.metric, self.cv_seed)?.mean)
    }

    fn holdout(&self, assignment: &Assignment) -> Result<HoldoutScores, ModelError> {
        let spec = ToyModelSpec::from_assignment(self.kind, assignment)?;
        let started = Instant::now();
        let dataset = self.source.load()?;
        let dataset_load_s = started.elapsed().as_secs_f64();

        let started = Instant::now();
        let (train, test) = train_test_split(&dataset, self.test_fraction, self.split_seed)?;
        let model = FittedModel::fit(&spec, &train)?;
        let train_score = self.metric.score(train.target(), &model.predict(&train));
        let test_score = self.metric.score(test.target(), &model.predict(&test));
        if !(train_score.is_finite() && test_score.is_finite()) {
            return Err(ModelError::Fit(format!("non-finite {} score", self.metric.name())));
        }
        let training_s = started.elapsed().as_secs_f64();
        Ok(HoldoutScores { train_score, test_score, dataset_load_s, training_s })
    }
}

type ScoreFn = dyn Fn(&Assignment) -> Result<f64, ModelError> + Send + Sync;

/// A closed-form objective, useful for checking the pipeline against a known optimum.
/// Its holdout scores are the function value itself.
#[derive(Clone)]
pub struct AnalyticObjective {
    name: String,
    direction: Mode,
    score: Arc<ScoreFn>,
}

impl AnalyticObjective {
    pub fn new<F>(name: &str, direction: Mode, score: F) -> Self
    where
        F: Fn(&Assignment) -> Result<f64, ModelError> + Send + Sync + 'static,
    {
        Self { name: name.to_owned(), direction, score: Arc::new(score) }
    }
}

impl std::fmt::Debug for AnalyticObjective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticObjective").field("name", &self.name).field("direction", &self.direction).finish()
    }
}

impl Objective for AnalyticObjective {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn metric_name(&self) -> String {
        "value".to_owned()
    }

    fn direction(&self) -> Mode {
        self.direction
    }

    fn cv_score(&self, assignment: &Assignment) -> Result<f64, ModelError> {
        (self.score)(assignment)
    }

    fn holdout(&self, assignment: &Assignment) -> Result<HoldoutScores, ModelError> {
        let started = Instant::now();
        let value = (self.score)(assignment)?;
        Ok(HoldoutScores {
            train_score: value,
            test_score: value,
            dataset_load_s: 0.0,
            training_s: started.elapsed().as_secs_f64(),
        })
    }
}
