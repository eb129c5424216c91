//! Small regressors with real hyperparameters, so the pipeline has something genuine to
//! tune: ridge regression, k-nearest neighbours and boosted decision stumps.

mod boosting;
mod dataset;
mod knn;
mod ridge;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use boosting::{BoostLoss, BoostedStumps};
pub use dataset::{Dataset, SyntheticParams};
pub use knn::KnnFit;
pub use ridge::{fit_ridge, RidgeFit, RidgeSolver};

use crate::argmin_search::Mode;
use crate::encoding::{Assignment, DimensionSpec, SearchSpace, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("hyperparameter: {0}")]
    Hyperparameter(String),
    #[error("{rows} rows cannot be split into {folds} folds of at least 3 rows")]
    FoldTooSmall { rows: usize, folds: usize },
    #[error("fit failed: {0}")]
    Fit(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Ridge,
    KnnRegressor,
    BoostedStumps,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Ridge => "ridge",
            ModelKind::KnnRegressor => "knn_regressor",
            ModelKind::BoostedStumps => "boosted_stumps",
        }
    }

    /// Search space over every hyperparameter of the model.
    pub fn default_space(self) -> SearchSpace {
        let dims = match self {
            ModelKind::Ridge => vec![
                DimensionSpec::continuous("alpha", 0.0001, 1.0),
                DimensionSpec::discrete("max_iter", 1.0, 1000.0, 1.0),
                DimensionSpec::categorical("solver", &RidgeSolver::NAMES),
            ],
            ModelKind::KnnRegressor => vec![DimensionSpec::discrete("n_neighbors", 1.0, 20.0, 1.0)],
            ModelKind::BoostedStumps => vec![
                DimensionSpec::continuous("learning_rate", 0.01, 1.0),
                DimensionSpec::discrete("max_iter", 1.0, 1000.0, 1.0),
                DimensionSpec::categorical("loss", &BoostLoss::NAMES),
            ],
        };
        SearchSpace::new(dims).expect("built-in spaces are valid")
    }
}

/// A model kind together with concrete hyperparameter values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ToyModelSpec {
    Ridge { alpha: f64, max_iter: usize, solver: RidgeSolver },
    KnnRegressor { n_neighbors: usize },
    BoostedStumps { learning_rate: f64, max_iter: usize, loss: BoostLoss },
}

impl ToyModelSpec {
    pub fn defaults(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Ridge => ToyModelSpec::Ridge { alpha: 1.0, max_iter: 1000, solver: RidgeSolver::Direct },
            ModelKind::KnnRegressor => ToyModelSpec::KnnRegressor { n_neighbors: 5 },
            ModelKind::BoostedStumps => {
                ToyModelSpec::BoostedStumps { learning_rate: 0.1, max_iter: 100, loss: BoostLoss::SquaredError }
            }
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ToyModelSpec::Ridge { .. } => ModelKind::Ridge,
            ToyModelSpec::KnnRegressor { .. } => ModelKind::KnnRegressor,
            ToyModelSpec::BoostedStumps { .. } => ModelKind::BoostedStumps,
        }
    }

    /// Overrides the defaults of `kind` with the values in `assignment`.
    pub fn from_assignment(kind: ModelKind, assignment: &Assignment) -> Result<Self, ModelError> {
        let mut spec = Self::defaults(kind);
        for (name, value) in assignment {
            let bad = || ModelError::Hyperparameter(format!("`{name}` = {value} is not valid for {}", kind.name()));
            let count = |v: &Value| -> Result<usize, ModelError> {
                let n = v.as_number().ok_or_else(bad)?;
                if n.is_finite() && n >= 0.0 && n.fract() == 0.0 {
                    Ok(n as usize)
                } else {
                    Err(bad())
                }
            };
            match (&mut spec, name.as_str()) {
                (ToyModelSpec::Ridge { alpha, .. }, "alpha") => *alpha = value.as_number().ok_or_else(bad)?,
                (ToyModelSpec::Ridge { max_iter, .. }, "max_iter") => *max_iter = count(value)?,
                (ToyModelSpec::Ridge { solver, .. }, "solver") => {
                    *solver = value.as_category().and_then(RidgeSolver::from_name).ok_or_else(bad)?;
                }
                (ToyModelSpec::KnnRegressor { n_neighbors }, "n_neighbors") => *n_neighbors = count(value)?,
                (ToyModelSpec::BoostedStumps { learning_rate, .. }, "learning_rate") => {
                    *learning_rate = value.as_number().ok_or_else(bad)?;
                }
                (ToyModelSpec::BoostedStumps { max_iter, .. }, "max_iter") => *max_iter = count(value)?,
                (ToyModelSpec::BoostedStumps { loss, .. }, "loss") => {
                    *loss = value.as_category().and_then(BoostLoss::from_name).ok_or_else(bad)?;
                }
                _ => {
                    return Err(ModelError::Hyperparameter(format!(
                        "{} has no hyperparameter `{name}`",
                        kind.name()
                    )))
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), ModelError> {
        let ok = match *self {
            ToyModelSpec::Ridge { alpha, .. } => alpha.is_finite() && alpha >= 0.0,
            ToyModelSpec::KnnRegressor { n_neighbors } => n_neighbors >= 1,
            ToyModelSpec::BoostedStumps { learning_rate, .. } => learning_rate.is_finite() && learning_rate > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(ModelError::Hyperparameter(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone)]
pub enum FittedModel {
    Ridge(RidgeFit),
    Knn(KnnFit),
    Boosted(BoostedStumps),
}

impl FittedModel {
    pub fn fit(spec: &ToyModelSpec, train: &Dataset) -> Result<Self, ModelError> {
        spec.validate()?;
        Ok(match *spec {
            ToyModelSpec::Ridge { alpha, max_iter, solver } => {
                FittedModel::Ridge(fit_ridge(train, alpha, max_iter, solver)?)
            }
            ToyModelSpec::KnnRegressor { n_neighbors } => FittedModel::Knn(KnnFit::new(train, n_neighbors)),
            ToyModelSpec::BoostedStumps { learning_rate, max_iter, loss } => {
                FittedModel::Boosted(BoostedStumps::fit(train, learning_rate, max_iter, loss))
            }
        })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match self {
            FittedModel::Ridge(m) => m.predict_row(row),
            FittedModel::Knn(m) => m.predict_row(row),
            FittedModel::Boosted(m) => m.predict_row(row),
        }
    }

    pub fn predict(&self, data: &Dataset) -> Vec<f64> {
        (0..data.n_rows()).map(|i| self.predict_row(data.row(i))).collect()
    }

    /// Whether the ridge direct solve had to fall back to the gradient solver.
    pub fn fell_back(&self) -> bool {
        matches!(self, FittedModel::Ridge(RidgeFit { fell_back: true, .. }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    R2,
    Mse,
    /// Fraction of rows whose rounded prediction equals the rounded target.
    Accuracy,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::R2 => "r2",
            Metric::Mse => "mse",
            Metric::Accuracy => "accuracy",
        }
    }

    pub fn direction(self) -> Mode {
        match self {
            Metric::R2 | Metric::Accuracy => Mode::Maximize,
            Metric::Mse => Mode::Minimize,
        }
    }

    pub fn score(self, truth: &[f64], predicted: &[f64]) -> f64 {
        let n = truth.len() as f64;
        match self {
            Metric::Mse => truth.iter().zip(predicted).map(|(t, p)| (t - p) * (t - p)).sum::<f64>() / n,
            Metric::Accuracy => {
                truth.iter().zip(predicted).filter(|(t, p)| t.round() == p.round()).count() as f64 / n
            }
            Metric::R2 => {
                let mean = truth.iter().sum::<f64>() / n;
                let ss_res: f64 = truth.iter().zip(predicted).map(|(t, p)| (t - p) * (t - p)).sum();
                let ss_tot: f64 = truth.iter().map(|t| (t - mean) * (t - mean)).sum();
                // a constant target leaves only rounding noise in ss_tot
                let noise_floor = 1e-24 * n * mean.abs().max(1.0).powi(2);
                if ss_tot > noise_floor {
                    1.0 - ss_res / ss_tot
                } else if ss_res <= noise_floor {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored {
    pub score: f64,
    pub fell_back: bool,
}

/// Fits on `train` and scores on `test`.
pub fn fit_predict_score(
    spec: &ToyModelSpec,
    train: &Dataset,
    test: &Dataset,
    metric: Metric,
) -> Result<Scored, ModelError> {
    if train.n_rows() == 0 || test.n_rows() == 0 {
        return Err(ModelError::Dataset("train and test splits must be non-empty".into()));
    }
    let model = FittedModel::fit(spec, train)?;
    let score = metric.score(test.target(), &model.predict(test));
    if !score.is_finite() {
        return Err(ModelError::Fit(format!("non-finite {} score", metric.name())));
    }
    Ok(Scored { score, fell_back: model.fell_back() })
}

/// Seeded fold membership: row indices of each of the `k` folds, sizes differing by at
/// most one.
pub fn fold_indices(n_rows: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, ModelError> {
    if k < 2 || n_rows < 3 * k {
        return Err(ModelError::FoldTooSmall { rows: n_rows, folds: k });
    }
    let mut order: Vec<usize> = (0..n_rows).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n_rows / k, n_rows % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvScore {
    pub mean: f64,
    pub folds: Vec<f64>,
    pub fell_back: bool,
}

pub fn kfold_cv_score(
    spec: &ToyModelSpec,
    dataset: &Dataset,
    k: usize,
    metric: Metric,
    seed: u64,
) -> Result<CvScore, ModelError> {
    let folds = fold_indices(dataset.n_rows(), k, seed)?;
    let mut scores = Vec::with_capacity(k);
    let mut fell_back = false;
    for held_out in 0..k {
        let train_rows: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|(f, _)| *f != held_out)
            .flat_map(|(_, rows)| rows.iter().copied())
            .collect();
        let scored = fit_predict_score(spec, &dataset.subset(&train_rows), &dataset.subset(&folds[held_out]), metric)?;
        fell_back |= scored.fell_back;
        scores.push(scored.score);
    }
    let mean = scores.iter().sum::<f64>() / k as f64;
    Ok(CvScore { mean, folds: scores, fell_back })
}

/// Seeded shuffle split into `(train, test)`.
pub fn train_test_split(dataset: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset), ModelError> {
    let n = dataset.n_rows();
    let n_test = (n as f64 * test_fraction).round() as usize;
    if !(0.0..1.0).contains(&test_fraction) || n_test == 0 || n_test >= n {
        return Err(ModelError::Dataset(format!("cannot hold out {test_fraction} of {n} rows")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (test, train) = order.split_at(n_test);
    Ok((dataset.subset(train), dataset.subset(test)))
}
