//! Second stage: with (β, θ) frozen, descend over the encoded input to find the
//! surrogate's optimum inside `[0, π]^d`, then map it back to native hyperparameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adam::{Adam, AdamParams};
use crate::encoding::{Assignment, EncodedPoint, EncodingError, ScoreBounds, SearchSpace};
use crate::scalar::Real;
use crate::surrogate::{SurrogateError, SurrogateModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Surrogate(#[from] SurrogateError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("model has {model} qubits but the search space encodes to width {space}")]
    Width { model: usize, space: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Minimize,
    Maximize,
}

impl Mode {
    /// Whether `candidate` beats `incumbent` under this mode; ties keep the incumbent.
    pub fn improves<T: PartialOrd>(self, candidate: T, incumbent: T) -> bool {
        match self {
            Mode::Minimize => candidate < incumbent,
            Mode::Maximize => candidate > incumbent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub n_restarts: usize,
    pub mode: Mode,
    pub rng_seed: u64,
    #[serde(flatten)]
    pub adam: AdamParams,
    /// Replaces the first restart's random start when set.
    pub warm_start: Option<Vec<f64>>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.0005,
            max_epochs: 1500,
            n_restarts: 8,
            mode: Mode::Minimize,
            rng_seed: 0,
            adam: AdamParams::default(),
            warm_start: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(SearchError::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.n_restarts == 0 {
            return Err(SearchError::Config("n_restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartSummary<T> {
    pub start: Vec<T>,
    pub end: Vec<T>,
    pub final_value: T,
    pub best_point: Vec<T>,
    pub best_value: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<T> {
    pub best_encoded: EncodedPoint<T>,
    pub best_native: Assignment,
    /// Surrogate output at `best_encoded`, re-evaluated after the descent.
    pub best_value: T,
    pub best_restart: usize,
    pub mode: Mode,
    pub restarts: Vec<RestartSummary<T>>,
}

/// Exact input gradient of the surrogate output via parameter shifts on the
/// encoding rotations.
pub fn grad_wrt_input<T: Real>(model: &SurrogateModel<T>, x: &[T]) -> Result<Vec<T>, SearchError> {
    Ok(model.input_gradient(x)?)
}

fn restart_start<T: Real>(seed: u64, restart: usize, width: usize) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    (0..width).map(|_| T::lit(rng.gen_range(0.0..=std::f64::consts::PI))).collect()
}

fn descend<T: Real>(
    model: &SurrogateModel<T>,
    start: Vec<T>,
    config: &SearchConfig,
) -> Result<RestartSummary<T>, SearchError> {
    let sign = match config.mode {
        Mode::Minimize => T::one(),
        Mode::Maximize => -T::one(),
    };
    let pi = T::PI();
    let mut x = start.clone();
    let mut adam = Adam::new(x.len(), config.learning_rate, config.adam);
    let mut value = model.evaluate(&x)?;
    let mut best = (x.clone(), value);
    for _ in 0..config.max_epochs {
        let grad: Vec<T> = model.input_gradient(&x)?.into_iter().map(|g| sign * g).collect();
        adam.step(&mut x, &grad);
        for coordinate in &mut x {
            *coordinate = coordinate.max(T::zero()).min(pi);
        }
        value = model.evaluate(&x)?;
        if config.mode.improves(value, best.1) {
            best = (x.clone(), value);
        }
    }
    Ok(RestartSummary { start, end: x, final_value: value, best_point: best.0, best_value: best.1 })
}

/// Multi-restart projected Adam over `[0, π]^d`.
///
/// Restarts run in parallel and are merged by index, so the result does not depend on
/// scheduling; ties go to the lowest restart index.
pub fn search<T: Real>(
    model: &SurrogateModel<T>,
    space: &SearchSpace,
    config: &SearchConfig,
) -> Result<SearchResult<T>, SearchError> {
    config.validate()?;
    let width = space.width();
    if model.n_qubits() != width {
        return Err(SearchError::Width { model: model.n_qubits(), space: width });
    }
    let mut starts: Vec<Vec<T>> =
        (0..config.n_restarts).map(|r| restart_start(config.rng_seed, r, width)).collect();
    if let Some(warm) = &config.warm_start {
        let point = EncodedPoint::new(warm.iter().map(|&v| T::lit(v)).collect())?;
        if point.len() != width {
            return Err(EncodingError::Width { expected: width, got: point.len() }.into());
        }
        starts[0] = point.into_vec();
    }

    let restarts = starts
        .into_par_iter()
        .map(|start| descend(model, start, config))
        .collect::<Result<Vec<_>, SearchError>>()?;

    let mut best_restart = 0;
    for (index, summary) in restarts.iter().enumerate().skip(1) {
        if config.mode.improves(summary.best_value, restarts[best_restart].best_value) {
            best_restart = index;
        }
    }
    let best_encoded = EncodedPoint::new(restarts[best_restart].best_point.clone())?;
    let best_value = model.evaluate(&best_encoded)?;
    let best_native = space.decode(&best_encoded)?;
    Ok(SearchResult { best_encoded, best_native, best_value, best_restart, mode: config.mode, restarts })
}

/// Native hyperparameters at the optimum and the score the surrogate predicts there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedOptimum {
    pub assignment: Assignment,
    /// Model output mapped back to the raw score scale; `None` without bounds.
    pub predicted_score: Option<f64>,
}

pub fn decode_result<T: Real>(
    result: &SearchResult<T>,
    space: &SearchSpace,
    score_bounds: Option<ScoreBounds>,
) -> Result<DecodedOptimum, SearchError> {
    let assignment = space.decode(&result.best_encoded)?;
    let predicted_score = score_bounds.map(|b| b.denormalize(result.best_value.to_f64_lossy()));
    Ok(DecodedOptimum { assignment, predicted_score })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{DimensionSpec, Value};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn unit_space(width: usize) -> SearchSpace {
        SearchSpace::new((0..width).map(|i| DimensionSpec::continuous(&format!("x{i}"), 0.0, 1.0)).collect())
            .unwrap()
    }

    fn fast(mode: Mode) -> SearchConfig {
        SearchConfig { learning_rate: 0.05, max_epochs: 400, n_restarts: 4, mode, ..SearchConfig::default() }
    }

    #[test]
    fn cosine_gradient() {
        let model = SurrogateModel::<f64>::new(1, 1).unwrap();
        assert_abs_diff_eq!(grad_wrt_input(&model, &[0.7]).unwrap()[0], -0.7f64.sin(), epsilon = 1e-12);
        assert_abs_diff_eq!(grad_wrt_input(&model, &[PI]).unwrap()[0], 0.0, epsilon = 1e-9);
        assert!(grad_wrt_input(&model, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn finds_cosine_extrema() {
        let model = SurrogateModel::<f64>::new(1, 1).unwrap();
        let space = unit_space(1);
        let min = search(&model, &space, &fast(Mode::Minimize)).unwrap();
        assert!((min.best_encoded[0] - PI).abs() < 1e-2);
        assert_abs_diff_eq!(min.best_value, -1.0, epsilon = 1e-4);
        let max = search(&model, &space, &fast(Mode::Maximize)).unwrap();
        assert!(max.best_encoded[0].abs() < 1e-2);
        assert_abs_diff_eq!(max.best_value, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn best_dominates_every_restart() {
        let model = SurrogateModel::<f64>::initialized(2, 2, 11).unwrap();
        let result = search(&model, &unit_space(2), &fast(Mode::Minimize)).unwrap();
        assert_eq!(result.best_value, model.evaluate(&result.best_encoded).unwrap());
        for r in &result.restarts {
            assert!(result.best_value <= r.final_value);
        }
    }

    #[test]
    fn maximize_is_minimize_of_negation() {
        let model = SurrogateModel::<f64>::initialized(2, 2, 5).unwrap();
        let space = unit_space(2);
        let max = search(&model, &space, &fast(Mode::Maximize)).unwrap();
        let min = search(&model.negated(), &space, &fast(Mode::Minimize)).unwrap();
        assert_abs_diff_eq!(max.best_value, -min.best_value, epsilon = 1e-12);
        assert_eq!(max.best_encoded, min.best_encoded);
    }

    #[test]
    fn warm_start_replaces_first_restart() {
        let model = SurrogateModel::<f64>::new(1, 1).unwrap();
        let cfg = SearchConfig { warm_start: Some(vec![3.0]), max_epochs: 0, ..fast(Mode::Minimize) };
        let result = search(&model, &unit_space(1), &cfg).unwrap();
        assert_eq!(result.restarts[0].start, vec![3.0]);
        let bad = SearchConfig { warm_start: Some(vec![3.0, 1.0]), ..cfg };
        assert!(search(&model, &unit_space(1), &bad).is_err());
    }

    #[test]
    fn config_and_width_errors() {
        let model = SurrogateModel::<f64>::new(1, 1).unwrap();
        let cfg = SearchConfig { n_restarts: 0, ..SearchConfig::default() };
        assert!(matches!(search(&model, &unit_space(1), &cfg).unwrap_err(), SearchError::Config(_)));
        assert!(matches!(
            search(&model, &unit_space(2), &SearchConfig::default()).unwrap_err(),
            SearchError::Width { .. }
        ));
    }

    #[test]
    fn decode_result_examples() {
        let space = SearchSpace::new(vec![
            DimensionSpec::discrete("n", 1.0, 5.0, 1.0),
            DimensionSpec::categorical("k", &["a", "b"]),
        ])
        .unwrap();
        let on_lattice = Assignment::from_iter([("n".to_owned(), Value::Number(4.0)), ("k".to_owned(), "a".into())]);
        let point: EncodedPoint<f64> = space.encode(&on_lattice).unwrap();
        let mut encoded = point.into_vec();
        encoded[1] = 2.9;
        let result = SearchResult {
            best_encoded: EncodedPoint::new(encoded).unwrap(),
            best_native: Assignment::new(),
            best_value: -1.0,
            best_restart: 0,
            mode: Mode::Minimize,
            restarts: vec![],
        };
        let decoded = decode_result(&result, &space, Some(ScoreBounds::new(0.0, 1.0).unwrap())).unwrap();
        assert_eq!(decoded.assignment["n"], Value::Number(4.0));
        assert_eq!(decoded.assignment["k"], Value::from("b"));
        assert_eq!(decoded.predicted_score, Some(0.0));
        assert_eq!(decode_result(&result, &space, None).unwrap().predicted_score, None);
    }
}
