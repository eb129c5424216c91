//! End-to-end HPO: sample, score, fit the surrogate, search it, and retrain at the
//! proposed hyperparameters, timing every stage.

mod baseline;
mod objective;
mod report;
mod sampling;
mod table;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use baseline::{run_classical_baseline, BaselineEvaluation, BaselineMethod, BaselineOutcome};
pub use objective::{AnalyticObjective, DatasetSource, HoldoutScores, ModelObjective, Objective};
pub use report::{render_table, time_saving, RunReport, TIMING_FIELDS};
pub use sampling::{
    axis_values, grid, resolutions_for_budget, sample_assignments, SamplingPlan, SamplingStrategy,
};
pub use table::{generate_sample_table, GeneratedTable, TableMetadata};

use crate::argmin_search::{decode_result, search, SearchConfig, SearchError, SearchResult};
use crate::encoding::{Assignment, EncodingError, SearchSpace};
use crate::surrogate::{train, Checkpoint, SurrogateError, SurrogateModel, TrainConfig};
use crate::toy_models::ModelError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Surrogate(#[from] SurrogateError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("every objective evaluation failed")]
    NoSuccessfulEvaluation,
    #[error("i/o: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumConfig {
    pub plan: SamplingPlan,
    pub n_layers: usize,
    #[serde(default)]
    pub train: TrainConfig,
    /// `mode` is overridden by the objective's direction.
    #[serde(default)]
    pub search: SearchConfig,
    /// Start the first search restart from the best sampled configuration.
    #[serde(default)]
    pub warm_start_best_sample: bool,
}

#[derive(Debug, Clone)]
pub struct QuantumOutcome {
    pub report: RunReport,
    /// Decoded best assignment; `None` when the run failed before the search finished.
    pub best: Option<Assignment>,
    pub table: Option<GeneratedTable>,
    pub checkpoint: Option<Checkpoint>,
    pub search: Option<SearchResult<f64>>,
}

fn empty_report(objective: &dyn Objective, space: &SearchSpace, config: &QuantumConfig, baseline: &BaselineOutcome) -> RunReport {
    RunReport {
        model: objective.name(),
        metric: objective.metric_name(),
        classical_method: baseline.method.clone(),
        classical_baseline_time_s: baseline.elapsed_s,
        total_proposed_time_s: 0.0,
        time_saving_s: 0.0,
        time_saving_percent: 0.0,
        dev_score: 0.0,
        dev_score_percent: 0.0,
        n_hps: space.dims().len(),
        n_layers: config.n_layers,
        n_samples: config.plan.n_samples,
        sample_generation_time_s: 0.0,
        load_data_time_s: 0.0,
        vqa_time_s: 0.0,
        finding_best_hps_time_s: 0.0,
        quantum_to_classic_mapping_time_s: 0.0,
        original_dataset_load_time_s: 0.0,
        model_training_time_s: 0.0,
        proposed_test_score: 0.0,
        proposed_cv_score: 0.0,
        original_train_score: 0.0,
        original_test_score: 0.0,
        original_cv_score: baseline.best_score,
        predicted_score: None,
        proposed_assignment: Assignment::new(),
        original_assignment: baseline.best.clone(),
        degenerate_normalization: false,
        n_failed_samples: 0,
        threads: rayon::current_num_threads(),
        error: None,
    }
}

/// Runs the quantum HPO protocol and compares it against `baseline`.
///
/// Never fails outright: errors are recorded in `report.error` and whatever stages
/// completed are kept.
pub fn run_quantum_hpo(
    objective: &dyn Objective,
    space: &SearchSpace,
    config: &QuantumConfig,
    baseline: &BaselineOutcome,
) -> QuantumOutcome {
    let mut outcome = QuantumOutcome {
        report: empty_report(objective, space, config, baseline),
        best: None,
        table: None,
        checkpoint: None,
        search: None,
    };
    if let Err(e) = run_stages(objective, space, config, baseline, &mut outcome) {
        outcome.report.error = Some(e.to_string());
    }
    outcome.report.finalize_timings();
    outcome
}

fn run_stages(
    objective: &dyn Objective,
    space: &SearchSpace,
    config: &QuantumConfig,
    baseline: &BaselineOutcome,
    outcome: &mut QuantumOutcome,
) -> Result<(), PipelineError> {
    if config.n_layers == 0 {
        return Err(PipelineError::Config("n_layers must be at least 1".into()));
    }
    config.train.validate()?;
    let mut search_config = config.search.clone();
    search_config.mode = objective.direction();
    search_config.validate()?;

    let generated = generate_sample_table(objective, space, &config.plan)?;
    let report = &mut outcome.report;
    report.sample_generation_time_s = generated.evaluation_time_s;
    report.load_data_time_s = generated.encoding_time_s;
    report.degenerate_normalization = generated.degenerate();
    report.n_failed_samples = generated.n_failed();
    let bounds = generated.bounds;
    let table = generated.table.clone();
    if config.warm_start_best_sample {
        let direction = objective.direction();
        let best = (0..generated.raw_scores.len())
            .filter(|&i| !generated.failed[i])
            .reduce(|a, b| if direction.improves(generated.raw_scores[b], generated.raw_scores[a]) { b } else { a });
        if let Some(i) = best {
            search_config.warm_start = Some(table.rows()[i].x.to_vec());
        }
    }
    outcome.table = Some(generated);

    let started = Instant::now();
    let initial = SurrogateModel::<f64>::initialized(space.width(), config.n_layers, config.train.rng_seed)?;
    let trained = train(&initial, &table, &config.train)?;
    outcome.report.vqa_time_s = started.elapsed().as_secs_f64();
    outcome.checkpoint = Some(Checkpoint::new(&trained.model, bounds, space));

    let started = Instant::now();
    let result = search(&trained.model, space, &search_config)?;
    outcome.report.finding_best_hps_time_s = started.elapsed().as_secs_f64();

    let started = Instant::now();
    let decoded = decode_result(&result, space, bounds)?;
    outcome.report.quantum_to_classic_mapping_time_s = started.elapsed().as_secs_f64();
    outcome.search = Some(result);
    outcome.report.predicted_score = decoded.predicted_score;
    outcome.report.proposed_assignment = decoded.assignment.clone();
    outcome.best = Some(decoded.assignment.clone());

    let proposed = objective.holdout(&decoded.assignment)?;
    let report = &mut outcome.report;
    report.original_dataset_load_time_s = proposed.dataset_load_s;
    report.model_training_time_s = proposed.training_s;
    report.proposed_test_score = proposed.test_score;

    // Reference scores sit outside the proposed pipeline's timed path.
    let original = objective.holdout(&baseline.best)?;
    let report = &mut outcome.report;
    report.original_train_score = original.train_score;
    report.original_test_score = original.test_score;
    report.proposed_cv_score = objective.cv_score(&decoded.assignment)?;
    report.dev_score = (report.original_test_score - report.proposed_test_score).abs();
    report.dev_score_percent = if report.original_test_score == 0.0 {
        0.0
    } else {
        100.0 * report.dev_score / report.original_test_score.abs()
    };
    Ok(())
}
