use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::Objective;
use super::sampling::{sample_assignments, SamplingPlan};
use super::PipelineError;
use crate::encoding::{Assignment, ScoreBounds, SearchSpace};
use crate::surrogate::{Sample, SampleTable};

/// Scored samples ready for surrogate training.
#[derive(Debug, Clone)]
pub struct GeneratedTable {
    pub assignments: Vec<Assignment>,
    /// Raw objective scores; failed evaluations carry the worst successful score.
    pub raw_scores: Vec<f64>,
    pub failed: Vec<bool>,
    pub table: SampleTable<f64>,
    /// `None` when every score was equal; all targets are then 0.
    pub bounds: Option<ScoreBounds>,
    pub encoded_names: Vec<String>,
    pub evaluation_time_s: f64,
    /// Time spent encoding and normalizing once scores are known.
    pub encoding_time_s: f64,
}

/// Sidecar written next to the samples CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub model: String,
    pub metric: String,
    pub n_samples: usize,
    pub n_failed: usize,
    pub score_bounds: Option<ScoreBounds>,
    pub degenerate: bool,
    pub space_hash: String,
    pub plan: SamplingPlan,
    pub evaluation_time_s: f64,
    pub encoding_time_s: f64,
}

impl GeneratedTable {
    pub fn degenerate(&self) -> bool {
        self.bounds.is_none()
    }

    pub fn n_failed(&self) -> usize {
        self.failed.iter().filter(|&&f| f).count()
    }

    /// Header of encoded coordinate names, then `raw_score` and `normalized_score`.
    pub fn to_csv(&self) -> Result<String, PipelineError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header = self.encoded_names.clone();
        header.extend(["raw_score".to_owned(), "normalized_score".to_owned()]);
        writer.write_record(&header).map_err(csv_error)?;
        for (sample, raw) in self.table.rows().iter().zip(&self.raw_scores) {
            let mut record: Vec<String> = sample.x.iter().map(|v| v.to_string()).collect();
            record.push(raw.to_string());
            record.push(sample.y.to_string());
            writer.write_record(&record).map_err(csv_error)?;
        }
        let bytes = writer.into_inner().map_err(|e| PipelineError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| PipelineError::Io(e.to_string()))
    }

    pub fn metadata(&self, space: &SearchSpace, plan: &SamplingPlan) -> TableMetadata {
        TableMetadata {
            model: self.table.model_name.clone(),
            metric: self.table.metric.clone(),
            n_samples: self.table.len(),
            n_failed: self.n_failed(),
            score_bounds: self.bounds,
            degenerate: self.degenerate(),
            space_hash: space.content_hash(),
            plan: plan.clone(),
            evaluation_time_s: self.evaluation_time_s,
            encoding_time_s: self.encoding_time_s,
        }
    }
}

fn csv_error(e: csv::Error) -> PipelineError {
    PipelineError::Io(e.to_string())
}

/// Samples the space, scores every configuration in parallel, and builds the
/// normalized training table. Row order follows the sampling order regardless of
/// scheduling.
pub fn generate_sample_table(
    objective: &dyn Objective,
    space: &SearchSpace,
    plan: &SamplingPlan,
) -> Result<GeneratedTable, PipelineError> {
    let assignments = sample_assignments(space, plan)?;

    let started = Instant::now();
    let outcomes: Vec<Option<f64>> = assignments
        .par_iter()
        .map(|a| objective.cv_score(a).ok().filter(|s| s.is_finite()))
        .collect();
    let evaluation_time_s = started.elapsed().as_secs_f64();

    let started = Instant::now();
    let direction = objective.direction();
    let worst = outcomes
        .iter()
        .flatten()
        .copied()
        .reduce(|a, b| if direction.improves(a, b) { b } else { a })
        .ok_or(PipelineError::NoSuccessfulEvaluation)?;
    let failed: Vec<bool> = outcomes.iter().map(Option::is_none).collect();
    let raw_scores: Vec<f64> = outcomes.iter().map(|s| s.unwrap_or(worst)).collect();

    let lo = raw_scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bounds = ScoreBounds::new(lo, hi).ok();
    let rows = assignments
        .iter()
        .zip(&raw_scores)
        .map(|(a, &raw)| {
            let y = bounds.map_or(0.0, |b| b.normalize(raw).clamp(-1.0, 1.0));
            Ok(Sample { x: space.encode(a)?, y })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let table = SampleTable::with_provenance(rows, &objective.name(), &objective.metric_name())?;
    let encoding_time_s = started.elapsed().as_secs_f64();

    Ok(GeneratedTable {
        assignments,
        raw_scores,
        failed,
        table,
        bounds,
        encoded_names: space.encoded_names(),
        evaluation_time_s,
        encoding_time_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::argmin_search::Mode;
    use crate::encoding::DimensionSpec;
    use crate::pipeline::AnalyticObjective;
    use crate::toy_models::ModelError;

    fn space() -> SearchSpace {
        SearchSpace::new(vec![DimensionSpec::continuous("v", 0.0, 1.0)]).unwrap()
    }

    fn v(a: &Assignment) -> f64 {
        a["v"].as_number().unwrap()
    }

    #[test]
    fn normalizes_to_unit_range() {
        let objective = AnalyticObjective::new("lin", Mode::Maximize, |a| Ok(3.0 * v(a)));
        let generated = generate_sample_table(&objective, &space(), &SamplingPlan::uniform(20, 1)).unwrap();
        let ys: Vec<f64> = generated.table.rows().iter().map(|r| r.y).collect();
        assert_eq!(ys.iter().copied().fold(f64::INFINITY, f64::min), -1.0);
        assert_eq!(ys.iter().copied().fold(f64::NEG_INFINITY, f64::max), 1.0);
        assert!(!generated.degenerate());
        let csv = generated.to_csv().unwrap();
        assert!(csv.starts_with("v,raw_score,normalized_score\n"));
        assert_eq!(csv.lines().count(), 21);
    }

    #[test]
    fn single_sample_is_degenerate() {
        let objective = AnalyticObjective::new("c", Mode::Maximize, |_| Ok(0.5));
        let generated = generate_sample_table(&objective, &space(), &SamplingPlan::uniform(1, 0)).unwrap();
        assert!(generated.degenerate());
        assert_eq!(generated.table.rows()[0].y, 0.0);
    }

    #[test]
    fn failures_take_worst_score() {
        let objective = AnalyticObjective::new("f", Mode::Maximize, |a| {
            if v(a) > 0.5 {
                Err(ModelError::Fit("boom".into()))
            } else {
                Ok(v(a))
            }
        });
        let generated = generate_sample_table(&objective, &space(), &SamplingPlan::uniform(30, 2)).unwrap();
        assert!(generated.n_failed() > 0);
        let worst = generated
            .raw_scores
            .iter()
            .zip(&generated.failed)
            .filter(|(_, f)| !**f)
            .map(|(s, _)| *s)
            .fold(f64::INFINITY, f64::min);
        for (score, failed) in generated.raw_scores.iter().zip(&generated.failed) {
            if *failed {
                assert_eq!(*score, worst);
            }
        }

        let never = AnalyticObjective::new("n", Mode::Maximize, |_| Err(ModelError::Fit("no".into())));
        assert!(matches!(
            generate_sample_table(&never, &space(), &SamplingPlan::uniform(3, 0)),
            Err(PipelineError::NoSuccessfulEvaluation)
        ));
    }
}
