use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::Objective;
use super::sampling::{grid, resolutions_for_budget, sample_assignments, SamplingPlan};
use super::PipelineError;
use crate::encoding::{Assignment, SearchSpace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum BaselineMethod {
    /// Full Cartesian grid. Explicit `resolutions` take precedence over the budget;
    /// otherwise they are chosen so the grid fits in it.
    Grid {
        #[serde(default)]
        resolutions: Option<Vec<usize>>,
    },
    /// `budget` uniform draws.
    Random,
}

impl BaselineMethod {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineMethod::Grid { .. } => "grid",
            BaselineMethod::Random => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineEvaluation {
    pub assignment: Assignment,
    /// `None` when the objective failed at this point.
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineOutcome {
    pub method: String,
    pub n_evaluations: usize,
    pub elapsed_s: f64,
    pub best: Assignment,
    pub best_score: f64,
    pub evaluations: Vec<BaselineEvaluation>,
}

/// Exhaustive or random search calling the same scorer as the quantum pipeline. Ties
/// keep the earliest evaluated configuration.
pub fn run_classical_baseline(
    objective: &dyn Objective,
    space: &SearchSpace,
    method: &BaselineMethod,
    budget: usize,
    seed: u64,
) -> Result<BaselineOutcome, PipelineError> {
    if budget == 0 {
        return Err(PipelineError::Config("baseline budget must be at least 1".into()));
    }
    let started = Instant::now();
    let candidates = match method {
        BaselineMethod::Grid { resolutions: Some(res) } => grid(space, res)?,
        BaselineMethod::Grid { resolutions: None } => grid(space, &resolutions_for_budget(space, budget))?,
        BaselineMethod::Random => sample_assignments(space, &SamplingPlan::uniform(budget, seed))?,
    };
    let scores: Vec<Option<f64>> =
        candidates.par_iter().map(|a| objective.cv_score(a).ok().filter(|s| s.is_finite())).collect();
    let elapsed_s = started.elapsed().as_secs_f64();

    let direction = objective.direction();
    let mut best: Option<(usize, f64)> = None;
    for (index, score) in scores.iter().enumerate() {
        if let Some(score) = *score {
            if best.map_or(true, |(_, incumbent)| direction.improves(score, incumbent)) {
                best = Some((index, score));
            }
        }
    }
    let (best_index, best_score) = best.ok_or(PipelineError::NoSuccessfulEvaluation)?;
    Ok(BaselineOutcome {
        method: method.name().to_owned(),
        n_evaluations: candidates.len(),
        elapsed_s,
        best: candidates[best_index].clone(),
        best_score,
        evaluations: candidates
            .into_iter()
            .zip(scores)
            .map(|(assignment, score)| BaselineEvaluation { assignment, score })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::argmin_search::Mode;
    use crate::encoding::DimensionSpec;
    use crate::pipeline::AnalyticObjective;

    fn space() -> SearchSpace {
        SearchSpace::new(vec![
            DimensionSpec::continuous("a", 0.0, 1.0),
            DimensionSpec::continuous("b", 0.0, 1.0),
        ])
        .unwrap()
    }

    fn bowl() -> AnalyticObjective {
        AnalyticObjective::new("bowl", Mode::Minimize, |x| {
            let a = x["a"].as_number().unwrap();
            let b = x["b"].as_number().unwrap();
            Ok((a - 0.5).powi(2) + (b - 0.25).powi(2))
        })
    }

    #[test]
    fn grid_hits_lattice_optimum() {
        let method = BaselineMethod::Grid { resolutions: Some(vec![5, 5]) };
        let out = run_classical_baseline(&bowl(), &space(), &method, 1, 0).unwrap();
        assert_eq!(out.n_evaluations, 25);
        assert_eq!(out.best_score, 0.0);
        assert_eq!(out.method, "grid");
    }

    #[test]
    fn budget_bounds_grid_and_random() {
        let grid = run_classical_baseline(&bowl(), &space(), &BaselineMethod::Grid { resolutions: None }, 30, 0).unwrap();
        assert_eq!(grid.n_evaluations, 30);
        let random = run_classical_baseline(&bowl(), &space(), &BaselineMethod::Random, 30, 7).unwrap();
        assert_eq!(random.n_evaluations, 30);
        assert_eq!(random, BaselineOutcome { elapsed_s: random.elapsed_s, ..run_classical_baseline(&bowl(), &space(), &BaselineMethod::Random, 30, 7).unwrap() });
        assert!(run_classical_baseline(&bowl(), &space(), &BaselineMethod::Random, 0, 7).is_err());
    }
}
