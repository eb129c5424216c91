use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::encoding::{Assignment, DimensionKind, DimensionSpec, SearchSpace, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum SamplingStrategy {
    #[default]
    UniformRandom,
    /// Evenly spaced points per dimension; `counts` multiply to the sample count.
    Lattice { counts: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub n_samples: usize,
    #[serde(flatten)]
    pub strategy: SamplingStrategy,
    #[serde(default)]
    pub rng_seed: u64,
}

impl SamplingPlan {
    pub fn uniform(n_samples: usize, rng_seed: u64) -> Self {
        Self { n_samples, strategy: SamplingStrategy::UniformRandom, rng_seed }
    }

    /// Ten samples per encoded coordinate.
    pub fn default_for(space: &SearchSpace, rng_seed: u64) -> Self {
        Self::uniform(10 * space.width(), rng_seed)
    }

    pub fn validate(&self, space: &SearchSpace) -> Result<(), PipelineError> {
        if self.n_samples == 0 {
            return Err(PipelineError::Config("sampling plan needs at least one sample".into()));
        }
        if let SamplingStrategy::Lattice { counts } = &self.strategy {
            if counts.len() != space.dims().len() {
                return Err(PipelineError::Config(format!(
                    "lattice has {} counts for {} dimensions",
                    counts.len(),
                    space.dims().len()
                )));
            }
            let product = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
            if product != Some(self.n_samples) {
                return Err(PipelineError::Config(format!(
                    "lattice counts {counts:?} do not multiply to {}",
                    self.n_samples
                )));
            }
        }
        Ok(())
    }
}

pub fn sample_assignments(space: &SearchSpace, plan: &SamplingPlan) -> Result<Vec<Assignment>, PipelineError> {
    plan.validate(space)?;
    match &plan.strategy {
        SamplingStrategy::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.rng_seed);
            Ok((0..plan.n_samples).map(|_| draw_uniform(space, &mut rng)).collect())
        }
        SamplingStrategy::Lattice { counts } => grid(space, counts),
    }
}

fn draw_uniform(space: &SearchSpace, rng: &mut ChaCha8Rng) -> Assignment {
    space
        .dims()
        .iter()
        .map(|dim| {
            let value = match &dim.kind {
                DimensionKind::Continuous { low, high, log: false } => Value::Number(rng.gen_range(*low..=*high)),
                DimensionKind::Continuous { low, high, log: true } => {
                    Value::Number(10f64.powf(rng.gen_range(low.log10()..=high.log10())).clamp(*low, *high))
                }
                DimensionKind::Discrete { low, step, .. } => {
                    let top = lattice_len(dim) - 1;
                    Value::Number(low + step * rng.gen_range(0..=top) as f64)
                }
                DimensionKind::Categorical { categories } => {
                    Value::Category(categories[rng.gen_range(0..categories.len())].clone())
                }
            };
            (dim.name.clone(), value)
        })
        .collect()
}

fn lattice_len(dim: &DimensionSpec) -> usize {
    dim.lattice_values().map_or(usize::MAX, |v| v.len())
}

/// `count` evenly spread values of one dimension, endpoints included.
pub fn axis_values(dim: &DimensionSpec, count: usize) -> Result<Vec<Value>, PipelineError> {
    if count == 0 {
        return Err(PipelineError::Config(format!("`{}` needs a resolution of at least 1", dim.name)));
    }
    let positions = |len: usize| -> Result<Vec<usize>, PipelineError> {
        if count > len {
            return Err(PipelineError::Config(format!(
                "`{}` has only {len} distinct values, {count} requested",
                dim.name
            )));
        }
        if count == 1 {
            return Ok(vec![(len - 1) / 2]);
        }
        let top = (len - 1) as f64;
        Ok((0..count).map(|j| (j as f64 * top / (count - 1) as f64).round() as usize).collect())
    };
    match &dim.kind {
        DimensionKind::Continuous { low, high, log } => {
            let (a, b) = if *log { (low.log10(), high.log10()) } else { (*low, *high) };
            let fractions: Vec<f64> = if count == 1 {
                vec![0.5]
            } else {
                (0..count).map(|j| j as f64 / (count - 1) as f64).collect()
            };
            Ok(fractions
                .into_iter()
                .map(|t| {
                    let v = a + t * (b - a);
                    Value::Number(if *log { 10f64.powf(v) } else { v }.clamp(*low, *high))
                })
                .collect())
        }
        DimensionKind::Discrete { .. } | DimensionKind::Categorical { .. } => {
            let all = dim.lattice_values().expect("discrete dimensions have a lattice");
            Ok(positions(all.len())?.into_iter().map(|i| all[i].clone()).collect())
        }
    }
}

/// Cartesian product of per-dimension axes, last dimension varying fastest.
pub fn grid(space: &SearchSpace, resolutions: &[usize]) -> Result<Vec<Assignment>, PipelineError> {
    if resolutions.len() != space.dims().len() {
        return Err(PipelineError::Config(format!(
            "{} resolutions for {} dimensions",
            resolutions.len(),
            space.dims().len()
        )));
    }
    let axes = space
        .dims()
        .iter()
        .zip(resolutions)
        .map(|(dim, &count)| axis_values(dim, count))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = vec![Assignment::new()];
    for (dim, axis) in space.dims().iter().zip(&axes) {
        out = out
            .iter()
            .flat_map(|partial| {
                axis.iter().map(move |value| {
                    let mut extended = partial.clone();
                    extended.insert(dim.name.clone(), value.clone());
                    extended
                })
            })
            .collect();
    }
    Ok(out)
}

/// Per-dimension resolutions whose product stays within `budget`: the coarsest axis is
/// refined first, lower index first on ties, and no axis exceeds its number of distinct
/// values.
pub fn resolutions_for_budget(space: &SearchSpace, budget: usize) -> Vec<usize> {
    let caps: Vec<usize> = space.dims().iter().map(lattice_len).collect();
    let mut res = vec![1usize; caps.len()];
    loop {
        let product: usize = res.iter().product();
        let candidate = (0..res.len())
            .filter(|&i| res[i] < caps[i])
            .filter(|&i| product / res[i] * (res[i] + 1) <= budget)
            .min_by_key(|&i| (res[i], i));
        match candidate {
            Some(i) => res[i] += 1,
            None => return res,
        }
    }
}
