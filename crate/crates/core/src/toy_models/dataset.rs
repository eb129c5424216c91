use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::ModelError;

/// Dense regression dataset, features stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_features: usize,
    features: Vec<f64>,
    target: Vec<f64>,
}

/// Parameters of the seeded Friedman-style generator:
/// `y = 10 sin(π x0 x1) + 20 (x2 − ½)² + 10 x3 + 5 x4 + noise·ε`, with `x ~ U[0,1]^F`
/// and any features past the fifth carrying no signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticParams {
    pub n_samples: usize,
    pub n_features: usize,
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self { n_samples: 500, n_features: 5, noise: 1.0, seed: 0 }
    }
}

impl Dataset {
    pub fn new(rows: Vec<Vec<f64>>, target: Vec<f64>) -> Result<Self, ModelError> {
        let n_features = rows.first().map_or(0, Vec::len);
        if rows.len() != target.len() {
            return Err(ModelError::Dataset(format!(
                "{} feature rows but {} targets",
                rows.len(),
                target.len()
            )));
        }
        if rows.is_empty() || n_features == 0 {
            return Err(ModelError::Dataset("dataset needs at least one row and one feature".into()));
        }
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_features {
                return Err(ModelError::Dataset(format!("row {i} has {} features, expected {n_features}", row.len())));
            }
            features.extend(row);
        }
        if features.iter().chain(&target).any(|v| !v.is_finite()) {
            return Err(ModelError::Dataset("non-finite entry".into()));
        }
        Ok(Self { n_features, features, target })
    }

    pub fn friedman(params: &SyntheticParams) -> Result<Self, ModelError> {
        if params.n_features < 5 {
            return Err(ModelError::Dataset("the Friedman surface needs at least 5 features".into()));
        }
        if params.n_samples == 0 || !(params.noise.is_finite() && params.noise >= 0.0) {
            return Err(ModelError::Dataset("need n_samples > 0 and a finite noise ≥ 0".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut rows = Vec::with_capacity(params.n_samples);
        let mut target = Vec::with_capacity(params.n_samples);
        for _ in 0..params.n_samples {
            let x: Vec<f64> = (0..params.n_features).map(|_| rng.gen::<f64>()).collect();
            let signal = 10.0 * (std::f64::consts::PI * x[0] * x[1]).sin()
                + 20.0 * (x[2] - 0.5).powi(2)
                + 10.0 * x[3]
                + 5.0 * x[4];
            target.push(signal + params.noise * rng.sample::<f64, _>(StandardNormal));
            rows.push(x);
        }
        Self::new(rows, target)
    }

    pub fn n_rows(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.features[index * self.n_features..(index + 1) * self.n_features]
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut target = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            target.push(self.target[i]);
        }
        Self { n_features: self.n_features, features, target }
    }

    /// Header `f0,…,f{F-1},target`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), ModelError> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (0..self.n_features).map(|j| format!("f{j}")).collect();
        header.push("target".into());
        out.write_record(&header).map_err(csv_error)?;
        for i in 0..self.n_rows() {
            let mut record: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            record.push(self.target[i].to_string());
            out.write_record(&record).map_err(csv_error)?;
        }
        out.flush().map_err(|e| ModelError::Csv(e.to_string()))
    }

    /// Reads a header row followed by numeric rows; the last column is the target.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, ModelError> {
        let mut input = csv::Reader::from_reader(reader);
        let mut rows = Vec::new();
        let mut target = Vec::new();
        for (line, record) in input.records().enumerate() {
            let record = record.map_err(csv_error)?;
            let values = record
                .iter()
                .map(|field| field.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| ModelError::Csv(format!("data row {}: {e}", line + 1)))?;
            if values.len() < 2 {
                return Err(ModelError::Csv(format!("data row {} needs a feature and a target", line + 1)));
            }
            let (features, y) = values.split_at(values.len() - 1);
            rows.push(features.to_vec());
            target.push(y[0]);
        }
        Self::new(rows, target)
    }
}

fn csv_error(e: csv::Error) -> ModelError {
    ModelError::Csv(e.to_string())
}
