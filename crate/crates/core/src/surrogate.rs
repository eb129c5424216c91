//! Data-reuploading Fourier surrogate `f(x) = ⟨0|U†(x,β,θ) Z̄ U(x,β,θ)|0⟩` and its
//! full-batch Adam training loop.
//!
//! Each of the `L` layers applies the feature map `RX(β[ℓ,q]·x[q])` on every qubit, then
//! the variational block `RZ(θ[ℓ,q,0]) RY(θ[ℓ,q,1]) RZ(θ[ℓ,q,2])` on every qubit, then a
//! ring of CNOTs `q → (q+1) mod n` (skipped for a single qubit).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adam::{Adam, AdamParams};
use crate::encoding::{EncodedPoint, ScoreBounds, SearchSpace};
use crate::scalar::Real;
use crate::simulator::{angle_gradients, run_circuit, GateOp, SimulatorError, MAX_QUBITS};

pub const CHECKPOINT_FORMAT: &str = "qhpo-surrogate";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurrogateError {
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
    #[error("expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("sample table is empty")]
    EmptyTable,
    #[error("target {value} of row {row} is outside [-1, 1]")]
    Target { row: usize, value: f64 },
    #[error("loss became non-finite at epoch {epoch}")]
    NonFinite { epoch: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

/// What a gate of the surrogate circuit is driven by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateRole {
    Encoding { layer: usize, qubit: usize },
    Variational { layer: usize, qubit: usize, angle: usize },
    Entangler,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateModel<T> {
    n_qubits: usize,
    n_layers: usize,
    beta: Vec<T>,
    theta: Vec<T>,
    negated: bool,
}

impl<T: Real> SurrogateModel<T> {
    /// β = 1 and θ = 0.
    pub fn new(n_qubits: usize, n_layers: usize) -> Result<Self, SurrogateError> {
        let cells = Self::check_dims(n_qubits, n_layers)?;
        Ok(Self {
            n_qubits,
            n_layers,
            beta: vec![T::one(); cells],
            theta: vec![T::zero(); 3 * cells],
            negated: false,
        })
    }

    /// β = 1 and θ drawn uniformly from [-0.1, 0.1].
    pub fn initialized(n_qubits: usize, n_layers: usize, seed: u64) -> Result<Self, SurrogateError> {
        let mut model = Self::new(n_qubits, n_layers)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for angle in &mut model.theta {
            *angle = T::lit(rng.gen_range(-0.1..=0.1));
        }
        Ok(model)
    }

    /// `beta` is layer-major (`ℓ·n + q`); `theta` is `(ℓ·n + q)·3 + k`.
    pub fn from_parameters(
        n_qubits: usize,
        n_layers: usize,
        beta: Vec<T>,
        theta: Vec<T>,
    ) -> Result<Self, SurrogateError> {
        let cells = Self::check_dims(n_qubits, n_layers)?;
        if beta.len() != cells {
            return Err(SurrogateError::Shape { expected: cells, got: beta.len() });
        }
        if theta.len() != 3 * cells {
            return Err(SurrogateError::Shape { expected: 3 * cells, got: theta.len() });
        }
        Ok(Self { n_qubits, n_layers, beta, theta, negated: false })
    }

    fn check_dims(n_qubits: usize, n_layers: usize) -> Result<usize, SurrogateError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(SimulatorError::Capacity(n_qubits).into());
        }
        if n_layers == 0 {
            return Err(SurrogateError::Config("at least one layer is required".into()));
        }
        Ok(n_qubits * n_layers)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    /// The same circuit with the observable's sign flipped.
    pub fn negated(&self) -> Self {
        Self { negated: !self.negated, ..self.clone() }
    }

    /// Flat trainable parameters `[β…, θ…]`.
    pub fn parameters(&self) -> Vec<T> {
        self.beta.iter().chain(&self.theta).copied().collect()
    }

    fn set_parameters(&mut self, flat: &[T]) {
        let split = self.beta.len();
        self.beta.copy_from_slice(&flat[..split]);
        self.theta.copy_from_slice(&flat[split..]);
    }

    fn sign(&self) -> T {
        if self.negated {
            -T::one()
        } else {
            T::one()
        }
    }

    fn check_input(&self, x: &[T]) -> Result<(), SurrogateError> {
        if x.len() != self.n_qubits {
            return Err(SurrogateError::Shape { expected: self.n_qubits, got: x.len() });
        }
        Ok(())
    }

    /// Gate list and the role of every gate, in application order.
    pub fn circuit_with_roles(&self, x: &[T]) -> Result<(Vec<GateOp<T>>, Vec<GateRole>), SurrogateError> {
        self.check_input(x)?;
        let n = self.n_qubits;
        let ring = if n > 1 { n } else { 0 };
        let capacity = self.n_layers * (4 * n + ring);
        let mut gates = Vec::with_capacity(capacity);
        let mut roles = Vec::with_capacity(capacity);
        for layer in 0..self.n_layers {
            for qubit in 0..n {
                gates.push(GateOp::Rx { target: qubit, angle: self.beta[layer * n + qubit] * x[qubit] });
                roles.push(GateRole::Encoding { layer, qubit });
            }
            for qubit in 0..n {
                let base = (layer * n + qubit) * 3;
                gates.push(GateOp::Rz { target: qubit, angle: self.theta[base] });
                gates.push(GateOp::Ry { target: qubit, angle: self.theta[base + 1] });
                gates.push(GateOp::Rz { target: qubit, angle: self.theta[base + 2] });
                for angle in 0..3 {
                    roles.push(GateRole::Variational { layer, qubit, angle });
                }
            }
            for qubit in 0..ring {
                gates.push(GateOp::Cnot { control: qubit, target: (qubit + 1) % n });
                roles.push(GateRole::Entangler);
            }
        }
        Ok((gates, roles))
    }

    pub fn build_circuit(&self, x: &[T]) -> Result<Vec<GateOp<T>>, SurrogateError> {
        Ok(self.circuit_with_roles(x)?.0)
    }

    pub fn evaluate(&self, x: &[T]) -> Result<T, SurrogateError> {
        let gates = self.build_circuit(x)?;
        Ok(self.sign() * run_circuit(&gates, self.n_qubits)?)
    }

    /// Model output and its gradient with respect to `[β…, θ…]`.
    pub fn value_and_parameter_gradient(&self, x: &[T]) -> Result<(T, Vec<T>), SurrogateError> {
        let (gates, roles) = self.circuit_with_roles(x)?;
        let sign = self.sign();
        let value = sign * run_circuit(&gates, self.n_qubits)?;
        let rotating: Vec<usize> =
            (0..gates.len()).filter(|&i| roles[i] != GateRole::Entangler).collect();
        let by_angle = angle_gradients(&gates, self.n_qubits, &rotating)?;

        let n = self.n_qubits;
        let cells = self.beta.len();
        let mut grad = vec![T::zero(); 4 * cells];
        for (&gate_index, &d_angle) in rotating.iter().zip(&by_angle) {
            match roles[gate_index] {
                GateRole::Encoding { layer, qubit } => {
                    grad[layer * n + qubit] = sign * d_angle * x[qubit];
                }
                GateRole::Variational { layer, qubit, angle } => {
                    grad[cells + (layer * n + qubit) * 3 + angle] = sign * d_angle;
                }
                GateRole::Entangler => {}
            }
        }
        Ok((value, grad))
    }

    /// Gradient of the output with respect to the input point, chaining
    /// `∂f/∂x[q] = Σ_ℓ β[ℓ,q] · ∂f/∂angle(ℓ,q)` through the encoding gates.
    pub fn input_gradient(&self, x: &[T]) -> Result<Vec<T>, SurrogateError> {
        let (gates, roles) = self.circuit_with_roles(x)?;
        let encoding: Vec<usize> = (0..gates.len())
            .filter(|&i| matches!(roles[i], GateRole::Encoding { .. }))
            .collect();
        let by_angle = angle_gradients(&gates, self.n_qubits, &encoding)?;
        let sign = self.sign();
        let mut grad = vec![T::zero(); self.n_qubits];
        for (&gate_index, &d_angle) in encoding.iter().zip(&by_angle) {
            if let GateRole::Encoding { layer, qubit } = roles[gate_index] {
                grad[qubit] = grad[qubit] + self.beta[layer * self.n_qubits + qubit] * d_angle;
            }
        }
        Ok(grad.into_iter().map(|g| sign * g).collect())
    }
}

/// One training row: encoded hyperparameters and the normalized score.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub x: EncodedPoint<T>,
    pub y: T,
}

/// Surrogate training set.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable<T> {
    rows: Vec<Sample<T>>,
    pub model_name: String,
    pub metric: String,
}

impl<T: Real> SampleTable<T> {
    pub fn new(rows: Vec<Sample<T>>) -> Result<Self, SurrogateError> {
        Self::with_provenance(rows, "", "")
    }

    pub fn with_provenance(
        rows: Vec<Sample<T>>,
        model_name: &str,
        metric: &str,
    ) -> Result<Self, SurrogateError> {
        if let Some(width) = rows.first().map(|r| r.x.len()) {
            for (row, sample) in rows.iter().enumerate() {
                if sample.x.len() != width {
                    return Err(SurrogateError::Shape { expected: width, got: sample.x.len() });
                }
                if !(sample.y >= -T::one() && sample.y <= T::one()) {
                    return Err(SurrogateError::Target { row, value: sample.y.to_f64_lossy() });
                }
            }
        }
        Ok(Self { rows, model_name: model_name.to_owned(), metric: metric.to_owned() })
    }

    /// Builds a table from raw `(x, y)` pairs, validating every point.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Vec<T>, T)>) -> Result<Self, SurrogateError> {
        let rows = pairs
            .into_iter()
            .map(|(x, y)| {
                let x = EncodedPoint::new(x).map_err(|e| SurrogateError::Config(e.to_string()))?;
                Ok(Sample { x, y })
            })
            .collect::<Result<Vec<_>, SurrogateError>>()?;
        Self::new(rows)
    }

    pub fn rows(&self) -> &[Sample<T>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> Option<usize> {
        self.rows.first().map(|r| r.x.len())
    }
}

/// Mean squared error of the model over the table.
pub fn loss<T: Real>(model: &SurrogateModel<T>, table: &SampleTable<T>) -> Result<T, SurrogateError> {
    if table.is_empty() {
        return Err(SurrogateError::EmptyTable);
    }
    let residuals = table
        .rows()
        .par_iter()
        .map(|s| Ok(model.evaluate(&s.x)? - s.y))
        .collect::<Result<Vec<T>, SurrogateError>>()?;
    let sum: T = residuals.into_iter().map(|r| r * r).sum();
    Ok(sum / T::lit(table.len() as f64))
}

/// Loss and its gradient with respect to `[β…, θ…]`.
pub fn loss_and_gradient<T: Real>(
    model: &SurrogateModel<T>,
    table: &SampleTable<T>,
) -> Result<(T, Vec<T>), SurrogateError> {
    if table.is_empty() {
        return Err(SurrogateError::EmptyTable);
    }
    let per_row = table
        .rows()
        .par_iter()
        .map(|s| {
            let (value, grad) = model.value_and_parameter_gradient(&s.x)?;
            Ok((value - s.y, grad))
        })
        .collect::<Result<Vec<(T, Vec<T>)>, SurrogateError>>()?;

    let n = T::lit(table.len() as f64);
    let two = T::lit(2.0);
    let mut total = T::zero();
    let mut grad = vec![T::zero(); 4 * model.beta.len()];
    // summed in row order so results do not depend on the thread count
    for (residual, row_grad) in per_row {
        total = total + residual * residual;
        for (g, r) in grad.iter_mut().zip(row_grad) {
            *g = *g + two * residual * r;
        }
    }
    Ok((total / n, grad.into_iter().map(|g| g / n).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    #[serde(flatten)]
    pub adam: AdamParams,
    /// Seeds the θ initialization.
    pub rng_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { learning_rate: 0.15, max_epochs: 70, adam: AdamParams::default(), rng_seed: 0 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), SurrogateError> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(SurrogateError::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        let AdamParams { beta1, beta2, eps } = self.adam;
        if !((0.0..1.0).contains(&beta1) && (0.0..1.0).contains(&beta2) && eps > 0.0) {
            return Err(SurrogateError::Config("Adam needs 0 ≤ beta < 1 and eps > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    /// Parameters with the lowest recorded loss.
    pub model: SurrogateModel<T>,
    /// `history[e]` is the loss before epoch `e`; the last entry follows the final update.
    pub history: Vec<T>,
    pub best_epoch: usize,
    pub best_loss: T,
}

/// Full-batch Adam on (β, θ) jointly with parameter-shift gradients.
pub fn train<T: Real>(
    model: &SurrogateModel<T>,
    table: &SampleTable<T>,
    config: &TrainConfig,
) -> Result<TrainOutcome<T>, SurrogateError> {
    config.validate()?;
    if table.is_empty() {
        return Err(SurrogateError::EmptyTable);
    }
    if let Some(width) = table.width() {
        if width != model.n_qubits {
            return Err(SurrogateError::Shape { expected: model.n_qubits, got: width });
        }
    }

    let mut current = model.clone();
    let mut params = current.parameters();
    let mut adam = Adam::new(params.len(), config.learning_rate, config.adam);
    let mut history = Vec::with_capacity(config.max_epochs + 1);
    let mut best = (current.clone(), T::infinity(), 0usize);

    for epoch in 0..config.max_epochs {
        let (value, grad) = loss_and_gradient(&current, table)?;
        if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(SurrogateError::NonFinite { epoch });
        }
        history.push(value);
        if value < best.1 {
            best = (current.clone(), value, epoch);
        }
        adam.step(&mut params, &grad);
        current.set_parameters(&params);
    }
    let last = loss(&current, table)?;
    if !last.is_finite() {
        return Err(SurrogateError::NonFinite { epoch: config.max_epochs });
    }
    history.push(last);
    if last < best.1 {
        best = (current, last, config.max_epochs);
    }
    Ok(TrainOutcome { model: best.0, history, best_epoch: best.2, best_loss: best.1 })
}

/// Versioned on-disk form of a trained surrogate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub n_qubits: usize,
    pub n_layers: usize,
    pub beta: Vec<f64>,
    pub theta: Vec<f64>,
    pub score_bounds: Option<ScoreBounds>,
    pub space_hash: String,
}

impl Checkpoint {
    pub fn new<T: Real>(
        model: &SurrogateModel<T>,
        score_bounds: Option<ScoreBounds>,
        space: &SearchSpace,
    ) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.to_owned(),
            version: CHECKPOINT_VERSION,
            n_qubits: model.n_qubits,
            n_layers: model.n_layers,
            beta: model.beta.iter().map(|v| v.to_f64_lossy()).collect(),
            theta: model.theta.iter().map(|v| v.to_f64_lossy()).collect(),
            score_bounds,
            space_hash: space.content_hash(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SurrogateError> {
        let checkpoint: Self =
            serde_json::from_str(text).map_err(|e| SurrogateError::Checkpoint(e.to_string()))?;
        if checkpoint.format != CHECKPOINT_FORMAT {
            return Err(SurrogateError::Checkpoint(format!("unknown format `{}`", checkpoint.format)));
        }
        if checkpoint.version != CHECKPOINT_VERSION {
            return Err(SurrogateError::Checkpoint(format!(
                "unsupported version {}",
                checkpoint.version
            )));
        }
        Ok(checkpoint)
    }

    /// Fails when the checkpoint was trained against a different search space.
    pub fn check_space(&self, space: &SearchSpace) -> Result<(), SurrogateError> {
        let hash = space.content_hash();
        if hash != self.space_hash {
            return Err(SurrogateError::Checkpoint(format!(
                "search space hash {hash} does not match checkpoint {}",
                self.space_hash
            )));
        }
        Ok(())
    }

    pub fn model<T: Real>(&self) -> Result<SurrogateModel<T>, SurrogateError> {
        SurrogateModel::from_parameters(
            self.n_qubits,
            self.n_layers,
            self.beta.iter().map(|&v| T::lit(v)).collect(),
            self.theta.iter().map(|&v| T::lit(v)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn single_qubit_structure() {
        let model = SurrogateModel::<f64>::new(1, 1).unwrap();
        let gates = model.build_circuit(&[0.4]).unwrap();
        assert_eq!(gates.len(), 4);
        assert!(matches!(gates[0], GateOp::Rx { target: 0, .. }));
        assert!(matches!(gates[1], GateOp::Rz { .. }));
        assert!(matches!(gates[2], GateOp::Ry { .. }));
        assert!(matches!(gates[3], GateOp::Rz { .. }));
    }

    #[test]
    fn gate_count_three_qubits_two_layers() {
        let model = SurrogateModel::<f64>::new(3, 2).unwrap();
        let gates = model.build_circuit(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(gates.len(), 30);
        let cnots = gates.iter().filter(|g| matches!(g, GateOp::Cnot { .. })).count();
        assert_eq!(cnots, 6);
    }

    #[test]
    fn shape_errors() {
        let model = SurrogateModel::<f64>::new(2, 1).unwrap();
        assert_eq!(model.evaluate(&[0.1]).unwrap_err(), SurrogateError::Shape { expected: 2, got: 1 });
        assert!(SurrogateModel::<f64>::new(2, 0).is_err());
        assert!(SurrogateModel::<f64>::new(13, 1).is_err());
        assert!(SurrogateModel::<f64>::from_parameters(1, 1, vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn analytic_evaluations() {
        let cos = SurrogateModel::<f64>::new(1, 1).unwrap();
        for x in [0.0, 0.3, 1.7, PI] {
            assert_abs_diff_eq!(cos.evaluate(&[x]).unwrap(), x.cos(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(cos.evaluate(&[PI]).unwrap(), -1.0, epsilon = 1e-12);

        let flat = SurrogateModel::<f64>::from_parameters(2, 2, vec![0.0; 4], vec![0.0; 12]).unwrap();
        assert_abs_diff_eq!(flat.evaluate(&[1.1, 2.9]).unwrap(), 1.0, epsilon = 1e-12);

        let doubled = SurrogateModel::<f64>::new(1, 2).unwrap();
        assert_abs_diff_eq!(doubled.evaluate(&[0.4]).unwrap(), 0.8f64.cos(), epsilon = 1e-12);
    }

    #[test]
    fn negation_flips_output() {
        let model = SurrogateModel::<f64>::initialized(2, 2, 3).unwrap();
        let x = [0.3, 2.2];
        assert_eq!(model.negated().evaluate(&x).unwrap(), -model.evaluate(&x).unwrap());
        assert_eq!(model.negated().negated(), model);
    }

    #[test]
    fn loss_examples() {
        let model = SurrogateModel::<f64>::new(1, 1).unwrap();
        let perfect =
            SampleTable::from_pairs([0.1, 0.8, 2.0].map(|x: f64| (vec![x], x.cos()))).unwrap();
        assert_abs_diff_eq!(loss(&model, &perfect).unwrap(), 0.0, epsilon = 1e-24);
        let single = SampleTable::from_pairs([(vec![0.0], -1.0)]).unwrap();
        assert_abs_diff_eq!(loss(&model, &single).unwrap(), 4.0, epsilon = 1e-12);
        let empty = SampleTable::<f64>::new(vec![]).unwrap();
        assert_eq!(loss(&model, &empty).unwrap_err(), SurrogateError::EmptyTable);
    }

    #[test]
    fn table_rejects_bad_targets() {
        assert!(matches!(
            SampleTable::from_pairs([(vec![0.1], 1.5)]).unwrap_err(),
            SurrogateError::Target { row: 0, .. }
        ));
        assert!(SampleTable::from_pairs([(vec![4.0], 0.5)]).is_err());
    }

    #[test]
    fn zero_epochs_returns_initial_model() {
        let model = SurrogateModel::<f64>::initialized(1, 2, 9).unwrap();
        let table = SampleTable::from_pairs([(vec![0.5], 0.2), (vec![1.5], -0.3)]).unwrap();
        let cfg = TrainConfig { max_epochs: 0, ..TrainConfig::default() };
        let out = train(&model, &table, &cfg).unwrap();
        assert_eq!(out.model, model);
        assert_eq!(out.history.len(), 1);
        assert_eq!(out.best_epoch, 0);
    }

    #[test]
    fn training_reduces_loss_and_keeps_best() {
        let model = SurrogateModel::<f64>::initialized(1, 2, 1).unwrap();
        let table = SampleTable::from_pairs(
            (0..12).map(|i| {
                let x = PI * i as f64 / 11.0;
                (vec![x], 0.6 * (2.0 * x).cos())
            }),
        )
        .unwrap();
        let out = train(&model, &table, &TrainConfig::default()).unwrap();
        assert_eq!(out.history.len(), 71);
        assert!(out.best_loss < out.history[0]);
        assert_eq!(loss(&out.model, &table).unwrap(), out.best_loss);
        assert_eq!(out.history[out.best_epoch], out.best_loss);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let model = SurrogateModel::<f64>::new(1, 1).unwrap();
        let table = SampleTable::from_pairs([(vec![0.5], 0.2)]).unwrap();
        let cfg = TrainConfig { learning_rate: 0.0, ..TrainConfig::default() };
        assert!(matches!(train(&model, &table, &cfg).unwrap_err(), SurrogateError::Config(_)));
    }

    #[test]
    fn checkpoint_round_trip() {
        let space = SearchSpace::new(vec![crate::encoding::DimensionSpec::continuous("a", 0.0, 1.0)]).unwrap();
        let model = SurrogateModel::<f64>::initialized(1, 3, 4).unwrap();
        let bounds = Some(ScoreBounds::new(0.1, 0.9).unwrap());
        let ck = Checkpoint::new(&model, bounds, &space);
        let back = Checkpoint::from_json(&ck.to_json()).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.model::<f64>().unwrap(), model);
        back.check_space(&space).unwrap();
        let other = SearchSpace::new(vec![crate::encoding::DimensionSpec::continuous("a", 0.0, 2.0)]).unwrap();
        assert!(back.check_space(&other).is_err());
        let mut wrong = ck.clone();
        wrong.version = 99;
        assert!(Checkpoint::from_json(&wrong.to_json()).is_err());
    }
}
