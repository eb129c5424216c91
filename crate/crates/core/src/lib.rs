//! Hyperparameter optimization through a data-reuploading quantum Fourier surrogate.
//!
//! The pipeline samples hyperparameter configurations, scores each one with k-fold
//! cross-validation, encodes the configurations into `[0, π]^d`, fits a layered
//! variational circuit to the normalized scores, and then descends over the circuit's
//! *inputs* to locate the configuration the surrogate predicts to be best.
//!
//! Circuit math is generic over [`Real`] (`f32` or `f64`); the aliases below fix `f64`,
//! which is what the pipeline and CLI use.

pub mod adam;
pub mod argmin_search;
pub mod encoding;
pub mod pipeline;
pub mod scalar;
pub mod simulator;
pub mod surrogate;
pub mod toy_models;

pub use argmin_search::{decode_result, grad_wrt_input, search, Mode, SearchConfig, SearchError};
pub use encoding::{
    Assignment, DimensionKind, DimensionSpec, EncodingError, ScoreBounds, SearchSpace, Value,
};
pub use scalar::Real;
pub use simulator::{GateOp, SimulatorError, MAX_QUBITS};
pub use surrogate::{train, Checkpoint, SurrogateError, TrainConfig};

pub type StateVector = simulator::StateVector<f64>;
pub type StateVector32 = simulator::StateVector<f32>;
pub type Gate = simulator::GateOp<f64>;
pub type EncodedPoint = encoding::EncodedPoint<f64>;
pub type Surrogate = surrogate::SurrogateModel<f64>;
pub type Surrogate32 = surrogate::SurrogateModel<f32>;
pub type SampleTable = surrogate::SampleTable<f64>;
pub type SearchResult = argmin_search::SearchResult<f64>;
