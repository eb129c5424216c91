//! Mapping between native hyperparameter values and the circuit input box `[0, π]^d`.
//!
//! Continuous and discrete dimensions occupy one coordinate each through an affine map
//! (optionally in log10 space for continuous ones). A categorical dimension with `c`
//! categories occupies `ceil(log2 c)` coordinates holding the binary digits of the
//! category index, most significant first, with digit 0 at 0 and digit 1 at π.

use std::collections::HashSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::scalar::Real;
use crate::simulator::MAX_QUBITS;

/// Slack allowed on encoded coordinates before they are rejected.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EncodingError {
    #[error("dimension `{0}` is missing from the assignment")]
    MissingDimension(String),
    #[error("assignment has `{0}`, which is not a dimension of the search space")]
    UnknownDimension(String),
    #[error("value for `{name}` is out of its domain: {reason}")]
    Domain { name: String, reason: String },
    #[error("encoded component {index} = {value} lies outside [0, π]")]
    Component { index: usize, value: f64 },
    #[error("encoded point has {got} components, the space needs {expected}")]
    Width { expected: usize, got: usize },
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("score bounds must satisfy hi > lo (got lo = {lo}, hi = {hi})")]
    ScoreBounds { lo: f64, hi: f64 },
    #[error("cannot parse search space: {0}")]
    Parse(String),
}

/// A native hyperparameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Category(String),
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            Value::Category(_) => None,
        }
    }

    pub fn as_category(&self) -> Option<&str> {
        match self {
            Value::Category(c) => Some(c),
            Value::Number(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(v) => write!(f, "{v}"),
            Value::Category(c) => write!(f, "{c}"),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Number(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Category(v.to_owned())
    }
}

/// Native values keyed by dimension name, in search-space order when produced by
/// [`SearchSpace::decode`].
pub type Assignment = IndexMap<String, Value>;

fn default_step() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DimensionKind {
    Continuous {
        low: f64,
        high: f64,
        #[serde(default)]
        log: bool,
    },
    Discrete {
        low: f64,
        high: f64,
        #[serde(default = "default_step")]
        step: f64,
    },
    Categorical { categories: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: DimensionKind,
}

impl DimensionSpec {
    pub fn continuous(name: &str, low: f64, high: f64) -> Self {
        Self { name: name.to_owned(), kind: DimensionKind::Continuous { low, high, log: false } }
    }

    pub fn log_continuous(name: &str, low: f64, high: f64) -> Self {
        Self { name: name.to_owned(), kind: DimensionKind::Continuous { low, high, log: true } }
    }

    pub fn discrete(name: &str, low: f64, high: f64, step: f64) -> Self {
        Self { name: name.to_owned(), kind: DimensionKind::Discrete { low, high, step } }
    }

    pub fn categorical(name: &str, categories: &[&str]) -> Self {
        Self {
            name: name.to_owned(),
            kind: DimensionKind::Categorical {
                categories: categories.iter().map(|c| (*c).to_owned()).collect(),
            },
        }
    }

    /// Number of encoded coordinates this dimension occupies.
    pub fn width(&self) -> usize {
        match &self.kind {
            DimensionKind::Continuous { .. } | DimensionKind::Discrete { .. } => 1,
            DimensionKind::Categorical { categories } => categorical_width(categories.len()),
        }
    }

    fn validate(&self) -> Result<(), EncodingError> {
        let bad = |reason: String| Err(EncodingError::InvalidSpace(format!("`{}`: {reason}", self.name)));
        if self.name.is_empty() {
            return Err(EncodingError::InvalidSpace("dimension with empty name".into()));
        }
        match &self.kind {
            DimensionKind::Continuous { low, high, log } => {
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return bad(format!("need finite low < high, got [{low}, {high}]"));
                }
                if *log && *low <= 0.0 {
                    return bad("log scale needs low > 0".into());
                }
            }
            DimensionKind::Discrete { low, high, step } => {
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return bad(format!("need finite low < high, got [{low}, {high}]"));
                }
                if !(step.is_finite() && *step > 0.0) {
                    return bad(format!("step must be positive, got {step}"));
                }
            }
            DimensionKind::Categorical { categories } => {
                if categories.is_empty() {
                    return bad("no categories".into());
                }
                let unique: HashSet<&String> = categories.iter().collect();
                if unique.len() != categories.len() {
                    return bad("duplicate categories".into());
                }
            }
        }
        Ok(())
    }

    /// Every admissible value of a discrete or categorical dimension; `None` for
    /// continuous ones.
    pub fn lattice_values(&self) -> Option<Vec<Value>> {
        match &self.kind {
            DimensionKind::Continuous { .. } => None,
            DimensionKind::Discrete { low, high, step } => {
                let top = lattice_top(*low, *high, *step);
                Some((0..=top).map(|k| Value::Number(lattice_point(*low, *step, k))).collect())
            }
            DimensionKind::Categorical { categories } => {
                Some(categories.iter().map(|c| Value::Category(c.clone())).collect())
            }
        }
    }
}

/// `ceil(log2 c)`; a single category needs no coordinates.
pub fn categorical_width(count: usize) -> usize {
    if count <= 1 {
        0
    } else {
        (usize::BITS - (count - 1).leading_zeros()) as usize
    }
}

fn lattice_top(low: f64, high: f64, step: f64) -> usize {
    ((high - low) / step + 1e-9).floor() as usize
}

fn lattice_point(low: f64, step: f64, k: usize) -> f64 {
    low + step * k as f64
}

/// Ordered list of hyperparameter dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct SearchSpace {
    dims: Vec<DimensionSpec>,
}

#[derive(Serialize, Deserialize)]
struct RawSpace {
    #[serde(rename = "dimension")]
    dims: Vec<DimensionSpec>,
}

impl TryFrom<RawSpace> for SearchSpace {
    type Error = EncodingError;

    fn try_from(raw: RawSpace) -> Result<Self, Self::Error> {
        SearchSpace::new(raw.dims)
    }
}

impl From<SearchSpace> for RawSpace {
    fn from(space: SearchSpace) -> Self {
        RawSpace { dims: space.dims }
    }
}

impl SearchSpace {
    pub fn new(dims: Vec<DimensionSpec>) -> Result<Self, EncodingError> {
        if dims.is_empty() {
            return Err(EncodingError::InvalidSpace("no dimensions".into()));
        }
        let mut names = HashSet::new();
        for dim in &dims {
            dim.validate()?;
            if !names.insert(dim.name.as_str()) {
                return Err(EncodingError::InvalidSpace(format!("duplicate dimension `{}`", dim.name)));
            }
        }
        let space = Self { dims };
        let width = space.width();
        if width == 0 || width > MAX_QUBITS {
            return Err(EncodingError::InvalidSpace(format!(
                "encoded width {width} must be between 1 and {MAX_QUBITS}"
            )));
        }
        Ok(space)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, EncodingError> {
        toml::from_str(text).map_err(|e| EncodingError::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("search space serializes to TOML")
    }

    pub fn dims(&self) -> &[DimensionSpec] {
        &self.dims
    }

    /// Encoded width `d`, the surrogate's qubit count.
    pub fn width(&self) -> usize {
        self.dims.iter().map(DimensionSpec::width).sum()
    }

    /// Column labels of the encoded vector: the dimension name for scalar dimensions,
    /// `name[j]` for the j-th bit of a categorical one.
    pub fn encoded_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.width());
        for dim in &self.dims {
            match dim.kind {
                DimensionKind::Categorical { .. } => {
                    names.extend((0..dim.width()).map(|j| format!("{}[{j}]", dim.name)));
                }
                _ => names.push(dim.name.clone()),
            }
        }
        names
    }

    /// SHA-256 of the canonical JSON form; checkpoints record it.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("search space serializes to JSON");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Number of points when every dimension is discrete or categorical.
    pub fn lattice_size(&self) -> Option<usize> {
        self.dims
            .iter()
            .map(|d| d.lattice_values().map(|v| v.len()))
            .try_fold(1usize, |acc, n| n.map(|n| acc.saturating_mul(n)))
    }

    /// All assignments of a fully discrete space, last dimension varying fastest.
    pub fn enumerate_lattice(&self) -> Option<Vec<Assignment>> {
        let axes: Vec<Vec<Value>> =
            self.dims.iter().map(DimensionSpec::lattice_values).collect::<Option<_>>()?;
        Some(cartesian(&self.dims, &axes))
    }

    pub fn encode<T: Real>(&self, assignment: &Assignment) -> Result<EncodedPoint<T>, EncodingError> {
        for key in assignment.keys() {
            if !self.dims.iter().any(|d| &d.name == key) {
                return Err(EncodingError::UnknownDimension(key.clone()));
            }
        }
        let pi = T::PI();
        let mut values = Vec::with_capacity(self.width());
        for dim in &self.dims {
            let value = assignment
                .get(&dim.name)
                .ok_or_else(|| EncodingError::MissingDimension(dim.name.clone()))?;
            let domain = |reason: String| EncodingError::Domain { name: dim.name.clone(), reason };
            match &dim.kind {
                DimensionKind::Continuous { low, high, log } => {
                    let v = value.as_number().ok_or_else(|| domain("expected a number".into()))?;
                    if !(v >= *low && v <= *high) {
                        return Err(domain(format!("{v} is outside [{low}, {high}]")));
                    }
                    let fraction = if *log {
                        (v.log10() - low.log10()) / (high.log10() - low.log10())
                    } else {
                        (v - low) / (high - low)
                    };
                    values.push(pi * T::lit(fraction.clamp(0.0, 1.0)));
                }
                DimensionKind::Discrete { low, high, step } => {
                    let v = value.as_number().ok_or_else(|| domain("expected a number".into()))?;
                    if !(v >= *low && v <= *high) {
                        return Err(domain(format!("{v} is outside [{low}, {high}]")));
                    }
                    let k = (v - low) / step;
                    if (k - k.round()).abs() > 1e-9 * k.abs().max(1.0) {
                        return Err(domain(format!("{v} is not on the lattice {low} + k·{step}")));
                    }
                    values.push(pi * T::lit((v - low) / (high - low)));
                }
                DimensionKind::Categorical { categories } => {
                    let label = value.as_category().ok_or_else(|| domain("expected a category".into()))?;
                    let index = categories
                        .iter()
                        .position(|c| c == label)
                        .ok_or_else(|| domain(format!("unknown category `{label}`")))?;
                    let width = dim.width();
                    for bit in (0..width).rev() {
                        values.push(if (index >> bit) & 1 == 1 { pi } else { T::zero() });
                    }
                }
            }
        }
        Ok(EncodedPoint(values))
    }

    /// Total inverse of [`encode`](Self::encode): any point of `[0, π]^d` maps to an
    /// in-space assignment. Discrete values round half-up to the lattice, categorical
    /// coordinates threshold at π/2, and unused bit patterns clamp to the last category.
    pub fn decode<T: Real>(&self, point: &[T]) -> Result<Assignment, EncodingError> {
        let point = EncodedPoint::new(point.to_vec())?;
        if point.len() != self.width() {
            return Err(EncodingError::Width { expected: self.width(), got: point.len() });
        }
        let pi = std::f64::consts::PI;
        let mut out = Assignment::with_capacity(self.dims.len());
        let mut cursor = 0;
        for dim in &self.dims {
            let value = match &dim.kind {
                DimensionKind::Continuous { low, high, log } => {
                    let fraction = point.0[cursor].to_f64_lossy() / pi;
                    cursor += 1;
                    let v = if *log {
                        10f64.powf(low.log10() + fraction * (high.log10() - low.log10()))
                    } else {
                        low + fraction * (high - low)
                    };
                    Value::Number(v.clamp(*low, *high))
                }
                DimensionKind::Discrete { low, high, step } => {
                    let fraction = point.0[cursor].to_f64_lossy() / pi;
                    cursor += 1;
                    let offset = fraction * (high - low) / step;
                    let k = ((offset + 0.5).floor().max(0.0) as usize).min(lattice_top(*low, *high, *step));
                    Value::Number(lattice_point(*low, *step, k))
                }
                DimensionKind::Categorical { categories } => {
                    let half_pi = T::FRAC_PI_2();
                    let mut index = 0usize;
                    for component in &point.0[cursor..cursor + dim.width()] {
                        index = (index << 1) | usize::from(*component > half_pi);
                    }
                    cursor += dim.width();
                    Value::Category(categories[index.min(categories.len() - 1)].clone())
                }
            };
            out.insert(dim.name.clone(), value);
        }
        Ok(out)
    }
}

fn cartesian(dims: &[DimensionSpec], axes: &[Vec<Value>]) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for (dim, axis) in dims.iter().zip(axes) {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for partial in &out {
            for value in axis {
                let mut extended = partial.clone();
                extended.insert(dim.name.clone(), value.clone());
                next.push(extended);
            }
        }
        out = next;
    }
    out
}

/// A point of the circuit input box `[0, π]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EncodedPoint<T>(Vec<T>);

impl<T: Real> EncodedPoint<T> {
    /// Accepts components within [`CLAMP_TOLERANCE`] of the box and clamps them into it.
    pub fn new(mut values: Vec<T>) -> Result<Self, EncodingError> {
        let tol = T::lit(CLAMP_TOLERANCE);
        let pi = T::PI();
        for (index, v) in values.iter_mut().enumerate() {
            if !(*v >= -tol && *v <= pi + tol) {
                return Err(EncodingError::Component { index, value: v.to_f64_lossy() });
            }
            *v = v.max(T::zero()).min(pi);
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<T> std::ops::Deref for EncodedPoint<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// Affine bounds mapping raw scores onto the observable range `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBounds {
    pub lo: f64,
    pub hi: f64,
}

impl ScoreBounds {
    pub fn new(lo: f64, hi: f64) -> Result<Self, EncodingError> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(EncodingError::ScoreBounds { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn normalize(&self, raw: f64) -> f64 {
        2.0 * (raw - self.lo) / (self.hi - self.lo) - 1.0
    }

    pub fn denormalize(&self, y: f64) -> f64 {
        (y + 1.0) * 0.5 * (self.hi - self.lo) + self.lo
    }
}

/// `2 (raw − lo) / (hi − lo) − 1`.
pub fn normalize_score(raw: f64, lo: f64, hi: f64) -> Result<f64, EncodingError> {
    Ok(ScoreBounds::new(lo, hi)?.normalize(raw))
}

/// Inverse of [`normalize_score`].
pub fn denormalize_score(y: f64, lo: f64, hi: f64) -> Result<f64, EncodingError> {
    Ok(ScoreBounds::new(lo, hi)?.denormalize(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn assign(pairs: &[(&str, Value)]) -> Assignment {
        pairs.iter().map(|(k, v)| ((*k).to_owned(), v.clone())).collect()
    }

    fn svm_space() -> SearchSpace {
        SearchSpace::new(vec![
            DimensionSpec::continuous("C", 0.1, 50.0),
            DimensionSpec::categorical("kernel", &["linear", "poly", "rbf", "sigmoid"]),
        ])
        .unwrap()
    }

    #[test]
    fn widths() {
        assert_eq!(categorical_width(1), 0);
        assert_eq!(categorical_width(2), 1);
        assert_eq!(categorical_width(3), 2);
        assert_eq!(categorical_width(4), 2);
        assert_eq!(categorical_width(5), 3);
        assert_eq!(svm_space().width(), 3);
        assert_eq!(svm_space().encoded_names(), vec!["C", "kernel[0]", "kernel[1]"]);
    }

    #[test]
    fn continuous_endpoints() {
        let space = svm_space();
        let lo: EncodedPoint<f64> =
            space.encode(&assign(&[("C", 0.1.into()), ("kernel", "linear".into())])).unwrap();
        assert_eq!(lo[0], 0.0);
        let hi: EncodedPoint<f64> =
            space.encode(&assign(&[("C", 50.0.into()), ("kernel", "linear".into())])).unwrap();
        assert_eq!(hi[0], PI);
    }

    #[test]
    fn kernel_rbf_bits() {
        let p: EncodedPoint<f64> =
            svm_space().encode(&assign(&[("C", 1.0.into()), ("kernel", "rbf".into())])).unwrap();
        assert_eq!(&p[1..], &[PI, 0.0]);
    }

    #[test]
    fn discrete_endpoint() {
        let space = SearchSpace::new(vec![DimensionSpec::discrete("max_iter", 1.0, 1000.0, 1.0)]).unwrap();
        let p: EncodedPoint<f64> = space.encode(&assign(&[("max_iter", 1000.0.into())])).unwrap();
        assert_eq!(p[0], PI);
    }

    #[test]
    fn ridge_alpha_midpoint() {
        let space = SearchSpace::new(vec![DimensionSpec::continuous("alpha", 0.0001, 1.0)]).unwrap();
        let a = space.decode(&[PI / 2.0]).unwrap();
        assert_abs_diff_eq!(a["alpha"].as_number().unwrap(), 0.50005, epsilon = 1e-12);
    }

    #[test]
    fn log_scale_midpoint_is_geometric_mean() {
        let space = SearchSpace::new(vec![DimensionSpec::log_continuous("alpha", 0.0001, 1.0)]).unwrap();
        let a = space.decode(&[PI / 2.0]).unwrap();
        assert_abs_diff_eq!(a["alpha"].as_number().unwrap(), 0.01, epsilon = 1e-12);
        let p: EncodedPoint<f64> = space.encode(&assign(&[("alpha", 0.01.into())])).unwrap();
        assert_abs_diff_eq!(p[0], PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn categorical_clamps_unused_patterns() {
        let space = SearchSpace::new(vec![DimensionSpec::categorical("c", &["a", "b", "c"])]).unwrap();
        // exhaustive enumeration of the four bit patterns
        let expected = [("a", [0.0, 0.0]), ("b", [0.0, PI]), ("c", [PI, 0.0]), ("c", [PI, PI])];
        for (label, point) in expected {
            assert_eq!(space.decode(&point).unwrap()["c"], Value::from(label));
        }
    }

    #[test]
    fn threshold_at_half_pi() {
        let space = SearchSpace::new(vec![DimensionSpec::categorical("k", &["off", "on"])]).unwrap();
        assert_eq!(space.decode(&[2.9]).unwrap()["k"], Value::from("on"));
        assert_eq!(space.decode(&[1.5]).unwrap()["k"], Value::from("off"));
    }

    #[test]
    fn discrete_rounds_half_up() {
        let space = SearchSpace::new(vec![DimensionSpec::discrete("n", 0.0, 2.0, 1.0)]).unwrap();
        assert_eq!(space.decode(&[PI / 4.0]).unwrap()["n"], Value::Number(1.0));
        assert_eq!(space.decode(&[PI / 4.0 - 1e-6]).unwrap()["n"], Value::Number(0.0));
    }

    #[test]
    fn decode_rejects_out_of_box() {
        let space = svm_space();
        assert!(matches!(
            space.decode(&[PI + 1e-6, 0.0, 0.0]).unwrap_err(),
            EncodingError::Component { index: 0, .. }
        ));
        assert!(space.decode(&[PI + 1e-10, -1e-10, 0.0]).is_ok());
        assert!(matches!(space.decode(&[0.0, 0.0]).unwrap_err(), EncodingError::Width { .. }));
    }

    #[test]
    fn encode_errors() {
        let space = svm_space();
        assert_eq!(
            space.encode::<f64>(&assign(&[("C", 1.0.into())])).unwrap_err(),
            EncodingError::MissingDimension("kernel".into())
        );
        assert!(matches!(
            space.encode::<f64>(&assign(&[("C", 51.0.into()), ("kernel", "rbf".into())])).unwrap_err(),
            EncodingError::Domain { .. }
        ));
        assert!(matches!(
            space.encode::<f64>(&assign(&[("C", 1.0.into()), ("kernel", "tanh".into())])).unwrap_err(),
            EncodingError::Domain { .. }
        ));
        let discrete = SearchSpace::new(vec![DimensionSpec::discrete("n", 0.0, 10.0, 2.0)]).unwrap();
        assert!(discrete.encode::<f64>(&assign(&[("n", 3.0.into())])).is_err());
    }

    #[test]
    fn invalid_spaces() {
        assert!(SearchSpace::new(vec![]).is_err());
        assert!(SearchSpace::new(vec![DimensionSpec::continuous("a", 1.0, 1.0)]).is_err());
        assert!(SearchSpace::new(vec![DimensionSpec::discrete("a", 0.0, 1.0, 0.0)]).is_err());
        assert!(SearchSpace::new(vec![DimensionSpec::categorical("a", &[])]).is_err());
        assert!(SearchSpace::new(vec![DimensionSpec::categorical("a", &["x", "x"])]).is_err());
        assert!(SearchSpace::new(vec![DimensionSpec::log_continuous("a", 0.0, 1.0)]).is_err());
        let too_wide: Vec<_> = (0..13).map(|i| DimensionSpec::continuous(&format!("d{i}"), 0.0, 1.0)).collect();
        assert!(SearchSpace::new(too_wide).is_err());
    }

    #[test]
    fn toml_round_trip_and_hash() {
        let text = r#"
            [[dimension]]
            name = "alpha"
            kind = "continuous"
            low = 0.0001
            high = 1.0
            log = true

            [[dimension]]
            name = "max_iter"
            kind = "discrete"
            low = 100
            high = 1000
            step = 100

            [[dimension]]
            name = "solver"
            kind = "categorical"
            categories = ["direct", "gradient"]
        "#;
        let space = SearchSpace::from_toml_str(text).unwrap();
        assert_eq!(space.width(), 3);
        let again = SearchSpace::from_toml_str(&space.to_toml_string()).unwrap();
        assert_eq!(space, again);
        assert_eq!(space.content_hash(), again.content_hash());
        assert_eq!(space.content_hash().len(), 64);
        assert_ne!(space.content_hash(), svm_space().content_hash());
        assert!(SearchSpace::from_toml_str("[[dimension]]\nname='a'\nkind='continuous'\nlow=2\nhigh=1\n").is_err());
    }

    #[test]
    fn lattice_enumeration() {
        let space = SearchSpace::new(vec![
            DimensionSpec::discrete("n", 1.0, 3.0, 1.0),
            DimensionSpec::categorical("k", &["a", "b"]),
        ])
        .unwrap();
        assert_eq!(space.lattice_size(), Some(6));
        let all = space.enumerate_lattice().unwrap();
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], assign(&[("n", 1.0.into()), ("k", "b".into())]));
        assert_eq!(svm_space().lattice_size(), None);
    }

    #[test]
    fn score_normalization_examples() {
        assert_eq!(normalize_score(0.2, 0.2, 0.9).unwrap(), -1.0);
        assert_eq!(normalize_score(0.9, 0.2, 0.9).unwrap(), 1.0);
        assert_abs_diff_eq!(normalize_score(0.388, 0.0, 1.0).unwrap(), -0.224, epsilon = 1e-12);
        assert!(normalize_score(0.5, 1.0, 1.0).is_err());
        assert!(normalize_score(0.5, 1.0, 0.0).is_err());
        assert_abs_diff_eq!(denormalize_score(-1.0, 0.0, 1.0).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn score_round_trip(raw in -1e3f64..1e3, lo in -10.0f64..10.0, span in 1e-3f64..100.0) {
            let bounds = ScoreBounds::new(lo, lo + span).unwrap();
            let back = bounds.denormalize(bounds.normalize(raw));
            prop_assert!((back - raw).abs() <= 1e-12 * raw.abs().max(1.0) * (1.0 + raw.abs() / span));
        }

        #[test]
        fn continuous_round_trip_and_monotone(a in 0.1f64..50.0, b in 0.1f64..50.0) {
            let space = svm_space();
            let pa: EncodedPoint<f64> = space.encode(&assign(&[("C", a.into()), ("kernel", "poly".into())])).unwrap();
            let pb: EncodedPoint<f64> = space.encode(&assign(&[("C", b.into()), ("kernel", "poly".into())])).unwrap();
            if a < b { prop_assert!(pa[0] < pb[0]); }
            let back = space.decode(&pa).unwrap();
            prop_assert!((back["C"].as_number().unwrap() - a).abs() <= 1e-9 * a);
            prop_assert_eq!(&back["kernel"], &Value::from("poly"));
        }

        #[test]
        fn decode_is_total(x in proptest::collection::vec(0.0f64..=PI, 3)) {
            let space = svm_space();
            let a = space.decode(&x).unwrap();
            prop_assert!(space.encode::<f64>(&a).is_ok());
        }
    }
}
