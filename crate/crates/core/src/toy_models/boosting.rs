use serde::{Deserialize, Serialize};

use super::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoostLoss {
    SquaredError,
    AbsoluteError,
}

impl BoostLoss {
    pub const NAMES: [&'static str; 2] = ["squared_error", "absolute_error"];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "squared_error" => Some(Self::SquaredError),
            "absolute_error" => Some(Self::AbsoluteError),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Stump {
    feature: usize,
    threshold: f64,
    left: f64,
    right: f64,
}

impl Stump {
    fn predict(&self, row: &[f64]) -> f64 {
        if row[self.feature] <= self.threshold {
            self.left
        } else {
            self.right
        }
    }
}

/// Gradient boosting over depth-one regression trees.
///
/// Each round fits a stump to the negative loss gradient by least squares, then sets the
/// leaf values to the loss-optimal constant of the residuals in each leaf (mean for
/// squared error, median for absolute error), shrunk by the learning rate.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostedStumps {
    base: f64,
    learning_rate: f64,
    stumps: Vec<Stump>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

impl BoostedStumps {
    pub fn fit(data: &Dataset, learning_rate: f64, max_iter: usize, loss: BoostLoss) -> Self {
        let n = data.n_rows();
        let y = data.target();
        let base = match loss {
            BoostLoss::SquaredError => y.iter().sum::<f64>() / n as f64,
            BoostLoss::AbsoluteError => median(&mut y.to_vec()),
        };
        let orders: Vec<Vec<usize>> = (0..data.n_features())
            .map(|f| {
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| data.row(a)[f].total_cmp(&data.row(b)[f]).then(a.cmp(&b)));
                order
            })
            .collect();

        let mut prediction = vec![base; n];
        let mut stumps = Vec::with_capacity(max_iter);
        for _ in 0..max_iter {
            let residual: Vec<f64> = y.iter().zip(&prediction).map(|(t, p)| t - p).collect();
            let pseudo: Vec<f64> = match loss {
                BoostLoss::SquaredError => residual.clone(),
                BoostLoss::AbsoluteError => residual
                    .iter()
                    .map(|r| if *r > 0.0 { 1.0 } else if *r < 0.0 { -1.0 } else { 0.0 })
                    .collect(),
            };
            let Some((feature, threshold)) = best_split(data, &orders, &pseudo) else {
                break;
            };
            let (mut left, mut right): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
            for i in 0..n {
                if data.row(i)[feature] <= threshold {
                    left.push(residual[i]);
                } else {
                    right.push(residual[i]);
                }
            }
            let leaf = |values: &mut Vec<f64>| match loss {
                BoostLoss::SquaredError => values.iter().sum::<f64>() / values.len() as f64,
                BoostLoss::AbsoluteError => median(values),
            };
            let stump = Stump {
                feature,
                threshold,
                left: learning_rate * leaf(&mut left),
                right: learning_rate * leaf(&mut right),
            };
            for (i, p) in prediction.iter_mut().enumerate() {
                *p += stump.predict(data.row(i));
            }
            stumps.push(stump);
        }
        Self { base, learning_rate, stumps }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.base + self.stumps.iter().map(|s| s.predict(row)).sum::<f64>()
    }

    pub fn n_stumps(&self) -> usize {
        self.stumps.len()
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }
}

/// Feature and threshold maximizing the squared-error reduction on `target`; `None`
/// when every feature is constant.
fn best_split(data: &Dataset, orders: &[Vec<usize>], target: &[f64]) -> Option<(usize, f64)> {
    let n = target.len();
    let total: f64 = target.iter().sum();
    let mut best: Option<(f64, usize, f64)> = None;
    for (feature, order) in orders.iter().enumerate() {
        let mut left_sum = 0.0;
        for split in 1..n {
            left_sum += target[order[split - 1]];
            let lo = data.row(order[split - 1])[feature];
            let hi = data.row(order[split])[feature];
            if lo == hi {
                continue;
            }
            let right_sum = total - left_sum;
            let (nl, nr) = (split as f64, (n - split) as f64);
            // SSE reduction up to a constant
            let gain = left_sum * left_sum / nl + right_sum * right_sum / nr;
            if best.is_none_or(|(g, _, _)| gain > g) {
                best = Some((gain, feature, 0.5 * (lo + hi)));
            }
        }
    }
    best.map(|(_, feature, threshold)| (feature, threshold))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_data() -> Dataset {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let target = (0..10).map(|i| if i < 4 { 1.0 } else { 5.0 }).collect();
        Dataset::new(rows, target).unwrap()
    }

    #[test]
    fn first_stump_finds_the_step() {
        let model = BoostedStumps::fit(&step_data(), 1.0, 1, BoostLoss::SquaredError);
        assert_eq!(model.n_stumps(), 1);
        assert!((model.predict_row(&[2.0]) - 1.0).abs() < 1e-12);
        assert!((model.predict_row(&[7.0]) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn absolute_loss_uses_medians() {
        let model = BoostedStumps::fit(&step_data(), 1.0, 1, BoostLoss::AbsoluteError);
        assert!((model.predict_row(&[0.0]) - 1.0).abs() < 1e-12);
        assert!((model.predict_row(&[9.0]) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn constant_features_stop_early() {
        let data = Dataset::new(vec![vec![1.0]; 5], vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let model = BoostedStumps::fit(&data, 0.1, 10, BoostLoss::SquaredError);
        assert_eq!(model.n_stumps(), 0);
        assert_eq!(model.predict_row(&[1.0]), 3.0);
    }

    #[test]
    fn median_of_even_count() {
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }
}
