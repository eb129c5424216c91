use super::Dataset;

/// k-nearest-neighbour regressor: the mean target of the `k` closest training rows under
/// Euclidean distance, ties broken by row order. `k` is capped at the training size.
#[derive(Debug, Clone)]
pub struct KnnFit {
    train: Dataset,
    k: usize,
}

impl KnnFit {
    pub fn new(train: &Dataset, n_neighbors: usize) -> Self {
        Self { train: train.clone(), k: n_neighbors.clamp(1, train.n_rows()) }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut distances: Vec<(f64, usize)> = (0..self.train.n_rows())
            .map(|i| {
                let d = self.train.row(i).iter().zip(row).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
                (d, i)
            })
            .collect();
        distances.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let sum: f64 = distances[..self.k].iter().map(|&(_, i)| self.train.target()[i]).sum();
        sum / self.k as f64
    }
}
