use serde::{Deserialize, Serialize};

use super::{Dataset, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RidgeSolver {
    /// Cholesky factorization of the normal equations.
    Direct,
    /// Fixed-step gradient descent on the penalized least-squares objective.
    Gradient,
}

impl RidgeSolver {
    pub const NAMES: [&'static str; 2] = ["direct", "gradient"];

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "direct" => Some(Self::Direct),
            "gradient" => Some(Self::Gradient),
            _ => None,
        }
    }
}

/// Linear model with an unpenalized intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeFit {
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Set when the direct solve failed and the gradient solver took over.
    pub fell_back: bool,
}

impl RidgeFit {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept + row.iter().zip(&self.weights).map(|(x, w)| x * w).sum::<f64>()
    }
}

/// Normal equations of the centered problem: `(XᵀX + αI) w = Xᵀy`.
struct NormalEquations {
    gram: Vec<f64>,
    rhs: Vec<f64>,
    x_mean: Vec<f64>,
    y_mean: f64,
    dim: usize,
}

impl NormalEquations {
    fn build(data: &Dataset, alpha: f64) -> Self {
        let (n, dim) = (data.n_rows(), data.n_features());
        let mut x_mean = vec![0.0; dim];
        for i in 0..n {
            for (m, x) in x_mean.iter_mut().zip(data.row(i)) {
                *m += x;
            }
        }
        x_mean.iter_mut().for_each(|m| *m /= n as f64);
        let y_mean = data.target().iter().sum::<f64>() / n as f64;

        let mut gram = vec![0.0; dim * dim];
        let mut rhs = vec![0.0; dim];
        let mut centered = vec![0.0; dim];
        for i in 0..n {
            for (c, (x, m)) in centered.iter_mut().zip(data.row(i).iter().zip(&x_mean)) {
                *c = x - m;
            }
            let y = data.target()[i] - y_mean;
            for a in 0..dim {
                rhs[a] += centered[a] * y;
                for b in 0..dim {
                    gram[a * dim + b] += centered[a] * centered[b];
                }
            }
        }
        for a in 0..dim {
            gram[a * dim + a] += alpha;
        }
        Self { gram, rhs, x_mean, y_mean, dim }
    }

    fn finish(&self, weights: Vec<f64>, fell_back: bool) -> RidgeFit {
        let intercept = self.y_mean - self.x_mean.iter().zip(&weights).map(|(m, w)| m * w).sum::<f64>();
        RidgeFit { weights, intercept, fell_back }
    }

    /// `None` when the system is not numerically positive definite.
    fn cholesky_solve(&self) -> Option<Vec<f64>> {
        let d = self.dim;
        let scale = (0..d).map(|i| self.gram[i * d + i].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut l = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                let mut sum = self.gram[i * d + j];
                for k in 0..j {
                    sum -= l[i * d + k] * l[j * d + k];
                }
                if i == j {
                    if sum <= 1e-12 * scale {
                        return None;
                    }
                    l[i * d + i] = sum.sqrt();
                } else {
                    l[i * d + j] = sum / l[j * d + j];
                }
            }
        }
        let mut z = vec![0.0; d];
        for i in 0..d {
            let s: f64 = (0..i).map(|k| l[i * d + k] * z[k]).sum();
            z[i] = (self.rhs[i] - s) / l[i * d + i];
        }
        let mut w = vec![0.0; d];
        for i in (0..d).rev() {
            let s: f64 = (i + 1..d).map(|k| l[k * d + i] * w[k]).sum();
            w[i] = (z[i] - s) / l[i * d + i];
        }
        Some(w)
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|a| (0..self.dim).map(|b| self.gram[a * self.dim + b] * v[b]).sum())
            .collect()
    }

    /// Largest eigenvalue of the Gram matrix by power iteration.
    fn spectral_radius(&self) -> f64 {
        let mut v = vec![1.0 / (self.dim as f64).sqrt(); self.dim];
        let mut lambda = 0.0;
        for _ in 0..200 {
            let w = self.apply(&v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            lambda = norm;
            v = w.into_iter().map(|x| x / norm).collect();
        }
        lambda
    }

    fn gradient_solve(&self, max_iter: usize) -> Vec<f64> {
        let lipschitz = self.spectral_radius() * 1.01;
        let mut w = vec![0.0; self.dim];
        if lipschitz <= 0.0 {
            return w;
        }
        let step = 1.0 / lipschitz;
        let tolerance = 1e-26 * self.rhs.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
        for _ in 0..max_iter {
            let grad: Vec<f64> = self.apply(&w).iter().zip(&self.rhs).map(|(aw, b)| aw - b).collect();
            if grad.iter().map(|g| g * g).sum::<f64>() <= tolerance {
                break;
            }
            for (wi, g) in w.iter_mut().zip(grad) {
                *wi -= step * g;
            }
        }
        w
    }
}

pub fn fit_ridge(
    data: &Dataset,
    alpha: f64,
    max_iter: usize,
    solver: RidgeSolver,
) -> Result<RidgeFit, ModelError> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(ModelError::Hyperparameter(format!("ridge alpha must be ≥ 0, got {alpha}")));
    }
    let system = NormalEquations::build(data, alpha);
    match solver {
        RidgeSolver::Direct => match system.cholesky_solve() {
            Some(w) => Ok(system.finish(w, false)),
            None => Ok(system.finish(system.gradient_solve(max_iter.max(1)), true)),
        },
        RidgeSolver::Gradient => Ok(system.finish(system.gradient_solve(max_iter), false)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Dataset {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 / 19.0, ((i * 7) % 20) as f64 / 19.0]).collect();
        let target = rows.iter().map(|r| 3.0 * r[0] - 2.0 * r[1] + 0.5).collect();
        Dataset::new(rows, target).unwrap()
    }

    #[test]
    fn recovers_exact_linear_relation() {
        let fit = fit_ridge(&line(), 0.0, 100, RidgeSolver::Direct).unwrap();
        assert!((fit.weights[0] - 3.0).abs() < 1e-9);
        assert!((fit.weights[1] + 2.0).abs() < 1e-9);
        assert!((fit.intercept - 0.5).abs() < 1e-9);
        assert!(!fit.fell_back);
    }

    #[test]
    fn gradient_solver_converges_to_direct() {
        let direct = fit_ridge(&line(), 0.1, 0, RidgeSolver::Direct).unwrap();
        let gradient = fit_ridge(&line(), 0.1, 5000, RidgeSolver::Gradient).unwrap();
        for (a, b) in direct.weights.iter().zip(&gradient.weights) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn singular_system_falls_back() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let target = (0..10).map(|i| i as f64).collect();
        let data = Dataset::new(rows, target).unwrap();
        let fit = fit_ridge(&data, 0.0, 500, RidgeSolver::Direct).unwrap();
        assert!(fit.fell_back);
        assert!((fit.predict_row(&[4.0, 8.0]) - 4.0).abs() < 1e-6);
    }

    #[test]
    fn negative_alpha_is_rejected() {
        assert!(fit_ridge(&line(), -1.0, 10, RidgeSolver::Direct).is_err());
    }
}
