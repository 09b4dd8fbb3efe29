use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureMatrix, LabelVector};
use crate::linalg::Matrix;
use crate::{Error, Result};

use super::{normalize, sigmoid, softplus};

/// One binary logistic unit for two classes (probability of class 1), or a
/// one-vs-rest stack of `L` units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    /// tasks × d
    pub weights: Matrix,
    pub biases: Vec<f64>,
    n_classes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub lr: f64,
    pub epochs: usize,
    /// Unused by the zero-initialized optimizer; recorded for manifests.
    pub seed: u64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            lr: 0.5,
            epochs: 1000,
            seed: 0,
        }
    }
}

fn tasks_for(n_classes: usize) -> usize {
    if n_classes == 2 {
        1
    } else {
        n_classes
    }
}

impl LogisticModel {
    pub fn zeros(n_inputs: usize, n_classes: usize) -> Self {
        let tasks = tasks_for(n_classes);
        LogisticModel {
            weights: Matrix::zeros(tasks, n_inputs),
            biases: vec![0.0; tasks],
            n_classes,
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.n_classes < 2
            || self.weights.rows() != tasks_for(self.n_classes)
            || self.biases.len() != self.weights.rows()
            || self.weights.cols() == 0
        {
            return Err(Error::invalid("inconsistent logistic model shape"));
        }
        if !self.weights.is_finite() || !self.biases.iter().all(|b| b.is_finite()) {
            return Err(Error::invalid("logistic parameters must be finite"));
        }
        Ok(())
    }

    /// Weights row by row, then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.weights.as_slice().to_vec();
        p.extend_from_slice(&self.biases);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let nw = self.weights.rows() * self.weights.cols();
        assert_eq!(p.len(), nw + self.biases.len(), "parameter count");
        self.weights = Matrix::from_vec(self.weights.rows(), self.weights.cols(), p[..nw].to_vec())
            .expect("shape preserved");
        self.biases.copy_from_slice(&p[nw..]);
    }

    fn logits(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .row_iter()
            .zip(&self.biases)
            .map(|(w, b)| b + w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>())
            .collect()
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs(),
                found: x.len(),
            });
        }
        let p: Vec<f64> = self.logits(x).into_iter().map(sigmoid).collect();
        Ok(if self.n_classes == 2 {
            vec![1.0 - p[0], p[0]]
        } else {
            normalize(p)
        })
    }
}

/// 0/1 target per task.
fn task_targets(y: &LabelVector) -> Matrix {
    if y.n_classes() == 2 {
        let mut t = Matrix::zeros(y.len(), 1);
        for (i, &c) in y.indices().iter().enumerate() {
            t[(i, 0)] = c as f64;
        }
        t
    } else {
        y.one_hot()
    }
}

/// Mean cross-entropy summed over tasks, and its gradient in the model's
/// parameter layout.
pub fn logistic_loss_grad(model: &LogisticModel, x: &Matrix, targets: &Matrix) -> (f64, LogisticModel) {
    let n = x.rows() as f64;
    let mut grad = LogisticModel {
        weights: Matrix::zeros(model.weights.rows(), model.weights.cols()),
        biases: vec![0.0; model.biases.len()],
        n_classes: model.n_classes,
    };
    let mut loss = 0.0;
    for (i, xi) in x.row_iter().enumerate() {
        for (k, z) in model.logits(xi).into_iter().enumerate() {
            let t = targets[(i, k)];
            loss += softplus(z) - t * z;
            let r = (sigmoid(z) - t) / n;
            grad.biases[k] += r;
            for (g, v) in grad.weights.row_mut(k).iter_mut().zip(xi) {
                *g += r * v;
            }
        }
    }
    (loss / n, grad)
}

pub fn logistic_train(x: &FeatureMatrix, y: &LabelVector, config: &LogisticConfig) -> Result<LogisticModel> {
    logistic_train_traced(x, y, config).map(|(m, _)| m)
}

/// Trains from zero weights and returns the loss before every update plus
/// the final loss (`epochs + 1` values).
pub fn logistic_train_traced(
    x: &FeatureMatrix,
    y: &LabelVector,
    config: &LogisticConfig,
) -> Result<(LogisticModel, Vec<f64>)> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    if config.epochs == 0 {
        return Err(Error::invalid("epochs must be at least 1"));
    }
    let targets = task_targets(y);
    let mut model = LogisticModel::zeros(x.ncols(), y.n_classes());
    let mut losses = Vec::with_capacity(config.epochs + 1);
    for epoch in 0..=config.epochs {
        let (loss, grad) = logistic_loss_grad(&model, x.values(), &targets);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        losses.push(loss);
        if epoch == config.epochs {
            break;
        }
        let p: Vec<f64> = model
            .params()
            .iter()
            .zip(grad.params())
            .map(|(w, g)| w - config.lr * g)
            .collect();
        model.set_params(&p);
    }
    Ok((model, losses))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_line() {
        let x = FeatureMatrix::from_rows(&[vec![-1.0], vec![1.0]]).unwrap();
        let y = LabelVector::new(vec![0, 1], vec!["neg".into(), "pos".into()]).unwrap();
        let cfg = LogisticConfig {
            lr: 0.5,
            epochs: 500,
            seed: 0,
        };
        let m = logistic_train(&x, &y, &cfg).unwrap();
        assert!(m.predict_proba(&[-1.0]).unwrap()[0] > 0.5);
        assert!(m.predict_proba(&[1.0]).unwrap()[1] > 0.5);
    }

    #[test]
    fn zero_weight_gradient_is_mean_residual() {
        let x = Matrix::from_rows(&[vec![1.0, 2.0], vec![-3.0, 0.5], vec![0.0, 1.0]]).unwrap();
        let t = Matrix::from_rows(&[vec![1.0], vec![0.0], vec![1.0]]).unwrap();
        let (_, g) = logistic_loss_grad(&LogisticModel::zeros(2, 2), &x, &t);
        // p = 0.5 everywhere: mean((0.5 - t) x)
        let expect_w0 = ((0.5 - 1.0) * 1.0 + 0.5 * -3.0 + (0.5 - 1.0) * 0.0) / 3.0;
        let expect_w1 = ((0.5 - 1.0) * 2.0 + 0.5 * 0.5 + (0.5 - 1.0) * 1.0) / 3.0;
        assert!((g.weights[(0, 0)] - expect_w0).abs() < 1e-15);
        assert!((g.weights[(0, 1)] - expect_w1).abs() < 1e-15);
        assert!((g.biases[0] - (-0.5 + 0.5 - 0.5) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn three_class_one_vs_rest() {
        let x = FeatureMatrix::from_rows(&[vec![-2.0], vec![0.0], vec![2.0], vec![-2.1], vec![0.1], vec![2.1]]).unwrap();
        let y = LabelVector::new(vec![0, 1, 2, 0, 1, 2], vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let m = logistic_train(&x, &y, &LogisticConfig::default()).unwrap();
        assert_eq!(m.weights.rows(), 3);
        let p = m.predict_proba(&[0.5]).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diverging_lr_reports_epoch() {
        let x = FeatureMatrix::from_rows(&[vec![1e200], vec![-1e200]]).unwrap();
        let y = LabelVector::new(vec![0, 1], vec!["a".into(), "b".into()]).unwrap();
        let cfg = LogisticConfig {
            lr: 1e200,
            epochs: 5,
            seed: 0,
        };
        assert!(matches!(logistic_train(&x, &y, &cfg), Err(Error::NonFiniteLoss { .. })));
    }
}
