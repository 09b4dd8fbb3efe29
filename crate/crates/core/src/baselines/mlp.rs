use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureMatrix, LabelVector};
use crate::linalg::Matrix;
use crate::{seeded_rng, Error, Result};

use super::{normalize, sigmoid, softplus};

/// Sigmoid hidden layer and one sigmoid output per class. Column 0 of each
/// weight matrix is the bias.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    /// H×(d+1)
    pub hidden_weights: Matrix,
    /// L×(H+1)
    pub output_weights: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: usize,
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: 8,
            lr: 0.1,
            epochs: 2000,
            seed: 0,
        }
    }
}

struct Activations {
    hidden: Vec<f64>,
    /// pre-sigmoid output
    logits: Vec<f64>,
}

impl MlpModel {
    /// Uniform(−0.5, 0.5) weights drawn hidden layer first, row-major.
    pub fn random(n_inputs: usize, hidden: usize, n_classes: usize, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let mut draw = |rows: usize, cols: usize| {
            let data = (0..rows * cols).map(|_| rng.gen_range(-0.5..0.5)).collect();
            Matrix::from_vec(rows, cols, data).expect("sized buffer")
        };
        let hidden_weights = draw(hidden, n_inputs + 1);
        let output_weights = draw(n_classes, hidden + 1);
        MlpModel {
            hidden_weights,
            output_weights,
        }
    }

    pub fn zeros(n_inputs: usize, hidden: usize, n_classes: usize) -> Self {
        MlpModel {
            hidden_weights: Matrix::zeros(hidden, n_inputs + 1),
            output_weights: Matrix::zeros(n_classes, hidden + 1),
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.hidden_weights.cols().saturating_sub(1)
    }

    pub fn n_hidden(&self) -> usize {
        self.hidden_weights.rows()
    }

    pub fn n_classes(&self) -> usize {
        self.output_weights.rows()
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.n_hidden() == 0
            || self.n_inputs() == 0
            || self.n_classes() < 2
            || self.output_weights.cols() != self.n_hidden() + 1
        {
            return Err(Error::invalid("inconsistent mlp shape"));
        }
        if !self.hidden_weights.is_finite() || !self.output_weights.is_finite() {
            return Err(Error::invalid("mlp parameters must be finite"));
        }
        Ok(())
    }

    /// Hidden weights then output weights, row-major.
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.hidden_weights.as_slice().to_vec();
        p.extend_from_slice(self.output_weights.as_slice());
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let nh = self.hidden_weights.as_slice().len();
        let no = self.output_weights.as_slice().len();
        assert_eq!(p.len(), nh + no, "parameter count");
        let (h, o) = (&self.hidden_weights, &self.output_weights);
        self.hidden_weights = Matrix::from_vec(h.rows(), h.cols(), p[..nh].to_vec()).expect("shape");
        self.output_weights = Matrix::from_vec(o.rows(), o.cols(), p[nh..].to_vec()).expect("shape");
    }

    fn activate(&self, x: &[f64]) -> Activations {
        let hidden: Vec<f64> = self
            .hidden_weights
            .row_iter()
            .map(|w| sigmoid(w[0] + w[1..].iter().zip(x).map(|(a, v)| a * v).sum::<f64>()))
            .collect();
        let logits = self
            .output_weights
            .row_iter()
            .map(|v| v[0] + v[1..].iter().zip(&hidden).map(|(a, h)| a * h).sum::<f64>())
            .collect();
        Activations { hidden, logits }
    }

    /// Output sigmoids normalized to sum to one.
    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_inputs() {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs(),
                found: x.len(),
            });
        }
        Ok(normalize(self.activate(x).logits.into_iter().map(sigmoid).collect()))
    }
}

/// Mean over samples of the summed per-output binary cross-entropy, with its
/// backpropagated gradient.
pub fn mlp_loss_grad(model: &MlpModel, x: &Matrix, targets: &Matrix) -> (f64, MlpModel) {
    let n = x.rows() as f64;
    let mut grad = MlpModel::zeros(model.n_inputs(), model.n_hidden(), model.n_classes());
    let mut loss = 0.0;
    let mut delta_hidden = vec![0.0; model.n_hidden()];

    for (i, xi) in x.row_iter().enumerate() {
        let act = model.activate(xi);
        delta_hidden.iter_mut().for_each(|d| *d = 0.0);
        for (l, &a) in act.logits.iter().enumerate() {
            let t = targets[(i, l)];
            loss += softplus(a) - t * a;
            let delta = (sigmoid(a) - t) / n;
            let v = model.output_weights.row(l);
            let g = grad.output_weights.row_mut(l);
            g[0] += delta;
            for k in 0..act.hidden.len() {
                g[k + 1] += delta * act.hidden[k];
                delta_hidden[k] += delta * v[k + 1];
            }
        }
        for (k, &h) in act.hidden.iter().enumerate() {
            let dh = delta_hidden[k] * h * (1.0 - h);
            let g = grad.hidden_weights.row_mut(k);
            g[0] += dh;
            for (gj, v) in g[1..].iter_mut().zip(xi) {
                *gj += dh * v;
            }
        }
    }
    (loss / n, grad)
}

pub fn mlp_train(x: &FeatureMatrix, y: &LabelVector, config: &MlpConfig) -> Result<MlpModel> {
    mlp_train_traced(x, y, config).map(|(m, _)| m)
}

/// Seeded initialization, then [`mlp_train_from`].
pub fn mlp_train_traced(x: &FeatureMatrix, y: &LabelVector, config: &MlpConfig) -> Result<(MlpModel, Vec<f64>)> {
    if config.hidden == 0 {
        return Err(Error::invalid("hidden layer needs at least one unit"));
    }
    let init = MlpModel::random(x.ncols(), config.hidden, y.n_classes(), config.seed);
    mlp_train_from(init, x, y, config)
}

/// Full-batch gradient descent from a given starting network. Returns the
/// loss before every update plus the final loss.
pub fn mlp_train_from(
    init: MlpModel,
    x: &FeatureMatrix,
    y: &LabelVector,
    config: &MlpConfig,
) -> Result<(MlpModel, Vec<f64>)> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    if init.n_inputs() != x.ncols() || init.n_classes() != y.n_classes() {
        return Err(Error::invalid("initial network shape does not match the data"));
    }
    if config.epochs == 0 {
        return Err(Error::invalid("epochs must be at least 1"));
    }
    let targets = y.one_hot();
    let mut model = init;
    let mut losses = Vec::with_capacity(config.epochs + 1);
    for epoch in 0..=config.epochs {
        let (loss, grad) = mlp_loss_grad(&model, x.values(), &targets);
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
