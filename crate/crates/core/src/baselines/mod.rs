//! Logistic-regression and one-hidden-layer MLP baselines.
//!
//! Both trainers expect standardized features and use full-batch gradient
//! descent at a fixed learning rate.

mod logistic;
mod mlp;

pub use logistic::{logistic_loss_grad, logistic_train, logistic_train_traced, LogisticConfig, LogisticModel};
pub use mlp::{mlp_loss_grad, mlp_train, mlp_train_from, mlp_train_traced, MlpConfig, MlpModel};

use serde::{Deserialize, Serialize};

use crate::dataset::Scaler;
use crate::rbfnet::argmax;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaselineModel {
    Logistic(LogisticModel),
    Mlp(MlpModel),
}

impl BaselineModel {
    pub fn n_inputs(&self) -> usize {
        match self {
            BaselineModel::Logistic(m) => m.n_inputs(),
            BaselineModel::Mlp(m) => m.n_inputs(),
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            BaselineModel::Logistic(m) => m.n_classes(),
            BaselineModel::Mlp(m) => m.n_classes(),
        }
    }

    pub fn predict_proba_standardized(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            BaselineModel::Logistic(m) => m.predict_proba(x),
            BaselineModel::Mlp(m) => m.predict_proba(x),
        }
    }
}

/// Standardizes `x_raw`, runs the model and returns the argmax class (lowest
/// index on ties) with the class probabilities.
pub fn baseline_predict(model: &BaselineModel, x_raw: &[f64], scaler: &Scaler) -> Result<(usize, Vec<f64>)> {
    let x = scaler.transform_row(x_raw)?;
    let p = model.predict_proba_standardized(&x)?;
    Ok((argmax(&p), p))
}

/// Numerically stable `ln(1 + e^z)`.
pub(crate) fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Normalizes positive scores; uniform if they underflow to zero.
pub(crate) fn normalize(p: Vec<f64>) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    if total > 0.0 && total.is_finite() {
        p.into_iter().map(|v| v / total).collect()
    } else {
        vec![1.0 / p.len() as f64; p.len()]
    }
}
