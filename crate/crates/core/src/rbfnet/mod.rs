//! The radial basis function network.
//!
//! Inputs are standardized by the embedded [`Scaler`], each hidden unit
//! responds with a Gaussian of the Euclidean distance to its center, and the
//! summation layer forms one weighted sum per class with a bias row
//! `W_0` multiplying a constant input of 1.0.

mod select;
mod spread;
mod train;
mod weights;

pub use select::{one_standard_error_choice, select_hidden_size, HiddenSizeScore, HiddenSizeSelection};
pub use spread::{compute_spreads, SPREAD_EPSILON};
pub use train::{train, train_detailed, CenterStrategy, RbfConfig};
pub use weights::{design_matrix, fit_output_weights};

use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureMatrix, Scaler};
use crate::linalg::Matrix;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    #[default]
    Gaussian,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadMode {
    /// One width per hidden unit.
    #[default]
    Scalar,
    /// One width per hidden unit and input dimension.
    PerDimension,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub kind: KernelKind,
    pub spread_mode: SpreadMode,
}

/// Receptive-field widths: `J` values, or a `J×d` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Spreads {
    Scalar(Vec<f64>),
    PerDimension(Matrix),
}

impl Spreads {
    pub fn mode(&self) -> SpreadMode {
        match self {
            Spreads::Scalar(_) => SpreadMode::Scalar,
            Spreads::PerDimension(_) => SpreadMode::PerDimension,
        }
    }

    fn len(&self) -> usize {
        match self {
            Spreads::Scalar(v) => v.len(),
            Spreads::PerDimension(m) => m.rows(),
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            Spreads::Scalar(v) => v,
            Spreads::PerDimension(m) => m.as_slice(),
        }
    }
}

/// `exp(−r² / 2σ²)`.
pub fn gaussian_kernel(r: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!("spread must be positive, got {sigma}")));
    }
    if !(r >= 0.0) {
        return Err(Error::invalid(format!("distance must be non-negative, got {r}")));
    }
    Ok((-(r * r) / (2.0 * sigma * sigma)).exp())
}

/// Hidden-layer response for a standardized input. Widths are assumed
/// validated.
pub(crate) fn unit_activations(centers: &Matrix, spreads: &Spreads, x: &[f64]) -> Vec<f64> {
    centers
        .row_iter()
        .enumerate()
        .map(|(j, mu)| match spreads {
            Spreads::Scalar(s) => {
                let r2 = crate::kmeans::sq_dist(x, mu);
                (-r2 / (2.0 * s[j] * s[j])).exp()
            }
            Spreads::PerDimension(s) => {
                let e: f64 = x
                    .iter()
                    .zip(mu)
                    .zip(s.row(j))
                    .map(|((xi, mi), si)| (xi - mi) * (xi - mi) / (2.0 * si * si))
                    .sum();
                (-e).exp()
            }
        })
        .collect()
}

/// Clips scores at zero and normalizes them to a distribution; uniform when
/// every clipped score is zero.
pub fn scores_to_proba(scores: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = scores.iter().map(|&s| if s > 0.0 { s } else { 0.0 }).collect();
    let total: f64 = clipped.iter().sum();
    if total > 0.0 && total.is_finite() {
        clipped.iter().map(|c| c / total).collect()
    } else {
        vec![1.0 / scores.len() as f64; scores.len()]
    }
}

/// Index of the largest value, lowest index on ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct RbfModel {
    centers: Matrix,
    spreads: Spreads,
    weights: Matrix,
    class_names: Vec<String>,
    scaler: Scaler,
    kernel: KernelConfig,
    feature_names: Vec<String>,
}

impl RbfModel {
    /// Assembles a model, checking every shape and positivity invariant.
    /// `weights` is `(J+1)×L` with the bias in row 0.
    pub fn new(
        centers: Matrix,
        spreads: Spreads,
        weights: Matrix,
        class_names: Vec<String>,
        scaler: Scaler,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let j = centers.rows();
        let d = centers.cols();
        let l = class_names.len();
        if j == 0 || d == 0 {
            return Err(Error::invalid("model needs at least one center and one feature"));
        }
        if l < 2 {
            return Err(Error::invalid("model needs at least two classes"));
        }
        if spreads.len() != j {
            return Err(Error::DimensionMismatch {
                expected: j,
                found: spreads.len(),
            });
        }
        if let Spreads::PerDimension(s) = &spreads {
            if s.cols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: s.cols(),
                });
            }
        }
        if weights.rows() != j + 1 || weights.cols() != l {
            return Err(Error::invalid(format!(
                "weights must be {}x{l}, got {}x{}",
                j + 1,
                weights.rows(),
                weights.cols()
            )));
        }
        if scaler.dim() != d || feature_names.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if scaler.dim() != d { scaler.dim() } else { feature_names.len() },
            });
        }
        scaler.validate()?;
        if !spreads.values().iter().all(|s| s.is_finite() && *s > 0.0) {
            return Err(Error::invalid("spreads must be finite and positive"));
        }
        if !centers.is_finite() || !weights.is_finite() {
            return Err(Error::invalid("model parameters must be finite"));
        }
        Ok(RbfModel {
            kernel: KernelConfig {
                kind: KernelKind::Gaussian,
                spread_mode: spreads.mode(),
            },
            centers,
            spreads,
            weights,
            class_names,
            scaler,
            feature_names,
        })
    }

    pub fn centers(&self) -> &Matrix {
        &self.centers
    }

    pub fn spreads(&self) -> &Spreads {
        &self.spreads
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn scaler(&self) -> &Scaler {
        &self.scaler
    }

    pub fn kernel(&self) -> KernelConfig {
        self.kernel
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn hidden_units(&self) -> usize {
        self.centers.rows()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.centers.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.centers.cols(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `z_j` for a standardized input.
    pub fn hidden_activations(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(unit_activations(&self.centers, &self.spreads, x))
    }

    /// Raw summation-layer scores `Y_l = W_0l + Σ_j w_lj z_j` for a
    /// standardized input.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let z = self.hidden_activations(x)?;
        let mut y = self.weights.row(0).to_vec();
        for (j, zj) in z.iter().enumerate() {
            for (yl, w) in y.iter_mut().zip(self.weights.row(j + 1)) {
                *yl += w * zj;
            }
        }
        Ok(y)
    }

    /// Class probabilities for an input in original feature units.
    pub fn predict_proba(&self, x_raw: &[f64]) -> Result<Vec<f64>> {
        let x = self.scaler.transform_row(x_raw)?;
        Ok(scores_to_proba(&self.forward(&x)?))
    }

    pub fn predict(&self, x_raw: &[f64]) -> Result<usize> {
        Ok(argmax(&self.predict_proba(x_raw)?))
    }

    pub fn predict_matrix(&self, m: &FeatureMatrix) -> Result<Vec<usize>> {
        m.values().row_iter().map(|r| self.predict(r)).collect()
    }
}
