//! Versioned JSON model files.
//!
//! Every file carries `format_version` and a `model_kind` discriminator
//! (`rbf`, `logistic` or `mlp`). Floats are written in shortest round-trip
//! form, so a load reproduces the saved parameters bit for bit. Loading
//! rejects unknown versions and re-checks every model invariant.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::baselines::{BaselineModel, LogisticModel, MlpModel};
use crate::dataset::Scaler;
use crate::linalg::Matrix;
use crate::rbfnet::{argmax, KernelKind, RbfModel, SpreadMode, Spreads};
use crate::{Error, Result};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RbfDocument {
    format_version: u64,
    model_kind: String,
    kernel: KernelKind,
    spread_mode: SpreadMode,
    feature_names: Vec<String>,
    class_names: Vec<String>,
    scaler: Scaler,
    centers: Matrix,
    spreads: Spreads,
    weights: Matrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaselineDocument<P> {
    format_version: u64,
    model_kind: String,
    feature_names: Vec<String>,
    class_names: Vec<String>,
    scaler: Scaler,
    params: P,
}

/// A baseline model with the scaler and names it was trained with.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineBundle {
    pub model: BaselineModel,
    pub scaler: Scaler,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

impl BaselineBundle {
    pub fn new(model: BaselineModel, scaler: Scaler, feature_names: Vec<String>, class_names: Vec<String>) -> Result<Self> {
        match &model {
            BaselineModel::Logistic(m) => m.validate()?,
            BaselineModel::Mlp(m) => m.validate()?,
        }
        scaler.validate()?;
        let d = model.n_inputs();
        if scaler.dim() != d || feature_names.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if scaler.dim() != d { scaler.dim() } else { feature_names.len() },
            });
        }
        if class_names.len() != model.n_classes() {
            return Err(Error::DimensionMismatch {
                expected: model.n_classes(),
                found: class_names.len(),
            });
        }
        Ok(BaselineBundle {
            model,
            scaler,
            feature_names,
            class_names,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SavedModel {
    Rbf(RbfModel),
    Baseline(BaselineBundle),
}

impl SavedModel {
    pub fn kind(&self) -> &'static str {
        match self {
            SavedModel::Rbf(_) => "rbf",
            SavedModel::Baseline(b) => match b.model {
                BaselineModel::Logistic(_) => "logistic",
                BaselineModel::Mlp(_) => "mlp",
            },
        }
    }

    pub fn feature_names(&self) -> &[String] {
        match self {
            SavedModel::Rbf(m) => m.feature_names(),
            SavedModel::Baseline(b) => &b.feature_names,
        }
    }

    pub fn class_names(&self) -> &[String] {
        match self {
            SavedModel::Rbf(m) => m.class_names(),
            SavedModel::Baseline(b) => &b.class_names,
        }
    }

    /// Class probabilities for a row in original feature units.
    pub fn predict_proba(&self, x_raw: &[f64]) -> Result<Vec<f64>> {
        match self {
            SavedModel::Rbf(m) => m.predict_proba(x_raw),
            SavedModel::Baseline(b) => {
                crate::baselines::baseline_predict(&b.model, x_raw, &b.scaler).map(|(_, p)| p)
            }
        }
    }

    pub fn predict(&self, x_raw: &[f64]) -> Result<usize> {
        self.predict_proba(x_raw).map(|p| argmax(&p))
    }
}

pub fn save_rbf(model: &RbfModel) -> Result<String> {
    let doc = RbfDocument {
        format_version: FORMAT_VERSION,
        model_kind: "rbf".into(),
        kernel: model.kernel().kind,
        spread_mode: model.kernel().spread_mode,
        feature_names: model.feature_names().to_vec(),
        class_names: model.class_names().to_vec(),
        scaler: model.scaler().clone(),
        centers: model.centers().clone(),
        spreads: model.spreads().clone(),
        weights: model.weights().clone(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn save_baseline(bundle: &BaselineBundle) -> Result<String> {
    fn doc<P: Serialize>(b: &BaselineBundle, kind: &str, params: P) -> Result<String> {
        Ok(serde_json::to_string_pretty(&BaselineDocument {
            format_version: FORMAT_VERSION,
            model_kind: kind.into(),
            feature_names: b.feature_names.clone(),
            class_names: b.class_names.clone(),
            scaler: b.scaler.clone(),
            params,
        })?)
    }
    match &bundle.model {
        BaselineModel::Logistic(m) => doc(bundle, "logistic", m),
        BaselineModel::Mlp(m) => doc(bundle, "mlp", m),
    }
}

pub fn save(model: &SavedModel) -> Result<String> {
    match model {
        SavedModel::Rbf(m) => save_rbf(m),
        SavedModel::Baseline(b) => save_baseline(b),
    }
}

/// Parses any model file.
pub fn load(text: &str) -> Result<SavedModel> {
    let value: Value = serde_json::from_str(text)?;
    let version = value
        .get("format_version")
        .ok_or_else(|| Error::Format("missing format_version".into()))?;
    if version.as_u64() != Some(FORMAT_VERSION) {
        return Err(Error::Format(format!("unsupported format_version {version}")));
    }
    let kind = value
        .get("model_kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Format("missing model_kind".into()))?
        .to_string();

    match kind.as_str() {
        "rbf" => {
            let doc: RbfDocument = serde_json::from_value(value)?;
            if doc.spreads.mode() != doc.spread_mode {
                return Err(Error::Format("spreads do not match spread_mode".into()));
            }
            let model = RbfModel::new(
                doc.centers,
                doc.spreads,
                doc.weights,
                doc.class_names,
                doc.scaler,
                doc.feature_names,
            )?;
            Ok(SavedModel::Rbf(model))
        }
        "logistic" => {
            let doc: BaselineDocument<LogisticModel> = serde_json::from_value(value)?;
            BaselineBundle::new(BaselineModel::Logistic(doc.params), doc.scaler, doc.feature_names, doc.class_names)
                .map(SavedModel::Baseline)
        }
        "mlp" => {
            let doc: BaselineDocument<MlpModel> = serde_json::from_value(value)?;
            BaselineBundle::new(BaselineModel::Mlp(doc.params), doc.scaler, doc.feature_names, doc.class_names)
                .map(SavedModel::Baseline)
        }
        other => Err(Error::Format(format!("unknown model_kind `{other}`"))),
    }
}

/// Loads a file that must hold an RBF network.
pub fn load_rbf(text: &str) -> Result<RbfModel> {
    match load(text)? {
        SavedModel::Rbf(m) => Ok(m),
        other => Err(Error::Format(format!("expected an rbf model, found {}", other.kind()))),
    }
}
