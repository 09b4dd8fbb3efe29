use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{
    baseline_predict, logistic_train, mlp_train, BaselineModel, LogisticConfig, MlpConfig,
};
use crate::dataset::{Dataset, FeatureMatrix, Scaler};
use crate::rbfnet::{train_detailed, RbfConfig};
use crate::Result;

use super::report::{csv_table, metric_cells, metric_header, text_table};
use super::{compute_metrics, train_test_split, Metrics, Split};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Rbf,
    Mlp,
    Logistic,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Rbf => "rbf",
            ModelKind::Mlp => "mlp",
            ModelKind::Logistic => "logistic",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub model_kind: ModelKind,
    /// Seconds spent inside the train call.
    pub train_wall_time: f64,
    /// K-means update steps for the RBF network, epochs for the baselines.
    pub epochs_or_iterations: usize,
    pub final_train_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub kind: ModelKind,
    /// Metrics on the held-out rows.
    pub metrics: Metrics,
    pub timing: TimingReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub class_names: Vec<String>,
    pub split: Split,
    pub rows: Vec<ComparisonRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub n_train: usize,
    pub rbf: RbfConfig,
    pub mlp: MlpConfig,
    pub logistic: LogisticConfig,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            n_train: 300,
            rbf: RbfConfig {
                hidden: 20,
                ..RbfConfig::default()
            },
            mlp: MlpConfig::default(),
            logistic: LogisticConfig::default(),
        }
    }
}

fn baseline_predictions(model: &BaselineModel, scaler: &Scaler, x: &FeatureMatrix) -> Result<Vec<usize>> {
    x.values()
        .row_iter()
        .map(|r| baseline_predict(model, r, scaler).map(|(c, _)| c))
        .collect()
}

/// Trains the RBF network, the MLP and logistic regression on one shared
/// stratified split and scores each on the held-out part.
pub fn compare_models(data: &Dataset, config: &CompareConfig, seed: u64) -> Result<Comparison> {
    let split = train_test_split(&data.labels, config.n_train, seed, true)?;
    let (train, test) = split.apply(data)?;
    let l = data.labels.n_classes();
    let score = |truth: &[usize], pred: &[usize]| compute_metrics(truth, pred, l);

    let mut rows = Vec::with_capacity(3);

    let start = Instant::now();
    let (rbf, iterations) = train_detailed(&train.features, &train.labels, &config.rbf)?;
    let elapsed = start.elapsed().as_secs_f64();
    let train_acc = score(train.labels.indices(), &rbf.predict_matrix(&train.features)?)?.accuracy;
    rows.push(ComparisonRow {
        kind: ModelKind::Rbf,
        metrics: score(test.labels.indices(), &rbf.predict_matrix(&test.features)?)?,
        timing: TimingReport {
            model_kind: ModelKind::Rbf,
            train_wall_time: elapsed,
            epochs_or_iterations: iterations,
            final_train_accuracy: train_acc,
        },
    });

    let scaler = Scaler::fit(&train.features);
    let z_train = scaler.transform(&train.features)?;

    let start = Instant::now();
    let mlp = BaselineModel::Mlp(mlp_train(&z_train, &train.labels, &config.mlp)?);
    let mlp_time = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let logistic = BaselineModel::Logistic(logistic_train(&z_train, &train.labels, &config.logistic)?);
    let logistic_time = start.elapsed().as_secs_f64();

    for (kind, model, elapsed, epochs) in [
        (ModelKind::Mlp, &mlp, mlp_time, config.mlp.epochs),
        (ModelKind::Logistic, &logistic, logistic_time, config.logistic.epochs),
    ] {
        let train_acc = score(
            train.labels.indices(),
            &baseline_predictions(model, &scaler, &train.features)?,
        )?
        .accuracy;
        rows.push(ComparisonRow {
            kind,
            metrics: score(
                test.labels.indices(),
                &baseline_predictions(model, &scaler, &test.features)?,
            )?,
            timing: TimingReport {
                model_kind: kind,
                train_wall_time: elapsed,
                epochs_or_iterations: epochs,
                final_train_accuracy: train_acc,
            },
        });
    }

    Ok(Comparison {
        class_names: data.labels.class_names().to_vec(),
        split,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpeedVerdict {
    /// RBF trained faster than the MLP.
    Holds { rbf_seconds: f64, mlp_seconds: f64 },
    Violated { rbf_seconds: f64, mlp_seconds: f64 },
    /// One of the two models did not reach 0.95 training accuracy.
    NotApplicable,
}

/// Checks whether the RBF network trained faster than the MLP, counted only
/// when both reach 0.95 training accuracy.
pub fn speed_claim(c: &Comparison) -> SpeedVerdict {
    let find = |k| c.rows.iter().find(|r| r.kind == k).map(|r| &r.timing);
    match (find(ModelKind::Rbf), find(ModelKind::Mlp)) {
        (Some(rbf), Some(mlp))
            if rbf.final_train_accuracy >= 0.95 && mlp.final_train_accuracy >= 0.95 =>
        {
            let (rbf_seconds, mlp_seconds) = (rbf.train_wall_time, mlp.train_wall_time);
            if rbf_seconds < mlp_seconds {
                SpeedVerdict::Holds { rbf_seconds, mlp_seconds }
            } else {
                SpeedVerdict::Violated { rbf_seconds, mlp_seconds }
            }
        }
        _ => SpeedVerdict::NotApplicable,
    }
}

impl Comparison {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["model".to_string(), "n_test".into()];
        h.extend(metric_header(&self.class_names));
        h.extend(["train_accuracy", "iterations", "train_seconds"].map(String::from));
        h
    }

    fn cells(&self, row: &ComparisonRow) -> Vec<String> {
        let mut v = vec![row.kind.to_string(), row.metrics.n.to_string()];
        v.extend(metric_cells(&row.metrics));
        v.push(format!("{:.4}", row.timing.final_train_accuracy));
        v.push(row.timing.epochs_or_iterations.to_string());
        v.push(format!("{:.6}", row.timing.train_wall_time));
        v
    }

    fn body(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| self.cells(r)).collect()
    }

    /// One line per model; `train_seconds` is the last column.
    pub fn to_csv(&self) -> String {
        csv_table(&self.header(), &self.body())
    }

    /// Column-aligned plain-text table.
    pub fn to_text(&self) -> String {
        text_table(&self.header(), &self.body())
    }
}
