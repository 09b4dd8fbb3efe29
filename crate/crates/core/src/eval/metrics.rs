use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub sensitivity: f64,
    pub specificity: f64,
    /// Set when `TP + FN = 0`; sensitivity is then reported as 1.0.
    pub sensitivity_degenerate: bool,
    /// Set when `TN + FP = 0`; specificity is then reported as 1.0.
    pub specificity_degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Rows are true classes, columns predicted classes.
    pub confusion: Vec<Vec<usize>>,
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub n: usize,
}

fn ratio(num: usize, den: usize) -> (f64, bool) {
    if den == 0 {
        (1.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

pub fn compute_metrics(truth: &[usize], predicted: &[usize], n_classes: usize) -> Result<Metrics> {
    if truth.len() != predicted.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: predicted.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::invalid("metrics need at least one sample"));
    }
    if let Some(&bad) = truth.iter().chain(predicted).find(|&&c| c >= n_classes) {
        return Err(Error::invalid(format!("class {bad} out of range for {n_classes} classes")));
    }

    let mut confusion = vec![vec![0usize; n_classes]; n_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        confusion[t][p] += 1;
    }
    let n = truth.len();
    let trace: usize = (0..n_classes).map(|c| confusion[c][c]).sum();

    let per_class = (0..n_classes)
        .map(|c| {
            let tp = confusion[c][c];
            let fn_ = confusion[c].iter().sum::<usize>() - tp;
            let fp = (0..n_classes).map(|r| confusion[r][c]).sum::<usize>() - tp;
            let tn = n - tp - fn_ - fp;
            let (sensitivity, sensitivity_degenerate) = ratio(tp, tp + fn_);
            let (specificity, specificity_degenerate) = ratio(tn, tn + fp);
            ClassMetrics {
                sensitivity,
                specificity,
                sensitivity_degenerate,
                specificity_degenerate,
            }
        })
        .collect();

    Ok(Metrics {
        confusion,
        accuracy: trace as f64 / n as f64,
        per_class,
        n,
    })
}
