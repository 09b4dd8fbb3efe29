use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureMatrix, LabelVector};
use crate::eval::kfold_cv;
use crate::{Error, Result};

use super::{train, RbfConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiddenSizeScore {
    pub hidden: usize,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiddenSizeSelection {
    pub chosen: usize,
    /// One row per grid entry, in grid order.
    pub table: Vec<HiddenSizeScore>,
}

/// Chooses the number of hidden units by stratified k-fold cross-validation.
///
/// Every candidate sees the same folds. The winner is the smallest `J` whose
/// mean accuracy is within one standard error of the best mean. Fold `f`
/// trains with seed `base.seed + f`.
pub fn select_hidden_size(
    m: &FeatureMatrix,
    y: &LabelVector,
    grid: &[usize],
    folds: usize,
    seed: u64,
    base: &RbfConfig,
) -> Result<HiddenSizeSelection> {
    if grid.is_empty() {
        return Err(Error::invalid("hidden-size grid is empty"));
    }
    let data = Dataset::new(m.clone(), y.clone())?;
    let n = data.len();
    if folds < 2 || folds > n {
        return Err(Error::invalid(format!("folds must be in 2..={n}, got {folds}")));
    }
    let smallest_train = n - n.div_ceil(folds);
    if let Some(&bad) = grid.iter().find(|&&j| j == 0 || j > smallest_train) {
        return Err(Error::invalid(format!(
            "hidden size {bad} must be in 1..={smallest_train} (smallest training fold)"
        )));
    }

    let mut table = Vec::with_capacity(grid.len());
    for &hidden in grid {
        let cv = kfold_cv(&data, folds, seed, |fold, train_set, test| {
            let cfg = RbfConfig {
                hidden,
                seed: base.seed.wrapping_add(fold as u64),
                ..base.clone()
            };
            train(&train_set.features, &train_set.labels, &cfg)?.predict_matrix(test)
        })?;
        table.push(HiddenSizeScore {
            hidden,
            mean_accuracy: cv.mean_accuracy,
            std_accuracy: cv.std_accuracy,
            std_error: cv.std_accuracy / (folds as f64).sqrt(),
        });
    }

    let chosen = one_standard_error_choice(&table).expect("grid not empty");
    Ok(HiddenSizeSelection { chosen, table })
}

/// Smallest `hidden` whose mean accuracy is within one standard error of the
/// best row's mean.
pub fn one_standard_error_choice(table: &[HiddenSizeScore]) -> Option<usize> {
    let best = table
        .iter()
        .max_by(|a, b| a.mean_accuracy.total_cmp(&b.mean_accuracy))?;
    let threshold = best.mean_accuracy - best.std_error - 1e-12;
    table
        .iter()
        .filter(|s| s.mean_accuracy >= threshold)
        .map(|s| s.hidden)
        .min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{encode, parse_csv, CsvSchema, Target, NUMERIC_FEATURES};

    fn fixture() -> (FeatureMatrix, LabelVector) {
        let recs = parse_csv(crate::FIXTURE_PATIENTS10.as_bytes(), &CsvSchema::default()).unwrap();
        encode(&recs, Target::Prolong, &NUMERIC_FEATURES).unwrap()
    }

    #[test]
    fn singleton_grid() {
        let (x, y) = fixture();
        let s = select_hidden_size(&x, &y, &[3], 5, 1, &RbfConfig::default()).unwrap();
        assert_eq!(s.chosen, 3);
        assert_eq!(s.table.len(), 1);
    }

    #[test]
    fn fixture_grid_shape() {
        let (x, y) = fixture();
        let s = select_hidden_size(&x, &y, &[2, 4, 8], 5, 1, &RbfConfig::default()).unwrap();
        assert!([2, 4, 8].contains(&s.chosen));
        assert_eq!(s.table.iter().map(|r| r.hidden).collect::<Vec<_>>(), [2, 4, 8]);
        for row in &s.table {
            assert!((0.0..=1.0).contains(&row.mean_accuracy));
        }
    }

    fn score(hidden: usize, mean_accuracy: f64, std_error: f64) -> HiddenSizeScore {
        HiddenSizeScore {
            hidden,
            mean_accuracy,
            std_accuracy: std_error,
            std_error,
        }
    }

    #[test]
    fn ties_go_to_smaller() {
        let table = [score(8, 0.9, 0.0), score(4, 0.9, 0.0)];
        assert_eq!(one_standard_error_choice(&table), Some(4));
    }

    #[test]
    fn within_one_standard_error() {
        // best is J=8 at 0.86 with se 0.05; J=2 misses 0.81, J=4 makes it
        let table = [score(2, 0.80, 0.02), score(8, 0.86, 0.05), score(4, 0.84, 0.01)];
        assert_eq!(one_standard_error_choice(&table), Some(4));
        let table = [score(2, 0.82, 0.02), score(4, 0.86, 0.05)];
        assert_eq!(one_standard_error_choice(&table), Some(2));
        assert_eq!(one_standard_error_choice(&[]), None);
    }

    #[test]
    fn bad_grids() {
        let (x, y) = fixture();
        assert!(select_hidden_size(&x, &y, &[], 5, 0, &RbfConfig::default()).is_err());
        // 5 folds of 10 leaves 8 training rows
        assert!(select_hidden_size(&x, &y, &[9], 5, 0, &RbfConfig::default()).is_err());
        assert!(select_hidden_size(&x, &y, &[2], 1, 0, &RbfConfig::default()).is_err());
    }
}
