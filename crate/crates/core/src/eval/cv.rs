use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureMatrix, LabelVector};
use crate::{seeded_rng, Error, Result};

use super::{compute_metrics, mean_std, Metrics};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub test_indices: Vec<usize>,
    pub metrics: Metrics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub folds: Vec<FoldResult>,
    pub mean_accuracy: f64,
    /// Sample standard deviation across folds.
    pub std_accuracy: f64,
}

/// Stratified fold assignment: each class is shuffled and dealt round-robin,
/// continuing the deal across classes so fold sizes differ by at most one.
pub fn stratified_folds(labels: &LabelVector, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let n = labels.len();
    if folds < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {folds}")));
    }
    if folds > n {
        return Err(Error::invalid(format!("{folds} folds exceed {n} samples")));
    }
    let mut rng = seeded_rng(seed);
    let mut out = vec![Vec::new(); folds];
    let mut deal = 0;
    for c in 0..labels.n_classes() {
        let mut members: Vec<usize> = (0..n).filter(|&i| labels.indices()[i] == c).collect();
        members.shuffle(&mut rng);
        for i in members {
            out[deal % folds].push(i);
            deal += 1;
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}

/// Stratified k-fold cross-validation.
///
/// `trainer(fold, train, test_features)` fits on the training part and
/// returns one predicted class per test row.
pub fn kfold_cv<F>(data: &Dataset, folds: usize, seed: u64, mut trainer: F) -> Result<CvResult>
where
    F: FnMut(usize, &Dataset, &FeatureMatrix) -> Result<Vec<usize>>,
{
    let assignment = stratified_folds(&data.labels, folds, seed)?;
    let n = data.len();
    let mut results = Vec::with_capacity(folds);
    for (fold, test_idx) in assignment.into_iter().enumerate() {
        let train_idx: Vec<usize> = {
            let mut in_test = vec![false; n];
            for &i in &test_idx {
                in_test[i] = true;
            }
            (0..n).filter(|&i| !in_test[i]).collect()
        };
        let train = data.subset(&train_idx)?;
        let test = data.subset(&test_idx)?;
        let predicted = trainer(fold, &train, &test.features)?;
        let metrics = compute_metrics(test.labels.indices(), &predicted, data.labels.n_classes())?;
        results.push(FoldResult {
            fold,
            test_indices: test_idx,
            metrics,
        });
    }
    let accs: Vec<f64> = results.iter().map(|r| r.metrics.accuracy).collect();
    let (mean_accuracy, std_accuracy) = mean_std(&accs);
    Ok(CvResult {
        folds: results,
        mean_accuracy,
        std_accuracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(n: usize) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        Dataset::new(
            FeatureMatrix::from_rows(&rows).unwrap(),
            LabelVector::new((0..n).map(|i| i % 2).collect(), vec!["a".into(), "b".into()]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn folds_partition_indices() {
        for (n, k) in [(10, 3), (11, 5), (7, 7), (30, 4)] {
            let folds = stratified_folds(&data(n).labels, k, 5).unwrap();
            let mut all: Vec<usize> = folds.concat();
            all.sort_unstable();
            assert_eq!(all, (0..n).collect::<Vec<_>>());
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn leave_one_out_shape() {
        let cv = kfold_cv(&data(10), 10, 0, |_, _, test| Ok(vec![0; test.nrows()])).unwrap();
        assert_eq!(cv.folds.len(), 10);
        assert!(cv.folds.iter().all(|f| f.metrics.n == 1));
    }

    #[test]
    fn constant_trainer_zero_std() {
        // every fold holds one member of each class; predicting 0 gives 0.5
        let cv = kfold_cv(&data(8), 4, 3, |_, _, test| Ok(vec![0; test.nrows()])).unwrap();
        assert!(cv.folds.iter().all(|f| f.metrics.accuracy == 0.5));
        assert_eq!(cv.std_accuracy, 0.0);
    }

    #[test]
    fn too_many_folds() {
        assert!(kfold_cv(&data(3), 4, 0, |_, _, t| Ok(vec![0; t.nrows()])).is_err());
        assert!(kfold_cv(&data(3), 1, 0, |_, _, t| Ok(vec![0; t.nrows()])).is_err());
    }
}
