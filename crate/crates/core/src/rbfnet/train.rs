use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureMatrix, LabelVector, Scaler};
use crate::kmeans::{self, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::{Error, Result};

use super::{compute_spreads, design_matrix, fit_output_weights, RbfModel, SpreadMode};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterStrategy {
    #[default]
    Kmeans,
    RandomSubset,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbfConfig {
    /// Number of hidden units J.
    pub hidden: usize,
    pub centers: CenterStrategy,
    pub spread_mode: SpreadMode,
    pub lambda: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for RbfConfig {
    fn default() -> Self {
        RbfConfig {
            hidden: 10,
            centers: CenterStrategy::Kmeans,
            spread_mode: SpreadMode::Scalar,
            lambda: 1e-8,
            seed: 0,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
        }
    }
}

/// Fits an RBF network on raw (unscaled) features.
pub fn train(m: &FeatureMatrix, y: &LabelVector, config: &RbfConfig) -> Result<RbfModel> {
    train_detailed(m, y, config).map(|(model, _)| model)
}

/// Like [`train`], also returning the number of K-means update steps (0 for
/// random-subset centers).
pub fn train_detailed(
    m: &FeatureMatrix,
    y: &LabelVector,
    config: &RbfConfig,
) -> Result<(RbfModel, usize)> {
    if m.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: y.len(),
        });
    }
    if config.hidden == 0 || config.hidden > m.nrows() {
        return Err(Error::invalid(format!(
            "hidden units must be in 1..={}, got {}",
            m.nrows(),
            config.hidden
        )));
    }

    let scaler = Scaler::fit(m);
    let z = scaler.transform(m)?;

    let (centers, assignments, iterations) = match config.centers {
        CenterStrategy::Kmeans => {
            let c = kmeans::kmeans(&z, config.hidden, config.seed, config.max_iter, config.tol)?;
            (c.centers, c.assignments, c.iterations)
        }
        CenterStrategy::RandomSubset => {
            let centers = kmeans::random_subset_centers(&z, config.hidden, config.seed)?;
            let (assignments, _) = kmeans::assign(z.values(), &centers);
            (centers, assignments, 0)
        }
    };

    let spreads = compute_spreads(&centers, &assignments, z.values(), config.spread_mode);
    let phi = design_matrix(&centers, &spreads, z.values());
    let weights = fit_output_weights(&phi, &y.one_hot(), config.lambda)?;

    let model = RbfModel::new(
        centers,
        spreads,
        weights,
        y.class_names().to_vec(),
        scaler,
        m.feature_names().to_vec(),
    )?;
    Ok((model, iterations))
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
    fn fixture_interpolates() {
        let (x, y) = fixture();
        let model = train(&x, &y, &RbfConfig::default()).unwrap();
        assert_eq!(model.predict_matrix(&x).unwrap(), y.indices());
        // patient A
        assert_eq!(model.class_names()[model.predict(x.row(0)).unwrap()], ">75%");
    }

    #[test]
    fn two_points_two_units() {
        let x = FeatureMatrix::from_rows(&[vec![0.0, 1.0], vec![2.0, -1.0]]).unwrap();
        let y = LabelVector::new(vec![1, 0], vec!["a".into(), "b".into()]).unwrap();
        let cfg = RbfConfig {
            hidden: 2,
            ..RbfConfig::default()
        };
        for strategy in [CenterStrategy::Kmeans, CenterStrategy::RandomSubset] {
            let model = train(&x, &y, &RbfConfig { centers: strategy, ..cfg.clone() }).unwrap();
            assert_eq!(model.predict_matrix(&x).unwrap(), [1, 0]);
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let (x, y) = fixture();
        for centers in [CenterStrategy::Kmeans, CenterStrategy::RandomSubset] {
            let cfg = RbfConfig {
                hidden: 4,
                centers,
                seed: 9,
                ..RbfConfig::default()
            };
            assert_eq!(train(&x, &y, &cfg).unwrap(), train(&x, &y, &cfg).unwrap());
        }
    }

    #[test]
    fn too_many_units() {
        let (x, y) = fixture();
        let cfg = RbfConfig {
            hidden: 11,
            ..RbfConfig::default()
        };
        assert!(train(&x, &y, &cfg).is_err());
    }

    #[test]
    fn per_dimension_mode_trains() {
        let (x, y) = fixture();
        let cfg = RbfConfig {
            hidden: 3,
            spread_mode: SpreadMode::PerDimension,
            ..RbfConfig::default()
        };
        let model = train(&x, &y, &cfg).unwrap();
        assert_eq!(model.kernel().spread_mode, SpreadMode::PerDimension);
        assert_eq!(model.weights().rows(), 4);
    }
}
