//! Radial basis function network classification for tabular clinical records.
//!
//! The pipeline is: parse patient rows ([`dataset`]), encode and standardize
//! them by median and interquartile range, place hidden-unit centers with
//! K-means or a random subset of the training rows ([`kmeans`]), estimate
//! receptive-field widths, and fit the linear summation layer by ridge least
//! squares ([`rbfnet`]). Logistic-regression and MLP baselines live in
//! [`baselines`]; splitting, cross-validation, metrics and model comparison in
//! [`eval`].

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod kmeans;
pub mod linalg;
pub mod persist;
pub mod rbfnet;
pub mod synth;

pub use error::{Error, Result};

/// Ten reference patients: clinical measurements joined with regimen and
/// outcome on patient id.
pub const FIXTURE_PATIENTS10: &str = include_str!("../fixtures/patients10.csv");

pub(crate) fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
