//! Seeded synthetic data: patient records shaped like the fixture patients,
//! plus two small geometric benchmarks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureMatrix, LabelVector, PatientRecord};
use crate::linalg::Matrix;
use crate::{seeded_rng, Error, Result};

pub const LOW_OUTCOME: &str = "<50%";
pub const HIGH_OUTCOME: &str = ">75%";
pub const REGIMENS: [&str; 3] = ["ZLN", "ZLE", "SLN 30"];

pub const AGE_RANGE: (u32, u32) = (20, 45);
pub const WEIGHT_RANGE: (f64, f64) = (30.0, 95.0);
pub const CD4_RANGE: (f64, f64) = (10.0, 400.0);
pub const CD8_RANGE: (f64, f64) = (250.0, 1600.0);
pub const HB_RANGE: (f64, f64) = (7.0, 13.0);
pub const TLC_RANGE: (f64, f64) = (500.0, 1800.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub seed: u64,
    /// cells/µL; below this the outcome is `<50%`
    pub cd4_low_threshold: f64,
    /// cells/µL; above this the outcome is `>75%`
    pub cd4_high_threshold: f64,
    /// Probability of flipping each outcome label.
    pub label_noise: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n: 500,
            seed: 0,
            cd4_low_threshold: 50.0,
            cd4_high_threshold: 100.0,
            label_noise: 0.0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if !(self.cd4_low_threshold < self.cd4_high_threshold) {
            return Err(Error::invalid("cd4 low threshold must be below the high threshold"));
        }
        if !(0.0..0.5).contains(&self.label_noise) {
            return Err(Error::invalid("label noise must be in [0, 0.5)"));
        }
        Ok(())
    }

    /// Outcome before noise. Between the thresholds the nearer threshold
    /// wins; the midpoint goes to the high outcome.
    pub fn outcome(&self, cd4: f64) -> &'static str {
        if cd4 < self.cd4_low_threshold {
            LOW_OUTCOME
        } else if cd4 > self.cd4_high_threshold {
            HIGH_OUTCOME
        } else if cd4 - self.cd4_low_threshold < self.cd4_high_threshold - cd4 {
            LOW_OUTCOME
        } else {
            HIGH_OUTCOME
        }
    }
}

/// Regimen by equal-width TLC bands over the generator's TLC range.
pub fn regimen_for_tlc(tlc: f64) -> &'static str {
    let width = (TLC_RANGE.1 - TLC_RANGE.0) / 3.0;
    if tlc < TLC_RANGE.0 + width {
        REGIMENS[0]
    } else if tlc < TLC_RANGE.0 + 2.0 * width {
        REGIMENS[1]
    } else {
        REGIMENS[2]
    }
}

fn round_to(v: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (v * s).round() / s
}

pub fn generate_patients(spec: &SyntheticSpec) -> Result<Vec<PatientRecord>> {
    spec.validate()?;
    let mut rng = seeded_rng(spec.seed);
    let width = spec.n.to_string().len().max(4);
    Ok((0..spec.n)
        .map(|i| {
            let age = rng.gen_range(AGE_RANGE.0..=AGE_RANGE.1);
            let weight = round_to(rng.gen_range(WEIGHT_RANGE.0..=WEIGHT_RANGE.1), 1);
            let cd4 = rng.gen_range(CD4_RANGE.0..=CD4_RANGE.1).round();
            let cd8 = rng.gen_range(CD8_RANGE.0..=CD8_RANGE.1).round();
            let hb = round_to(rng.gen_range(HB_RANGE.0..=HB_RANGE.1), 1);
            let tlc = rng.gen_range(TLC_RANGE.0..=TLC_RANGE.1).round();
            let flip = rng.gen::<f64>() < spec.label_noise;
            let mut outcome = spec.outcome(cd4);
            if flip {
                outcome = if outcome == LOW_OUTCOME { HIGH_OUTCOME } else { LOW_OUTCOME };
            }
            PatientRecord {
                id: format!("S{:0width$}", i + 1),
                age,
                weight,
                cd4,
                cd8,
                hb,
                tlc,
                first_identified: None,
                regimen: Some(regimen_for_tlc(tlc).to_string()),
                prolong: Some(outcome.to_string()),
            }
        })
        .collect())
}

/// Points uniform in `[-1, 1]²`, labelled `outside` when farther than
/// `√(2/π)` from the origin (half the square's area), `inside` otherwise.
pub fn ring_dataset(n: usize, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::invalid("ring dataset needs at least 2 points"));
    }
    let radius = (2.0 / std::f64::consts::PI).sqrt();
    let mut rng = seeded_rng(seed);
    let mut data = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        data.extend([a, b]);
        labels.push(usize::from(a.hypot(b) > radius));
    }
    Dataset::new(
        FeatureMatrix::new(Matrix::from_vec(n, 2, data)?, vec!["u".into(), "v".into()])?,
        LabelVector::new(labels, vec!["inside".into(), "outside".into()])?,
    )
}

/// Points uniform in `[-1, 1]^d` split by the hyperplane `Σx = 0`, with
/// points closer than 0.1 to the plane rejected.
pub fn linear_dataset(n: usize, d: usize, seed: u64) -> Result<Dataset> {
    if n < 2 || d == 0 {
        return Err(Error::invalid("linear dataset needs n >= 2 and d >= 1"));
    }
    let norm = (d as f64).sqrt();
    let mut rng = seeded_rng(seed);
    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    while labels.len() < n {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let margin = x.iter().sum::<f64>() / norm;
        if margin.abs() < 0.1 {
            continue;
        }
        data.extend(x);
        labels.push(usize::from(margin > 0.0));
    }
    Dataset::new(
        FeatureMatrix::new(
            Matrix::from_vec(n, d, data)?,
            (0..d).map(|j| format!("x{j}")).collect(),
        )?,
        LabelVector::new(labels, vec!["0".into(), "1".into()])?,
    )
}
