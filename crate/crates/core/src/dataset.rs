//! Patient records, CSV ingestion, numeric encoding and median/IQR scaling.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::{Error, Result};

/// Oldest patient age in the reference cohort; older rows only warn.
pub const PROTOCOL_MAX_AGE: u32 = 45;

/// Numeric feature columns used by default, in table order.
pub const NUMERIC_FEATURES: [&str; 6] = ["age", "weight", "cd4", "cd8", "hb", "tlc"];

/// One clinical row. `regimen` and `prolong` are optional outcome labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatientRecord {
    pub id: String,
    pub age: u32,
    /// kg
    pub weight: f64,
    /// cells/µL
    pub cd4: f64,
    /// cells/µL
    pub cd8: f64,
    /// g/dL
    pub hb: f64,
    /// cells/µL
    pub tlc: f64,
    /// Kept verbatim; dates in the source data are not consistently formatted.
    pub first_identified: Option<String>,
    pub regimen: Option<String>,
    pub prolong: Option<String>,
}

impl PatientRecord {
    fn numeric(&self, name: &str) -> Option<f64> {
        Some(match name {
            "age" => f64::from(self.age),
            "weight" => self.weight,
            "cd4" => self.cd4,
            "cd8" => self.cd8,
            "hb" => self.hb,
            "tlc" => self.tlc,
            _ => return None,
        })
    }

    fn category(&self, name: &str) -> Option<Option<&str>> {
        match name {
            "regimen" => Some(self.regimen.as_deref()),
            "prolong" => Some(self.prolong.as_deref()),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    Id,
    Age,
    Weight,
    Cd4,
    Cd8,
    Hb,
    Tlc,
    FirstIdentified,
    Regimen,
    Prolong,
}

impl Field {
    pub const ALL: [Field; 10] = [
        Field::Id,
        Field::Age,
        Field::Weight,
        Field::Cd4,
        Field::Cd8,
        Field::Hb,
        Field::Tlc,
        Field::FirstIdentified,
        Field::Regimen,
        Field::Prolong,
    ];

    pub fn default_header(self) -> &'static str {
        match self {
            Field::Id => "id",
            Field::Age => "age",
            Field::Weight => "weight",
            Field::Cd4 => "cd4",
            Field::Cd8 => "cd8",
            Field::Hb => "hb",
            Field::Tlc => "tlc",
            Field::FirstIdentified => "first_identified",
            Field::Regimen => "regimen",
            Field::Prolong => "prolong",
        }
    }

    pub fn is_required(self) -> bool {
        !matches!(self, Field::FirstIdentified | Field::Regimen | Field::Prolong)
    }
}

/// Maps each record field to the CSV header that carries it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsvSchema {
    columns: BTreeMap<Field, String>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            columns: Field::ALL
                .iter()
                .map(|&f| (f, f.default_header().to_string()))
                .collect(),
        }
    }
}

impl CsvSchema {
    pub fn with_column(mut self, field: Field, header: impl Into<String>) -> Self {
        self.columns.insert(field, header.into());
        self
    }

    pub fn header(&self, field: Field) -> &str {
        &self.columns[&field]
    }
}

/// Which outcome column becomes the class label.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    #[default]
    Prolong,
    Regimen,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Prolong => "prolong",
            Target::Regimen => "regimen",
        }
    }

    fn label(self, r: &PatientRecord) -> Option<&str> {
        match self {
            Target::Prolong => r.prolong.as_deref(),
            Target::Regimen => r.regimen.as_deref(),
        }
    }
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prolong" => Ok(Target::Prolong),
            "regimen" => Ok(Target::Regimen),
            other => Err(Error::invalid(format!("unknown target `{other}`"))),
        }
    }
}

/// Parses patient rows from CSV text. Columns not named by the schema are
/// ignored; blank optional cells become `None`.
pub fn parse_csv<R: Read>(input: R, schema: &CsvSchema) -> Result<Vec<PatientRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers()?.clone();

    let mut position = BTreeMap::new();
    for field in Field::ALL {
        let name = schema.header(field);
        match headers.iter().position(|h| h == name) {
            Some(i) => {
                position.insert(field, i);
            }
            None if field.is_required() => {
                return Err(Error::Schema {
                    column: name.to_string(),
                })
            }
            None => {}
        }
    }

    let mut out = Vec::new();
    for result in reader.records() {
        let rec = result?;
        let row = rec.position().map_or(out.len() + 2, |p| p.line() as usize);
        let cell = |field: Field| position.get(&field).and_then(|&i| rec.get(i)).unwrap_or("");
        let optional = |field: Field| {
            let v = cell(field);
            (!v.is_empty()).then(|| v.to_string())
        };
        let row_err = |field: Field, message: String| Error::Row {
            row,
            column: schema.header(field).to_string(),
            message,
        };
        let number = |field: Field, positive: bool| -> Result<f64> {
            let raw = cell(field);
            let v: f64 = raw
                .parse()
                .map_err(|_| row_err(field, format!("`{raw}` is not a number")))?;
            if !v.is_finite() {
                return Err(row_err(field, format!("`{raw}` is not finite")));
            }
            if (positive && v <= 0.0) || v < 0.0 {
                let bound = if positive { "positive" } else { "non-negative" };
                return Err(row_err(field, format!("`{raw}` must be {bound}")));
            }
            Ok(v)
        };

        let id = cell(Field::Id);
        if id.is_empty() {
            return Err(row_err(Field::Id, "empty id".into()));
        }
        let age_raw = cell(Field::Age);
        let age: u32 = age_raw
            .parse()
            .ok()
            .filter(|&a| a > 0)
            .ok_or_else(|| row_err(Field::Age, format!("`{age_raw}` is not a positive integer")))?;

        out.push(PatientRecord {
            id: id.to_string(),
            age,
            weight: number(Field::Weight, true)?,
            cd4: number(Field::Cd4, false)?,
            cd8: number(Field::Cd8, false)?,
            hb: number(Field::Hb, true)?,
            tlc: number(Field::Tlc, true)?,
            first_identified: optional(Field::FirstIdentified),
            regimen: optional(Field::Regimen),
            prolong: optional(Field::Prolong),
        });
    }
    Ok(out)
}

/// Soft checks against the reference cohort's inclusion criteria.
pub fn protocol_warnings(records: &[PatientRecord]) -> Vec<String> {
    records
        .iter()
        .filter(|r| r.age > PROTOCOL_MAX_AGE)
        .map(|r| format!("patient {}: age {} exceeds {}", r.id, r.age, PROTOCOL_MAX_AGE))
        .collect()
}

/// Serializes records with the default header set.
pub fn write_csv(records: &[PatientRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(Field::ALL.iter().map(|f| f.default_header()))?;
    for r in records {
        w.write_record([
            r.id.clone(),
            r.age.to_string(),
            r.weight.to_string(),
            r.cd4.to_string(),
            r.cd8.to_string(),
            r.hb.to_string(),
            r.tlc.to_string(),
            r.first_identified.clone().unwrap_or_default(),
            r.regimen.clone().unwrap_or_default(),
            r.prolong.clone().unwrap_or_default(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

/// N×d design matrix with column names.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    values: Matrix,
    feature_names: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(values: Matrix, feature_names: Vec<String>) -> Result<Self> {
        if values.rows() == 0 {
            return Err(Error::invalid("feature matrix needs at least one row"));
        }
        if values.cols() == 0 {
            return Err(Error::invalid("feature matrix needs at least one column"));
        }
        if feature_names.len() != values.cols() {
            return Err(Error::DimensionMismatch {
                expected: values.cols(),
                found: feature_names.len(),
            });
        }
        if !values.is_finite() {
            return Err(Error::invalid("feature matrix contains non-finite values"));
        }
        Ok(FeatureMatrix {
            values,
            feature_names,
        })
    }

    /// Convenience constructor naming columns `x0, x1, …`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let values = Matrix::from_rows(rows)?;
        let names = (0..values.cols()).map(|j| format!("x{j}")).collect();
        FeatureMatrix::new(values, names)
    }

    pub fn nrows(&self) -> usize {
        self.values.rows()
    }

    pub fn ncols(&self) -> usize {
        self.values.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn select_rows(&self, idx: &[usize]) -> Result<FeatureMatrix> {
        FeatureMatrix::new(self.values.select_rows(idx), self.feature_names.clone())
    }
}

/// Class index per row plus the ordered class-name table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelVector {
    indices: Vec<usize>,
    class_names: Vec<String>,
}

impl LabelVector {
    pub fn new(indices: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if class_names.len() < 2 {
            return Err(Error::invalid(format!(
                "need at least two classes, found {}",
                class_names.len()
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= class_names.len()) {
            return Err(Error::invalid(format!(
                "label index {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        Ok(LabelVector {
            indices,
            class_names,
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.n_classes()];
        for &i in &self.indices {
            c[i] += 1;
        }
        c
    }

    /// N×L 0/1 target matrix.
    pub fn one_hot(&self) -> Matrix {
        let mut t = Matrix::zeros(self.len(), self.n_classes());
        for (r, &c) in self.indices.iter().enumerate() {
            t[(r, c)] = 1.0;
        }
        t
    }

    pub fn select(&self, idx: &[usize]) -> LabelVector {
        LabelVector {
            indices: idx.iter().map(|&i| self.indices[i]).collect(),
            class_names: self.class_names.clone(),
        }
    }
}

/// Features and labels of equal length.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub features: FeatureMatrix,
    pub labels: LabelVector,
}

impl Dataset {
    pub fn new(features: FeatureMatrix, labels: LabelVector) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.nrows(),
                found: labels.len(),
            });
        }
        Ok(Dataset { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn subset(&self, idx: &[usize]) -> Result<Dataset> {
        Ok(Dataset {
            features: self.features.select_rows(idx)?,
            labels: self.labels.select(idx),
        })
    }
}

fn category_levels<'a>(records: &'a [PatientRecord], name: &str) -> Result<Vec<&'a str>> {
    let mut missing = Vec::new();
    let mut levels = BTreeSet::new();
    for r in records {
        match r.category(name).flatten() {
            Some(v) => {
                levels.insert(v);
            }
            None => missing.push(r.id.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::invalid(format!(
            "records missing `{name}`: {}",
            missing.join(", ")
        )));
    }
    Ok(levels.into_iter().collect())
}

/// Encodes records into a design matrix and label vector.
///
/// Numeric features are copied verbatim. A categorical feature with `n`
/// levels expands to `n − 1` indicator columns named `field=level`; the
/// lexicographically first level is the all-zeros reference. Class names are
/// the distinct target labels in lexicographic order.
pub fn encode(
    records: &[PatientRecord],
    target: Target,
    feature_set: &[&str],
) -> Result<(FeatureMatrix, LabelVector)> {
    let missing: Vec<String> = records
        .iter()
        .filter(|r| target.label(r).is_none())
        .map(|r| r.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingTarget { ids: missing });
    }

    let mut columns = Vec::new();
    for &name in feature_set {
        if NUMERIC_FEATURES.contains(&name) {
            columns.push(name.to_string());
        } else if name == target.name() {
            return Err(Error::invalid(format!("`{name}` is the target, not a feature")));
        } else if name == "regimen" || name == "prolong" {
            let levels = category_levels(records, name)?;
            columns.extend(levels.iter().skip(1).map(|l| format!("{name}={l}")));
        } else {
            return Err(Error::invalid(format!("unknown feature `{name}`")));
        }
    }

    let features = encode_features(records, &columns)?;

    let class_names: Vec<String> = records
        .iter()
        .filter_map(|r| target.label(r))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_string)
        .collect();
    let indices = records
        .iter()
        .map(|r| {
            let label = target.label(r).expect("checked above");
            class_names.iter().position(|c| c == label).expect("label collected")
        })
        .collect();
    let labels = LabelVector::new(indices, class_names)?;
    Ok((features, labels))
}

/// Column names [`encode_features`] can build from these records: the
/// numeric fields, plus `field=level` for every level of a categorical field
/// that all records carry.
pub fn available_features(records: &[PatientRecord]) -> Vec<String> {
    let mut names: Vec<String> = NUMERIC_FEATURES.iter().map(|s| s.to_string()).collect();
    for field in ["regimen", "prolong"] {
        if let Ok(levels) = category_levels(records, field) {
            names.extend(levels.iter().map(|l| format!("{field}={l}")));
        }
    }
    names
}

fn buildable(records: &[PatientRecord], col: &str) -> bool {
    if NUMERIC_FEATURES.contains(&col) {
        return true;
    }
    match col.split_once('=') {
        Some((field @ ("regimen" | "prolong"), _)) => {
            records.iter().all(|r| r.category(field).flatten().is_some())
        }
        _ => false,
    }
}

/// Builds the design matrix for an already-known column list, e.g. the
/// feature names stored in a trained model. Indicator columns `field=level`
/// are 1 when the record's value equals `level`; any other value, including
/// a level not seen in training, encodes as the reference level. Columns the
/// records cannot supply give [`Error::FeatureMismatch`].
pub fn encode_features(records: &[PatientRecord], columns: &[String]) -> Result<FeatureMatrix> {
    if records.is_empty() {
        return Err(Error::invalid("no records to encode"));
    }
    if !columns.iter().all(|c| buildable(records, c)) {
        return Err(Error::FeatureMismatch {
            expected: columns.to_vec(),
            found: available_features(records),
        });
    }
    let mut data = Vec::with_capacity(records.len() * columns.len());
    for r in records {
        for col in columns {
            let v = match r.numeric(col) {
                Some(v) => v,
                None => {
                    let (field, level) = col.split_once('=').expect("checked buildable");
                    let value = r.category(field).flatten().expect("checked buildable");
                    f64::from(u8::from(value == level))
                }
            };
            data.push(v);
        }
    }
    FeatureMatrix::new(
        Matrix::from_vec(records.len(), columns.len(), data)?,
        columns.to_vec(),
    )
}

/// Linear-interpolation quantile of an ascending slice at position
/// `p · (n − 1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Per-feature median and interquartile range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub medians: Vec<f64>,
    pub iqrs: Vec<f64>,
}

impl Scaler {
    pub fn fit(m: &FeatureMatrix) -> Scaler {
        let d = m.ncols();
        let mut medians = Vec::with_capacity(d);
        let mut iqrs = Vec::with_capacity(d);
        for j in 0..d {
            let mut col: Vec<f64> = m.values().column(j).collect();
            col.sort_by(f64::total_cmp);
            medians.push(quantile_sorted(&col, 0.5));
            iqrs.push(quantile_sorted(&col, 0.75) - quantile_sorted(&col, 0.25));
        }
        Scaler { medians, iqrs }
    }

    pub fn dim(&self) -> usize {
        self.medians.len()
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.medians.len() != self.iqrs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.medians.len(),
                found: self.iqrs.len(),
            });
        }
        let ok = self.medians.iter().all(|v| v.is_finite())
            && self.iqrs.iter().all(|v| v.is_finite() && *v >= 0.0);
        if !ok {
            return Err(Error::invalid("scaler entries must be finite with iqr >= 0"));
        }
        Ok(())
    }

    /// Standardizes one row. A zero IQR only centers that feature.
    pub fn transform_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(x
            .iter()
            .zip(self.medians.iter().zip(&self.iqrs))
            .map(|(&v, (&med, &iqr))| (v - med) / if iqr > 0.0 { iqr } else { 1.0 })
            .collect())
    }

    pub fn transform(&self, m: &FeatureMatrix) -> Result<FeatureMatrix> {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for row in m.values().row_iter() {
            data.extend(self.transform_row(row)?);
        }
        FeatureMatrix::new(
            Matrix::from_vec(m.nrows(), m.ncols(), data)?,
            m.feature_names().to_vec(),
        )
    }
}

pub fn fit_scaler(m: &FeatureMatrix) -> Scaler {
    Scaler::fit(m)
}

pub fn transform(s: &Scaler, m: &FeatureMatrix) -> Result<FeatureMatrix> {
    s.transform(m)
}
