//! File formats.
//!
//! Datasets are CSV with a header row: `time` (positive decimal), `status`
//! (0/1), `label` (-1/+1), and every other column a feature, in header order.
//! Numbers are written with 17 significant digits so that reading back
//! reproduces every `f64` exactly.
//!
//! Models and ground-truth sidecars are JSON documents carrying a
//! `format_version` field.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::data::{FitResult, Mode, Standardizer, SurvivalDataset};
use crate::error::{Error, Result};
use crate::simulate::{SimConfig, SyntheticTruth};

pub const FORMAT_VERSION: u32 = 1;

/// Names of the non-feature columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub time_column: String,
    pub status_column: String,
    pub label_column: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            time_column: "time".into(),
            status_column: "status".into(),
            label_column: "label".into(),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(io_err(path))
}

/// Formats with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_error(row: usize, column: &str, value: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        row,
        column: column.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn parse_f64(row: usize, column: &str, cell: &str) -> Result<f64> {
    cell.trim()
        .parse::<f64>()
        .map_err(|e| parse_error(row, column, cell, e.to_string()))
}

fn column_position(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::MissingColumn(name.to_string()))
}

/// Reads and validates a dataset. `row` in parse errors is the 1-based line
/// number in the file (the header is line 1).
pub fn read_dataset(path: &Path, schema: &CsvSchema) -> Result<SurvivalDataset> {
    let mut reader = csv::Reader::from_reader(open(path)?);
    let headers = reader.headers()?.clone();
    let time_pos = column_position(&headers, &schema.time_column)?;
    let status_pos = column_position(&headers, &schema.status_column)?;
    let label_pos = column_position(&headers, &schema.label_column)?;
    let feature_pos: Vec<usize> = (0..headers.len())
        .filter(|&c| c != time_pos && c != status_pos && c != label_pos)
        .collect();
    let feature_names: Vec<String> = feature_pos.iter().map(|&c| headers[c].trim().to_string()).collect();
    if feature_names.is_empty() {
        return Err(Error::NoFeatures);
    }

    let mut times = Vec::new();
    let mut status = Vec::new();
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2;
        if record.len() != headers.len() {
            return Err(Error::Parse {
                row,
                column: String::new(),
                value: String::new(),
                reason: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        times.push(parse_f64(row, &schema.time_column, &record[time_pos])?);
        let cell = record[status_pos].trim();
        status.push(match cell {
            "0" => false,
            "1" => true,
            _ => return Err(parse_error(row, &schema.status_column, cell, "status must be 0 or 1")),
        });
        let cell = record[label_pos].trim();
        labels.push(match cell {
            "1" | "+1" => 1,
            "-1" => -1,
            _ => return Err(parse_error(row, &schema.label_column, cell, "label must be -1 or +1")),
        });
        for (&c, name) in feature_pos.iter().zip(&feature_names) {
            values.push(parse_f64(row, name, &record[c])?);
        }
    }
    let n = times.len();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let covariates =
        Array2::from_shape_vec((n, feature_names.len()), values).expect("row-major buffer matches the counted shape");
    SurvivalDataset::new(covariates, times, status, labels, feature_names)
}

/// Reads only the named feature columns, in the given order. Other columns,
/// including `time`, `status` and `label`, are ignored.
pub fn read_features(path: &Path, names: &[String]) -> Result<Array2<f64>> {
    let mut reader = csv::Reader::from_reader(open(path)?);
    let headers = reader.headers()?.clone();
    let positions = names
        .iter()
        .map(|name| column_position(&headers, name))
        .collect::<Result<Vec<_>>>()?;
    let mut values = Vec::new();
    let mut n = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        for (&c, name) in positions.iter().zip(names) {
            let cell = record
                .get(c)
                .ok_or_else(|| parse_error(i + 2, name, "", "missing field"))?;
            values.push(parse_f64(i + 2, name, cell)?);
        }
        n += 1;
    }
    Ok(Array2::from_shape_vec((n, names.len()), values).expect("row-major buffer matches the counted shape"))
}

/// Writes `ds` as CSV. With `truth`, a JSON sidecar is written next to it at
/// [`sidecar_path`].
pub fn write_dataset(ds: &SurvivalDataset, truth: Option<(&SyntheticTruth, &SimConfig)>, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["time".to_string(), "status".into(), "label".into()];
    header.extend(ds.feature_names().iter().cloned());
    writer.write_record(&header)?;
    for (i, row) in ds.covariates().rows().into_iter().enumerate() {
        let mut record = Vec::with_capacity(header.len());
        record.push(format_f64(ds.times()[i]));
        record.push(if ds.status()[i] { "1" } else { "0" }.to_string());
        record.push(ds.labels()[i].to_string());
        record.extend(row.iter().map(|&v| format_f64(v)));
        writer.write_record(&record)?;
    }
    writer.flush().map_err(io_err(path))?;
    if let Some((truth, config)) = truth {
        write_truth(truth, config, &sidecar_path(path))?;
    }
    Ok(())
}

/// `data.csv` -> `data.csv.truth.json`
pub fn sidecar_path(dataset_path: &Path) -> PathBuf {
    let mut name = dataset_path.as_os_str().to_owned();
    name.push(".truth.json");
    PathBuf::from(name)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TruthDocument {
    format_version: u32,
    generator: SimConfig,
    truth: SyntheticTruth,
}

pub fn write_truth(truth: &SyntheticTruth, config: &SimConfig, path: &Path) -> Result<()> {
    let doc = TruthDocument {
        format_version: FORMAT_VERSION,
        generator: config.clone(),
        truth: truth.clone(),
    };
    write_json(&doc, path)
}

pub fn read_truth(path: &Path) -> Result<(SyntheticTruth, SimConfig)> {
    let doc: TruthDocument = read_versioned_json(path)?;
    Ok((doc.truth, doc.generator))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

fn read_versioned_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let value: serde_json::Value =
        serde_json::from_reader(open(path)?).map_err(|e| Error::CorruptDocument(format!("{}: {e}", path.display())))?;
    let found = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::CorruptDocument(format!("{}: missing format_version", path.display())))?;
    if found != u64::from(FORMAT_VERSION) {
        return Err(Error::VersionMismatch {
            expected: FORMAT_VERSION,
            found: u32::try_from(found).unwrap_or(u32::MAX),
        });
    }
    serde_json::from_value(value).map_err(|e| Error::CorruptDocument(format!("{}: {e}", path.display())))
}

/// A fitted model with everything needed to score raw covariates.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub fit: FitResult,
    pub standardizer: Standardizer,
    pub feature_names: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    mode: Mode,
    lambda: f64,
    alpha: f64,
    n_features: usize,
    /// Nonzero coefficients only, keyed by feature index.
    coefficients: BTreeMap<usize, f64>,
    feature_names: Vec<String>,
    standardizer: Standardizer,
    objective: f64,
    n_iterations: usize,
    converged: bool,
    objective_trace: Vec<f64>,
}

pub fn write_model(model: &SavedModel, path: &Path) -> Result<()> {
    let fit = &model.fit;
    let p = fit.beta.len();
    if model.standardizer.n_features() != p || model.feature_names.len() != p {
        return Err(Error::DimensionMismatch {
            what: "model metadata",
            expected: p,
            found: model.standardizer.n_features(),
        });
    }
    let doc = ModelDocument {
        format_version: FORMAT_VERSION,
        mode: fit.mode,
        lambda: fit.lambda,
        alpha: fit.alpha,
        n_features: p,
        coefficients: fit
            .beta
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, &b)| (j, b))
            .collect(),
        feature_names: model.feature_names.clone(),
        standardizer: model.standardizer.clone(),
        objective: fit.objective,
        n_iterations: fit.n_iterations,
        converged: fit.converged,
        objective_trace: fit.objective_trace.clone(),
    };
    write_json(&doc, path)
}

pub fn read_model(path: &Path) -> Result<SavedModel> {
    let doc: ModelDocument = read_versioned_json(path)?;
    let p = doc.n_features;
    if doc.feature_names.len() != p || doc.standardizer.n_features() != p || doc.standardizer.sds.len() != p {
        return Err(Error::CorruptDocument(format!(
            "{}: metadata does not describe {p} features",
            path.display()
        )));
    }
    let mut beta = Array1::zeros(p);
    for (&j, &b) in &doc.coefficients {
        if j >= p {
            return Err(Error::CorruptDocument(format!(
                "{}: coefficient index {j} out of range",
                path.display()
            )));
        }
        beta[j] = b;
    }
    Ok(SavedModel {
        fit: FitResult {
            beta,
            lambda: doc.lambda,
            alpha: doc.alpha,
            mode: doc.mode,
            objective: doc.objective,
            n_iterations: doc.n_iterations,
            converged: doc.converged,
            objective_trace: doc.objective_trace,
        },
        standardizer: doc.standardizer,
        feature_names: doc.feature_names,
    })
}

/// One line of the per-λ path table.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTableRow {
    pub lambda: f64,
    pub n_nonzero: usize,
    pub objective: f64,
    pub accuracy: f64,
    /// `None` when no pair of training samples is comparable.
    pub c_index: Option<f64>,
    pub harmonic: Option<f64>,
}

pub fn write_path_table(rows: &[PathTableRow], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_writer(create(path)?);
    writer.write_record(["lambda", "nonzero", "objective", "accuracy", "c_index", "harmonic"])?;
    let opt = |v: Option<f64>| v.map(format_f64).unwrap_or_default();
    for row in rows {
        writer.write_record([
            format_f64(row.lambda),
            row.n_nonzero.to_string(),
            format_f64(row.objective),
            format_f64(row.accuracy),
            opt(row.c_index),
            opt(row.harmonic),
        ])?;
    }
    writer.flush().map_err(io_err(path))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub risk: f64,
    pub probability: f64,
    pub label: i8,
}

pub fn write_predictions(predictions: &[Prediction], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_writer(create(path)?);
    writer.write_record(["sample", "risk", "probability", "label"])?;
    for (i, p) in predictions.iter().enumerate() {
        writer.write_record([
            i.to_string(),
            format_f64(p.risk),
            format_f64(p.probability),
            p.label.to_string(),
        ])?;
    }
    writer.flush().map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let path = dir.join(name);
        fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn reads_well_formed_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            dir.path(),
            "d.csv",
            "gene_a,time,status,label,gene_b\n0.5,1.5,1,-1,2\n-1,2.25,0,1,3\n2,0.75,1,+1,4\n",
        );
        let ds = read_dataset(&path, &CsvSchema::default()).unwrap();
        assert_eq!(ds.n_samples(), 3);
        assert_eq!(ds.feature_names(), &["gene_a".to_string(), "gene_b".to_string()]);
        assert_eq!(ds.times(), &[1.5, 2.25, 0.75]);
        assert_eq!(ds.status(), &[true, false, true]);
        assert_eq!(ds.labels(), &[-1, 1, 1]);
        assert_eq!(ds.covariates().row(1).to_vec(), vec![-1.0, 3.0]);
    }

    #[test]
    fn missing_status_column_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(dir.path(), "d.csv", "time,label,x\n1,1,0.5\n2,-1,0.1\n");
        match read_dataset(&path, &CsvSchema::default()) {
            Err(Error::MissingColumn(c)) => assert_eq!(c, "status"),
            other => panic!("expected missing column, got {other:?}"),
        }
    }

    #[test]
    fn bad_label_reports_row_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(dir.path(), "d.csv", "time,status,label,x\n1,1,1,0.5\n2,0,2,0.1\n");
        match read_dataset(&path, &CsvSchema::default()) {
            Err(Error::Parse { row, column, value, .. }) => {
                assert_eq!((row, column.as_str(), value.as_str()), (3, "label", "2"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unparseable_feature_and_short_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(dir.path(), "d.csv", "time,status,label,x\n1,1,1,abc\n2,0,1,0.1\n");
        assert!(matches!(
            read_dataset(&path, &CsvSchema::default()),
            Err(Error::Parse { row: 2, .. })
        ));
        let path = write(dir.path(), "e.csv", "time,status,label,x\n1,1,1,0.3\n");
        assert!(matches!(
            read_dataset(&path, &CsvSchema::default()),
            Err(Error::TooFewSamples(1))
        ));
        let path = write(dir.path(), "f.csv", "time,status,label\n1,1,1\n2,1,1\n");
        assert!(matches!(
            read_dataset(&path, &CsvSchema::default()),
            Err(Error::NoFeatures)
        ));
    }

    #[test]
    fn zero_model_has_empty_coefficient_map() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let model = SavedModel {
            fit: FitResult {
                beta: Array1::zeros(3),
                lambda: 1.5,
                alpha: 1.0,
                mode: Mode::CoxOnly,
                objective: 2.0,
                n_iterations: 1,
                converged: true,
                objective_trace: vec![2.0],
            },
            standardizer: Standardizer::identity(3),
            feature_names: vec!["a".into(), "b".into(), "c".into()],
        };
        write_model(&model, &path).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(doc["coefficients"], serde_json::json!({}));
        assert_eq!(doc["mode"], "cox");
        assert_eq!(read_model(&path).unwrap(), model);
    }

    #[test]
    fn version_and_corruption_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(dir.path(), "m.json", r#"{"format_version": 99}"#);
        assert!(matches!(
            read_model(&path),
            Err(Error::VersionMismatch { found: 99, .. })
        ));
        let path = write(dir.path(), "n.json", "{not json");
        assert!(matches!(read_model(&path), Err(Error::CorruptDocument(_))));
        let path = write(dir.path(), "o.json", r#"{"format_version": 1, "mode": "cox"}"#);
        assert!(matches!(read_model(&path), Err(Error::CorruptDocument(_))));
    }

    #[test]
    fn read_features_selects_by_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(dir.path(), "d.csv", "b,a,c\n1,2,3\n4,5,6\n");
        let x = read_features(&path, &["c".into(), "a".into()]).unwrap();
        assert_eq!(x, ndarray::array![[3.0, 2.0], [6.0, 5.0]]);
        assert!(matches!(
            read_features(&path, &["z".into()]),
            Err(Error::MissingColumn(c)) if c == "z"
        ));
    }
}
