//! Submission CSV and JSONL audit log.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use mcqa_core::eval::Predictions;
use mcqa_core::{Caption, Dataset, ExtractionMethod};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::pipeline::{ItemFailure, Prediction, PredictionSet};

pub const SUBMISSION_HEADER: &str = "sample_id,answer";

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
}

impl OutputError {
    pub fn is_io(&self) -> bool {
        match self {
            OutputError::Io(_) => true,
            OutputError::Csv(e) => e.is_io_error(),
            OutputError::Schema { .. } => false,
        }
    }
}

/// One row per dataset item, in dataset order. Items without a letter
/// (no answer or failed) get an empty answer cell.
pub fn write_submission(path: &Path, ds: &Dataset, set: &PredictionSet) -> Result<(), OutputError> {
    let by_id = set.by_id();
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{SUBMISSION_HEADER}")?;
    for item in &ds.items {
        let answer = by_id
            .get(item.sample_id.as_str())
            .and_then(|p| p.answer)
            .map_or("", |a| a.value.as_str());
        let mut rec = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(Vec::new());
        rec.write_record([item.sample_id.as_str(), answer])?;
        w.write_all(&rec.into_inner().map_err(|e| e.into_error())?)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_submission(path: &Path) -> Result<Predictions, OutputError> {
    let mut rdr = csv::Reader::from_reader(File::open(path)?);
    let headers: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers != ["sample_id", "answer"] {
        return Err(OutputError::Schema {
            line: 1,
            message: format!(
                "expected header {SUBMISSION_HEADER:?}, found {:?}",
                headers.join(",")
            ),
        });
    }
    let mut out = Predictions::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let id = rec.get(0).unwrap_or("").trim();
        let raw = rec.get(1).unwrap_or("").trim();
        let answer = if raw.is_empty() {
            None
        } else {
            Some(raw.parse().map_err(|_| OutputError::Schema {
                line,
                message: format!("answer {raw:?} is not one of A-E"),
            })?)
        };
        if out.insert(id.to_string(), answer).is_some() {
            return Err(OutputError::Schema {
                line,
                message: format!("duplicate sample_id {id:?}"),
            });
        }
    }
    Ok(out)
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum AuditLine<'a, C: Serialize> {
    Config { config: &'a C },
    Prediction(&'a Prediction),
    Failure(&'a ItemFailure),
}

/// Config first, then predictions and failures in dataset order.
pub fn write_audit<C: Serialize>(
    path: &Path,
    config: &C,
    set: &PredictionSet,
) -> Result<(), OutputError> {
    let mut w = BufWriter::new(File::create(path)?);
    let mut line = |l: &AuditLine<'_, C>| -> io::Result<()> {
        serde_json::to_writer(&mut w, l)?;
        w.write_all(b"\n")
    };
    line(&AuditLine::Config { config })?;
    for p in &set.predictions {
        line(&AuditLine::Prediction(p))?;
    }
    for f in &set.failures {
        line(&AuditLine::Failure(f))?;
    }
    w.flush()?;
    Ok(())
}

/// The subset of an audit prediction line needed by reports.
#[derive(Debug, Clone, Deserialize)]
pub struct AuditedPrediction {
    pub sample_id: String,
    pub answer: Option<mcqa_core::AnswerLetter>,
    pub strict_compliant: bool,
    pub caption: Caption,
}

impl AuditedPrediction {
    pub fn method(&self) -> Option<ExtractionMethod> {
        self.answer.map(|a| a.extraction_method)
    }
}

pub fn read_audit(path: &Path) -> Result<Vec<AuditedPrediction>, OutputError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let schema = |e: serde_json::Error| OutputError::Schema {
            line: i + 1,
            message: e.to_string(),
        };
        let v: Value = serde_json::from_str(&line).map_err(schema)?;
        if v.get("kind").and_then(Value::as_str) == Some("prediction") {
            out.push(serde_json::from_value(v).map_err(schema)?);
        }
    }
    Ok(out)
}

pub fn captions_from_audit(path: &Path) -> Result<HashMap<String, Caption>, OutputError> {
    Ok(read_audit(path)?
        .into_iter()
        .map(|p| (p.sample_id, p.caption))
        .collect())
}
