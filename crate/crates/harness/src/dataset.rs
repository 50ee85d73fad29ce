//! Manifest loading and writing (CSV or JSON lines) plus filesystem-backed
//! validation.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use mcqa_core::answer_norm::script_letter;
use mcqa_core::item::{validate_items, ValidationIssue};
use mcqa_core::{Dataset, ExamItem, ItemType, Language, OptionLabel, Split};
use serde_json::Value;

/// Fixed manifest columns, in output order.
pub const REQUIRED_COLUMNS: [&str; 7] = [
    "sample_id",
    "subject",
    "type",
    "grade",
    "answer_key",
    "language",
    "image",
];

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read {path}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed CSV in {path}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("row {row}: malformed JSON: {message}")]
    Json { row: usize, message: String },
    #[error("manifest lacks required column {0:?}")]
    MissingColumn(&'static str),
    #[error("row {row}: {column} value {value:?} is not allowed")]
    BadEnum {
        row: usize,
        column: &'static str,
        value: String,
    },
    #[error("row {row}: {column} value {value:?} is not an integer")]
    BadValue {
        row: usize,
        column: &'static str,
        value: String,
    },
}

impl DatasetError {
    /// Environment failures as opposed to bad content.
    pub fn is_io(&self) -> bool {
        match self {
            DatasetError::Io { .. } => true,
            DatasetError::Csv { source, .. } => source.is_io_error(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadMode {
    /// Abort on the first bad row.
    Strict,
    /// Skip bad rows and report them.
    Lenient,
}

impl LoadMode {
    pub fn default_for(split: Split) -> Self {
        if split == Split::Test {
            LoadMode::Lenient
        } else {
            LoadMode::Strict
        }
    }
}

#[derive(Debug)]
pub struct Loaded {
    pub dataset: Dataset,
    /// Rows dropped in lenient mode.
    pub skipped: Vec<DatasetError>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    JsonLines,
}

fn format_of(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl" | "ndjson" | "json") => Format::JsonLines,
        _ => Format::Csv,
    }
}

struct RawRow {
    row: usize,
    fields: Vec<(String, String)>,
}

impl RawRow {
    fn get(&self, col: &str) -> &str {
        self.fields
            .iter()
            .find(|(k, _)| k == col)
            .map_or("", |(_, v)| v.as_str())
            .trim()
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<RawRow>), DatasetError> {
    let csv_err = |source| DatasetError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err(path))?;
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(file);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|h| h.trim().trim_start_matches('\u{feff}').to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let fields = headers
            .iter()
            .enumerate()
            .map(|(j, h)| (h.clone(), rec.get(j).unwrap_or("").to_string()))
            .collect();
        rows.push(RawRow { row: i + 1, fields });
    }
    Ok((headers, rows))
}

fn json_scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn read_jsonl(path: &Path) -> Result<(Vec<String>, Vec<RawRow>), DatasetError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut headers: Vec<String> = Vec::new();
    let mut rows = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = rows.len() + 1;
        let obj: serde_json::Map<String, Value> =
            serde_json::from_str(&line).map_err(|e| DatasetError::Json {
                row,
                message: e.to_string(),
            })?;
        let fields: Vec<(String, String)> = obj
            .iter()
            .map(|(k, v)| (k.clone(), json_scalar(v)))
            .collect();
        for (k, _) in &fields {
            if !headers.contains(k) {
                headers.push(k.clone());
            }
        }
        rows.push(RawRow { row, fields });
    }
    Ok((headers, rows))
}

/// Answer keys may be written with any supported alphabet's letter.
fn parse_answer_key(s: &str) -> Option<OptionLabel> {
    let mut chars = s.chars();
    let c = chars.next()?;
    if chars.next().is_some() {
        return None;
    }
    OptionLabel::from_ascii_upper(c.to_ascii_uppercase())
        .or_else(|| script_letter(c).map(|(l, _)| l))
}

fn parse_row(raw: &RawRow, extra: &[String]) -> Result<ExamItem, DatasetError> {
    let row = raw.row;
    let bad = |column, value: &str| DatasetError::BadEnum {
        row,
        column,
        value: value.into(),
    };
    let item_type: ItemType = raw
        .get("type")
        .parse()
        .map_err(|_| bad("type", raw.get("type")))?;
    let grade_s = raw.get("grade");
    let grade: i32 = grade_s.parse().map_err(|_| DatasetError::BadValue {
        row,
        column: "grade",
        value: grade_s.into(),
    })?;
    let key_s = raw.get("answer_key");
    let answer_key = if key_s.is_empty() {
        None
    } else {
        Some(parse_answer_key(key_s).ok_or_else(|| bad("answer_key", key_s))?)
    };
    let language = Language::lookup(raw.get("language"))
        .ok_or_else(|| bad("language", raw.get("language")))?;
    let image = raw.get("image");
    Ok(ExamItem {
        sample_id: raw.get("sample_id").into(),
        subject: raw.get("subject").into(),
        item_type,
        grade,
        answer_key,
        language,
        image_ref: (!image.is_empty()).then(|| image.into()),
        row,
        metadata: extra
            .iter()
            .filter_map(|k| raw.fields.iter().find(|(f, _)| f == k).cloned())
            .collect(),
    })
}

/// Loads a manifest. Row order is preserved; columns outside the fixed
/// schema are kept as item metadata.
pub fn load_dataset(
    manifest: &Path,
    image_root: &Path,
    split: Split,
    mode: LoadMode,
) -> Result<Loaded, DatasetError> {
    let (headers, rows) = match format_of(manifest) {
        Format::Csv => read_csv(manifest)?,
        Format::JsonLines => read_jsonl(manifest)?,
    };
    if let Some(col) = REQUIRED_COLUMNS
        .iter()
        .find(|c| !headers.iter().any(|h| h == *c))
    {
        return Err(DatasetError::MissingColumn(col));
    }
    let extra: Vec<String> = headers
        .iter()
        .filter(|h| !REQUIRED_COLUMNS.contains(&h.as_str()))
        .cloned()
        .collect();
    let mut items = Vec::with_capacity(rows.len());
    let mut skipped = Vec::new();
    for raw in &rows {
        match parse_row(raw, &extra) {
            Ok(item) => items.push(item),
            Err(e) if mode == LoadMode::Lenient => {
                log::warn!("skipping {e}");
                skipped.push(e);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Loaded {
        dataset: Dataset {
            items,
            source_path: manifest.display().to_string(),
            split,
            image_root: image_root.display().to_string(),
        },
        skipped,
    })
}

pub fn resolve_image(ds_image_root: &str, image_ref: &str) -> PathBuf {
    Path::new(ds_image_root).join(image_ref)
}

/// Item invariants plus image existence under the dataset's image root.
pub fn validate_dataset(ds: &Dataset) -> Vec<ValidationIssue> {
    validate_items(&ds.items, ds.split, |r| {
        resolve_image(&ds.image_root, r).is_file()
    })
}

pub fn write_issues_jsonl<W: Write>(mut w: W, issues: &[ValidationIssue]) -> io::Result<()> {
    for issue in issues {
        serde_json::to_writer(&mut w, issue)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn row_fields(item: &ExamItem, extra: &[String]) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = vec![
        ("sample_id".into(), item.sample_id.clone()),
        ("subject".into(), item.subject.clone()),
        ("type".into(), item.item_type.as_str().into()),
        ("grade".into(), item.grade.to_string()),
        (
            "answer_key".into(),
            item.answer_key
                .map(|k| k.as_str().into())
                .unwrap_or_default(),
        ),
        ("language".into(), item.language.code().into()),
        ("image".into(), item.image_ref.clone().unwrap_or_default()),
    ];
    for k in extra {
        out.push((k.clone(), item.meta(k).unwrap_or("").into()));
    }
    out
}

/// Writes items in the manifest schema; metadata keys become trailing
/// columns in first-seen order, with `always` appended when absent.
pub fn write_manifest(
    path: &Path,
    items: &[ExamItem],
    always: &[&str],
) -> Result<(), DatasetError> {
    let mut extra: Vec<String> = Vec::new();
    for item in items {
        for (k, _) in &item.metadata {
            if !extra.contains(k) {
                extra.push(k.clone());
            }
        }
    }
    for k in always {
        if !extra.iter().any(|e| e == k) {
            extra.push((*k).into());
        }
    }
    let file = File::create(path).map_err(io_err(path))?;
    match format_of(path) {
        Format::Csv => {
            let csv_err = |source| DatasetError::Csv {
                path: path.to_path_buf(),
                source,
            };
            let mut w = csv::Writer::from_writer(file);
            let header: Vec<&str> = REQUIRED_COLUMNS
                .iter()
                .copied()
                .chain(extra.iter().map(String::as_str))
                .collect();
            w.write_record(&header).map_err(csv_err)?;
            for item in items {
                w.write_record(row_fields(item, &extra).iter().map(|(_, v)| v))
                    .map_err(csv_err)?;
            }
            w.flush().map_err(io_err(path))?;
        }
        Format::JsonLines => {
            let mut w = BufWriter::new(file);
            for item in items {
                let obj: serde_json::Map<String, Value> = row_fields(item, &extra)
                    .into_iter()
                    .map(|(k, v)| (k, Value::String(v)))
                    .collect();
                serde_json::to_writer(&mut w, &obj).map_err(|e| io_err(path)(e.into()))?;
                w.write_all(b"\n").map_err(io_err(path))?;
            }
            w.flush().map_err(io_err(path))?;
        }
    }
    Ok(())
}
