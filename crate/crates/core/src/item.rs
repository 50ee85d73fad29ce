//! Exam items, collections, validation and per-language statistics.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::label::OptionLabel;
use crate::script::{script_mismatch, Language, MismatchFlag};
use crate::table::{thousands, Align, Table};

pub const MIN_GRADE: i32 = 4;
pub const MAX_GRADE: i32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemType {
    Text,
    ImageText,
}

impl ItemType {
    pub fn as_str(self) -> &'static str {
        match self {
            ItemType::Text => "text",
            ItemType::ImageText => "image_text",
        }
    }
}

impl FromStr for ItemType {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim() {
            "text" => Ok(ItemType::Text),
            "image_text" => Ok(ItemType::ImageText),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }

    /// Gold keys are required everywhere except the test split.
    pub fn requires_answer_key(self) -> bool {
        self != Split::Test
    }
}

impl FromStr for Split {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim() {
            "train" => Ok(Split::Train),
            "validation" | "val" | "dev" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            _ => Err(()),
        }
    }
}

/// One exam question record.
///
/// This is a plain record: invariants (grade range, image presence, unique
/// ids) are checked by [`validate_items`] so that a bad manifest can be
/// reported in full instead of failing on the first row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamItem {
    pub sample_id: String,
    pub subject: String,
    pub item_type: ItemType,
    pub grade: i32,
    pub answer_key: Option<OptionLabel>,
    pub language: Language,
    pub image_ref: Option<String>,
    /// 1-based data row in the source manifest; 0 for synthesized items.
    pub row: usize,
    /// Manifest columns outside the fixed schema, in column order.
    pub metadata: Vec<(String, String)>,
}

impl ExamItem {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn set_meta(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.metadata.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.metadata.push((key.into(), value)),
        }
    }

    pub fn is_visual(&self) -> bool {
        self.item_type == ItemType::ImageText
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub items: Vec<ExamItem>,
    pub source_path: String,
    pub split: Split,
    /// Directory `image_ref`s are resolved against.
    pub image_root: String,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, sample_id: &str) -> Option<&ExamItem> {
        self.items.iter().find(|i| i.sample_id == sample_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IssueKind {
    DuplicateId,
    GradeOutOfRange { grade: i32 },
    MissingImageRef,
    UnresolvableImageRef { image_ref: String },
    MissingAnswerKey,
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IssueKind::DuplicateId => f.write_str("duplicate id"),
            IssueKind::GradeOutOfRange { grade } => {
                write!(f, "grade {grade} outside [{MIN_GRADE},{MAX_GRADE}]")
            }
            IssueKind::MissingImageRef => f.write_str("image_text item without image_ref"),
            IssueKind::UnresolvableImageRef { image_ref } => {
                write!(f, "unresolvable image_ref {image_ref:?}")
            }
            IssueKind::MissingAnswerKey => f.write_str("missing answer_key"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub sample_id: String,
    /// Manifest rows involved; more than one for duplicates.
    pub rows: Vec<usize>,
    #[serde(flatten)]
    pub kind: IssueKind,
    pub reason: String,
}

impl ValidationIssue {
    fn new(sample_id: &str, rows: Vec<usize>, kind: IssueKind) -> Self {
        Self {
            sample_id: sample_id.into(),
            rows,
            reason: format!("{kind}"),
            kind,
        }
    }
}

/// Checks every item invariant. `resolves` answers whether an image
/// reference points at an existing file.
pub fn validate_items<F>(items: &[ExamItem], split: Split, resolves: F) -> Vec<ValidationIssue>
where
    F: Fn(&str) -> bool,
{
    let mut issues = Vec::new();

    let mut seen: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for item in items {
        seen.entry(item.sample_id.as_str())
            .or_default()
            .push(item.row);
    }
    let mut reported = BTreeSet::new();

    for item in items {
        let id = item.sample_id.as_str();
        if let Some(rows) = seen.get(id).filter(|r| r.len() > 1) {
            if reported.insert(id) {
                issues.push(ValidationIssue::new(
                    id,
                    rows.clone(),
                    IssueKind::DuplicateId,
                ));
            }
        }
        if !(MIN_GRADE..=MAX_GRADE).contains(&item.grade) {
            issues.push(ValidationIssue::new(
                id,
                alloc::vec![item.row],
                IssueKind::GradeOutOfRange { grade: item.grade },
            ));
        }
        if split.requires_answer_key() && item.answer_key.is_none() {
            issues.push(ValidationIssue::new(
                id,
                alloc::vec![item.row],
                IssueKind::MissingAnswerKey,
            ));
        }
        match item.image_ref.as_deref().filter(|r| !r.trim().is_empty()) {
            None if item.is_visual() => issues.push(ValidationIssue::new(
                id,
                alloc::vec![item.row],
                IssueKind::MissingImageRef,
            )),
            Some(r) if !resolves(r) => issues.push(ValidationIssue::new(
                id,
                alloc::vec![item.row],
                IssueKind::UnresolvableImageRef {
                    image_ref: r.into(),
                },
            )),
            _ => {}
        }
    }
    issues
}

/// Flags an item whose extracted text is printed in a script its declared
/// language does not use.
pub fn detect_language_mismatch(item: &ExamItem, extracted_text: &str) -> Option<MismatchFlag> {
    script_mismatch(item.language, extracted_text).map(|(dominant_script, severity)| MismatchFlag {
        sample_id: item.sample_id.clone(),
        declared_language: item.language,
        dominant_script,
        severity,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageStats {
    pub language: Language,
    pub n_questions: usize,
    pub n_visual: usize,
    pub n_text: usize,
    pub subjects: usize,
    pub grades: BTreeSet<i32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub per_language: Vec<LanguageStats>,
}

/// Per-language counts; rows appear in order of first occurrence.
pub fn compute_stats(items: &[ExamItem]) -> DatasetStats {
    let mut order: Vec<Language> = Vec::new();
    let mut acc: BTreeMap<Language, (LanguageStats, BTreeSet<&str>)> = BTreeMap::new();
    for item in items {
        let (row, subjects) = acc.entry(item.language).or_insert_with(|| {
            order.push(item.language);
            (
                LanguageStats {
                    language: item.language,
                    n_questions: 0,
                    n_visual: 0,
                    n_text: 0,
                    subjects: 0,
                    grades: BTreeSet::new(),
                },
                BTreeSet::new(),
            )
        });
        row.n_questions += 1;
        match item.item_type {
            ItemType::ImageText => row.n_visual += 1,
            ItemType::Text => row.n_text += 1,
        }
        subjects.insert(item.subject.as_str());
        row.grades.insert(item.grade);
    }
    let per_language = order
        .into_iter()
        .filter_map(|l| acc.remove(&l))
        .map(|(mut row, subjects)| {
            row.subjects = subjects.len();
            row
        })
        .collect();
    DatasetStats { per_language }
}

/// `{11, 12}` → `"11, 12"`; runs of three or more collapse to `"8-12"`.
pub fn format_grades(grades: &BTreeSet<i32>) -> String {
    let v: Vec<i32> = grades.iter().copied().collect();
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[j] + 1 {
            j += 1;
        }
        if j - i >= 2 {
            parts.push(format!("{}-{}", v[i], v[j]));
        } else {
            for g in &v[i..=j] {
                parts.push(format!("{g}"));
            }
        }
        i = j + 1;
    }
    parts.join(", ")
}

impl DatasetStats {
    pub fn total_questions(&self) -> usize {
        self.per_language.iter().map(|r| r.n_questions).sum()
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new([
            "Language",
            "ISO",
            "Family",
            "Grade",
            "# Subjects",
            "# Questions",
            "# Visual Q. / Text Q.",
        ])
        .with_align(&[
            Align::Left,
            Align::Left,
            Align::Left,
            Align::Left,
            Align::Right,
            Align::Right,
            Align::Right,
        ]);
        for r in &self.per_language {
            t.push([
                String::from(r.language.name()),
                String::from(r.language.code()),
                String::from(r.language.family()),
                format_grades(&r.grades),
                format!("{}", r.subjects),
                thousands(r.n_questions),
                format!("{} / {}", thousands(r.n_visual), thousands(r.n_text)),
            ]);
        }
        t
    }
}
