//! Structured captions produced by the describer and aggregator stages.
//!
//! Models are asked to answer in a small line-oriented format:
//!
//! ```text
//! Question: <question text>
//! A) <option>
//! B) <option>
//! Figure: <description of visual elements, or none>
//! WARNING: MISSING_DIAGRAM
//! ```
//!
//! Parsing is forgiving: headers are optional, option markers in any
//! supported alphabet are normalized, and a caption whose options cannot be
//! parsed still carries its raw lines plus a warning.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::answer_norm::{canonicalize_options, split_marker, MarkerOptions, OptionBlock};
use crate::digest::sha256_hex;
use crate::script::{Language, Script, Severity};

/// Token the aggregator emits when a referenced figure is absent.
pub const MISSING_DIAGRAM_TOKEN: &str = "MISSING_DIAGRAM";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaptionStage {
    Draft,
    Refined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum CaptionWarning {
    MissingDiagram,
    UnparsedOptions(String),
    LanguageMismatch {
        script: Script,
        severity: Severity,
    },
    /// Any other `WARNING:` line from the model.
    Model(String),
    /// The aggregator failed and the draft was kept.
    AggregatorFallback(String),
}

impl CaptionWarning {
    pub fn describe(&self) -> String {
        match self {
            CaptionWarning::MissingDiagram => "missing diagram".into(),
            CaptionWarning::UnparsedOptions(e) => alloc::format!("unparsed options: {e}"),
            CaptionWarning::LanguageMismatch { script, severity } => {
                alloc::format!("language mismatch: {script:?} text ({severity:?})")
            }
            CaptionWarning::Model(m) => alloc::format!("model warning: {m}"),
            CaptionWarning::AggregatorFallback(e) => alloc::format!("aggregator fallback: {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum CaptionOptions {
    Parsed { block: OptionBlock },
    Unparsed { lines: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caption {
    pub question_text: String,
    pub options: CaptionOptions,
    pub figure_description: String,
    pub warnings: Vec<CaptionWarning>,
    pub language: Language,
    pub stage: CaptionStage,
    /// The model output this caption was parsed from.
    pub raw_text: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Question,
    Options,
    Figure,
}

fn header<'a>(line: &'a str, names: &[&str]) -> Option<&'a str> {
    let (head, rest) = line.split_once(':')?;
    let head = head.trim().trim_matches('*').trim();
    names
        .iter()
        .any(|n| head.eq_ignore_ascii_case(n))
        .then(|| rest.trim())
}

fn append(buf: &mut String, text: &str) {
    if text.is_empty() {
        return;
    }
    if !buf.is_empty() {
        buf.push('\n');
    }
    buf.push_str(text);
}

impl Caption {
    pub fn parse(text: &str, language: Language, stage: CaptionStage, opts: MarkerOptions) -> Self {
        let mut question = String::new();
        let mut option_lines: Vec<String> = Vec::new();
        let mut figure = String::new();
        let mut warnings = Vec::new();
        let mut section = Section::Question;

        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(w) = header(line, &["warning"]) {
                if w.to_ascii_uppercase().contains(MISSING_DIAGRAM_TOKEN)
                    || w.eq_ignore_ascii_case("missing diagram")
                {
                    if !warnings.contains(&CaptionWarning::MissingDiagram) {
                        warnings.push(CaptionWarning::MissingDiagram);
                    }
                } else {
                    warnings.push(CaptionWarning::Model(w.to_string()));
                }
                continue;
            }
            if let Some(rest) = header(line, &["question"]) {
                section = Section::Question;
                append(&mut question, rest);
                continue;
            }
            if let Some(rest) = header(line, &["options", "answer options"]) {
                section = Section::Options;
                if !rest.is_empty() {
                    option_lines.push(rest.into());
                }
                continue;
            }
            if let Some(rest) = header(line, &["figure", "description", "visual description"]) {
                section = Section::Figure;
                append(&mut figure, rest);
                continue;
            }
            match section {
                Section::Question if split_marker(line, opts).is_some() => {
                    section = Section::Options;
                    option_lines.push(line.into());
                }
                Section::Question => append(&mut question, line),
                Section::Options => option_lines.push(line.into()),
                Section::Figure => append(&mut figure, line),
            }
        }

        if matches!(
            figure.trim().to_ascii_lowercase().as_str(),
            "none" | "-" | "n/a"
        ) {
            figure.clear();
        }

        let options = match canonicalize_options(&option_lines, opts) {
            Ok(block) => CaptionOptions::Parsed { block },
            Err(e) => {
                warnings.push(CaptionWarning::UnparsedOptions(e.to_string()));
                CaptionOptions::Unparsed {
                    lines: option_lines,
                }
            }
        };

        Caption {
            question_text: question,
            options,
            figure_description: figure,
            warnings,
            language,
            stage,
            raw_text: text.into(),
        }
    }

    pub fn option_block(&self) -> Option<&OptionBlock> {
        match &self.options {
            CaptionOptions::Parsed { block } => Some(block),
            CaptionOptions::Unparsed { .. } => None,
        }
    }

    pub fn has_warning(&self, w: &CaptionWarning) -> bool {
        self.warnings.contains(w)
    }

    /// Canonical text handed to the reasoner: normalized `A)`..`E)` labels.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("Question: ");
        out.push_str(&self.question_text);
        out.push('\n');
        match &self.options {
            CaptionOptions::Parsed { block } => {
                for l in block.to_lines() {
                    out.push_str(&l);
                    out.push('\n');
                }
            }
            CaptionOptions::Unparsed { lines } => {
                for l in lines {
                    out.push_str(l);
                    out.push('\n');
                }
            }
        }
        if !self.figure_description.is_empty() {
            out.push_str("Figure: ");
            out.push_str(&self.figure_description);
            out.push('\n');
        }
        out
    }

    pub fn digest(&self) -> String {
        sha256_hex(self.to_text().as_bytes())
    }
}
