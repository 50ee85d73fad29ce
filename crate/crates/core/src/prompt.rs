//! Versioned prompt templates and stage prompt rendering.
//!
//! Template files carry a small front-matter block, the body, and optional
//! worked examples:
//!
//! ```text
//! ---
//! role: describer
//! version: fewshot-v1
//! shots: 1
//! ---
//! body with {language} and {metadata} placeholders
//! === shot ===
//! >>> input
//! ...
//! >>> output
//! ...
//! ```
//!
//! Substitution is a single literal splice: bound values are never scanned
//! for placeholders, so captions containing `{` are inert.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::item::ExamItem;
use crate::request::Role;
use crate::script::Language;

/// Placeholders a template body may use.
pub const PLACEHOLDERS: [&str; 4] = ["caption", "language", "metadata", "source_language"];

const SHOT_SEPARATOR: &str = "=== shot ===";
const SHOT_INPUT: &str = ">>> input";
const SHOT_OUTPUT: &str = ">>> output";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("malformed template: {0}")]
    BadTemplate(String),
    #[error("unknown placeholder {{{0}}} in template")]
    UnknownPlaceholder(String),
    #[error("placeholder {{{0}}} is not bound")]
    UnboundPlaceholder(String),
    #[error("caption is empty")]
    EmptyCaption,
    #[error("expected a {expected} template, got {found}")]
    RoleMismatch { expected: Role, found: Role },
    #[error("reasoner templates are zero-shot, found {0} shot(s)")]
    ReasonerShots(usize),
}

/// One worked example prepended to a few-shot prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shot {
    pub input: String,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Literal(String),
    Placeholder(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub role: Role,
    pub version: String,
    pub shots: Vec<Shot>,
    body: String,
    segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub text: String,
    pub role: Role,
    pub template_version: String,
    pub bound_values: BTreeMap<String, String>,
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase() || b == b'_')
}

fn segment(body: &str) -> Result<Vec<Segment>, PromptError> {
    let mut segments = Vec::new();
    let mut literal = String::new();
    let mut rest = body;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let name = after
            .find('}')
            .map(|close| &after[..close])
            .filter(|n| is_ident(n));
        match name {
            Some(name) => {
                let known = PLACEHOLDERS
                    .iter()
                    .find(|p| **p == name)
                    .ok_or_else(|| PromptError::UnknownPlaceholder(name.into()))?;
                literal.push_str(&rest[..open]);
                if !literal.is_empty() {
                    segments.push(Segment::Literal(core::mem::take(&mut literal)));
                }
                segments.push(Segment::Placeholder(known));
                rest = &after[name.len() + 1..];
            }
            None => {
                literal.push_str(&rest[..=open]);
                rest = after;
            }
        }
    }
    literal.push_str(rest);
    if !literal.is_empty() {
        segments.push(Segment::Literal(literal));
    }
    Ok(segments)
}

fn parse_shots(text: &str) -> Result<Vec<Shot>, PromptError> {
    let mut shots = Vec::new();
    for chunk in text.split(SHOT_SEPARATOR).skip(1) {
        let chunk = chunk.trim_matches('\n');
        let body = chunk.strip_prefix(SHOT_INPUT).ok_or_else(|| {
            PromptError::BadTemplate(format!("shot must start with {SHOT_INPUT:?}"))
        })?;
        let (input, output) = body
            .split_once(SHOT_OUTPUT)
            .ok_or_else(|| PromptError::BadTemplate(format!("shot lacks {SHOT_OUTPUT:?}")))?;
        shots.push(Shot {
            input: input.trim_matches('\n').into(),
            output: output.trim_matches('\n').into(),
        });
    }
    Ok(shots)
}

impl PromptTemplate {
    pub fn new(
        role: Role,
        version: impl Into<String>,
        body: impl Into<String>,
        shots: Vec<Shot>,
    ) -> Result<Self, PromptError> {
        let body = body.into();
        if role == Role::Reasoner && !shots.is_empty() {
            return Err(PromptError::ReasonerShots(shots.len()));
        }
        let segments = segment(&body)?;
        Ok(Self {
            role,
            version: version.into(),
            shots,
            body,
            segments,
        })
    }

    /// Parses a template file (front-matter, body, shots).
    pub fn parse(source: &str) -> Result<Self, PromptError> {
        let bad = |m: &str| PromptError::BadTemplate(m.into());
        let source = source.strip_prefix('\u{feff}').unwrap_or(source);
        let rest = source
            .strip_prefix("---\n")
            .ok_or_else(|| bad("missing front-matter"))?;
        let end = rest
            .find("\n---\n")
            .ok_or_else(|| bad("unterminated front-matter"))?;
        let (front, after) = (&rest[..end], &rest[end + 5..]);

        let mut fields = BTreeMap::new();
        for line in front.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| bad("front-matter lines must be key: value"))?;
            fields.insert(k.trim(), v.trim());
        }
        let role: Role = fields
            .get("role")
            .ok_or_else(|| bad("front-matter lacks role"))?
            .parse()
            .map_err(|_| bad("unknown role"))?;
        let version = fields
            .get("version")
            .filter(|v| !v.is_empty())
            .ok_or_else(|| bad("front-matter lacks version"))?;
        let declared_shots: usize = match fields.get("shots") {
            Some(n) => n.parse().map_err(|_| bad("shots must be an integer"))?,
            None => 0,
        };

        let (body, shot_text) = match after.find(SHOT_SEPARATOR) {
            Some(i) => (&after[..i], &after[i..]),
            None => (after, ""),
        };
        let shots = parse_shots(shot_text)?;
        if shots.len() != declared_shots {
            return Err(PromptError::BadTemplate(format!(
                "front-matter declares {declared_shots} shot(s), file has {}",
                shots.len()
            )));
        }
        Self::new(role, *version, body.trim_end_matches('\n'), shots)
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    pub fn placeholders(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.segments.iter().filter_map(|s| match s {
            Segment::Placeholder(p) => Some(*p),
            Segment::Literal(_) => None,
        })
    }

    fn expect_role(&self, role: Role) -> Result<(), PromptError> {
        if self.role != role {
            return Err(PromptError::RoleMismatch {
                expected: role,
                found: self.role,
            });
        }
        Ok(())
    }

    /// Splices `bindings` into the body. Every placeholder used by the body
    /// must be bound; extra bindings are ignored.
    pub fn render(
        &self,
        bindings: &[(&str, &str)],
        shots: &[Shot],
    ) -> Result<RenderedPrompt, PromptError> {
        let lookup = |name: &str| bindings.iter().find(|(k, _)| *k == name).map(|(_, v)| *v);
        let mut text = String::new();
        for (i, shot) in shots.iter().enumerate() {
            text.push_str(&format!(
                "Example {}:\nInput:\n{}\nOutput:\n{}\n\n",
                i + 1,
                shot.input,
                shot.output
            ));
        }
        let mut bound_values = BTreeMap::new();
        for seg in &self.segments {
            match seg {
                Segment::Literal(l) => text.push_str(l),
                Segment::Placeholder(name) => {
                    let v = lookup(name)
                        .ok_or_else(|| PromptError::UnboundPlaceholder((*name).into()))?;
                    text.push_str(v);
                    bound_values.insert((*name).to_string(), v.to_string());
                }
            }
        }
        Ok(RenderedPrompt {
            text,
            role: self.role,
            template_version: self.version.clone(),
            bound_values,
        })
    }
}

/// Templates compiled into the crate, as `(file name, source)`.
pub const BUILTIN_SOURCES: [(&str, &str); 5] = [
    (
        "describer.fewshot-v1.txt",
        include_str!("../templates/describer.fewshot-v1.txt"),
    ),
    (
        "aggregator.verify-v1.txt",
        include_str!("../templates/aggregator.verify-v1.txt"),
    ),
    (
        "reasoner.strict-letter-only-v1.txt",
        include_str!("../templates/reasoner.strict-letter-only-v1.txt"),
    ),
    (
        "reasoner.long-descriptive-v1.txt",
        include_str!("../templates/reasoner.long-descriptive-v1.txt"),
    ),
    (
        "translator.translate-v1.txt",
        include_str!("../templates/translator.translate-v1.txt"),
    ),
];

pub const DEFAULT_DESCRIBER: &str = "fewshot-v1";
pub const DEFAULT_AGGREGATOR: &str = "verify-v1";
pub const STRICT_REASONER: &str = "strict-letter-only-v1";
pub const LONG_REASONER: &str = "long-descriptive-v1";
pub const DEFAULT_TRANSLATOR: &str = "translate-v1";

pub fn builtin(role: Role, version: &str) -> Option<PromptTemplate> {
    BUILTIN_SOURCES
        .iter()
        .filter_map(|(_, src)| PromptTemplate::parse(src).ok())
        .find(|t| t.role == role && t.version == version)
}

pub fn default_version(role: Role) -> &'static str {
    match role {
        Role::Describer => DEFAULT_DESCRIBER,
        Role::Aggregator => DEFAULT_AGGREGATOR,
        Role::Reasoner => STRICT_REASONER,
        Role::Translator => DEFAULT_TRANSLATOR,
    }
}

/// One template per role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    pub describer: PromptTemplate,
    pub aggregator: PromptTemplate,
    pub reasoner: PromptTemplate,
    pub translator: PromptTemplate,
}

impl Default for TemplateSet {
    fn default() -> Self {
        let get = |r| builtin(r, default_version(r)).expect("builtin templates parse");
        Self {
            describer: get(Role::Describer),
            aggregator: get(Role::Aggregator),
            reasoner: get(Role::Reasoner),
            translator: get(Role::Translator),
        }
    }
}

impl TemplateSet {
    pub fn get(&self, role: Role) -> &PromptTemplate {
        match role {
            Role::Describer => &self.describer,
            Role::Aggregator => &self.aggregator,
            Role::Reasoner => &self.reasoner,
            Role::Translator => &self.translator,
        }
    }

    /// Replaces the template for its role.
    pub fn set(&mut self, t: PromptTemplate) {
        match t.role {
            Role::Describer => self.describer = t,
            Role::Aggregator => self.aggregator = t,
            Role::Reasoner => self.reasoner = t,
            Role::Translator => self.translator = t,
        }
    }
}

/// Item metadata block shared by the describer and aggregator prompts.
pub fn format_metadata(item: &ExamItem) -> String {
    let mut out = format!(
        "- sample_id: {}\n- subject: {}\n- grade: {}\n- language: {} ({})\n- type: {}",
        item.sample_id,
        item.subject,
        item.grade,
        item.language.name(),
        item.language.code(),
        item.item_type.as_str()
    );
    for (k, v) in &item.metadata {
        out.push_str(&format!("\n- {k}: {v}"));
    }
    out
}

pub fn render_describer(
    t: &PromptTemplate,
    item: &ExamItem,
    shots: &[Shot],
) -> Result<RenderedPrompt, PromptError> {
    t.expect_role(Role::Describer)?;
    let metadata = format_metadata(item);
    t.render(
        &[("language", item.language.name()), ("metadata", &metadata)],
        shots,
    )
}

pub fn render_aggregator(
    t: &PromptTemplate,
    item: &ExamItem,
    draft_caption: &str,
) -> Result<RenderedPrompt, PromptError> {
    t.expect_role(Role::Aggregator)?;
    if draft_caption.trim().is_empty() {
        return Err(PromptError::EmptyCaption);
    }
    let metadata = format_metadata(item);
    t.render(
        &[
            ("caption", draft_caption),
            ("language", item.language.name()),
            ("metadata", &metadata),
        ],
        &[],
    )
}

pub fn render_reasoner(t: &PromptTemplate, caption: &str) -> Result<RenderedPrompt, PromptError> {
    t.expect_role(Role::Reasoner)?;
    if caption.trim().is_empty() {
        return Err(PromptError::EmptyCaption);
    }
    t.render(&[("caption", caption)], &[])
}

pub fn render_translator(
    t: &PromptTemplate,
    source_text: &str,
    source: Language,
    target: Language,
) -> Result<RenderedPrompt, PromptError> {
    t.expect_role(Role::Translator)?;
    if source_text.trim().is_empty() {
        return Err(PromptError::EmptyCaption);
    }
    t.render(
        &[
            ("caption", source_text),
            ("language", target.name()),
            ("source_language", source.name()),
        ],
        &[],
    )
}
