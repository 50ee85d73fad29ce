//! Canonical choice identifiers.

use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

/// One of the five canonical answer options. No other value is constructible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OptionLabel {
    A,
    B,
    C,
    D,
    E,
}

impl OptionLabel {
    pub const ALL: [OptionLabel; 5] = [
        OptionLabel::A,
        OptionLabel::B,
        OptionLabel::C,
        OptionLabel::D,
        OptionLabel::E,
    ];

    /// Zero-based ordinal position (A = 0).
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn as_char(self) -> char {
        (b'A' + self as u8) as char
    }

    /// Maps an uppercase ASCII letter `A..=E`.
    pub fn from_ascii_upper(c: char) -> Option<Self> {
        match c {
            'A'..='E' => Self::from_index(c as usize - 'A' as usize),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OptionLabel::A => "A",
            OptionLabel::B => "B",
            OptionLabel::C => "C",
            OptionLabel::D => "D",
            OptionLabel::E => "E",
        }
    }
}

impl fmt::Display for OptionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not an option label: {0:?}")]
pub struct ParseLabelError(pub alloc::string::String);

impl FromStr for OptionLabel {
    type Err = ParseLabelError;

    /// Accepts exactly one uppercase letter `A..=E`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Self::from_ascii_upper(c).ok_or_else(|| ParseLabelError(s.into())),
            _ => Err(ParseLabelError(s.into())),
        }
    }
}

/// How an answer letter was recovered from raw model output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMethod {
    /// The output was a lone letter once decorations were trimmed.
    Exact,
    /// Last standalone Latin letter in a longer response.
    FallbackScan,
    /// Recovered through a Cyrillic, Arabic, circled or fullwidth letter map.
    ScriptMapped,
}

impl ExtractionMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtractionMethod::Exact => "exact",
            ExtractionMethod::FallbackScan => "fallback_scan",
            ExtractionMethod::ScriptMapped => "script_mapped",
        }
    }
}

/// An extracted answer together with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerLetter {
    pub value: OptionLabel,
    pub extraction_method: ExtractionMethod,
}

impl AnswerLetter {
    pub fn new(value: OptionLabel, extraction_method: ExtractionMethod) -> Self {
        Self {
            value,
            extraction_method,
        }
    }
}
