//! Writing-system detection and the language/script compatibility table.

use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

/// Supported exam languages (ISO 639-1). Covers every language that appears
/// in either the dataset statistics or the leaderboard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Language {
    #[serde(rename = "en")]
    English,
    #[serde(rename = "zh")]
    Chinese,
    #[serde(rename = "fr")]
    French,
    #[serde(rename = "de")]
    German,
    #[serde(rename = "it")]
    Italian,
    #[serde(rename = "ar")]
    Arabic,
    #[serde(rename = "pl")]
    Polish,
    #[serde(rename = "hu")]
    Hungarian,
    #[serde(rename = "bg")]
    Bulgarian,
    #[serde(rename = "hr")]
    Croatian,
    #[serde(rename = "sr")]
    Serbian,
    #[serde(rename = "es")]
    Spanish,
    #[serde(rename = "ur")]
    Urdu,
    #[serde(rename = "kk")]
    Kazakh,
}

impl Language {
    pub const ALL: [Language; 14] = [
        Language::English,
        Language::Chinese,
        Language::French,
        Language::German,
        Language::Italian,
        Language::Arabic,
        Language::Polish,
        Language::Hungarian,
        Language::Bulgarian,
        Language::Croatian,
        Language::Serbian,
        Language::Spanish,
        Language::Urdu,
        Language::Kazakh,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Language::English => "en",
            Language::Chinese => "zh",
            Language::French => "fr",
            Language::German => "de",
            Language::Italian => "it",
            Language::Arabic => "ar",
            Language::Polish => "pl",
            Language::Hungarian => "hu",
            Language::Bulgarian => "bg",
            Language::Croatian => "hr",
            Language::Serbian => "sr",
            Language::Spanish => "es",
            Language::Urdu => "ur",
            Language::Kazakh => "kk",
        }
    }

    /// English name, as used in prompts and report rows.
    pub fn name(self) -> &'static str {
        match self {
            Language::English => "English",
            Language::Chinese => "Chinese",
            Language::French => "French",
            Language::German => "German",
            Language::Italian => "Italian",
            Language::Arabic => "Arabic",
            Language::Polish => "Polish",
            Language::Hungarian => "Hungarian",
            Language::Bulgarian => "Bulgarian",
            Language::Croatian => "Croatian",
            Language::Serbian => "Serbian",
            Language::Spanish => "Spanish",
            Language::Urdu => "Urdu",
            Language::Kazakh => "Kazakh",
        }
    }

    pub fn family(self) -> &'static str {
        match self {
            Language::English | Language::German => "Germanic",
            Language::Chinese => "Sino-Tibetan",
            Language::French | Language::Italian | Language::Spanish => "Romance",
            Language::Arabic => "Semitic",
            Language::Polish | Language::Bulgarian | Language::Croatian | Language::Serbian => {
                "Slavic"
            }
            Language::Hungarian => "Finno-Ugric",
            Language::Urdu => "Indo-Aryan",
            Language::Kazakh => "Turkic",
        }
    }

    /// Scripts this language is normally printed in.
    pub fn scripts(self) -> &'static [Script] {
        match self {
            Language::English
            | Language::German
            | Language::Italian
            | Language::Spanish
            | Language::Polish
            | Language::Croatian
            | Language::French
            | Language::Hungarian => &[Script::Latin],
            Language::Bulgarian | Language::Kazakh => &[Script::Cyrillic],
            Language::Serbian => &[Script::Cyrillic, Script::Latin],
            Language::Arabic | Language::Urdu => &[Script::Arabic],
            Language::Chinese => &[Script::Han],
        }
    }

    pub fn accepts_script(self, script: Script) -> bool {
        self.scripts().contains(&script)
    }

    /// Parses an ISO code or an English language name, case-insensitively.
    pub fn lookup(s: &str) -> Option<Language> {
        let s = s.trim();
        Self::ALL
            .iter()
            .copied()
            .find(|l| l.code().eq_ignore_ascii_case(s) || l.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unsupported language code {0:?}")]
pub struct UnknownLanguage(pub alloc::string::String);

impl FromStr for Language {
    type Err = UnknownLanguage;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::lookup(s).ok_or_else(|| UnknownLanguage(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Script {
    Latin,
    Cyrillic,
    Arabic,
    Han,
    Other,
}

impl Script {
    const COUNTED: [Script; 5] = [
        Script::Latin,
        Script::Cyrillic,
        Script::Arabic,
        Script::Han,
        Script::Other,
    ];

    fn slot(self) -> usize {
        self as usize
    }
}

/// Script of an alphabetic code point. Non-alphabetic input is `None`.
pub fn classify_char(c: char) -> Option<Script> {
    if !c.is_alphabetic() {
        return None;
    }
    let script = match c as u32 {
        0x0041..=0x024F | 0x1E00..=0x1EFF | 0xFF21..=0xFF3A | 0xFF41..=0xFF5A => Script::Latin,
        0x0400..=0x052F | 0x1C80..=0x1C8F | 0x2DE0..=0x2DFF | 0xA640..=0xA69F => Script::Cyrillic,
        0x0600..=0x06FF | 0x0750..=0x077F | 0x08A0..=0x08FF | 0xFB50..=0xFDFF | 0xFE70..=0xFEFF => {
            Script::Arabic
        }
        0x3400..=0x4DBF | 0x4E00..=0x9FFF | 0xF900..=0xFAFF | 0x20000..=0x2FA1F => Script::Han,
        _ => Script::Other,
    };
    Some(script)
}

/// Alphabetic code-point counts per script. Digits, punctuation and
/// whitespace are not counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScriptCounts {
    counts: [usize; 5],
}

impl ScriptCounts {
    pub fn of(text: &str) -> Self {
        let mut counts = [0usize; 5];
        for s in text.chars().filter_map(classify_char) {
            counts[s.slot()] += 1;
        }
        Self { counts }
    }

    pub fn get(&self, script: Script) -> usize {
        self.counts[script.slot()]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// The script holding at least half of all alphabetic code points.
    /// Ties at exactly 50% go to the first script in declaration order.
    pub fn dominant(&self) -> Option<Script> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        Script::COUNTED
            .iter()
            .copied()
            .filter(|s| 2 * self.get(*s) >= total)
            .max_by_key(|s| (self.get(*s), core::cmp::Reverse(s.slot())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warn,
    Error,
}

/// Printed text whose script does not fit the declared language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MismatchFlag {
    pub sample_id: alloc::string::String,
    pub declared_language: Language,
    pub dominant_script: Script,
    pub severity: Severity,
}

/// Share (in percent) of alphabetic characters at or above which a mismatch
/// is an error rather than a warning.
pub const MISMATCH_ERROR_PERCENT: usize = 80;

/// Flags `text` when a script incompatible with `declared` supplies at least
/// half of its alphabetic characters. Nothing is flagged while the declared
/// language's own scripts reach 50%.
pub fn script_mismatch(declared: Language, text: &str) -> Option<(Script, Severity)> {
    let counts = ScriptCounts::of(text);
    let total = counts.total();
    if total == 0 {
        return None;
    }
    let compatible: usize = declared.scripts().iter().map(|s| counts.get(*s)).sum();
    if 2 * compatible >= total {
        return None;
    }
    let dominant = counts.dominant()?;
    if declared.accepts_script(dominant) {
        return None;
    }
    let severity = if 100 * counts.get(dominant) >= MISMATCH_ERROR_PERCENT * total {
        Severity::Error
    } else {
        Severity::Warn
    };
    Some((dominant, severity))
}
