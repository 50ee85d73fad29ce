//! Answer-option marker normalization and answer-letter extraction.
//!
//! Exam sources label options in many ways: `(A)`, `A.`, fullwidth `Ａ）`,
//! circled digits `①`, Cyrillic `Б)`, Arabic `ب)`, or not at all. Everything
//! here maps those surfaces onto [`OptionLabel`] and recovers a single letter
//! from free-form reasoner output.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::label::{AnswerLetter, ExtractionMethod, OptionLabel};

/// Arabic tatweel, written after a final `ه` when it stands alone as a label.
const TATWEEL: char = '\u{0640}';

/// Which alphabet a marker was written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkerSystem {
    Latin,
    Fullwidth,
    Circled,
    Cyrillic,
    Arabic,
    Digit,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerOptions {
    /// Accept `1.`, `2)` ... as option markers. Off by default because
    /// enumerated sub-questions use the same surface.
    pub digit_markers: bool,
}

/// Maps a single code point to the label it stands for in its script.
///
/// Cyrillic follows alphabet order (А Б В Г Д), Arabic follows abjad order
/// (أ ب ج د ه). Note Cyrillic `В` is the third letter and maps to C.
pub fn script_letter(c: char) -> Option<(OptionLabel, MarkerSystem)> {
    use MarkerSystem::*;
    let (index, system) = match c {
        'A'..='E' => (c as u32 - 'A' as u32, Latin),
        'a'..='e' => (c as u32 - 'a' as u32, Latin),
        '\u{FF21}'..='\u{FF25}' => (c as u32 - 0xFF21, Fullwidth),
        '\u{FF41}'..='\u{FF45}' => (c as u32 - 0xFF41, Fullwidth),
        '\u{2460}'..='\u{2464}' => (c as u32 - 0x2460, Circled),
        '\u{0410}'..='\u{0414}' => (c as u32 - 0x0410, Cyrillic),
        '\u{0430}'..='\u{0434}' => (c as u32 - 0x0430, Cyrillic),
        '\u{0623}' | '\u{0627}' => (0, Arabic),
        '\u{0628}' => (1, Arabic),
        '\u{062C}' => (2, Arabic),
        '\u{062F}' => (3, Arabic),
        '\u{0647}' => (4, Arabic),
        '1'..='5' => (c as u32 - '1' as u32, Digit),
        _ => return None,
    };
    OptionLabel::from_index(index as usize).map(|l| (l, system))
}

fn closing_for(open: char) -> &'static [char] {
    match open {
        '(' | '\u{FF08}' => &[')', '\u{FF09}'],
        '[' => &[']'],
        _ => &[],
    }
}

fn is_close(c: char) -> bool {
    matches!(c, ')' | '\u{FF09}' | ']')
}

/// ASCII punctuation that ends a marker only when followed by whitespace
/// (so `e.g.` is not option E).
fn is_ascii_marker_punct(c: char) -> bool {
    matches!(c, '.' | ':' | '-')
}

/// CJK punctuation; text may follow without a space.
fn is_cjk_marker_punct(c: char) -> bool {
    matches!(c, '\u{FF0E}' | '\u{FF1A}' | '\u{3001}')
}

/// A parsed marker at the start of an option line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Marker<'a> {
    pub label: OptionLabel,
    pub system: MarkerSystem,
    /// Remaining option text, leading whitespace removed.
    pub rest: &'a str,
}

/// Splits a leading option marker off `line`.
pub fn split_marker(line: &str, opts: MarkerOptions) -> Option<Marker<'_>> {
    let s = line.trim_start();
    let mut it = s.char_indices().peekable();

    let open = match it.peek() {
        Some(&(_, c)) if matches!(c, '(' | '\u{FF08}' | '[') => {
            it.next();
            Some(c)
        }
        _ => None,
    };

    let (_, core) = it.next()?;
    let (label, system) = script_letter(core)?;
    if system == MarkerSystem::Digit && !opts.digit_markers {
        return None;
    }
    if core == '\u{0647}' {
        if let Some(&(_, TATWEEL)) = it.peek() {
            it.next();
        }
    }

    let end_of = |it: &mut core::iter::Peekable<core::str::CharIndices<'_>>| {
        it.peek().map(|&(i, _)| i).unwrap_or(s.len())
    };

    let mut decorated = false;
    if let Some(open) = open {
        match it.next() {
            Some((_, c)) if closing_for(open).contains(&c) => decorated = true,
            _ => return None,
        }
    } else if let Some(&(_, c)) = it.peek() {
        if is_close(c) {
            it.next();
            decorated = true;
        }
    }

    // optional trailing punctuation, e.g. "(A)." or "A."
    if let Some(&(_, c)) = it.peek() {
        if is_ascii_marker_punct(c) {
            it.next();
            let after = end_of(&mut it);
            let next = s[after..].chars().next();
            if next.is_some_and(|n| !n.is_whitespace()) {
                return None;
            }
            decorated = true;
        } else if is_cjk_marker_punct(c) {
            it.next();
            decorated = true;
        }
    }

    if !decorated && system != MarkerSystem::Circled {
        return None;
    }
    // undecorated circled digits may run straight into text; anything else
    // must be separated from the option text
    let rest_start = end_of(&mut it);
    Some(Marker {
        label,
        system,
        rest: s[rest_start..].trim_start(),
    })
}

/// Canonical label for a complete marker token (`"(A)"`, `"①"`, `"Б)"`).
/// Digit markers are not recognized; see [`normalize_marker_with`].
pub fn normalize_marker(token: &str) -> Option<OptionLabel> {
    normalize_marker_with(token, MarkerOptions::default())
}

pub fn normalize_marker_with(token: &str, opts: MarkerOptions) -> Option<OptionLabel> {
    let m = split_marker(token.trim(), opts)?;
    m.rest.is_empty().then_some(m.label)
}

/// Whether labels came from the source or were assigned by position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelingSource {
    Explicit,
    Positional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionEntry {
    pub label: OptionLabel,
    pub text: String,
}

/// A validated option list: labels run A, B, C, ... with 2 to 5 entries and
/// non-empty texts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionBlock {
    options: Vec<OptionEntry>,
    labeling_source: LabelingSource,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OptionsError {
    #[error("too few options: {found} usable line(s), need at least 2")]
    TooFewOptions { found: usize },
    #[error("too many options: {found}, at most 5 are allowed")]
    TooManyOptions { found: usize },
    #[error("inconsistent labels: option {position} is marked {found}, expected {expected}")]
    InconsistentLabels {
        position: usize,
        expected: OptionLabel,
        found: OptionLabel,
    },
    #[error("line {line} has no option marker but precedes the first marked option")]
    UnlabeledLine { line: usize },
    #[error("option {label} has no text")]
    EmptyOptionText { label: OptionLabel },
}

impl OptionBlock {
    /// Builds a block from texts in order, labeling them A, B, C, ...
    pub fn from_texts<I, S>(texts: I, labeling_source: LabelingSource) -> Result<Self, OptionsError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let texts: Vec<String> = texts.into_iter().map(Into::into).collect();
        if texts.len() < 2 {
            return Err(OptionsError::TooFewOptions { found: texts.len() });
        }
        if texts.len() > OptionLabel::ALL.len() {
            return Err(OptionsError::TooManyOptions { found: texts.len() });
        }
        let mut options = Vec::with_capacity(texts.len());
        for (i, text) in texts.into_iter().enumerate() {
            let label = OptionLabel::ALL[i];
            let text = String::from(text.trim());
            if text.is_empty() {
                return Err(OptionsError::EmptyOptionText { label });
            }
            options.push(OptionEntry { label, text });
        }
        Ok(Self {
            options,
            labeling_source,
        })
    }

    pub fn options(&self) -> &[OptionEntry] {
        &self.options
    }

    pub fn labeling_source(&self) -> LabelingSource {
        self.labeling_source
    }

    pub fn len(&self) -> usize {
        self.options.len()
    }

    pub fn is_empty(&self) -> bool {
        self.options.is_empty()
    }

    pub fn text_of(&self, label: OptionLabel) -> Option<&str> {
        self.options.get(label.index()).map(|o| o.text.as_str())
    }

    /// Canonical rendering, one `X) text` line per option.
    pub fn to_lines(&self) -> Vec<String> {
        self.options
            .iter()
            .map(|o| alloc::format!("{}) {}", o.label, o.text))
            .collect()
    }
}

/// Turns candidate option lines into a labeled [`OptionBlock`].
///
/// With two or more marked lines the markers are used (and must read A, B,
/// C, ... in order, whatever alphabet each is written in); unmarked lines
/// after a marker continue the previous option. Otherwise every non-empty
/// line becomes an option in reading order.
pub fn canonicalize_options<S: AsRef<str>>(
    raw_lines: &[S],
    opts: MarkerOptions,
) -> Result<OptionBlock, OptionsError> {
    let lines: Vec<&str> = raw_lines
        .iter()
        .map(|l| l.as_ref().trim())
        .filter(|l| !l.is_empty())
        .collect();

    let markers: Vec<Option<Marker<'_>>> = lines.iter().map(|l| split_marker(l, opts)).collect();
    let n_marked = markers.iter().filter(|m| m.is_some()).count();

    if n_marked < 2 {
        return OptionBlock::from_texts(lines.iter().copied(), LabelingSource::Positional);
    }

    let mut texts: Vec<String> = Vec::new();
    for (line_no, marker) in markers.iter().enumerate() {
        match marker {
            Some(m) => {
                let position = texts.len();
                let expected =
                    OptionLabel::from_index(position).ok_or(OptionsError::TooManyOptions {
                        found: position + 1,
                    })?;
                if m.label != expected {
                    return Err(OptionsError::InconsistentLabels {
                        position,
                        expected,
                        found: m.label,
                    });
                }
                texts.push(String::from(m.rest));
            }
            None => match texts.last_mut() {
                Some(prev) => {
                    if !prev.is_empty() {
                        prev.push(' ');
                    }
                    prev.push_str(lines[line_no]);
                }
                None => return Err(OptionsError::UnlabeledLine { line: line_no }),
            },
        }
    }
    OptionBlock::from_texts(texts, LabelingSource::Explicit)
}

/// Reasoner output that carried no recoverable letter. The item is scored
/// incorrect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("no answer letter found in model output")]
pub struct NoAnswer;

fn is_markdown_decoration(c: char) -> bool {
    c.is_whitespace() || matches!(c, '*' | '_' | '`' | '#' | '.')
}

/// Han, kana and hangul run together without spaces, so they do not make a
/// neighbouring Latin letter part of a word.
fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3040..=0x30FF | 0x3400..=0x4DBF | 0x4E00..=0x9FFF | 0xAC00..=0xD7AF
        | 0xF900..=0xFAFF | 0x20000..=0x2FA1F)
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() && !is_cjk(c)
}

/// Last standalone occurrence of a character accepted by `map`.
fn scan_last<F>(text: &str, map: F) -> Option<OptionLabel>
where
    F: Fn(char) -> Option<OptionLabel>,
{
    let chars: Vec<char> = text.chars().collect();
    let mut found = None;
    for (i, &c) in chars.iter().enumerate() {
        let Some(label) = map(c) else { continue };
        let before_ok = i == 0 || !is_word_char(chars[i - 1]);
        let mut after = i + 1;
        if c == '\u{0647}' && chars.get(after) == Some(&TATWEEL) {
            after += 1;
        }
        let after_ok = chars.get(after).is_none_or(|&n| !is_word_char(n));
        if before_ok && after_ok {
            found = Some(label);
        }
    }
    found
}

/// Letters recognized by the last-resort script scan. Lowercase Cyrillic is
/// excluded because `а` is a common conjunction.
fn scan_script_letter(c: char) -> Option<OptionLabel> {
    match script_letter(c)? {
        (l, MarkerSystem::Fullwidth) if c.is_uppercase() => Some(l),
        (l, MarkerSystem::Cyrillic) if c.is_uppercase() => Some(l),
        (l, MarkerSystem::Arabic | MarkerSystem::Circled) => Some(l),
        _ => None,
    }
}

/// Recovers the answer letter from raw reasoner output.
///
/// 1. After trimming whitespace and markdown decorations (`* _ ` # .`), a lone
///    `A`–`E` (either case) is an [`ExtractionMethod::Exact`] answer.
/// 2. Otherwise the last standalone uppercase `A`–`E` wins
///    ([`ExtractionMethod::FallbackScan`]); chain-of-thought overflow tends
///    to end with its conclusion.
/// 3. Otherwise Cyrillic, Arabic, circled and fullwidth letters are mapped
///    and the same two rules are retried ([`ExtractionMethod::ScriptMapped`]).
pub fn extract_answer_letter(raw_output: &str) -> Result<AnswerLetter, NoAnswer> {
    let trimmed = raw_output.trim_matches(is_markdown_decoration);
    let mut chars = trimmed.chars();
    let first = chars.next();
    let second = chars.next();
    let third = chars.next();

    if let (Some(c), None) = (first, second) {
        if let Some(l) = OptionLabel::from_ascii_upper(c.to_ascii_uppercase()) {
            return Ok(AnswerLetter::new(l, ExtractionMethod::Exact));
        }
    }

    if let Some(l) = scan_last(raw_output, OptionLabel::from_ascii_upper) {
        return Ok(AnswerLetter::new(l, ExtractionMethod::FallbackScan));
    }

    let lone_script = match (first, second, third) {
        (Some(c), None, _) | (Some(c @ '\u{0647}'), Some(TATWEEL), None) => script_letter(c)
            .filter(|(_, sys)| *sys != MarkerSystem::Digit && *sys != MarkerSystem::Latin)
            .map(|(l, _)| l),
        _ => None,
    };
    if let Some(l) = lone_script.or_else(|| scan_last(raw_output, scan_script_letter)) {
        return Ok(AnswerLetter::new(l, ExtractionMethod::ScriptMapped));
    }
    Err(NoAnswer)
}

/// Returns the label only when the output is exactly one uppercase `A`–`E`
/// after trimming whitespace. Markdown, punctuation and prose all fail.
pub fn strip_and_validate_strict(raw_output: &str) -> Option<OptionLabel> {
    raw_output.trim().parse().ok()
}
