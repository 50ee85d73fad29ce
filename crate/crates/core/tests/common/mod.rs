//! Reference implementations and fixture helpers shared by the core
//! integration tests and the harness acceptance suite.
//!
//! The oracles here are deliberately naive: they walk strings by index and
//! compare against literal tables instead of reusing any library code.

#![allow(dead_code)]

use std::path::PathBuf;

/// `crates/core/tests`, whichever crate includes this module.
pub fn core_tests_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("core")
        .join("tests")
}

pub fn fixture(name: &str) -> PathBuf {
    core_tests_dir().join("fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    core_tests_dir().join("golden").join(name)
}

/// Splits a comma-separated fixture into header and rows. Fixture fields
/// never contain commas or quotes.
pub fn read_simple_csv(name: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(fixture(name)).expect("fixture readable");
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let split = |l: &str| {
        l.split(',')
            .map(|c| c.trim().to_string())
            .collect::<Vec<_>>()
    };
    let header = split(lines.next().expect("header"));
    (header, lines.map(split).collect())
}

pub const LATIN: [char; 5] = ['A', 'B', 'C', 'D', 'E'];
pub const LATIN_LOWER: [char; 5] = ['a', 'b', 'c', 'd', 'e'];
pub const FULLWIDTH: [char; 5] = ['Ａ', 'Ｂ', 'Ｃ', 'Ｄ', 'Ｅ'];
pub const FULLWIDTH_LOWER: [char; 5] = ['ａ', 'ｂ', 'ｃ', 'ｄ', 'ｅ'];
pub const CIRCLED: [char; 5] = ['①', '②', '③', '④', '⑤'];
pub const CYRILLIC: [char; 5] = ['А', 'Б', 'В', 'Г', 'Д'];
pub const CYRILLIC_LOWER: [char; 5] = ['а', 'б', 'в', 'г', 'д'];
/// Abjad order; the last letter is written with a trailing tatweel.
pub const ARABIC: [&str; 5] = ["أ", "ب", "ج", "د", "هـ"];
pub const TATWEEL: char = 'ـ';

fn position<T: PartialEq>(table: &[T], x: &T) -> Option<usize> {
    table.iter().position(|t| t == x)
}

fn cjk(c: char) -> bool {
    let u = c as u32;
    (0x3040..=0x30FF).contains(&u)
        || (0x3400..=0x4DBF).contains(&u)
        || (0x4E00..=0x9FFF).contains(&u)
        || (0xAC00..=0xD7AF).contains(&u)
        || (0xF900..=0xFAFF).contains(&u)
        || (0x20000..=0x2FA1F).contains(&u)
}

fn wordy(c: Option<&char>) -> bool {
    match c {
        Some(&c) => c.is_alphanumeric() && !cjk(c),
        None => false,
    }
}

/// Arabic letters accepted by the script map, including bare alef.
fn arabic_index(c: char) -> Option<usize> {
    match c {
        'أ' | 'ا' => Some(0),
        'ب' => Some(1),
        'ج' => Some(2),
        'د' => Some(3),
        'ه' => Some(4),
        _ => None,
    }
}

/// Index of a letter the script scan accepts anywhere in text.
fn scanned_script_index(c: char) -> Option<usize> {
    position(&CYRILLIC, &c)
        .or_else(|| position(&FULLWIDTH, &c))
        .or_else(|| position(&CIRCLED, &c))
        .or_else(|| arabic_index(c))
}

/// Index of a letter accepted when it is the whole (trimmed) output.
fn lone_script_index(c: char) -> Option<usize> {
    scanned_script_index(c)
        .or_else(|| position(&CYRILLIC_LOWER, &c))
        .or_else(|| position(&FULLWIDTH_LOWER, &c))
}

/// Last index in `chars` where `pick` accepts a letter with non-word
/// characters (or string ends) on both sides.
fn last_standalone(chars: &[char], pick: impl Fn(char) -> Option<usize>) -> Option<usize> {
    let mut i = chars.len();
    while i > 0 {
        i -= 1;
        let Some(idx) = pick(chars[i]) else { continue };
        let mut end = i + 1;
        if chars[i] == 'ه' && chars.get(end) == Some(&TATWEEL) {
            end += 1;
        }
        let left = if i == 0 { None } else { chars.get(i - 1) };
        if !wordy(left) && !wordy(chars.get(end)) {
            return Some(idx);
        }
    }
    None
}

/// Brute-force answer extractor: returns the letter and the method name.
pub fn oracle_extract(raw: &str) -> Option<(char, &'static str)> {
    let deco = |c: char| c.is_whitespace() || "*_`#.".contains(c);
    let mut core: Vec<char> = raw.chars().collect();
    while core.first().is_some_and(|c| deco(*c)) {
        core.remove(0);
    }
    while core.last().is_some_and(|c| deco(*c)) {
        core.pop();
    }

    if core.len() == 1 {
        let up = core[0].to_ascii_uppercase();
        if let Some(i) = position(&LATIN, &up) {
            return Some((LATIN[i], "exact"));
        }
    }

    let all: Vec<char> = raw.chars().collect();
    if let Some(i) = last_standalone(&all, |c| position(&LATIN, &c)) {
        return Some((LATIN[i], "fallback_scan"));
    }

    let lone = match core.as_slice() {
        [c] => lone_script_index(*c),
        ['ه', TATWEEL] => Some(4),
        _ => None,
    };
    if let Some(i) = lone.or_else(|| last_standalone(&all, scanned_script_index)) {
        return Some((LATIN[i], "script_mapped"));
    }
    None
}

/// Strict contract: exactly one uppercase A-E after trimming whitespace.
pub fn oracle_strict(raw: &str) -> Option<char> {
    let t: Vec<char> = raw.trim().chars().collect();
    match t.as_slice() {
        [c] if LATIN.contains(c) => Some(*c),
        _ => None,
    }
}

/// Per-item comparison: a prediction scores only when it exists and equals
/// the key. Returns (correct, total).
pub fn oracle_score(gold: &[(String, char)], preds: &[(String, Option<char>)]) -> (u64, u64) {
    let mut correct = 0;
    for (id, key) in gold {
        let mut hit = false;
        for (pid, p) in preds {
            if pid == id && *p == Some(*key) {
                hit = true;
            }
        }
        if hit {
            correct += 1;
        }
    }
    (correct, gold.len() as u64)
}

/// Rounds `correct / total` to hundredths of a percent, half away from zero.
pub fn oracle_percent_hundredths(correct: u64, total: u64) -> i64 {
    let num = correct as i128 * 10_000 * 2 + total as i128;
    (num / (2 * total as i128)) as i64
}

/// Δ = system − baseline on two-decimal strings, computed in integer
/// hundredths and printed with an explicit sign.
pub fn oracle_delta(baseline: &str, system: &str) -> String {
    let h = |s: &str| -> i64 {
        let (int, frac) = s.split_once('.').unwrap_or((s, "0"));
        let frac = format!("{frac:0<2}");
        int.parse::<i64>().unwrap() * 100 + frac[..2].parse::<i64>().unwrap()
    };
    let d = h(system) - h(baseline);
    let sign = if d < 0 { "-" } else { "+" };
    format!("{sign}{}.{:02}", d.abs() / 100, d.abs() % 100)
}

/// Published Δ column for the system row fixture, in fixture order.
pub const PUBLISHED_DELTAS: [(&str, &str); 13] = [
    ("Multilingual", "+54.39"),
    ("Arabic", "+40.54"),
    ("Chinese", "+56.27"),
    ("German", "+58.14"),
    ("Italian", "+67.98"),
    ("Spanish", "+40.42"),
    ("Urdu", "+50.56"),
    ("Serbian", "+47.78"),
    ("Croatian", "+67.98"),
    ("Polish", "+52.90"),
    ("Kazakh", "+54.10"),
    ("English", "+61.72"),
    ("Bulgarian", "+50.50"),
];

/// One marker surface: how label index `i` is written.
pub struct MarkerForm {
    pub name: &'static str,
    pub render: fn(usize) -> String,
}

pub fn marker_forms() -> Vec<MarkerForm> {
    fn arabic(i: usize) -> String {
        ARABIC[i].to_string()
    }
    vec![
        MarkerForm {
            name: "paren",
            render: |i| format!("({})", LATIN[i]),
        },
        MarkerForm {
            name: "dot",
            render: |i| format!("{}.", LATIN[i]),
        },
        MarkerForm {
            name: "close",
            render: |i| format!("{})", LATIN[i]),
        },
        MarkerForm {
            name: "colon",
            render: |i| format!("{}:", LATIN[i]),
        },
        MarkerForm {
            name: "lower_close",
            render: |i| format!("{})", LATIN_LOWER[i]),
        },
        MarkerForm {
            name: "bracket",
            render: |i| format!("[{}]", LATIN[i]),
        },
        MarkerForm {
            name: "paren_dot",
            render: |i| format!("({}).", LATIN[i]),
        },
        MarkerForm {
            name: "fullwidth_close",
            render: |i| format!("{}）", FULLWIDTH[i]),
        },
        MarkerForm {
            name: "fullwidth_paren",
            render: |i| format!("（{}）", FULLWIDTH[i]),
        },
        MarkerForm {
            name: "fullwidth_dot",
            render: |i| format!("{}．", FULLWIDTH[i]),
        },
        MarkerForm {
            name: "ideographic_comma",
            render: |i| format!("{}、", LATIN[i]),
        },
        MarkerForm {
            name: "circled",
            render: |i| CIRCLED[i].to_string(),
        },
        MarkerForm {
            name: "cyrillic_close",
            render: |i| format!("{})", CYRILLIC[i]),
        },
        MarkerForm {
            name: "cyrillic_dot",
            render: |i| format!("{}.", CYRILLIC[i]),
        },
        MarkerForm {
            name: "cyrillic_lower_close",
            render: |i| format!("{})", CYRILLIC_LOWER[i]),
        },
        MarkerForm {
            name: "arabic_close",
            render: |i| format!("{})", arabic(i)),
        },
        MarkerForm {
            name: "arabic_paren",
            render: |i| format!("({})", arabic(i)),
        },
    ]
}

/// Digit forms, recognized only with digit markers switched on.
pub fn digit_forms() -> Vec<MarkerForm> {
    vec![
        MarkerForm {
            name: "digit_dot",
            render: |i| format!("{}.", i + 1),
        },
        MarkerForm {
            name: "digit_close",
            render: |i| format!("{})", i + 1),
        },
    ]
}
