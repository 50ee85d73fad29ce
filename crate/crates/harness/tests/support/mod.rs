//! Synthetic manifests and CLI helpers for the harness integration tests.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn mcqa() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mcqa"))
}

pub fn run_mcqa(args: &[&str]) -> Output {
    mcqa()
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("spawn mcqa")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// (language code, question, options separated by '|')
const QUESTIONS: [(&str, &str, &str); 10] = [
    (
        "en",
        "Which gas do plants absorb?",
        "Oxygen|Carbon dioxide|Nitrogen|Helium",
    ),
    (
        "de",
        "Welches Organ pumpt Blut?",
        "A) Lunge|B) Herz|C) Leber",
    ),
    (
        "bg",
        "Кой орган помпа кръв?",
        "А) бял дроб|Б) сърце|В) черен дроб",
    ),
    ("ar", "ما هو أكبر كوكب؟", "أ) المريخ|ب) المشتري|ج) الأرض"),
    ("zh", "水的化学式是什么？", "Ａ）H2O|Ｂ）CO2|Ｃ）O2"),
    ("it", "Quanto fa 3 per 4?", "(A) 7|(B) 12|(C) 14|(D) 9"),
    (
        "pl",
        "Stolica Polski to?",
        "A. Kraków|B. Warszawa|C. Gdańsk",
    ),
    (
        "kk",
        "Күн қандай жұлдыз?",
        "А) қызыл алып|Б) сары ергежейлі|В) ақ ергежейлі",
    ),
    ("hr", "Koliko nogu ima pauk?", "A) 6|B) 8|C) 10"),
    (
        "es",
        "¿Cuál es el símbolo del oro?",
        "A) Ag|B) Au|C) Fe|D) Cu",
    ),
];

const HEADER: &str = "sample_id,subject,type,grade,answer_key,language,image,question,options";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes `n` items cycling through ten languages. Even rows are image
/// items with a small fake PNG; odd rows are text-only.
pub fn write_multilingual(dir: &Path, n: usize) -> PathBuf {
    let images = dir.join("images");
    fs::create_dir_all(&images).unwrap();
    let mut text = String::from(HEADER);
    text.push('\n');
    for i in 0..n {
        let (lang, q, opts) = QUESTIONS[i % QUESTIONS.len()];
        let id = format!("{lang}_{i:03}");
        let visual = i % 2 == 0;
        let image = if visual {
            let name = format!("{id}.png");
            let mut bytes = b"\x89PNG\r\n\x1a\n".to_vec();
            bytes.extend_from_slice(id.as_bytes());
            fs::write(images.join(&name), bytes).unwrap();
            format!("images/{name}")
        } else {
            String::new()
        };
        let key = ["A", "B", "C"][i % 3];
        let row = [
            id.clone(),
            ["physics", "biology", "chemistry"][i % 3].to_string(),
            if visual { "image_text" } else { "text" }.to_string(),
            (4 + i % 9).to_string(),
            key.to_string(),
            lang.to_string(),
            image,
            q.to_string(),
            opts.to_string(),
        ];
        let cells: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    let path = dir.join("manifest.csv");
    fs::write(&path, text).unwrap();
    path
}

/// Text-only items in one language, for expansion tests.
pub fn write_text_manifest(path: &Path, lang: &str, prefix: &str, n: usize) {
    let mut text = String::from(HEADER);
    text.push('\n');
    for i in 0..n {
        let row = [
            format!("{prefix}{i}"),
            "biology".into(),
            "text".into(),
            "8".into(),
            "B".into(),
            lang.into(),
            String::new(),
            format!("{prefix} question {i}"),
            "A) one|B) two|C) three".into(),
        ];
        let cells: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}
