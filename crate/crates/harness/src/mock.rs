//! Deterministic offline backend.
//!
//! Every output is a function of `(seed, role, prompt, image)`. The
//! describer returns a canned caption, the aggregator passes the draft
//! through, the reasoner picks a letter by hash and the translator echoes
//! its source with a tag. Misbehavior modes exercise answer extraction.

use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use mcqa_core::{ModelRequest, OptionLabel, Role};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::client::{Backend, BackendFailure};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Misbehavior {
    #[default]
    None,
    /// "The answer is B."
    Overflow,
    /// Cyrillic letter instead of Latin.
    Cyrillic,
    Empty,
    /// "**B**"
    Markdown,
    /// A per-request mix of all of the above.
    Mixed,
}

impl FromStr for Misbehavior {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "none" => Misbehavior::None,
            "overflow" => Misbehavior::Overflow,
            "cyrillic" => Misbehavior::Cyrillic,
            "empty" => Misbehavior::Empty,
            "markdown" => Misbehavior::Markdown,
            "mixed" => Misbehavior::Mixed,
            other => return Err(format!("unknown misbehavior {other:?}")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MockCall {
    /// Global call order across threads.
    pub seq: u64,
    pub role: Role,
    pub prompt: String,
    pub has_image: bool,
    pub output: Result<String, BackendFailure>,
}

pub struct MockBackend {
    seed: u64,
    misbehavior: Misbehavior,
    fail_on: Vec<(String, BackendFailure)>,
    seq: AtomicU64,
    log: Mutex<Vec<MockCall>>,
}

const CYRILLIC: [&str; 5] = ["А", "Б", "В", "Г", "Д"];
const ARABIC: [&str; 5] = ["أ", "ب", "ج", "د", "ه"];

fn between<'a>(text: &'a str, open: &str, close: &str) -> Option<&'a str> {
    let start = text.find(open)? + open.len();
    let end = start + text[start..].find(close)?;
    Some(text[start..end].trim_matches('\n'))
}

impl MockBackend {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            misbehavior: Misbehavior::None,
            fail_on: Vec::new(),
            seq: AtomicU64::new(0),
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn with_misbehavior(mut self, m: Misbehavior) -> Self {
        self.misbehavior = m;
        self
    }

    /// Any prompt containing `needle` fails with `failure`.
    pub fn fail_on(mut self, needle: impl Into<String>, failure: BackendFailure) -> Self {
        self.fail_on.push((needle.into(), failure));
        self
    }

    pub fn calls(&self) -> Vec<MockCall> {
        self.log.lock().expect("mock log").clone()
    }

    fn digest(&self, req: &ModelRequest) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"mcqa/mock/v1\0");
        h.update(self.seed.to_le_bytes());
        h.update(req.role.as_str().as_bytes());
        h.update([0]);
        h.update(req.prompt_text.as_bytes());
        h.update([0]);
        if let Some(img) = &req.image_bytes {
            h.update(Sha256::digest(img));
        }
        h.finalize().into()
    }

    fn describe(&self, req: &ModelRequest, d: &[u8; 32]) -> String {
        let tag = hex::encode(&d[..4]);
        let n = 3 + d[4] as usize % 3;
        let mut out = format!("Question: Synthetic question {tag}\n");
        for label in OptionLabel::ALL.iter().take(n) {
            out.push_str(&format!(
                "{label}) option {}{}\n",
                label.as_char().to_ascii_lowercase(),
                &tag[..2]
            ));
        }
        match &req.image_bytes {
            Some(_) => out.push_str(&format!("Figure: Synthetic figure {tag}\n")),
            None => out.push_str("Figure: none\n"),
        }
        out
    }

    fn reason(&self, req: &ModelRequest, d: &[u8; 32]) -> String {
        let n_options = req
            .prompt_text
            .lines()
            .filter(|l| {
                let b = l.as_bytes();
                b.len() >= 2 && (b'A'..=b'E').contains(&b[0]) && b[1] == b')'
            })
            .count();
        let n = if (1..=5).contains(&n_options) {
            n_options
        } else {
            4
        };
        let idx = d[0] as usize % n;
        let letter = OptionLabel::ALL[idx];
        let mode = match self.misbehavior {
            Misbehavior::Mixed => [
                Misbehavior::None,
                Misbehavior::Overflow,
                Misbehavior::Cyrillic,
                Misbehavior::Empty,
                Misbehavior::Markdown,
            ][d[1] as usize % 5],
            m => m,
        };
        match mode {
            Misbehavior::None
                if self.misbehavior == Misbehavior::Mixed && d[2].is_multiple_of(2) =>
            {
                format!(" {letter}\n")
            }
            Misbehavior::None => letter.to_string(),
            Misbehavior::Overflow => format!("The answer is {letter}."),
            Misbehavior::Cyrillic
                if self.misbehavior == Misbehavior::Mixed && d[2].is_multiple_of(2) =>
            {
                ARABIC[idx].into()
            }
            Misbehavior::Cyrillic => CYRILLIC[idx].into(),
            Misbehavior::Empty => String::new(),
            Misbehavior::Markdown => format!("**{letter}**"),
            Misbehavior::Mixed => unreachable!(),
        }
    }

    fn respond(&self, req: &ModelRequest) -> Result<String, BackendFailure> {
        if let Some((_, f)) = self
            .fail_on
            .iter()
            .find(|(n, _)| req.prompt_text.contains(n.as_str()))
        {
            return Err(f.clone());
        }
        let d = self.digest(req);
        Ok(match req.role {
            Role::Describer => self.describe(req, &d),
            Role::Aggregator => between(&req.prompt_text, "<draft_caption>", "</draft_caption>")
                .unwrap_or(&req.prompt_text)
                .to_string(),
            Role::Reasoner => self.reason(req, &d),
            Role::Translator => {
                let src = between(&req.prompt_text, "<source>", "</source>").unwrap_or("");
                src.lines()
                    .map(|l| match l.strip_prefix("Question: ") {
                        Some(q) => format!("Question: [translated] {q}"),
                        None => l.to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            }
        })
    }
}

impl Backend for MockBackend {
    fn generate(&self, req: &ModelRequest) -> Result<String, BackendFailure> {
        let seq = self.seq.fetch_add(1, Ordering::SeqCst);
        let output = self.respond(req);
        self.log.lock().expect("mock log").push(MockCall {
            seq,
            role: req.role,
            prompt: req.prompt_text.clone(),
            has_image: req.image_bytes.is_some(),
            output: output.clone(),
        });
        output
    }
}
