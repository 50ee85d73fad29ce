//! Append-only JSONL response cache keyed by request digest.
//!
//! Each entry is written as one line with a single `write_all` on a file
//! opened in append mode, so an interrupted process leaves at most one
//! truncated final line. Such a line is ignored on reload.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use mcqa_core::Role;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub role: Role,
    pub model_id: String,
    pub text: String,
}

#[derive(Debug)]
pub struct ResponseCache {
    path: Option<PathBuf>,
    inner: Mutex<Inner>,
}

#[derive(Debug)]
struct Inner {
    entries: HashMap<String, CacheEntry>,
    file: Option<File>,
}

impl ResponseCache {
    pub fn in_memory() -> Self {
        Self {
            path: None,
            inner: Mutex::new(Inner {
                entries: HashMap::new(),
                file: None,
            }),
        }
    }

    /// Opens (creating if needed) a cache file and loads its entries.
    pub fn open(path: &Path) -> io::Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut entries = HashMap::new();
        let mut needs_newline = false;
        if path.exists() {
            let mut skipped = 0usize;
            for line in BufReader::new(File::open(path)?).split(b'\n') {
                let line = line?;
                if line.iter().all(u8::is_ascii_whitespace) {
                    continue;
                }
                match serde_json::from_slice::<CacheEntry>(&line) {
                    Ok(e) => {
                        entries.entry(e.key.clone()).or_insert(e);
                    }
                    Err(_) => skipped += 1,
                }
            }
            if skipped > 0 {
                log::warn!(
                    "{}: ignored {skipped} unreadable cache line(s)",
                    path.display()
                );
            }
            let bytes = std::fs::read(path)?;
            needs_newline = bytes.last().is_some_and(|b| *b != b'\n');
        }
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if needs_newline {
            // terminate a truncated tail so the next entry starts on its own line
            file.write_all(b"\n")?;
        }
        Ok(Self {
            path: Some(path.to_path_buf()),
            inner: Mutex::new(Inner {
                entries,
                file: Some(file),
            }),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, key: &str) -> Option<CacheEntry> {
        self.inner
            .lock()
            .expect("cache lock")
            .entries
            .get(key)
            .cloned()
    }

    pub fn contains(&self, key: &str) -> bool {
        self.inner
            .lock()
            .expect("cache lock")
            .entries
            .contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stores an entry. The first value stored for a key wins.
    pub fn put(&self, entry: CacheEntry) -> io::Result<()> {
        let mut inner = self.inner.lock().expect("cache lock");
        if inner.entries.contains_key(&entry.key) {
            return Ok(());
        }
        if let Some(file) = inner.file.as_mut() {
            let mut line = serde_json::to_vec(&entry)?;
            line.push(b'\n');
            file.write_all(&line)?;
        }
        inner.entries.insert(entry.key.clone(), entry);
        Ok(())
    }
}
