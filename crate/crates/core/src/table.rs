//! Minimal table model rendered as aligned text, CSV or Markdown.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Align {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<String>,
    pub align: Vec<Align>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<I, S>(headers: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let headers: Vec<String> = headers.into_iter().map(Into::into).collect();
        let align = headers.iter().map(|_| Align::Left).collect();
        Self {
            headers,
            align,
            rows: Vec::new(),
        }
    }

    pub fn with_align(mut self, align: &[Align]) -> Self {
        for (slot, a) in self.align.iter_mut().zip(align) {
            *slot = *a;
        }
        self
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut row: Vec<String> = row.into_iter().map(Into::into).collect();
        row.resize(self.headers.len(), String::new());
        self.rows.push(row);
    }

    fn widths(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                w[i] = w[i].max(cell.chars().count());
            }
        }
        w
    }

    fn pad(out: &mut String, cell: &str, width: usize, align: Align) {
        let fill = width.saturating_sub(cell.chars().count());
        if align == Align::Right {
            out.extend(core::iter::repeat_n(' ', fill));
        }
        out.push_str(cell);
        if align == Align::Left {
            out.extend(core::iter::repeat_n(' ', fill));
        }
    }

    /// Space-aligned plain text with a dashed rule under the header.
    pub fn to_text(&self) -> String {
        let widths = self.widths();
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            let mut l = String::new();
            for (i, cell) in cells.iter().enumerate() {
                if i > 0 {
                    l.push_str("  ");
                }
                Self::pad(&mut l, cell, widths[i], self.align[i]);
            }
            out.push_str(l.trim_end());
            out.push('\n');
        };
        line(&mut out, &self.headers);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(&mut out, &rule);
        for row in &self.rows {
            line(&mut out, row);
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let widths = self.widths();
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            out.push('|');
            for (i, cell) in cells.iter().enumerate() {
                out.push(' ');
                Self::pad(out, cell, widths[i], self.align[i]);
                out.push_str(" |");
            }
            out.push('\n');
        };
        line(&mut out, &self.headers);
        out.push('|');
        for (i, w) in widths.iter().enumerate() {
            let dashes = "-".repeat((*w).max(3));
            match self.align[i] {
                Align::Left => {
                    let _ = write!(out, " {} |", dashes);
                }
                Align::Right => {
                    let _ = write!(out, " {}: |", &dashes[..dashes.len() - 1]);
                }
            }
        }
        out.push('\n');
        for row in &self.rows {
            line(&mut out, row);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            for (i, cell) in cells.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if cell.contains([',', '"', '\n', '\r']) {
                    out.push('"');
                    out.push_str(&cell.replace('"', "\"\""));
                    out.push('"');
                } else {
                    out.push_str(cell);
                }
            }
            out.push('\n');
        };
        line(&mut out, &self.headers);
        for row in &self.rows {
            line(&mut out, row);
        }
        out
    }
}

/// Integer with comma thousands separators: `3969` → `3,969`.
pub fn thousands(n: usize) -> String {
    let digits = alloc::format!("{n}");
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(["Name", "Score"]).with_align(&[Align::Left, Align::Right]);
        t.push(["a", "1.00"]);
        t.push(["longer, name", "10.50"]);
        t
    }

    #[test]
    fn text_alignment() {
        assert_eq!(
            sample().to_text(),
            "Name          Score\n------------  -----\na              1.00\nlonger, name  10.50\n"
        );
    }

    #[test]
    fn markdown_layout() {
        assert_eq!(
            sample().to_markdown(),
            "| Name         | Score |\n| ------------ | ----: |\n| a            |  1.00 |\n| longer, name | 10.50 |\n"
        );
    }

    #[test]
    fn csv_quotes_when_needed() {
        assert_eq!(
            sample().to_csv(),
            "Name,Score\na,1.00\n\"longer, name\",10.50\n"
        );
    }

    #[test]
    fn thousands_separator() {
        assert_eq!(thousands(0), "0");
        assert_eq!(thousands(724), "724");
        assert_eq!(thousands(2635), "2,635");
        assert_eq!(thousands(1234567), "1,234,567");
    }
}
