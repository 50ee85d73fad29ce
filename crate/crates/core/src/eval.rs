//! Scoring, leaderboard rows with baseline deltas, compliance and ablation
//! tables.
//!
//! Percentages are fixed-point hundredths so that a delta column is exact
//! integer subtraction of the two rendered columns.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::item::ExamItem;
use crate::label::{ExtractionMethod, OptionLabel};
use crate::script::Language;
use crate::table::{Align, Table};

/// A percentage with two decimals, stored in hundredths (`81.40%` = 8140).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Percent(i64);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a percentage: {0:?}")]
pub struct ParsePercentError(pub String);

impl Percent {
    pub const ZERO: Percent = Percent(0);
    pub const HUNDRED: Percent = Percent(10_000);

    pub const fn from_hundredths(h: i64) -> Self {
        Percent(h)
    }

    pub fn hundredths(self) -> i64 {
        self.0
    }

    /// `correct / total` as a percentage, rounded half-up to two decimals.
    /// Returns `None` for an empty denominator.
    pub fn from_ratio(correct: u64, total: u64) -> Option<Self> {
        if total == 0 {
            return None;
        }
        let num = correct as u128 * 10_000 * 2 + total as u128;
        Some(Percent((num / (2 * total as u128)) as i64))
    }

    /// Half-up rounding of a non-negative float percentage.
    pub fn from_f64(p: f64) -> Self {
        let scaled = p * 100.0;
        if scaled >= 0.0 {
            Percent((scaled + 0.5) as i64)
        } else {
            Percent(-((-scaled + 0.5) as i64))
        }
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }

    pub fn is_valid_accuracy(self) -> bool {
        (0..=10_000).contains(&self.0)
    }

    /// Rendering with an explicit sign, as used in delta columns.
    pub fn signed(self) -> String {
        if self.0 >= 0 {
            format!("+{self}")
        } else {
            format!("{self}")
        }
    }
}

impl core::ops::Sub for Percent {
    type Output = Percent;

    fn sub(self, rhs: Percent) -> Percent {
        Percent(self.0 - rhs.0)
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", abs / 100, abs % 100)
    }
}

impl FromStr for Percent {
    type Err = ParsePercentError;

    /// Accepts `81.4`, `81.40%`, `+54.39%`, `-3`. More than two decimals
    /// round half-up (away from zero).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParsePercentError(s.into());
        let t = s.trim();
        let t = t.strip_suffix('%').unwrap_or(t).trim();
        let (neg, t) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (int, frac) = t.split_once('.').unwrap_or((t, ""));
        if int.is_empty()
            || !int.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(err());
        }
        let int: i64 = int.parse().map_err(|_| err())?;
        let digit = |i: usize| frac.as_bytes().get(i).map_or(0, |b| (b - b'0') as i64);
        let mut h = int.checked_mul(100).ok_or_else(err)? + digit(0) * 10 + digit(1);
        if digit(2) >= 5 {
            h += 1;
        }
        Ok(Percent(if neg { -h } else { h }))
    }
}

impl From<Percent> for String {
    fn from(p: Percent) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Percent {
    type Error = ParsePercentError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Predicted letter per sample id; `None` records a reasoner output with no
/// recoverable letter.
pub type Predictions = BTreeMap<String, Option<OptionLabel>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accuracy {
    pub correct: u64,
    pub total: u64,
}

impl Accuracy {
    pub fn fraction(&self) -> Option<f64> {
        (self.total > 0).then(|| self.correct as f64 / self.total as f64)
    }

    pub fn percent(&self) -> Option<Percent> {
        Percent::from_ratio(self.correct, self.total)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("prediction for unknown sample id {0:?}")]
    UnknownSampleId(String),
    #[error("gold item {0:?} has no answer key")]
    MissingGoldKey(String),
    #[error("no baseline for language {0}")]
    MissingBaseline(String),
}

/// Fraction of gold items whose prediction equals the key. Missing and
/// no-answer predictions count as incorrect.
pub fn score(preds: &Predictions, gold: &[ExamItem]) -> Result<Accuracy, EvalError> {
    let mut keys: BTreeMap<&str, OptionLabel> = BTreeMap::new();
    for item in gold {
        let key = item
            .answer_key
            .ok_or_else(|| EvalError::MissingGoldKey(item.sample_id.clone()))?;
        keys.insert(&item.sample_id, key);
    }
    if let Some(id) = preds.keys().find(|id| !keys.contains_key(id.as_str())) {
        return Err(EvalError::UnknownSampleId(id.clone()));
    }
    let correct = gold
        .iter()
        .filter(|item| matches!(preds.get(&item.sample_id), Some(Some(l)) if Some(*l) == item.answer_key))
        .count();
    Ok(Accuracy {
        correct: correct as u64,
        total: gold.len() as u64,
    })
}

/// Reference accuracies supplied by the organizers, plus leaderboard ranks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Baselines {
    /// Per-language baseline, in presentation order.
    pub per_language: Vec<(Language, Percent)>,
    pub multilingual: Option<Percent>,
    pub ranks: BTreeMap<String, String>,
}

impl Baselines {
    pub fn get(&self, lang: Language) -> Option<Percent> {
        self.per_language
            .iter()
            .find(|(l, _)| *l == lang)
            .map(|(_, p)| *p)
    }
}

pub const MULTILINGUAL: &str = "Multilingual";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    /// Language name, or "Multilingual" for the pooled row.
    pub label: String,
    pub language: Option<Language>,
    pub baseline: Option<Percent>,
    pub system: Percent,
    pub delta: Option<Percent>,
    pub rank: Option<String>,
    pub correct: Option<u64>,
    pub total: Option<u64>,
}

impl ReportRow {
    pub fn new(
        label: impl Into<String>,
        baseline: Option<Percent>,
        system: Percent,
        rank: Option<String>,
    ) -> Self {
        let label = label.into();
        Self {
            language: Language::lookup(&label),
            delta: baseline.map(|b| system - b),
            label,
            baseline,
            system,
            rank,
            correct: None,
            total: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Pooled multilingual row first, then one row per language.
    pub rows: Vec<ReportRow>,
    /// Mean of per-language accuracies.
    pub macro_average: Option<Percent>,
    pub n_scored: u64,
    pub n_no_answer: u64,
    pub warnings: Vec<String>,
}

impl EvalReport {
    /// Report built from already-known accuracies (e.g. a published table).
    pub fn from_rows(rows: Vec<ReportRow>) -> Self {
        Self {
            rows,
            macro_average: None,
            n_scored: 0,
            n_no_answer: 0,
            warnings: Vec::new(),
        }
    }

    pub fn overall(&self) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.language.is_none())
    }

    pub fn row(&self, label: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.label.eq_ignore_ascii_case(label))
    }

    pub fn table(&self, system_name: &str) -> Table {
        let with_rank = self.rows.iter().any(|r| r.rank.is_some());
        let mut headers = alloc::vec!["Language", "Baseline", system_name, "Δ"];
        if with_rank {
            headers.push("Rank");
        }
        let mut t = Table::new(headers).with_align(&[
            Align::Left,
            Align::Right,
            Align::Right,
            Align::Right,
            Align::Left,
        ]);
        let pct = |p: Option<Percent>| p.map_or_else(|| "--".to_string(), |p| format!("{p}%"));
        for r in &self.rows {
            let mut cells = alloc::vec![
                r.label.clone(),
                pct(r.baseline),
                format!("{}%", r.system),
                r.delta
                    .map_or_else(|| "--".to_string(), |d| format!("{}%", d.signed())),
            ];
            if with_rank {
                cells.push(r.rank.clone().unwrap_or_else(|| "--".into()));
            }
            t.push(cells);
        }
        t
    }
}

/// Per-language accuracy against the baselines, with a pooled
/// (micro-averaged) multilingual row first.
pub fn leaderboard(
    preds: &Predictions,
    gold: &[ExamItem],
    baselines: &Baselines,
) -> Result<EvalReport, EvalError> {
    let mut by_lang: BTreeMap<Language, Vec<ExamItem>> = BTreeMap::new();
    let mut order: Vec<Language> = Vec::new();
    for item in gold {
        if !by_lang.contains_key(&item.language) {
            order.push(item.language);
        }
        by_lang.entry(item.language).or_default().push(item.clone());
    }
    if let Some(l) = order.iter().find(|l| baselines.get(**l).is_none()) {
        return Err(EvalError::MissingBaseline(l.name().into()));
    }

    let pooled = score(preds, gold)?;
    let mut warnings = Vec::new();
    let mut rows = Vec::new();
    let mut per_lang_fractions = Vec::new();

    let rank = |label: &str| {
        baselines
            .ranks
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(label))
            .map(|(_, v)| v.clone())
    };

    for (lang, baseline) in &baselines.per_language {
        let Some(items) = by_lang.get(lang) else {
            warnings.push(format!("no scored items for {}; row omitted", lang.name()));
            continue;
        };
        let slice_preds: Predictions = items
            .iter()
            .filter_map(|i| preds.get(&i.sample_id).map(|p| (i.sample_id.clone(), *p)))
            .collect();
        let acc = score(&slice_preds, items)?;
        per_lang_fractions.push(acc.fraction().unwrap_or(0.0));
        let mut row = ReportRow::new(
            lang.name(),
            Some(*baseline),
            acc.percent().unwrap_or(Percent::ZERO),
            rank(lang.name()),
        );
        row.correct = Some(acc.correct);
        row.total = Some(acc.total);
        rows.push(row);
    }

    if let Some(system) = pooled.percent() {
        let mut overall = ReportRow::new(
            MULTILINGUAL,
            baselines.multilingual,
            system,
            rank(MULTILINGUAL),
        );
        overall.correct = Some(pooled.correct);
        overall.total = Some(pooled.total);
        rows.insert(0, overall);
    } else {
        warnings.push("no gold items; multilingual row omitted".into());
    }

    let macro_average = (!per_lang_fractions.is_empty()).then(|| {
        let mean = per_lang_fractions.iter().sum::<f64>() / per_lang_fractions.len() as f64;
        Percent::from_f64(mean * 100.0)
    });
    let n_no_answer = gold
        .iter()
        .filter(|i| matches!(preds.get(&i.sample_id), Some(None)))
        .count() as u64;

    Ok(EvalReport {
        rows,
        macro_average,
        n_scored: pooled.total,
        n_no_answer,
        warnings,
    })
}

/// Prompt-contract adherence over a set of reasoner outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub n: usize,
    pub n_strict: usize,
    /// `None` when there are no predictions.
    pub strict_rate: Option<f64>,
    /// Counts keyed by `exact`, `fallback_scan`, `script_mapped`, `none`.
    pub method_histogram: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

/// `records` yields each prediction's extraction method (`None` for no
/// answer) and whether the raw output met the strict single-letter contract.
pub fn compliance_report<I>(records: I) -> ComplianceReport
where
    I: IntoIterator<Item = (Option<ExtractionMethod>, bool)>,
{
    let mut hist: BTreeMap<String, usize> = [
        ExtractionMethod::Exact.as_str(),
        ExtractionMethod::FallbackScan.as_str(),
        ExtractionMethod::ScriptMapped.as_str(),
        "none",
    ]
    .into_iter()
    .map(|k| (k.to_string(), 0))
    .collect();
    let (mut n, mut n_strict) = (0usize, 0usize);
    for (method, strict) in records {
        n += 1;
        n_strict += strict as usize;
        let key = method.map_or("none", ExtractionMethod::as_str);
        *hist.entry(key.into()).or_default() += 1;
    }
    let mut warnings = Vec::new();
    if n == 0 {
        warnings.push("empty prediction set: strict rate undefined".to_string());
    }
    ComplianceReport {
        n,
        n_strict,
        strict_rate: (n > 0).then(|| n_strict as f64 / n as f64),
        method_histogram: hist,
        warnings,
    }
}

/// One recorded accuracy for the ablation tables; fine-tuning numbers
/// measured elsewhere enter here as plain data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AblationRow {
    /// Model or prompt style.
    pub label: String,
    /// Grid column (e.g. "Expanded Dataset"); may be empty in list layout.
    pub condition: String,
    pub accuracy: Percent,
    /// Descriptive columns shown between label and accuracies, e.g.
    /// ("Parameters (B)", "14") or ("Shots", "few").
    pub attrs: Vec<(String, String)>,
}

impl AblationRow {
    pub fn new(label: impl Into<String>, condition: impl Into<String>, accuracy: Percent) -> Self {
        Self {
            label: label.into(),
            condition: condition.into(),
            accuracy,
            attrs: Vec::new(),
        }
    }

    pub fn attr(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.attrs.push((key.into(), value.into()));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AblationLayout {
    /// Labels down, conditions across: one accuracy per (label, condition).
    Grid,
    /// One line per row.
    List,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AblationError {
    #[error("inconsistent grid: {0}")]
    InconsistentGrid(String),
    #[error("accuracy {0} outside [0, 100]")]
    InvalidAccuracy(Percent),
}

fn attr_keys(row: &AblationRow) -> Vec<&str> {
    row.attrs.iter().map(|(k, _)| k.as_str()).collect()
}

pub fn ablation_table(
    rows: &[AblationRow],
    layout: AblationLayout,
    label_header: &str,
) -> Result<Table, AblationError> {
    if let Some(r) = rows.iter().find(|r| !r.accuracy.is_valid_accuracy()) {
        return Err(AblationError::InvalidAccuracy(r.accuracy));
    }
    let keys: Vec<&str> = rows.first().map(attr_keys).unwrap_or_default();
    if let Some(r) = rows.iter().find(|r| attr_keys(r) != keys) {
        return Err(AblationError::InconsistentGrid(format!(
            "row {:?} has different descriptive columns",
            r.label
        )));
    }

    match layout {
        AblationLayout::List => {
            let with_condition = rows.iter().any(|r| !r.condition.is_empty());
            let mut headers: Vec<String> = alloc::vec![label_header.into()];
            headers.extend(keys.iter().map(|k| k.to_string()));
            if with_condition {
                headers.push("Condition".into());
            }
            headers.push("Accuracy (%)".into());
            let n = headers.len();
            let mut align = alloc::vec![Align::Left; n];
            align[n - 1] = Align::Right;
            let mut t = Table::new(headers).with_align(&align);
            for r in rows {
                let mut cells: Vec<String> = alloc::vec![r.label.clone()];
                cells.extend(r.attrs.iter().map(|(_, v)| v.clone()));
                if with_condition {
                    cells.push(r.condition.clone());
                }
                cells.push(r.accuracy.to_string());
                t.push(cells);
            }
            Ok(t)
        }
        AblationLayout::Grid => {
            let mut labels: Vec<&AblationRow> = Vec::new();
            let mut conditions: Vec<&str> = Vec::new();
            let mut cells: BTreeMap<(&str, &str), Percent> = BTreeMap::new();
            for r in rows {
                match labels.iter().find(|l| l.label == r.label) {
                    Some(first) if first.attrs != r.attrs => {
                        return Err(AblationError::InconsistentGrid(format!(
                            "{:?} has conflicting descriptive values",
                            r.label
                        )))
                    }
                    Some(_) => {}
                    None => labels.push(r),
                }
                if !conditions.contains(&r.condition.as_str()) {
                    conditions.push(&r.condition);
                }
                if cells.insert((&r.label, &r.condition), r.accuracy).is_some() {
                    return Err(AblationError::InconsistentGrid(format!(
                        "duplicate cell ({:?}, {:?})",
                        r.label, r.condition
                    )));
                }
            }
            let mut headers: Vec<String> = alloc::vec![label_header.into()];
            headers.extend(keys.iter().map(|k| k.to_string()));
            headers.extend(conditions.iter().map(|c| c.to_string()));
            let n = headers.len();
            let mut align = alloc::vec![Align::Left; n];
            for a in align.iter_mut().skip(1 + keys.len()) {
                *a = Align::Right;
            }
            let mut t = Table::new(headers).with_align(&align);
            for l in labels {
                let mut row: Vec<String> = alloc::vec![l.label.clone()];
                row.extend(l.attrs.iter().map(|(_, v)| v.clone()));
                for c in &conditions {
                    let p = cells.get(&(l.label.as_str(), *c)).ok_or_else(|| {
                        AblationError::InconsistentGrid(format!(
                            "missing cell ({:?}, {:?})",
                            l.label, c
                        ))
                    })?;
                    row.push(p.to_string());
                }
                t.push(row);
            }
            Ok(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::item::ItemType;
    use alloc::vec;

    fn gold(id: &str, lang: Language, key: OptionLabel) -> ExamItem {
        ExamItem {
            sample_id: id.into(),
            subject: "physics".into(),
            item_type: ItemType::Text,
            grade: 12,
            answer_key: Some(key),
            language: lang,
            image_ref: None,
            row: 0,
            metadata: Vec::new(),
        }
    }

    fn p(s: &str) -> Percent {
        s.parse().unwrap()
    }

    #[test]
    fn percent_parse_and_display() {
        assert_eq!(p("81.40%").hundredths(), 8140);
        assert_eq!(p("81.4").hundredths(), 8140);
        assert_eq!(p("+54.39%").hundredths(), 5439);
        assert_eq!(p("-3").hundredths(), -300);
        assert_eq!(p("61.665").hundredths(), 6167);
        assert_eq!(p("61.664").hundredths(), 6166);
        assert!("abc".parse::<Percent>().is_err());
        assert!("".parse::<Percent>().is_err());
        assert!("1.2.3".parse::<Percent>().is_err());
        assert_eq!(Percent::from_hundredths(5).to_string(), "0.05");
        assert_eq!(Percent::from_hundredths(-5).signed(), "-0.05");
        assert_eq!(Percent::from_hundredths(6798).signed(), "+67.98");
    }

    #[test]
    fn ratio_rounds_half_up() {
        assert_eq!(Percent::from_ratio(2, 3).unwrap().to_string(), "66.67");
        assert_eq!(Percent::from_ratio(1, 3).unwrap().to_string(), "33.33");
        // 1/8 = 12.5% exactly; 1/16 = 6.25%; 1/32 = 3.125% → 3.13
        assert_eq!(Percent::from_ratio(1, 32).unwrap().to_string(), "3.13");
        assert_eq!(Percent::from_ratio(0, 0), None);
    }

    #[test]
    fn score_examples() {
        use OptionLabel::*;
        let g = vec![
            gold("1", Language::English, A),
            gold("2", Language::English, B),
            gold("3", Language::English, C),
            gold("4", Language::English, D),
        ];
        let mut preds: Predictions = [("1", A), ("2", B), ("3", C), ("4", A)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), Some(v)))
            .collect();
        assert_eq!(score(&preds, &g).unwrap().fraction(), Some(0.75));
        preds.insert("4".into(), Some(D));
        assert_eq!(score(&preds, &g).unwrap().fraction(), Some(1.0));

        let g3 = &g[..3];
        let preds: Predictions = [("1", Some(A)), ("2", Some(B)), ("3", None)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let acc = score(&preds, g3).unwrap();
        assert_eq!((acc.correct, acc.total), (2, 3));
    }

    #[test]
    fn score_errors() {
        let g = vec![gold("1", Language::English, OptionLabel::A)];
        let preds: Predictions = [("zzz".to_string(), Some(OptionLabel::A))]
            .into_iter()
            .collect();
        assert_eq!(
            score(&preds, &g),
            Err(EvalError::UnknownSampleId("zzz".into()))
        );
        let mut nokey = g.clone();
        nokey[0].answer_key = None;
        assert_eq!(
            score(&Predictions::new(), &nokey),
            Err(EvalError::MissingGoldKey("1".into()))
        );
    }

    #[test]
    fn single_language_leaderboard() {
        let g = vec![
            gold("1", Language::German, OptionLabel::A),
            gold("2", Language::German, OptionLabel::B),
        ];
        let preds: Predictions = [("1".to_string(), Some(OptionLabel::A))]
            .into_iter()
            .collect();
        let b = Baselines {
            per_language: vec![(Language::German, p("31.01"))],
            multilingual: Some(p("31.01")),
            ranks: BTreeMap::new(),
        };
        let r = leaderboard(&preds, &g, &b).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.rows[0].label, MULTILINGUAL);
        assert_eq!(r.rows[0].system, r.rows[1].system);
        assert_eq!(r.rows[1].delta, Some(p("18.99")));
        assert_eq!(r.macro_average, Some(p("50")));
        assert_eq!(r.n_scored, 2);
    }

    #[test]
    fn leaderboard_missing_and_empty_slices() {
        let g = vec![gold("1", Language::German, OptionLabel::A)];
        let b = Baselines {
            per_language: vec![(Language::Italian, p("24.14"))],
            ..Default::default()
        };
        assert_eq!(
            leaderboard(&Predictions::new(), &g, &b),
            Err(EvalError::MissingBaseline("German".into()))
        );
        let b = Baselines {
            per_language: vec![
                (Language::Italian, p("24.14")),
                (Language::German, p("31.01")),
            ],
            ..Default::default()
        };
        let r = leaderboard(&Predictions::new(), &g, &b).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.warnings.len(), 1);
        assert!(r.warnings[0].contains("Italian"));
        assert_eq!(r.rows[0].delta, None);
    }

    #[test]
    fn compliance_examples() {
        use ExtractionMethod::*;
        let r = compliance_report(vec![
            (Some(Exact), true),
            (Some(Exact), true),
            (Some(FallbackScan), false),
            (None, false),
        ]);
        assert_eq!(r.strict_rate, Some(0.5));
        assert_eq!(r.method_histogram["exact"], 2);
        assert_eq!(r.method_histogram["fallback_scan"], 1);
        assert_eq!(r.method_histogram["none"], 1);
        assert_eq!(r.method_histogram["script_mapped"], 0);

        let all = compliance_report(vec![(Some(Exact), true); 3]);
        assert_eq!(all.strict_rate, Some(1.0));

        let empty = compliance_report(Vec::new());
        assert_eq!(empty.strict_rate, None);
        assert_eq!(empty.warnings.len(), 1);
    }

    #[test]
    fn ablation_grid_and_errors() {
        let rows = vec![
            AblationRow::new("m", "u", p("10")),
            AblationRow::new("m", "e", p("20")),
        ];
        let t = ablation_table(&rows, AblationLayout::Grid, "Model").unwrap();
        assert_eq!(t.headers, vec!["Model", "u", "e"]);
        assert_eq!(t.rows, vec![vec!["m", "10.00", "20.00"]]);

        let single = ablation_table(&rows[..1], AblationLayout::List, "Model").unwrap();
        assert_eq!(single.rows.len(), 1);

        let missing = vec![
            AblationRow::new("a", "u", p("1")),
            AblationRow::new("a", "e", p("2")),
            AblationRow::new("b", "u", p("3")),
        ];
        assert!(matches!(
            ablation_table(&missing, AblationLayout::Grid, "Model"),
            Err(AblationError::InconsistentGrid(_))
        ));
        let dup = vec![
            AblationRow::new("a", "u", p("1")),
            AblationRow::new("a", "u", p("2")),
        ];
        assert!(matches!(
            ablation_table(&dup, AblationLayout::Grid, "Model"),
            Err(AblationError::InconsistentGrid(_))
        ));
        let bad = vec![AblationRow::new("a", "u", p("101"))];
        assert!(matches!(
            ablation_table(&bad, AblationLayout::List, "Model"),
            Err(AblationError::InvalidAccuracy(_))
        ));
    }
}
