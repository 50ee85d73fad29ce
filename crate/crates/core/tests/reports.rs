mod common;

use std::time::Instant;

use common::{oracle_delta, read_simple_csv, PUBLISHED_DELTAS};
use mcqa_core::eval::{
    ablation_table, leaderboard, AblationLayout, AblationRow, Baselines, EvalReport, ReportRow,
    MULTILINGUAL,
};
use mcqa_core::item::compute_stats;
use mcqa_core::script::script_mismatch;
use mcqa_core::{ExamItem, ItemType, Language, OptionLabel, Percent, Predictions};
use proptest::prelude::*;

fn msa_report() -> EvalReport {
    let (header, rows) = read_simple_csv("leaderboard_msa.csv");
    assert_eq!(header, ["language", "baseline", "system", "rank"]);
    EvalReport::from_rows(
        rows.iter()
            .map(|r| {
                ReportRow::new(
                    r[0].as_str(),
                    Some(r[1].parse().unwrap()),
                    r[2].parse().unwrap(),
                    Some(r[3].clone()),
                )
            })
            .collect(),
    )
}

#[test]
fn published_leaderboard_deltas_reproduce() {
    let start = Instant::now();
    let table = msa_report().table("MSA");
    assert_eq!(table.headers, ["Language", "Baseline", "MSA", "Δ", "Rank"]);
    assert_eq!(table.rows.len(), 13);
    let (_, fixture) = read_simple_csv("leaderboard_msa.csv");
    for ((row, (label, published)), src) in table.rows.iter().zip(PUBLISHED_DELTAS).zip(&fixture) {
        assert_eq!(row[0], label);
        assert_eq!(row[3], format!("{published}%"), "{label}");
        assert_eq!(
            row[3],
            format!("{}%", oracle_delta(&src[1], &src[2])),
            "{label}"
        );
    }
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn leaderboard_markdown_renders_signed_cells() {
    let md = msa_report().table("MSA").to_markdown();
    assert!(md.contains("| Multilingual"));
    assert!(md.contains("+54.39%"));
    assert!(md.contains("3rd"));
}

fn ablation_rows(name: &str) -> Vec<AblationRow> {
    let (header, rows) = read_simple_csv(name);
    rows.iter()
        .map(|r| {
            let mut row = AblationRow::new(r[0].as_str(), r[1].as_str(), r[2].parse().unwrap());
            for (k, v) in header[3..].iter().zip(&r[3..]) {
                row = row.attr(k.as_str(), v.as_str());
            }
            row
        })
        .collect()
}

fn column(table: &mcqa_core::Table, header: &str) -> Vec<String> {
    let i = table.headers.iter().position(|h| h == header).unwrap();
    table.rows.iter().map(|r| r[i].clone()).collect()
}

#[test]
fn prompt_ablation_cells() {
    let t = ablation_table(
        &ablation_rows("ablation_prompt.csv"),
        AblationLayout::List,
        "Model",
    )
    .unwrap();
    assert_eq!(
        t.headers,
        ["Model", "Prompt Style", "Shots", "Accuracy (%)"]
    );
    assert_eq!(column(&t, "Accuracy (%)"), ["55.91", "57.06", "61.67"]);
}

#[test]
fn finetune_ablation_cells() {
    let t = ablation_table(
        &ablation_rows("ablation_finetune.csv"),
        AblationLayout::Grid,
        "Model",
    )
    .unwrap();
    assert_eq!(
        t.headers,
        [
            "Model",
            "Parameters (B)",
            "Unexpanded Dataset",
            "Expanded Dataset"
        ]
    );
    assert_eq!(
        column(&t, "Expanded Dataset"),
        ["79.65", "55.65", "43.88", "27.83"]
    );
    assert_eq!(
        column(&t, "Unexpanded Dataset"),
        ["66.86", "36.02", "23.92", "27.09"]
    );
    assert_eq!(column(&t, "Parameters (B)"), ["--", "14", "12", "7"]);
}

fn hundredths_str(h: i64) -> String {
    format!("{}.{:02}", h / 100, h % 100)
}

fn item(
    id: usize,
    language: Language,
    key: usize,
    visual: bool,
    subject: &str,
    grade: i32,
) -> ExamItem {
    ExamItem {
        sample_id: format!("q{id}"),
        subject: subject.into(),
        item_type: if visual {
            ItemType::ImageText
        } else {
            ItemType::Text
        },
        grade,
        answer_key: OptionLabel::from_index(key),
        language,
        image_ref: visual.then(|| format!("q{id}.png")),
        row: id + 1,
        metadata: Vec::new(),
    }
}

fn items() -> impl Strategy<Value = Vec<ExamItem>> {
    prop::collection::vec(
        (
            0usize..Language::ALL.len(),
            0usize..5,
            any::<bool>(),
            "[a-c]",
            4i32..=12,
        ),
        1..40,
    )
    .prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (l, k, vis, s, g))| item(i, Language::ALL[l], k, vis, &s, g))
            .collect()
    })
}

proptest! {
    #[test]
    fn delta_is_system_minus_baseline(b in 0i64..=10_000, s in 0i64..=10_000) {
        let row = ReportRow::new("German", Some(Percent::from_hundredths(b)), Percent::from_hundredths(s), None);
        let d = row.delta.unwrap();
        prop_assert_eq!(d.hundredths(), s - b);
        prop_assert_eq!(d.signed(), oracle_delta(&hundredths_str(b), &hundredths_str(s)));
    }

    #[test]
    fn stats_conserve_item_counts(items in items()) {
        let stats = compute_stats(&items);
        let total: usize = stats.per_language.iter().map(|r| r.n_questions).sum();
        prop_assert_eq!(total, items.len());
        prop_assert_eq!(stats.total_questions(), items.len());
        for r in &stats.per_language {
            prop_assert_eq!(r.n_visual + r.n_text, r.n_questions);
        }
    }

    #[test]
    fn pooled_row_is_micro_average(items in items(), guesses in prop::collection::vec(0usize..6, 40)) {
        let preds: Predictions = items
            .iter()
            .zip(&guesses)
            .map(|(i, g)| (i.sample_id.clone(), OptionLabel::from_index(*g)))
            .collect();
        let baselines = Baselines {
            per_language: Language::ALL.iter().map(|l| (*l, Percent::from_hundredths(2500))).collect(),
            multilingual: Some(Percent::from_hundredths(2500)),
            ranks: Default::default(),
        };
        let report = leaderboard(&preds, &items, &baselines).unwrap();
        let overall = report.overall().unwrap();
        prop_assert_eq!(overall.label.as_str(), MULTILINGUAL);
        let per_lang: u64 = report.rows[1..].iter().map(|r| r.correct.unwrap()).sum();
        let per_total: u64 = report.rows[1..].iter().map(|r| r.total.unwrap()).sum();
        prop_assert_eq!(overall.correct.unwrap(), per_lang);
        prop_assert_eq!(overall.total.unwrap(), per_total);
        prop_assert_eq!(per_total as usize, items.len());
        for r in &report.rows {
            prop_assert_eq!(r.delta.unwrap(), r.system - r.baseline.unwrap());
        }
    }

    /// Text in which the declared language's own scripts supply at least half
    /// of the letters is never flagged.
    #[test]
    fn compatible_majority_is_never_flagged(
        lang in 0usize..Language::ALL.len(),
        own in 1usize..40,
        other_frac in 0usize..=100,
        other_kind in 0usize..4,
    ) {
        let language = Language::ALL[lang];
        let own_char = match language.scripts()[0] {
            mcqa_core::Script::Latin => 'a',
            mcqa_core::Script::Cyrillic => 'д',
            mcqa_core::Script::Arabic => 'ب',
            mcqa_core::Script::Han => '中',
            mcqa_core::Script::Other => 'α',
        };
        let other_char = ['x', 'ж', 'ع', '水'][other_kind];
        let other = own * other_frac / 100;
        let text: String = std::iter::repeat_n(own_char, own)
            .chain(std::iter::repeat_n(' ', 3))
            .chain(std::iter::repeat_n(other_char, other))
            .collect();
        prop_assert_eq!(script_mismatch(language, &text), None);
    }
}
