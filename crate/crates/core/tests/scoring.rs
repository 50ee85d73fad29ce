mod common;

use common::{oracle_percent_hundredths, oracle_score, LATIN};
use mcqa_core::eval::score;
use mcqa_core::{ExamItem, ItemType, Language, OptionLabel, Percent, Predictions};
use proptest::prelude::*;

fn item(id: &str, key: char, language: Language) -> ExamItem {
    ExamItem {
        sample_id: id.into(),
        subject: "physics".into(),
        item_type: ItemType::ImageText,
        grade: 8,
        answer_key: Some(key.to_string().parse().unwrap()),
        language,
        image_ref: Some(format!("{id}.png")),
        row: 0,
        metadata: Vec::new(),
    }
}

/// Gold keys plus, per item, either a missing prediction, a NoAnswer, or a letter.
fn scoring_case() -> impl Strategy<Value = (Vec<char>, Vec<Option<Option<char>>>)> {
    (1usize..=20).prop_flat_map(|n| {
        let key = (0usize..5).prop_map(|i| LATIN[i]);
        let pred = prop_oneof![
            1 => Just(None),
            1 => Just(Some(None)),
            4 => (0usize..5).prop_map(|i| Some(Some(LATIN[i]))),
        ];
        (
            prop::collection::vec(key, n),
            prop::collection::vec(pred, n),
        )
    })
}

type Scenario = (
    Vec<ExamItem>,
    Predictions,
    Vec<(String, char)>,
    Vec<(String, Option<char>)>,
);

fn build(keys: &[char], preds: &[Option<Option<char>>]) -> Scenario {
    let mut gold = Vec::new();
    let mut p = Predictions::new();
    let mut o_gold = Vec::new();
    let mut o_pred = Vec::new();
    for (i, (k, pr)) in keys.iter().zip(preds).enumerate() {
        let id = format!("s{i:02}");
        gold.push(item(&id, *k, Language::ALL[i % Language::ALL.len()]));
        o_gold.push((id.clone(), *k));
        if let Some(pr) = pr {
            p.insert(
                id.clone(),
                pr.map(|c| c.to_string().parse::<OptionLabel>().unwrap()),
            );
            o_pred.push((id, *pr));
        }
    }
    (gold, p, o_gold, o_pred)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn score_equals_per_item_oracle((keys, preds) in scoring_case()) {
        let (gold, p, og, op) = build(&keys, &preds);
        let acc = score(&p, &gold).unwrap();
        let (correct, total) = oracle_score(&og, &op);
        prop_assert_eq!((acc.correct, acc.total), (correct, total));
        prop_assert_eq!(acc.percent().unwrap().hundredths(), oracle_percent_hundredths(correct, total));
    }

    #[test]
    fn score_ignores_item_order((keys, preds) in scoring_case(), rot in 0usize..20) {
        let (mut gold, p, _, _) = build(&keys, &preds);
        let before = score(&p, &gold).unwrap();
        let r = rot % gold.len();
        gold.rotate_left(r);
        gold.reverse();
        prop_assert_eq!(score(&p, &gold).unwrap(), before);
    }

    #[test]
    fn ratio_rounding_matches_oracle(total in 1u64..5000, frac in 0u64..=1000) {
        let correct = total * frac / 1000;
        prop_assert_eq!(
            Percent::from_ratio(correct, total).unwrap().hundredths(),
            oracle_percent_hundredths(correct, total)
        );
    }
}

#[test]
fn no_answer_counts_as_incorrect() {
    let gold = vec![
        item("a", 'B', Language::German),
        item("b", 'C', Language::German),
    ];
    let mut p = Predictions::new();
    p.insert("a".into(), None);
    p.insert("b".into(), Some(OptionLabel::C));
    let acc = score(&p, &gold).unwrap();
    assert_eq!((acc.correct, acc.total), (1, 2));
    assert_eq!(acc.percent().unwrap().to_string(), "50.00");
}

#[test]
fn unknown_prediction_id_is_an_error() {
    let gold = vec![item("a", 'B', Language::German)];
    let mut p = Predictions::new();
    p.insert("zz".into(), Some(OptionLabel::A));
    assert!(score(&p, &gold).is_err());
}
