mod common;

use common::{digit_forms, marker_forms, CYRILLIC, LATIN};
use mcqa_core::answer_norm::{
    canonicalize_options, normalize_marker_with, LabelingSource, MarkerOptions,
};
use mcqa_core::{normalize_marker, OptionLabel, OptionsError};
use proptest::prelude::*;

fn label(i: usize) -> OptionLabel {
    LATIN[i].to_string().parse().unwrap()
}

#[test]
fn every_form_maps_every_label() {
    let forms = marker_forms();
    assert!(forms.len() >= 10);
    let mut checked = 0;
    for form in &forms {
        for i in 0..5 {
            let token = (form.render)(i);
            assert_eq!(
                normalize_marker(&token),
                Some(label(i)),
                "form {} token {token:?}",
                form.name
            );
            checked += 1;
        }
    }
    assert!(checked >= 50);
}

#[test]
fn digit_forms_are_opt_in() {
    let on = MarkerOptions {
        digit_markers: true,
    };
    for form in digit_forms() {
        for i in 0..5 {
            let token = (form.render)(i);
            assert_eq!(
                normalize_marker(&token),
                None,
                "{token:?} without digit mode"
            );
            assert_eq!(
                normalize_marker_with(&token, on),
                Some(label(i)),
                "{token:?}"
            );
        }
    }
}

#[test]
fn cyrillic_out_of_order_block_is_rejected() {
    let lines = [
        format!("{}) х=1", CYRILLIC[0]),
        format!("{}) х=2", CYRILLIC[2]),
        format!("{}) х=3", CYRILLIC[1]),
    ];
    let err = canonicalize_options(&lines, MarkerOptions::default()).unwrap_err();
    assert!(
        matches!(err, OptionsError::InconsistentLabels { .. }),
        "{err:?}"
    );
}

#[test]
fn unmarked_lines_are_labeled_by_position() {
    let block = canonicalize_options(&["red", "green", "blue"], MarkerOptions::default()).unwrap();
    assert_eq!(block.labeling_source(), LabelingSource::Positional);
    assert_eq!(block.text_of(OptionLabel::C), Some("blue"));
}

fn unrecognized_token() -> impl Strategy<Value = String> {
    prop_oneof![
        "[F-Zf-z][.):]",
        "\\([F-Z]\\)",
        "Q[0-9]{1,3}\\.",
        "[A-Ea-e][A-Za-z]{1,5}[.)]?",
        "[A-E]",
        "[6-9][.)]",
        "[1-5][.)]",
        "[⑥-⑳]",
        "[Е-Я]\\)",
        "[كلمنوي]\\)",
        "[A-E]\\.[a-z]",
        "[!-/]{1,3}",
    ]
}

proptest! {
    #[test]
    fn unrecognized_tokens_are_none(token in unrecognized_token()) {
        prop_assert_eq!(normalize_marker(&token), None);
    }

    #[test]
    fn normalization_is_deterministic(token in "\\PC{0,6}") {
        prop_assert_eq!(normalize_marker(&token), normalize_marker(&token));
    }

    #[test]
    fn positional_labels_keep_order(texts in prop::collection::vec("[a-z]{1,8}( [a-z]{1,8})?", 2..=5)) {
        let block = canonicalize_options(&texts, MarkerOptions::default()).unwrap();
        prop_assert_eq!(block.labeling_source(), LabelingSource::Positional);
        for (i, t) in texts.iter().enumerate() {
            prop_assert_eq!(block.text_of(label(i)), Some(t.as_str()));
        }
    }
}
