mod common;

use mcqa_core::prompt::{builtin, render_reasoner, PromptTemplate, TemplateSet, STRICT_REASONER};
use mcqa_core::Role;

#[test]
fn strict_reasoner_matches_golden_bytes() {
    let expected = std::fs::read(common::golden("reasoner_strict_x.txt")).unwrap();
    let set = TemplateSet::default();
    let rendered = render_reasoner(&set.reasoner, "X").unwrap();
    assert_eq!(set.reasoner.version, STRICT_REASONER);
    assert_eq!(rendered.text.as_bytes(), expected.as_slice());
}

#[test]
fn golden_carries_the_contract_lines() {
    let text = std::fs::read_to_string(common::golden("reasoner_strict_x.txt")).unwrap();
    assert!(text.contains("MUST be ONLY the single letter"));
    for step in 1..=6 {
        assert!(text.contains(&format!("\n{step}. ")), "step {step} missing");
    }
}

#[test]
fn template_file_on_disk_matches_builtin() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("templates/reasoner.strict-letter-only-v1.txt");
    let parsed = PromptTemplate::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(Some(parsed), builtin(Role::Reasoner, STRICT_REASONER));
}

#[test]
fn reasoner_binds_caption_only_once_and_has_no_shots() {
    let set = TemplateSet::default();
    assert!(set.reasoner.shots.is_empty());
    let r = render_reasoner(&set.reasoner, "Question: 2+2?\nA) 3\nB) 4").unwrap();
    assert_eq!(r.text.matches("Question: 2+2?").count(), 1);
    assert_eq!(r.bound_values.len(), 1);
}
