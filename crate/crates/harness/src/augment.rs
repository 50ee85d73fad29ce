//! Translation-based dataset expansion.

use std::collections::HashMap;

use mcqa_core::answer_norm::MarkerOptions;
use mcqa_core::caption::{CaptionOptions, CaptionStage};
use mcqa_core::prompt::{render_translator, PromptError, PromptTemplate};
use mcqa_core::{Caption, Dataset, ExamItem, Language, OptionBlock, Role};
use serde::{Deserialize, Serialize};

use crate::client::{ClientError, ModelClient};
use crate::dataset::resolve_image;
use crate::pipeline::manifest_text;
use crate::pool::map_ordered;

/// Metadata columns added to translated items.
pub const SOURCE_LANGUAGE: &str = "source_language";
pub const TRANSLATOR_ID: &str = "translator_id";

#[derive(Debug, thiserror::Error)]
pub enum TranslateError {
    #[error("translator: {0}")]
    TranslatorError(#[from] ClientError),
    #[error("{0}: no caption or manifest text to translate")]
    UntranslatableItem(String),
    #[error("translator output has {found} options, source has {expected}")]
    OptionCountChanged { expected: usize, found: usize },
    #[error("prompt: {0}")]
    Prompt(#[from] PromptError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationRecord {
    pub source_sample_id: String,
    pub source_language: Language,
    pub target_language: Language,
    pub translated_question: String,
    pub translated_options: Option<OptionBlock>,
    pub translator_id: String,
    /// Cache key of the translator call.
    pub provenance: String,
}

fn option_count(c: &Caption) -> usize {
    match &c.options {
        CaptionOptions::Parsed { block } => block.len(),
        CaptionOptions::Unparsed { lines } => lines.len(),
    }
}

/// Translates one item's text into `target`. Labels, their order and the
/// answer key carry over unchanged.
pub fn translate_item(
    item: &ExamItem,
    target: Language,
    client: &ModelClient,
    template: &PromptTemplate,
    caption: Option<&Caption>,
    markers: MarkerOptions,
) -> Result<(ExamItem, Option<TranslationRecord>), TranslateError> {
    if item.language == target {
        let mut same = item.clone();
        same.set_meta(SOURCE_LANGUAGE, target.code());
        same.set_meta(TRANSLATOR_ID, "identity");
        return Ok((same, None));
    }
    let source_text = caption
        .map(Caption::to_text)
        .or_else(|| manifest_text(item))
        .ok_or_else(|| TranslateError::UntranslatableItem(item.sample_id.clone()))?;
    let source = Caption::parse(&source_text, item.language, CaptionStage::Refined, markers);

    let prompt = render_translator(template, &source_text, item.language, target)?;
    let req = client.request(Role::Translator, prompt.text)?;
    let resp = client.complete(&req)?;
    let translated = Caption::parse(&resp.text, target, CaptionStage::Refined, markers);
    let (expected, found) = (option_count(&source), option_count(&translated));
    if expected != found || (source.option_block().is_some() && translated.option_block().is_none())
    {
        return Err(TranslateError::OptionCountChanged { expected, found });
    }

    let mut out = item.clone();
    out.sample_id = format!("{}__{}", item.sample_id, item.language.code());
    out.language = target;
    out.row = 0;
    out.set_meta("question", translated.question_text.clone());
    let option_lines = match &translated.options {
        CaptionOptions::Parsed { block } => block.to_lines(),
        CaptionOptions::Unparsed { lines } => lines.clone(),
    };
    out.set_meta("options", option_lines.join("\n"));
    if !translated.figure_description.is_empty() {
        out.set_meta("figure", translated.figure_description.clone());
    }
    out.set_meta(SOURCE_LANGUAGE, item.language.code());
    out.set_meta(TRANSLATOR_ID, resp.model_id.clone());

    let record = TranslationRecord {
        source_sample_id: item.sample_id.clone(),
        source_language: item.language,
        target_language: target,
        translated_question: translated.question_text.clone(),
        translated_options: translated.option_block().cloned(),
        translator_id: resp.model_id,
        provenance: resp.cache_key,
    };
    Ok((out, Some(record)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationFailure {
    pub sample_id: String,
    pub source_language: Language,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCount {
    pub source_path: String,
    pub input: usize,
    pub output: usize,
    pub failed: usize,
}

#[derive(Debug, Clone)]
pub struct Expansion {
    pub dataset: Dataset,
    pub records: Vec<TranslationRecord>,
    pub failures: Vec<TranslationFailure>,
    /// Base first, then each foreign dataset.
    pub per_source: Vec<SourceCount>,
}

impl Expansion {
    pub fn accounting_line(&self) -> String {
        let base = self.per_source.first().map_or(0, |s| s.input);
        let foreign: usize = self.per_source.iter().skip(1).map(|s| s.input).sum();
        format!(
            "base {base} + foreign {foreign} = {} input; {} translated; {} failed; expanded {}",
            base + foreign,
            self.records.len(),
            self.failures.len(),
            self.dataset.len()
        )
    }
}

pub struct ExpandOptions<'a> {
    pub target: Language,
    pub template: &'a PromptTemplate,
    pub markers: MarkerOptions,
    pub parallelism: usize,
    /// Captions from an earlier run, keyed by sample id, used as the text
    /// of image items.
    pub captions: &'a HashMap<String, Caption>,
}

/// Base items followed by translated foreign items, in input order.
/// `|expanded| + |failures| = |base| + Σ|foreign|`.
pub fn expand_dataset(
    base: &Dataset,
    foreign: &[Dataset],
    client: &ModelClient,
    opts: &ExpandOptions<'_>,
) -> Expansion {
    let jobs: Vec<(usize, &ExamItem)> = foreign
        .iter()
        .enumerate()
        .flat_map(|(i, ds)| ds.items.iter().map(move |it| (i, it)))
        .collect();
    let results = map_ordered(
        &jobs,
        opts.parallelism,
        |(src, item)| {
            translate_item(
                item,
                opts.target,
                client,
                opts.template,
                opts.captions.get(&item.sample_id),
                opts.markers,
            )
            .map(|(mut out, rec)| {
                let root = &foreign[*src].image_root;
                if let Some(r) = out.image_ref.as_mut() {
                    if *root != base.image_root {
                        *r = resolve_image(root, r).display().to_string();
                    }
                }
                (out, rec)
            })
        },
        |_| {},
    );

    let mut items = base.items.clone();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut per_source = vec![SourceCount {
        source_path: base.source_path.clone(),
        input: base.len(),
        output: base.len(),
        failed: 0,
    }];
    per_source.extend(foreign.iter().map(|ds| SourceCount {
        source_path: ds.source_path.clone(),
        input: ds.len(),
        output: 0,
        failed: 0,
    }));
    for ((src, item), r) in jobs.iter().zip(results) {
        let count = &mut per_source[src + 1];
        match r {
            Ok((out, rec)) => {
                count.output += 1;
                items.push(out);
                records.extend(rec);
            }
            Err(e) => {
                count.failed += 1;
                failures.push(TranslationFailure {
                    sample_id: item.sample_id.clone(),
                    source_language: item.language,
                    error: e.to_string(),
                });
            }
        }
    }
    Expansion {
        dataset: Dataset {
            items,
            source_path: String::new(),
            split: base.split,
            image_root: base.image_root.clone(),
        },
        records,
        failures,
        per_source,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::{BackendFailure, RoleRouting};
    use crate::mock::MockBackend;
    use mcqa_core::prompt::TemplateSet;
    use mcqa_core::{ItemType, OptionLabel, Split};
    use std::sync::Arc;

    fn item(id: &str, lang: Language, question: &str, options: &str, key: OptionLabel) -> ExamItem {
        ExamItem {
            sample_id: id.into(),
            subject: "biology".into(),
            item_type: ItemType::Text,
            grade: 8,
            answer_key: Some(key),
            language: lang,
            image_ref: None,
            row: 1,
            metadata: vec![
                ("question".into(), question.into()),
                ("options".into(), options.into()),
            ],
        }
    }

    fn client(mock: MockBackend) -> ModelClient {
        ModelClient::builder(RoleRouting::defaults("mock"))
            .backend("mock", Arc::new(mock), None)
            .build()
            .unwrap()
    }

    #[test]
    fn bulgarian_item_keeps_key_position() {
        let t = TemplateSet::default().translator;
        let c = client(MockBackend::new(0));
        let bg = item(
            "b1",
            Language::Bulgarian,
            "Кой орган?",
            "А) сърце\nБ) бял дроб\nВ) черен дроб",
            OptionLabel::B,
        );
        let (en, rec) = translate_item(
            &bg,
            Language::English,
            &c,
            &t,
            None,
            MarkerOptions::default(),
        )
        .unwrap();
        assert_eq!(en.sample_id, "b1__bg");
        assert_eq!(en.language, Language::English);
        assert_eq!(en.answer_key, Some(OptionLabel::B));
        assert_eq!(
            en.meta("options"),
            Some("A) сърце\nB) бял дроб\nC) черен дроб")
        );
        assert_eq!(en.meta(SOURCE_LANGUAGE), Some("bg"));
        let rec = rec.unwrap();
        assert_eq!(rec.translated_options.unwrap().len(), 3);
    }

    #[test]
    fn identity_and_untranslatable() {
        let t = TemplateSet::default().translator;
        let c = client(MockBackend::new(0));
        let en = item("e1", Language::English, "q", "a|b", OptionLabel::A);
        let (same, rec) = translate_item(
            &en,
            Language::English,
            &c,
            &t,
            None,
            MarkerOptions::default(),
        )
        .unwrap();
        assert_eq!(same.sample_id, "e1");
        assert!(rec.is_none());
        assert_eq!(same.meta(TRANSLATOR_ID), Some("identity"));

        let mut img = item("i1", Language::German, "", "", OptionLabel::A);
        img.metadata.clear();
        img.item_type = ItemType::ImageText;
        assert!(matches!(
            translate_item(
                &img,
                Language::English,
                &c,
                &t,
                None,
                MarkerOptions::default()
            ),
            Err(TranslateError::UntranslatableItem(_))
        ));
    }

    #[test]
    fn accounting_with_one_failure() {
        let t = TemplateSet::default().translator;
        let c = client(MockBackend::new(0).fail_on("Frage 3", BackendFailure::Fatal("x".into())));
        let ds = |items: Vec<ExamItem>, p: &str| Dataset {
            items,
            source_path: p.into(),
            split: Split::Train,
            image_root: ".".into(),
        };
        let base = ds(
            (0..2)
                .map(|i| {
                    item(
                        &format!("e{i}"),
                        Language::English,
                        "q",
                        "a|b",
                        OptionLabel::A,
                    )
                })
                .collect(),
            "base",
        );
        let foreign = ds(
            (0..5)
                .map(|i| {
                    item(
                        &format!("d{i}"),
                        Language::German,
                        &format!("Frage {i}"),
                        "a|b",
                        OptionLabel::B,
                    )
                })
                .collect(),
            "de",
        );
        let captions = HashMap::new();
        let opts = ExpandOptions {
            target: Language::English,
            template: &t,
            markers: MarkerOptions::default(),
            parallelism: 3,
            captions: &captions,
        };
        let e = expand_dataset(&base, &[foreign], &c, &opts);
        assert_eq!(e.dataset.len(), 6);
        assert_eq!(e.failures.len(), 1);
        assert_eq!(e.failures[0].sample_id, "d3");
        assert_eq!(e.per_source[1].failed, 1);
        assert_eq!(
            e.accounting_line(),
            "base 2 + foreign 5 = 7 input; 4 translated; 1 failed; expanded 6"
        );
    }
}
