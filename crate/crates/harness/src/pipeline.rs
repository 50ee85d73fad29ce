//! Per-item describe → aggregate → reason → extract chain, and the dataset
//! runner on top of it.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use mcqa_core::answer_norm::MarkerOptions;
use mcqa_core::caption::{CaptionStage, CaptionWarning};
use mcqa_core::eval::{compliance_report, ComplianceReport, Predictions};
use mcqa_core::item::detect_language_mismatch;
use mcqa_core::prompt::{render_aggregator, render_describer, render_reasoner, PromptError};
use mcqa_core::{
    extract_answer_letter, strip_and_validate_strict, AnswerLetter, Caption, Dataset, ExamItem,
    Language, ModelRequest, Role, TemplateSet,
};
use serde::{Deserialize, Serialize};

use crate::client::{ClientError, ModelClient, ModelResponse};
use crate::dataset::resolve_image;
use crate::pool::map_ordered;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub templates: TemplateSet,
    pub markers: MarkerOptions,
    /// Build the caption of a text item from its manifest text instead of
    /// calling the describer and aggregator.
    pub skip_stage1_for_text: bool,
    /// Keep the draft when the aggregator fails instead of failing the item.
    pub aggregator_fallback: bool,
    /// Ask the reasoner once more when its output has no letter.
    pub resample_once: bool,
    /// Attach the image to reasoner requests too.
    pub reasoner_image: bool,
    pub parallelism: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            templates: TemplateSet::default(),
            markers: MarkerOptions::default(),
            skip_stage1_for_text: false,
            aggregator_fallback: true,
            resample_once: false,
            reasoner_image: false,
            parallelism: 1,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StageError {
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error("prompt: {0}")]
    Prompt(#[from] PromptError),
    #[error("image {path}: {message}")]
    Image { path: PathBuf, message: String },
    #[error("item has no text to build a caption from")]
    NoText,
}

impl StageError {
    pub fn is_config(&self) -> bool {
        match self {
            StageError::Client(e) => e.is_config(),
            StageError::Prompt(e) => !matches!(e, PromptError::EmptyCaption),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRef {
    pub role: Role,
    pub model_id: String,
    pub cache_key: String,
    pub from_cache: bool,
    pub attempts: u32,
}

impl TraceRef {
    fn of(role: Role, r: &ModelResponse) -> Self {
        Self {
            role,
            model_id: r.model_id.clone(),
            cache_key: r.cache_key.clone(),
            from_cache: r.from_cache,
            attempts: r.attempt_count,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageLatencies {
    pub describe_ms: Option<u64>,
    pub aggregate_ms: Option<u64>,
    pub reason_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub sample_id: String,
    pub language: Language,
    /// `None` when no letter could be recovered.
    pub answer: Option<AnswerLetter>,
    pub raw_output: String,
    pub strict_compliant: bool,
    pub resampled: bool,
    pub caption_digest: String,
    pub caption: Caption,
    pub warnings: Vec<String>,
    pub latencies: StageLatencies,
    pub trace_refs: Vec<TraceRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemFailure {
    pub sample_id: String,
    pub stage: Role,
    pub error: String,
    #[serde(skip)]
    pub config: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionSet {
    /// In dataset order.
    pub predictions: Vec<Prediction>,
    pub failures: Vec<ItemFailure>,
}

impl PredictionSet {
    pub fn answers(&self) -> Predictions {
        self.predictions
            .iter()
            .map(|p| (p.sample_id.clone(), p.answer.map(|a| a.value)))
            .collect()
    }

    pub fn compliance(&self) -> ComplianceReport {
        compliance_report(
            self.predictions
                .iter()
                .map(|p| (p.answer.map(|a| a.extraction_method), p.strict_compliant)),
        )
    }

    pub fn by_id(&self) -> BTreeMap<&str, &Prediction> {
        self.predictions
            .iter()
            .map(|p| (p.sample_id.as_str(), p))
            .collect()
    }
}

/// Text the manifest carries for an item: a `question` column plus an
/// optional `options` column (one option per line or `|`-separated).
pub fn manifest_text(item: &ExamItem) -> Option<String> {
    let question = item
        .meta("question")
        .map(str::trim)
        .filter(|q| !q.is_empty())?;
    let mut out = format!("Question: {question}\n");
    if let Some(opts) = item.meta("options").filter(|o| !o.trim().is_empty()) {
        out.push_str("Options:\n");
        let sep = if opts.contains('\n') { '\n' } else { '|' };
        for o in opts.split(sep).map(str::trim).filter(|o| !o.is_empty()) {
            out.push_str(o);
            out.push('\n');
        }
    }
    Some(out)
}

/// Alphabetic content of a caption, without the format's own headers.
fn caption_body(c: &Caption) -> String {
    let mut s = c.question_text.clone();
    match c.option_block() {
        Some(b) => {
            for o in b.options() {
                s.push('\n');
                s.push_str(&o.text);
            }
        }
        None => {
            if let mcqa_core::caption::CaptionOptions::Unparsed { lines } = &c.options {
                for l in lines {
                    s.push('\n');
                    s.push_str(l);
                }
            }
        }
    }
    s.push('\n');
    s.push_str(&c.figure_description);
    s
}

fn flag_language(item: &ExamItem, caption: &mut Caption) {
    caption
        .warnings
        .retain(|w| !matches!(w, CaptionWarning::LanguageMismatch { .. }));
    if let Some(flag) = detect_language_mismatch(item, &caption_body(caption)) {
        caption.warnings.push(CaptionWarning::LanguageMismatch {
            script: flag.dominant_script,
            severity: flag.severity,
        });
    }
}

pub struct ReasonOutcome {
    pub answer: Option<AnswerLetter>,
    pub raw_output: String,
    pub strict_compliant: bool,
    pub resampled: bool,
    pub responses: Vec<ModelResponse>,
}

pub struct Pipeline<'a> {
    client: &'a ModelClient,
    cfg: &'a PipelineConfig,
}

impl<'a> Pipeline<'a> {
    pub fn new(client: &'a ModelClient, cfg: &'a PipelineConfig) -> Self {
        Self { client, cfg }
    }

    pub fn describe(
        &self,
        item: &ExamItem,
        image: Option<Arc<[u8]>>,
    ) -> Result<(Caption, ModelResponse), StageError> {
        let t = &self.cfg.templates.describer;
        let prompt = render_describer(t, item, &t.shots)?;
        let mut req = self.client.request(Role::Describer, prompt.text)?;
        req.image_bytes = image;
        let resp = self.client.complete(&req)?;
        let mut caption = Caption::parse(
            &resp.text,
            item.language,
            CaptionStage::Draft,
            self.cfg.markers,
        );
        flag_language(item, &mut caption);
        Ok((caption, resp))
    }

    /// Refines a draft. With fallback enabled an aggregator failure yields
    /// the draft plus a warning and no response.
    pub fn aggregate(
        &self,
        item: &ExamItem,
        draft: &Caption,
        image: Option<Arc<[u8]>>,
    ) -> Result<(Caption, Option<ModelResponse>), StageError> {
        let prompt = render_aggregator(&self.cfg.templates.aggregator, item, &draft.to_text())?;
        let mut req = self.client.request(Role::Aggregator, prompt.text)?;
        req.image_bytes = image;
        let resp = match self.client.complete(&req) {
            Ok(r) => r,
            Err(e) if self.cfg.aggregator_fallback && !e.is_config() => {
                log::warn!("{}: aggregator failed, keeping draft: {e}", item.sample_id);
                let mut kept = draft.clone();
                kept.warnings
                    .push(CaptionWarning::AggregatorFallback(e.to_string()));
                return Ok((kept, None));
            }
            Err(e) => return Err(e.into()),
        };
        let mut refined = Caption::parse(
            &resp.text,
            item.language,
            CaptionStage::Refined,
            self.cfg.markers,
        );
        if draft.has_warning(&CaptionWarning::MissingDiagram)
            && !refined.has_warning(&CaptionWarning::MissingDiagram)
        {
            refined.warnings.push(CaptionWarning::MissingDiagram);
        }
        flag_language(item, &mut refined);
        Ok((refined, Some(resp)))
    }

    pub fn reason(
        &self,
        caption: &Caption,
        image: Option<Arc<[u8]>>,
    ) -> Result<ReasonOutcome, StageError> {
        let prompt = render_reasoner(&self.cfg.templates.reasoner, &caption.to_text())?;
        let mut req: ModelRequest = self.client.request(Role::Reasoner, prompt.text)?;
        if self.cfg.reasoner_image {
            req.image_bytes = image;
        }
        let resp = self.client.complete(&req)?;
        let mut answer = extract_answer_letter(&resp.text).ok();
        let mut raw = resp.text.clone();
        let mut responses = vec![resp];
        let mut resampled = false;
        if answer.is_none() && self.cfg.resample_once {
            req.sample_index = 1;
            let again = self.client.complete(&req)?;
            answer = extract_answer_letter(&again.text).ok();
            raw = again.text.clone();
            responses.push(again);
            resampled = true;
        }
        Ok(ReasonOutcome {
            answer,
            strict_compliant: strip_and_validate_strict(&raw).is_some(),
            raw_output: raw,
            resampled,
            responses,
        })
    }

    fn load_image(
        &self,
        item: &ExamItem,
        image_root: &str,
    ) -> Result<Option<Arc<[u8]>>, StageError> {
        let Some(r) = item.image_ref.as_deref().filter(|_| item.is_visual()) else {
            return Ok(None);
        };
        let path = resolve_image(image_root, r);
        std::fs::read(&path)
            .map(|b| Some(Arc::from(b)))
            .map_err(|e| StageError::Image {
                path,
                message: e.to_string(),
            })
    }

    pub fn run_item(&self, item: &ExamItem, image_root: &str) -> Result<Prediction, ItemFailure> {
        let fail = |stage: Role| {
            move |e: StageError| ItemFailure {
                sample_id: item.sample_id.clone(),
                stage,
                config: e.is_config(),
                error: e.to_string(),
            }
        };
        let image = self
            .load_image(item, image_root)
            .map_err(fail(Role::Describer))?;
        let mut trace = Vec::new();
        let mut latencies = StageLatencies::default();

        let caption = if self.cfg.skip_stage1_for_text && !item.is_visual() {
            let text = manifest_text(item)
                .ok_or(StageError::NoText)
                .map_err(fail(Role::Describer))?;
            let mut c = Caption::parse(
                &text,
                item.language,
                CaptionStage::Refined,
                self.cfg.markers,
            );
            flag_language(item, &mut c);
            c
        } else {
            let (draft, d) = self
                .describe(item, image.clone())
                .map_err(fail(Role::Describer))?;
            trace.push(TraceRef::of(Role::Describer, &d));
            latencies.describe_ms = Some(d.latency_ms);
            let (refined, a) = self
                .aggregate(item, &draft, image.clone())
                .map_err(fail(Role::Aggregator))?;
            if let Some(a) = a {
                trace.push(TraceRef::of(Role::Aggregator, &a));
                latencies.aggregate_ms = Some(a.latency_ms);
            }
            refined
        };

        let outcome = self.reason(&caption, image).map_err(fail(Role::Reasoner))?;
        for r in &outcome.responses {
            trace.push(TraceRef::of(Role::Reasoner, r));
            latencies.reason_ms += r.latency_ms;
        }
        Ok(Prediction {
            sample_id: item.sample_id.clone(),
            language: item.language,
            answer: outcome.answer,
            raw_output: outcome.raw_output,
            strict_compliant: outcome.strict_compliant,
            resampled: outcome.resampled,
            caption_digest: caption.digest(),
            warnings: caption
                .warnings
                .iter()
                .map(CaptionWarning::describe)
                .collect(),
            caption,
            latencies,
            trace_refs: trace,
        })
    }

    /// Runs every item on a bounded pool. Per-item failures are collected;
    /// a configuration failure aborts the run.
    pub fn run_dataset<D>(
        &self,
        ds: &Dataset,
        on_item_done: D,
    ) -> Result<PredictionSet, ItemFailure>
    where
        D: Fn(usize) + Sync,
    {
        let results = map_ordered(
            &ds.items,
            self.cfg.parallelism,
            |item| self.run_item(item, &ds.image_root),
            on_item_done,
        );
        let mut set = PredictionSet::default();
        for r in results {
            match r {
                Ok(p) => set.predictions.push(p),
                Err(f) if f.config => return Err(f),
                Err(f) => set.failures.push(f),
            }
        }
        Ok(set)
    }
}
