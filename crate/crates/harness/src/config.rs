//! Run configuration (TOML) and wiring of clients and templates from it.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context};
use mcqa_core::answer_norm::MarkerOptions;
use mcqa_core::backoff::{RateLimit, RetryPolicy};
use mcqa_core::prompt::{builtin, default_version, PromptTemplate, TemplateSet};
use mcqa_core::{Role, Split};
use serde::{Deserialize, Serialize};

use crate::cache::ResponseCache;
use crate::client::{Clock, ModelClient, RoleRouting, SystemClock, VirtualClock};
use crate::http::{HttpBackend, Provider};
use crate::mock::{Misbehavior, MockBackend};
use crate::pipeline::PipelineConfig;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    #[default]
    Mock,
    Http,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TemplateVersions {
    pub describer: String,
    pub aggregator: String,
    pub reasoner: String,
    pub translator: String,
    /// Directory searched for `<role>.<version>.txt` before the built-ins.
    pub dir: Option<PathBuf>,
}

impl Default for TemplateVersions {
    fn default() -> Self {
        Self {
            describer: default_version(Role::Describer).into(),
            aggregator: default_version(Role::Aggregator).into(),
            reasoner: default_version(Role::Reasoner).into(),
            translator: default_version(Role::Translator).into(),
            dir: None,
        }
    }
}

impl TemplateVersions {
    fn version(&self, role: Role) -> &str {
        match role {
            Role::Describer => &self.describer,
            Role::Aggregator => &self.aggregator,
            Role::Reasoner => &self.reasoner,
            Role::Translator => &self.translator,
        }
    }

    pub fn load(&self) -> anyhow::Result<TemplateSet> {
        let mut set = TemplateSet::default();
        for role in Role::ALL {
            let version = self.version(role);
            let from_dir = self
                .dir
                .as_ref()
                .map(|d| d.join(format!("{role}.{version}.txt")))
                .filter(|p| p.is_file());
            let t = match from_dir {
                Some(p) => {
                    let src = std::fs::read_to_string(&p)
                        .with_context(|| format!("reading {}", p.display()))?;
                    PromptTemplate::parse(&src)
                        .with_context(|| format!("parsing {}", p.display()))?
                }
                None => builtin(role, version)
                    .with_context(|| format!("no {role} template version {version:?}"))?,
            };
            if t.role != role {
                bail!(
                    "template {version:?} is a {} template, expected {role}",
                    t.role
                );
            }
            set.set(t);
        }
        Ok(set)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineFlags {
    pub skip_stage1_for_text: bool,
    pub aggregator_fallback: bool,
    pub resample_once: bool,
    pub reasoner_image: bool,
    /// Accept bare digits ("1.", "(2)") as option markers.
    pub digit_markers: bool,
}

impl Default for PipelineFlags {
    fn default() -> Self {
        Self {
            skip_stage1_for_text: false,
            aggregator_fallback: true,
            resample_once: false,
            reasoner_image: false,
            digit_markers: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetryConfig {
    pub max_attempts: u32,
    pub base_ms: u64,
    pub factor: u32,
    pub jitter_permille: u16,
}

impl Default for RetryConfig {
    fn default() -> Self {
        let p = RetryPolicy::default();
        Self {
            max_attempts: p.max_attempts,
            base_ms: p.base.as_millis() as u64,
            factor: p.factor,
            jitter_permille: p.jitter_permille,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HttpBackendConfig {
    pub provider: Provider,
    pub base_url: Option<String>,
    /// Name of the environment variable holding the API key.
    pub api_key_env: Option<String>,
    pub rate_per_second: Option<u32>,
    #[serde(default = "default_burst")]
    pub burst: u32,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

fn default_burst() -> u32 {
    1
}

fn default_timeout() -> u64 {
    120
}

impl HttpBackendConfig {
    pub fn for_provider(provider: Provider) -> Self {
        Self {
            provider,
            base_url: None,
            api_key_env: None,
            rate_per_second: None,
            burst: default_burst(),
            timeout_secs: default_timeout(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    pub image_root: Option<PathBuf>,
    pub split: Split,
    /// Abort on bad manifest rows; defaults by split.
    pub strict: Option<bool>,
    pub output_dir: PathBuf,
    /// Defaults to `<output_dir>/cache.jsonl`.
    pub cache_path: Option<PathBuf>,
    pub use_cache: bool,
    pub parallelism: usize,
    pub seed: Option<u64>,
    pub backend: BackendKind,
    pub misbehavior: Misbehavior,
    pub routing: RoleRouting,
    pub templates: TemplateVersions,
    pub pipeline: PipelineFlags,
    pub retry: RetryConfig,
    /// HTTP backends by name; routes refer to these names.
    pub http: BTreeMap<String, HttpBackendConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifest: None,
            image_root: None,
            split: Split::Test,
            strict: None,
            output_dir: PathBuf::from("out"),
            cache_path: None,
            use_cache: true,
            parallelism: 4,
            seed: None,
            backend: BackendKind::Mock,
            misbehavior: Misbehavior::None,
            routing: RoleRouting::defaults("gemini"),
            templates: TemplateVersions::default(),
            pipeline: PipelineFlags::default(),
            retry: RetryConfig::default(),
            http: BTreeMap::new(),
        }
    }
}

pub const MOCK_BACKEND: &str = "mock";

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text)?;
        // roles not listed under [routing] keep their defaults
        let defaults = RoleRouting::defaults("gemini");
        for (role, route) in defaults.0 {
            cfg.routing.0.entry(role).or_insert(route);
        }
        Ok(cfg)
    }

    pub fn effective_cache_path(&self) -> Option<PathBuf> {
        self.use_cache.then(|| {
            self.cache_path
                .clone()
                .unwrap_or_else(|| self.output_dir.join("cache.jsonl"))
        })
    }

    pub fn retry_policy(&self) -> RetryPolicy {
        RetryPolicy {
            max_attempts: self.retry.max_attempts,
            base: Duration::from_millis(self.retry.base_ms),
            factor: self.retry.factor,
            jitter_permille: self.retry.jitter_permille,
            jitter_seed: self.seed.unwrap_or(0),
        }
    }

    pub fn pipeline_config(&self) -> anyhow::Result<PipelineConfig> {
        Ok(PipelineConfig {
            templates: self.templates.load()?,
            markers: self.marker_options(),
            skip_stage1_for_text: self.pipeline.skip_stage1_for_text,
            aggregator_fallback: self.pipeline.aggregator_fallback,
            resample_once: self.pipeline.resample_once,
            reasoner_image: self.pipeline.reasoner_image,
            parallelism: self.parallelism.max(1),
        })
    }

    pub fn marker_options(&self) -> MarkerOptions {
        MarkerOptions {
            digit_markers: self.pipeline.digit_markers,
        }
    }

    /// Builds the client for this configuration. The mock backend gets a
    /// virtual clock so that runs are reproducible; `mock` lets callers
    /// supply a preconfigured instance (e.g. with failure injection).
    pub fn build_client(&self, mock: Option<MockBackend>) -> anyhow::Result<ModelClient> {
        let mut routing = self.routing.clone();
        let cache = match self.effective_cache_path() {
            Some(p) => Some(Arc::new(
                ResponseCache::open(&p)
                    .with_context(|| format!("opening cache {}", p.display()))?,
            )),
            None => None,
        };
        let mut builder;
        match self.backend {
            BackendKind::Mock => {
                let Some(seed) = self.seed else {
                    bail!(
                        "the mock backend needs an explicit seed (--seed or `seed` in the config)"
                    );
                };
                routing.set_backend_all(MOCK_BACKEND);
                let backend = mock
                    .unwrap_or_else(|| MockBackend::new(seed).with_misbehavior(self.misbehavior));
                let clock: Arc<dyn Clock> = Arc::new(VirtualClock::new());
                builder = ModelClient::builder(routing)
                    .backend(MOCK_BACKEND, Arc::new(backend), None)
                    .clock(clock);
            }
            BackendKind::Http => {
                let mut http = self.http.clone();
                for route in routing.0.values() {
                    if !http.contains_key(&route.backend) {
                        let provider = match route.backend.as_str() {
                            "gemini" => Provider::Gemini,
                            "openai" => Provider::Openai,
                            other => bail!("route refers to undefined http backend {other:?}"),
                        };
                        http.insert(
                            route.backend.clone(),
                            HttpBackendConfig::for_provider(provider),
                        );
                    }
                }
                builder = ModelClient::builder(routing).clock(Arc::new(SystemClock::default()));
                for (name, hc) in &http {
                    let key_env = hc
                        .api_key_env
                        .as_deref()
                        .unwrap_or(hc.provider.default_key_env());
                    let base = hc
                        .base_url
                        .as_deref()
                        .unwrap_or(hc.provider.default_base_url());
                    let backend = HttpBackend::from_env(
                        hc.provider,
                        base,
                        key_env,
                        Duration::from_secs(hc.timeout_secs),
                    )?;
                    let limit = hc
                        .rate_per_second
                        .map(|r| RateLimit::per_second(r, hc.burst));
                    builder = builder.backend(name, Arc::new(backend), limit);
                }
            }
        }
        builder = builder.retry(self.retry_policy());
        if let Some(c) = cache {
            builder = builder.cache(c);
        }
        Ok(builder.build()?)
    }
}
