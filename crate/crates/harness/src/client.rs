//! Uniform generation interface: role routing, caching, retries with
//! backoff and per-backend rate limiting.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use mcqa_core::backoff::{RateLimit, RetryPolicy, TokenBucket};
use mcqa_core::{ModelRequest, Role, Temperature};
use serde::{Deserialize, Serialize};

use crate::cache::{CacheEntry, ResponseCache};

/// How a backend call failed. Only `Transient` is retried.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendFailure {
    /// 429, 5xx, timeouts, dropped connections.
    Transient(String),
    Auth(String),
    Fatal(String),
}

pub trait Backend: Send + Sync {
    fn generate(&self, req: &ModelRequest) -> Result<String, BackendFailure>;
}

/// Time source for retry waits, rate limiting and latency measurement.
pub trait Clock: Send + Sync {
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
}

pub struct SystemClock {
    origin: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d)
    }
}

/// A clock that only moves when someone sleeps on it.
#[derive(Default)]
pub struct VirtualClock {
    now: Mutex<Duration>,
}

impl VirtualClock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn advance(&self, d: Duration) {
        *self.now.lock().expect("clock lock") += d;
    }
}

impl Clock for VirtualClock {
    fn now(&self) -> Duration {
        *self.now.lock().expect("clock lock")
    }

    fn sleep(&self, d: Duration) {
        self.advance(d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub model_id: String,
    pub temperature: Temperature,
    /// Name of a backend registered with the client.
    pub backend: String,
    pub max_output: u32,
}

impl Route {
    pub fn default_for(role: Role, backend: &str) -> Self {
        Self {
            model_id: role.default_model().into(),
            temperature: role.default_temperature(),
            backend: backend.into(),
            max_output: role.default_max_output(),
        }
    }
}

/// Role → model binding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RoleRouting(pub BTreeMap<Role, Route>);

impl RoleRouting {
    /// Reference defaults for every role, all on one backend.
    pub fn defaults(backend: &str) -> Self {
        Self(
            Role::ALL
                .iter()
                .map(|r| (*r, Route::default_for(*r, backend)))
                .collect(),
        )
    }

    pub fn get(&self, role: Role) -> Option<&Route> {
        self.0.get(&role)
    }

    pub fn set_backend_all(&mut self, backend: &str) {
        for r in self.0.values_mut() {
            r.backend = backend.into();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelResponse {
    pub text: String,
    pub model_id: String,
    pub latency_ms: u64,
    pub from_cache: bool,
    pub attempt_count: u32,
    pub cache_key: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClientError {
    #[error("{role} ({model_id}): still failing after {attempts} attempts: {message}")]
    RateLimited {
        role: Role,
        model_id: String,
        attempts: u32,
        message: String,
    },
    #[error("{role} ({model_id}): authentication failed: {message}")]
    AuthError {
        role: Role,
        model_id: String,
        message: String,
    },
    #[error("{role} ({model_id}): {message}")]
    BackendError {
        role: Role,
        model_id: String,
        message: String,
    },
    #[error("no route bound for role {0}")]
    Unrouted(Role),
    #[error("configuration: {0}")]
    Config(String),
}

impl ClientError {
    pub fn is_config(&self) -> bool {
        matches!(self, ClientError::Unrouted(_) | ClientError::Config(_))
    }
}

struct Slot {
    backend: Arc<dyn Backend>,
    limiter: Option<Mutex<TokenBucket>>,
}

pub struct ModelClient {
    routing: RoleRouting,
    backends: HashMap<String, Slot>,
    retry: RetryPolicy,
    cache: Option<Arc<ResponseCache>>,
    clock: Arc<dyn Clock>,
}

pub struct ClientBuilder {
    routing: RoleRouting,
    backends: HashMap<String, Slot>,
    retry: RetryPolicy,
    cache: Option<Arc<ResponseCache>>,
    clock: Arc<dyn Clock>,
}

impl ClientBuilder {
    pub fn backend(
        mut self,
        name: &str,
        backend: Arc<dyn Backend>,
        limit: Option<RateLimit>,
    ) -> Self {
        self.backends.insert(
            name.into(),
            Slot {
                backend,
                limiter: limit.map(|l| Mutex::new(TokenBucket::new(l))),
            },
        );
        self
    }

    pub fn retry(mut self, p: RetryPolicy) -> Self {
        self.retry = p;
        self
    }

    pub fn cache(mut self, c: Arc<ResponseCache>) -> Self {
        self.cache = Some(c);
        self
    }

    pub fn clock(mut self, c: Arc<dyn Clock>) -> Self {
        self.clock = c;
        self
    }

    pub fn build(self) -> Result<ModelClient, ClientError> {
        for role in [Role::Describer, Role::Aggregator, Role::Reasoner] {
            if self.routing.get(role).is_none() {
                return Err(ClientError::Unrouted(role));
            }
        }
        for (role, route) in &self.routing.0 {
            if !self.backends.contains_key(&route.backend) {
                return Err(ClientError::Config(format!(
                    "role {role} routed to unknown backend {:?}",
                    route.backend
                )));
            }
        }
        if self.retry.max_attempts == 0 {
            return Err(ClientError::Config(
                "retry.max_attempts must be at least 1".into(),
            ));
        }
        Ok(ModelClient {
            routing: self.routing,
            backends: self.backends,
            retry: self.retry,
            cache: self.cache,
            clock: self.clock,
        })
    }
}

impl ModelClient {
    pub fn builder(routing: RoleRouting) -> ClientBuilder {
        ClientBuilder {
            routing,
            backends: HashMap::new(),
            retry: RetryPolicy::default(),
            cache: None,
            clock: Arc::new(SystemClock::default()),
        }
    }

    pub fn routing(&self) -> &RoleRouting {
        &self.routing
    }

    pub fn cache(&self) -> Option<&Arc<ResponseCache>> {
        self.cache.as_ref()
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    /// A request for `role` with the routed model, temperature and budget.
    pub fn request(
        &self,
        role: Role,
        prompt: impl Into<String>,
    ) -> Result<ModelRequest, ClientError> {
        let route = self.routing.get(role).ok_or(ClientError::Unrouted(role))?;
        Ok(ModelRequest::new(role, route.model_id.clone(), prompt)
            .with_temperature(route.temperature)
            .with_max_output(route.max_output))
    }

    fn acquire(&self, slot: &Slot) {
        let Some(limiter) = &slot.limiter else { return };
        loop {
            let wait = match limiter
                .lock()
                .expect("limiter lock")
                .try_acquire(self.clock.now())
            {
                Ok(()) => return,
                Err(wait) => wait,
            };
            self.clock.sleep(wait);
        }
    }

    pub fn complete(&self, req: &ModelRequest) -> Result<ModelResponse, ClientError> {
        let route = self
            .routing
            .get(req.role)
            .ok_or(ClientError::Unrouted(req.role))?;
        let slot = self
            .backends
            .get(&route.backend)
            .ok_or_else(|| ClientError::Config(format!("unknown backend {:?}", route.backend)))?;
        let key = req.cache_key();
        let started = self.clock.now();
        let elapsed_ms =
            |clock: &dyn Clock| (clock.now().saturating_sub(started)).as_millis() as u64;

        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(&key)) {
            return Ok(ModelResponse {
                text: hit.text,
                model_id: req.model_id.clone(),
                latency_ms: elapsed_ms(&*self.clock),
                from_cache: true,
                attempt_count: 1,
                cache_key: key,
            });
        }

        let err_fields = || (req.role, req.model_id.clone());
        let mut attempt = 1;
        loop {
            let wait = self.retry.delay(attempt, &key);
            if !wait.is_zero() {
                self.clock.sleep(wait);
            }
            self.acquire(slot);
            match slot.backend.generate(req) {
                Ok(text) => {
                    if let Some(cache) = &self.cache {
                        let entry = CacheEntry {
                            key: key.clone(),
                            role: req.role,
                            model_id: req.model_id.clone(),
                            text: text.clone(),
                        };
                        if let Err(e) = cache.put(entry) {
                            log::warn!("cache write failed: {e}");
                        }
                    }
                    return Ok(ModelResponse {
                        text,
                        model_id: req.model_id.clone(),
                        latency_ms: elapsed_ms(&*self.clock),
                        from_cache: false,
                        attempt_count: attempt,
                        cache_key: key,
                    });
                }
                Err(BackendFailure::Transient(message)) => {
                    if !self.retry.allows(attempt + 1) {
                        let (role, model_id) = err_fields();
                        return Err(ClientError::RateLimited {
                            role,
                            model_id,
                            attempts: attempt,
                            message,
                        });
                    }
                    log::debug!(
                        "{} attempt {attempt} failed transiently: {message}",
                        req.role
                    );
                    attempt += 1;
                }
                Err(BackendFailure::Auth(message)) => {
                    let (role, model_id) = err_fields();
                    return Err(ClientError::AuthError {
                        role,
                        model_id,
                        message,
                    });
                }
                Err(BackendFailure::Fatal(message)) => {
                    let (role, model_id) = err_fields();
                    return Err(ClientError::BackendError {
                        role,
                        model_id,
                        message,
                    });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicU32, Ordering};

    struct Flaky {
        failures: u32,
        calls: AtomicU32,
        kind: fn(String) -> BackendFailure,
    }

    impl Backend for Flaky {
        fn generate(&self, _req: &ModelRequest) -> Result<String, BackendFailure> {
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            if n < self.failures {
                Err((self.kind)(format!("failure {n}")))
            } else {
                Ok("ok".into())
            }
        }
    }

    fn client(failures: u32, kind: fn(String) -> BackendFailure) -> (ModelClient, Arc<Flaky>) {
        let b = Arc::new(Flaky {
            failures,
            calls: AtomicU32::new(0),
            kind,
        });
        let c = ModelClient::builder(RoleRouting::defaults("b"))
            .backend("b", b.clone(), None)
            .clock(Arc::new(VirtualClock::new()))
            .build()
            .unwrap();
        (c, b)
    }

    #[test]
    fn retries_transient_failures() {
        let (c, _) = client(2, BackendFailure::Transient);
        let r = c
            .complete(&c.request(Role::Reasoner, "P").unwrap())
            .unwrap();
        assert_eq!(r.attempt_count, 3);
        assert!(!r.from_cache);
    }

    #[test]
    fn gives_up_after_max_attempts() {
        let (c, b) = client(99, BackendFailure::Transient);
        let err = c
            .complete(&c.request(Role::Reasoner, "P").unwrap())
            .unwrap_err();
        assert!(matches!(err, ClientError::RateLimited { attempts: 5, .. }));
        assert_eq!(b.calls.load(Ordering::SeqCst), 5);
    }

    #[test]
    fn non_retryable_failures_are_not_retried() {
        let (c, b) = client(1, BackendFailure::Auth);
        let err = c
            .complete(&c.request(Role::Describer, "P").unwrap())
            .unwrap_err();
        assert!(matches!(
            err,
            ClientError::AuthError {
                role: Role::Describer,
                ..
            }
        ));
        assert_eq!(b.calls.load(Ordering::SeqCst), 1);

        let (c, b) = client(1, BackendFailure::Fatal);
        let err = c
            .complete(&c.request(Role::Describer, "P").unwrap())
            .unwrap_err();
        assert!(err.to_string().contains("gemini-2.5-flash"));
        assert_eq!(b.calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn unknown_backend_is_a_config_error() {
        let err = ModelClient::builder(RoleRouting::defaults("missing"))
            .build()
            .err()
            .unwrap();
        assert!(err.is_config());
        let mut routing = RoleRouting::defaults("b");
        routing.0.remove(&Role::Aggregator);
        let err = ModelClient::builder(routing).build().err().unwrap();
        assert_eq!(err, ClientError::Unrouted(Role::Aggregator));
    }

    #[test]
    fn cache_serves_second_call() {
        let b = Arc::new(Flaky {
            failures: 0,
            calls: AtomicU32::new(0),
            kind: BackendFailure::Fatal,
        });
        let c = ModelClient::builder(RoleRouting::defaults("b"))
            .backend("b", b.clone(), None)
            .cache(Arc::new(ResponseCache::in_memory()))
            .build()
            .unwrap();
        let req = c.request(Role::Reasoner, "P").unwrap();
        let first = c.complete(&req).unwrap();
        let second = c.complete(&req).unwrap();
        assert!(!first.from_cache);
        assert!(second.from_cache);
        assert_eq!(second.attempt_count, 1);
        assert_eq!(first.text, second.text);
        assert_eq!(b.calls.load(Ordering::SeqCst), 1);
    }
}
