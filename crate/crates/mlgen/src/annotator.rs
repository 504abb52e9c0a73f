//! Annotator clients: an HTTP chat-completions client with retries, and a
//! caching wrapper for any client.

use std::time::Duration;

use mlgen_core::cot::{AnnotationRequest, AnnotatorClient};
use serde_json::{json, Value};

use crate::cache::{cache_key, AnnotationCache};
use crate::error::{PipelineError, Result};
use crate::manifest::AnnotatorConfig;

pub const ENDPOINT_VAR: &str = "MLGEN_ANNOTATOR_ENDPOINT";
pub const MODEL_VAR: &str = "MLGEN_ANNOTATOR_MODEL";
pub const KEY_VAR: &str = "MLGEN_ANNOTATOR_KEY";

/// Posts OpenAI-style chat-completion requests and returns the first
/// choice's message content. Transport errors, 429 and 5xx responses are
/// retried with exponential backoff; other statuses fail at once.
#[derive(Debug, Clone)]
pub struct HttpAnnotator {
    agent: ureq::Agent,
    endpoint: String,
    model: String,
    key: Option<String>,
    attempts: u32,
    backoff: Duration,
}

impl HttpAnnotator {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, key: Option<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpAnnotator {
            agent,
            endpoint: endpoint.into(),
            model: model.into(),
            key,
            attempts: 3,
            backoff: Duration::from_millis(500),
        }
    }

    /// Builds a client from the manifest, falling back to the environment
    /// for endpoint and model. The key comes only from the environment.
    pub fn from_config(cfg: &AnnotatorConfig) -> Result<Self> {
        let var = |name: &str| std::env::var(name).ok().filter(|v| !v.is_empty());
        let endpoint = cfg.endpoint.clone().or_else(|| var(ENDPOINT_VAR)).ok_or_else(|| {
            PipelineError::Usage(format!(
                "http annotator needs an endpoint (manifest or {})",
                ENDPOINT_VAR
            ))
        })?;
        let model =
            cfg.model.clone().or_else(|| var(MODEL_VAR)).ok_or_else(|| {
                PipelineError::Usage(format!("http annotator needs a model (manifest or {})", MODEL_VAR))
            })?;
        Ok(
            HttpAnnotator::new(endpoint, model, var(KEY_VAR), Duration::from_secs(cfg.timeout_secs))
                .with_retries(cfg.attempts, Duration::from_millis(500)),
        )
    }

    pub fn with_retries(mut self, attempts: u32, backoff: Duration) -> Self {
        self.attempts = attempts.max(1);
        self.backoff = backoff;
        self
    }

    /// Identity used in cache keys: replies depend on endpoint and model.
    pub fn identity(&self) -> String {
        format!("http {} {}", self.endpoint, self.model)
    }

    fn attempt(&self, body: &Value) -> std::result::Result<String, (bool, String)> {
        let mut req = self.agent.post(&self.endpoint);
        if let Some(key) = &self.key {
            req = req.header("Authorization", &format!("Bearer {}", key));
        }
        let mut resp = req.send_json(body).map_err(|e| (true, e.to_string()))?;
        let status = resp.status().as_u16();
        if status == 429 || status >= 500 {
            return Err((true, format!("status {}", status)));
        }
        if !(200..300).contains(&status) {
            return Err((false, format!("status {}", status)));
        }
        let v: Value = resp.body_mut().read_json().map_err(|e| (false, e.to_string()))?;
        v["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| (false, "response has no choices[0].message.content".into()))
    }
}

impl AnnotatorClient for HttpAnnotator {
    fn annotate(&self, request: &AnnotationRequest) -> std::result::Result<String, String> {
        let body = json!({
            "model": self.model,
            "temperature": 0,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
        });
        let mut delay = self.backoff;
        let mut last = String::new();
        for i in 0..self.attempts {
            match self.attempt(&body) {
                Ok(reply) => return Ok(reply),
                Err((retry, msg)) => {
                    last = msg;
                    if !retry {
                        break;
                    }
                    if i + 1 < self.attempts {
                        std::thread::sleep(delay);
                        delay *= 2;
                    }
                }
            }
        }
        Err(format!("annotator request failed: {}", last))
    }
}

/// Serves replies from the cache and stores fresh ones. Failed calls are
/// not cached.
pub struct Cached<'a, C> {
    pub inner: C,
    pub identity: String,
    pub cache: &'a AnnotationCache,
}

impl<C: AnnotatorClient> AnnotatorClient for Cached<'_, C> {
    fn annotate(&self, request: &AnnotationRequest) -> std::result::Result<String, String> {
        let key = cache_key(&self.identity, request);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit);
        }
        let reply = self.inner.annotate(request)?;
        self.cache.insert(key, reply.clone());
        Ok(reply)
    }
}
