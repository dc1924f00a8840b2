//! Provider implementations: live HTTP, record, replay, and scripted.

use crate::{request_digest, GatewayError, GenerationRequest};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

/// Something that can answer a completion request with raw text.
pub trait Provider: Send + Sync {
    fn complete(&self, request: &GenerationRequest) -> Result<String, GatewayError>;
}

/// How the pipeline talks to a provider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderMode {
    Live,
    Record,
    Replay,
}

// --- fixture store ---------------------------------------------------------

/// On-disk layout: one JSON document per request digest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureDocument {
    pub digest: String,
    /// The full canonical request, kept for auditability; replay looks up by
    /// file name alone.
    pub request: serde_json::Value,
    pub response: String,
}

/// Directory of recorded request/response fixtures.
#[derive(Debug, Clone)]
pub struct FixtureStore {
    dir: PathBuf,
}

impl FixtureStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FixtureStore { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, digest: &str) -> PathBuf {
        self.dir.join(format!("{digest}.json"))
    }

    pub fn contains(&self, digest: &str) -> bool {
        self.path_for(digest).is_file()
    }

    pub fn load(&self, digest: &str) -> Result<Option<String>, GatewayError> {
        let path = self.path_for(digest);
        if !path.is_file() {
            return Ok(None);
        }
        let raw = std::fs::read_to_string(&path)
            .map_err(|e| GatewayError::FixtureStore(format!("read {}: {e}", path.display())))?;
        let doc: FixtureDocument = serde_json::from_str(&raw)
            .map_err(|e| GatewayError::FixtureStore(format!("parse {}: {e}", path.display())))?;
        Ok(Some(doc.response))
    }

    pub fn store(&self, request: &GenerationRequest, response: &str) -> Result<(), GatewayError> {
        std::fs::create_dir_all(&self.dir)
            .map_err(|e| GatewayError::FixtureStore(format!("mkdir {}: {e}", self.dir.display())))?;
        let digest = request_digest(request);
        let doc = FixtureDocument {
            digest: digest.clone(),
            request: serde_json::to_value(request).expect("request serializes"),
            response: response.to_string(),
        };
        let path = self.path_for(&digest);
        let body = serde_json::to_string_pretty(&doc).expect("fixture serializes");
        std::fs::write(&path, body)
            .map_err(|e| GatewayError::FixtureStore(format!("write {}: {e}", path.display())))
    }
}

// --- replay ----------------------------------------------------------------

/// Serves responses from a fixture directory and nothing else. Holds no HTTP
/// client, so replay runs are network-free by construction.
pub struct ReplayProvider {
    store: FixtureStore,
}

impl ReplayProvider {
    pub fn new(store: FixtureStore) -> Self {
        ReplayProvider { store }
    }
}

impl Provider for ReplayProvider {
    fn complete(&self, request: &GenerationRequest) -> Result<String, GatewayError> {
        let digest = request_digest(request);
        match self.store.load(&digest)? {
            Some(response) => Ok(response),
            None => Err(GatewayError::FixtureMiss {
                digest,
                model_id: request.model_id.clone(),
                schema: request.response_schema.clone(),
            }),
        }
    }
}

// --- record ----------------------------------------------------------------

/// Forwards to an inner provider and persists every successful exchange.
/// Writes are serialized; concurrent identical requests last-write-win with
/// identical content.
pub struct RecordProvider {
    inner: Box<dyn Provider>,
    store: FixtureStore,
    write_lock: Mutex<()>,
}

impl RecordProvider {
    pub fn new(inner: Box<dyn Provider>, store: FixtureStore) -> Self {
        RecordProvider {
            inner,
            store,
            write_lock: Mutex::new(()),
        }
    }
}

impl Provider for RecordProvider {
    fn complete(&self, request: &GenerationRequest) -> Result<String, GatewayError> {
        let response = self.inner.complete(request)?;
        let _guard = self.write_lock.lock().expect("record lock poisoned");
        self.store.store(request, &response)?;
        Ok(response)
    }
}

// --- live ------------------------------------------------------------------

/// Environment variable naming the chat-completions endpoint URL.
pub const ENV_ENDPOINT: &str = "UNDERSPEC_LLM_ENDPOINT";
/// Environment variable holding the bearer credential. Credentials are only
/// ever read from the environment, never from config files.
pub const ENV_API_KEY: &str = "UNDERSPEC_LLM_API_KEY";

const TRANSPORT_RETRIES: usize = 3;

/// Minimal OpenAI-style chat-completions client.
pub struct LiveProvider {
    endpoint: String,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl LiveProvider {
    /// Builds from `UNDERSPEC_LLM_ENDPOINT` / `UNDERSPEC_LLM_API_KEY`.
    /// Fails fast when either is unset so misconfiguration surfaces before
    /// any pipeline work starts.
    pub fn from_env() -> Result<Self, GatewayError> {
        let endpoint = std::env::var(ENV_ENDPOINT)
            .map_err(|_| GatewayError::Config(format!("{ENV_ENDPOINT} is not set")))?;
        let api_key = std::env::var(ENV_API_KEY)
            .map_err(|_| GatewayError::Config(format!("{ENV_API_KEY} is not set")))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(300))
            .build()
            .map_err(|e| GatewayError::Config(format!("http client: {e}")))?;
        Ok(LiveProvider {
            endpoint,
            api_key,
            client,
        })
    }

    fn call_once(&self, request: &GenerationRequest) -> Result<String, String> {
        let mut body = serde_json::json!({
            "model": request.model_id,
            "temperature": request.temperature,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {"role": "user", "content": request.user_prompt},
            ],
        });
        if let Some(max) = request.max_output_tokens {
            body["max_tokens"] = serde_json::json!(max);
        }
        let resp = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| format!("send: {e}"))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| format!("read body: {e}"))?;
        if !status.is_success() {
            return Err(format!("status {status}: {text}"));
        }
        let parsed: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| format!("parse body: {e}"))?;
        parsed["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| format!("no message content in response: {text}"))
    }
}

impl Provider for LiveProvider {
    fn complete(&self, request: &GenerationRequest) -> Result<String, GatewayError> {
        let mut last = String::new();
        for attempt in 1..=TRANSPORT_RETRIES {
            match self.call_once(request) {
                Ok(text) => return Ok(text),
                Err(e) => {
                    log::warn!("provider attempt {attempt}/{TRANSPORT_RETRIES} failed: {e}");
                    last = e;
                    std::thread::sleep(Duration::from_millis(200 * attempt as u64));
                }
            }
        }
        Err(GatewayError::Transport(last))
    }
}

// --- scripted --------------------------------------------------------------

/// Returns canned responses in order regardless of the request. Drives the
/// retry and validation paths in tests without any fixture plumbing.
pub struct ScriptedProvider {
    responses: Mutex<VecDeque<String>>,
}

impl ScriptedProvider {
    pub fn new(responses: Vec<String>) -> Self {
        ScriptedProvider {
            responses: Mutex::new(responses.into()),
        }
    }
}

impl Provider for ScriptedProvider {
    fn complete(&self, _request: &GenerationRequest) -> Result<String, GatewayError> {
        self.responses
            .lock()
            .expect("script lock poisoned")
            .pop_front()
            .ok_or_else(|| GatewayError::Transport("scripted provider exhausted".into()))
    }
}
