//! Works-query metadata client.
//!
//! Responses follow the Crossref works convention:
//! `{"message": {"items": [{"DOI": .., "title": [..], "author": [{"given": .., "family": ..}]}]}}`.
//! Every response body is keyed by the SHA-256 of the query text. In fixture
//! mode bodies are read from `<fixtures>/<hash>.json` and the transport is
//! never touched; in live mode bodies are cached verbatim under the cache
//! directory.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::score::MetadataCandidate;
use crate::corpus::normalize_doi;

pub const METADATA_URL_ENV: &str = "CITEGRAPH_METADATA_URL";
pub const CACHE_DIR_ENV: &str = "CITEGRAPH_CACHE_DIR";
pub const DEFAULT_BASE_URL: &str = "https://api.crossref.org";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClientError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("no fixture for query hash {0}")]
    FixtureMissing(String),
    #[error("unparseable response: {0}")]
    Parse(String),
    #[error("cache: {0}")]
    Cache(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct TransportError {
    pub message: String,
    /// Timeouts, 429 and 5xx are worth retrying; other failures are not.
    pub retryable: bool,
}

/// Anything that can answer a free-text works query.
pub trait MetadataSource: Send + Sync {
    /// Candidates in relevance order, at most `rows` of them.
    fn query(&self, text: &str, rows: usize) -> Result<Vec<MetadataCandidate>, ClientError>;
}

/// Raw HTTP GET.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str, params: &[(&str, String)]) -> Result<String, TransportError>;
}

/// Blocking HTTP transport.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .user_agent(concat!("citegraph/", env!("CARGO_PKG_VERSION")))
            .build()
            .into();
        HttpTransport { agent }
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str, params: &[(&str, String)]) -> Result<String, TransportError> {
        let mut req = self.agent.get(url);
        for (k, v) in params {
            req = req.query(*k, v);
        }
        let mut resp = req.call().map_err(|e| TransportError {
            message: e.to_string(),
            retryable: true,
        })?;
        let status = resp.status().as_u16();
        if status != 200 {
            return Err(TransportError {
                message: format!("HTTP {status}"),
                retryable: status == 429 || status >= 500,
            });
        }
        resp.body_mut().read_to_string().map_err(|e| TransportError {
            message: e.to_string(),
            retryable: true,
        })
    }
}

/// Transport that refuses every request; installed in fixture mode.
#[derive(Debug, Default)]
pub struct NoNetwork;

impl Transport for NoNetwork {
    fn get(&self, url: &str, _: &[(&str, String)]) -> Result<String, TransportError> {
        Err(TransportError {
            message: format!("network disabled, refused {url}"),
            retryable: false,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ClientConfig {
    pub base_url: String,
    pub fixtures_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub requests_per_second: f64,
    pub max_attempts: u32,
    /// Delay before the second attempt; doubles after each failure.
    pub backoff: Duration,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            base_url: DEFAULT_BASE_URL.to_string(),
            fixtures_dir: None,
            cache_dir: None,
            requests_per_second: 5.0,
            max_attempts: 3,
            backoff: Duration::from_millis(500),
        }
    }
}

pub struct MetadataClient {
    config: ClientConfig,
    transport: Box<dyn Transport>,
    next_slot: Mutex<Option<Instant>>,
    cache_lock: Mutex<()>,
    requests: AtomicUsize,
}

impl MetadataClient {
    pub fn new(config: ClientConfig, transport: Box<dyn Transport>) -> Self {
        MetadataClient {
            config,
            transport,
            next_slot: Mutex::new(None),
            cache_lock: Mutex::new(()),
            requests: AtomicUsize::new(0),
        }
    }

    /// Reads canned responses only; any network use is refused.
    pub fn fixture(dir: impl Into<PathBuf>) -> Self {
        let config = ClientConfig {
            fixtures_dir: Some(dir.into()),
            ..ClientConfig::default()
        };
        Self::new(config, Box::new(NoNetwork))
    }

    /// Live client configured from `CITEGRAPH_METADATA_URL` and
    /// `CITEGRAPH_CACHE_DIR`.
    pub fn from_env() -> Self {
        let config = ClientConfig {
            base_url: std::env::var(METADATA_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string()),
            cache_dir: std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from),
            ..ClientConfig::default()
        };
        Self::new(config, Box::new(HttpTransport::new(Duration::from_secs(30))))
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    /// Number of requests handed to the transport so far.
    pub fn transport_requests(&self) -> usize {
        self.requests.load(Ordering::Relaxed)
    }

    pub fn query_hash(text: &str) -> String {
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    fn wait_for_slot(&self) {
        if self.config.requests_per_second <= 0.0 {
            return;
        }
        let interval = Duration::from_secs_f64(1.0 / self.config.requests_per_second);
        let wait = {
            let mut next = self.next_slot.lock().unwrap_or_else(|e| e.into_inner());
            let now = Instant::now();
            let slot = match *next {
                Some(t) if t > now => t,
                _ => now,
            };
            *next = Some(slot + interval);
            slot.saturating_duration_since(now)
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }

    fn fetch(&self, text: &str, rows: usize) -> Result<String, ClientError> {
        let url = format!("{}/works", self.config.base_url.trim_end_matches('/'));
        let params = [("query.bibliographic", text.to_string()), ("rows", rows.to_string())];
        let mut delay = self.config.backoff;
        let attempts = self.config.max_attempts.max(1);
        let mut last = String::new();
        for attempt in 1..=attempts {
            self.wait_for_slot();
            self.requests.fetch_add(1, Ordering::Relaxed);
            match self.transport.get(&url, &params) {
                Ok(body) => return Ok(body),
                Err(e) => {
                    last = e.message;
                    if !e.retryable || attempt == attempts {
                        break;
                    }
                    log::debug!("attempt {attempt} failed ({last}), retrying in {delay:?}");
                    std::thread::sleep(delay);
                    delay *= 2;
                }
            }
        }
        Err(ClientError::Transport(last))
    }

    fn write_cache(&self, dir: &Path, key: &str, body: &str) -> Result<(), ClientError> {
        let _guard = self.cache_lock.lock().unwrap_or_else(|e| e.into_inner());
        fs::create_dir_all(dir).map_err(|e| ClientError::Cache(e.to_string()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| ClientError::Cache(e.to_string()))?;
        tmp.write_all(body.as_bytes())
            .map_err(|e| ClientError::Cache(e.to_string()))?;
        tmp.persist(dir.join(format!("{key}.json")))
            .map_err(|e| ClientError::Cache(e.to_string()))?;
        Ok(())
    }

    /// Response body for `text`, from fixtures, cache, or the network.
    pub fn raw_response(&self, text: &str, rows: usize) -> Result<String, ClientError> {
        let key = Self::query_hash(text);
        if let Some(dir) = &self.config.fixtures_dir {
            return fs::read_to_string(dir.join(format!("{key}.json"))).map_err(|_| ClientError::FixtureMissing(key));
        }
        if let Some(dir) = &self.config.cache_dir {
            if let Ok(body) = fs::read_to_string(dir.join(format!("{key}.json"))) {
                return Ok(body);
            }
        }
        let body = self.fetch(text, rows)?;
        if let Some(dir) = &self.config.cache_dir {
            self.write_cache(dir, &key, &body)?;
        }
        Ok(body)
    }
}

impl MetadataSource for MetadataClient {
    fn query(&self, text: &str, rows: usize) -> Result<Vec<MetadataCandidate>, ClientError> {
        let body = self.raw_response(text, rows)?;
        let mut items = parse_works_response(&body)?;
        items.truncate(rows.max(1));
        Ok(items)
    }
}

#[derive(Deserialize)]
struct WorksEnvelope {
    message: Option<WorksMessage>,
    items: Option<Vec<WorkItem>>,
}

#[derive(Deserialize)]
struct WorksMessage {
    #[serde(default)]
    items: Vec<WorkItem>,
}

#[derive(Deserialize)]
struct WorkItem {
    #[serde(rename = "DOI", alias = "doi")]
    doi: Option<String>,
    #[serde(default)]
    title: TitleField,
    #[serde(default)]
    author: Vec<WorkAuthor>,
}

#[derive(Deserialize, Default)]
#[serde(untagged)]
enum TitleField {
    List(Vec<String>),
    One(String),
    #[default]
    Missing,
}

#[derive(Deserialize)]
struct WorkAuthor {
    given: Option<String>,
    family: Option<String>,
    name: Option<String>,
}

impl WorkAuthor {
    fn display(&self) -> String {
        match (&self.given, &self.family, &self.name) {
            (Some(g), Some(f), _) => format!("{} {}", g.trim(), f.trim()),
            (None, Some(f), _) => f.trim().to_string(),
            (_, None, Some(n)) => n.trim().to_string(),
            (Some(g), None, None) => g.trim().to_string(),
            (None, None, None) => String::new(),
        }
    }
}

/// Extracts candidates from a works response body. Items without a DOI are
/// skipped.
pub fn parse_works_response(body: &str) -> Result<Vec<MetadataCandidate>, ClientError> {
    let env: WorksEnvelope = serde_json::from_str(body).map_err(|e| ClientError::Parse(e.to_string()))?;
    let items = env.message.map(|m| m.items).or(env.items).unwrap_or_default();
    Ok(items
        .into_iter()
        .filter_map(|it| {
            let doi = normalize_doi(it.doi.as_deref()?)?;
            let title = match it.title {
                TitleField::List(v) => v.into_iter().next().unwrap_or_default(),
                TitleField::One(s) => s,
                TitleField::Missing => String::new(),
            };
            let authors = it
                .author
                .iter()
                .map(WorkAuthor::display)
                .filter(|a| !a.is_empty())
                .collect();
            Some(MetadataCandidate {
                doi,
                title: title.trim().to_string(),
                authors,
            })
        })
        .collect())
}

/// Renders candidates as a works response body, the inverse of
/// [`parse_works_response`] for authors written as "given family".
pub fn works_response_body(candidates: &[MetadataCandidate]) -> String {
    let items: Vec<serde_json::Value> = candidates
        .iter()
        .map(|c| {
            let authors: Vec<serde_json::Value> = c
                .authors
                .iter()
                .map(|a| match a.rsplit_once(' ') {
                    Some((given, family)) => serde_json::json!({"given": given, "family": family}),
                    None => serde_json::json!({"family": a}),
                })
                .collect();
            serde_json::json!({"DOI": c.doi, "title": [c.title], "author": authors})
        })
        .collect();
    serde_json::json!({"status": "ok", "message": {"items": items}}).to_string()
}
