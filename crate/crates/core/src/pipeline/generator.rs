//! Answer generators: the remote HTTP contract and a scripted mock.

use std::io;
use std::sync::Mutex;
use std::time::Duration;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::retrieval::Candidate;

pub const INSTRUCTION: &str = "Cite only from the provided list of candidate cases. \
If none of them supports an answer, set abstain to true.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireCandidate {
    pub citation: String,
    pub name: String,
    pub court: String,
    pub year: Option<i64>,
    pub summary: String,
}

impl From<&Candidate> for WireCandidate {
    fn from(c: &Candidate) -> Self {
        WireCandidate {
            citation: c.citation.to_string(),
            name: c.name.clone(),
            court: c.court.clone(),
            year: c.year,
            summary: c.summary.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorRequest {
    pub query: String,
    pub candidates: Vec<WireCandidate>,
    pub instruction: String,
    pub rejection_reason: Option<String>,
    /// Zero-based generation index within one query; not sent on the wire.
    #[serde(skip)]
    pub attempt: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorResponse {
    #[serde(rename = "answer", alias = "answer_text", default)]
    pub answer_text: String,
    #[serde(default)]
    pub citations: Vec<String>,
    #[serde(default)]
    pub abstain: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("generator timed out")]
    Timeout,
    #[error("generator failed: {0}")]
    Failed(String),
    #[error("generator unreachable: {0}")]
    Unreachable(String),
}

pub trait Generator {
    fn generate(&self, request: &GeneratorRequest) -> Result<GeneratorResponse, GeneratorError>;
}

impl<G: Generator + ?Sized> Generator for &G {
    fn generate(&self, request: &GeneratorRequest) -> Result<GeneratorResponse, GeneratorError> {
        (**self).generate(request)
    }
}

/// POSTs the request as JSON and expects a JSON response body.
pub struct HttpGenerator {
    url: String,
    agent: ureq::Agent,
}

impl HttpGenerator {
    pub fn new(url: impl Into<String>, timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build();
        HttpGenerator {
            url: url.into(),
            agent: config.into(),
        }
    }

    pub fn url(&self) -> &str {
        &self.url
    }
}

fn classify_transport(err: ureq::Error) -> GeneratorError {
    match err {
        ureq::Error::Timeout(_) => GeneratorError::Timeout,
        ureq::Error::HostNotFound | ureq::Error::ConnectionFailed | ureq::Error::BadUri(_) => {
            GeneratorError::Unreachable(err.to_string())
        }
        ureq::Error::Io(e) => match e.kind() {
            io::ErrorKind::TimedOut | io::ErrorKind::WouldBlock => GeneratorError::Timeout,
            io::ErrorKind::ConnectionRefused
            | io::ErrorKind::AddrNotAvailable
            | io::ErrorKind::NotConnected
            | io::ErrorKind::HostUnreachable
            | io::ErrorKind::NetworkUnreachable => GeneratorError::Unreachable(e.to_string()),
            _ => GeneratorError::Failed(e.to_string()),
        },
        other => GeneratorError::Failed(other.to_string()),
    }
}

impl Generator for HttpGenerator {
    fn generate(&self, request: &GeneratorRequest) -> Result<GeneratorResponse, GeneratorError> {
        let mut resp = self
            .agent
            .post(&self.url)
            .send_json(request)
            .map_err(classify_transport)?;
        let status = resp.status();
        if !status.is_success() {
            return Err(GeneratorError::Failed(format!("HTTP {}", status.as_u16())));
        }
        resp.body_mut()
            .read_json::<GeneratorResponse>()
            .map_err(|e| match e {
                ureq::Error::Timeout(_) => GeneratorError::Timeout,
                other => GeneratorError::Failed(format!("malformed response body: {other}")),
            })
    }
}

/// One scripted generator turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MockStep {
    Timeout { timeout: bool },
    Failure { failure: String },
    Unreachable { unreachable: bool },
    Respond(GeneratorResponse),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockRule {
    /// Regex matched against the query text.
    pub pattern: String,
    /// Step `i` answers attempt `i`; the last step repeats.
    pub steps: Vec<MockStep>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockScript {
    #[serde(default)]
    pub rules: Vec<MockRule>,
    #[serde(default)]
    pub fallback: Vec<MockStep>,
}

#[derive(Debug, Error)]
pub enum MockScriptError {
    #[error("mock script json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("mock rule {index}: {source}")]
    Pattern { index: usize, source: regex::Error },
}

/// Table-driven generator: the first rule whose pattern matches the query
/// supplies the response for each attempt. Unmatched queries abstain.
pub struct MockGenerator {
    rules: Vec<(Regex, Vec<MockStep>)>,
    fallback: Vec<MockStep>,
    requests: Mutex<Vec<GeneratorRequest>>,
}

impl MockGenerator {
    pub fn new(script: MockScript) -> Result<Self, MockScriptError> {
        let rules = script
            .rules
            .into_iter()
            .enumerate()
            .map(|(index, r)| {
                Regex::new(&r.pattern)
                    .map(|re| (re, r.steps))
                    .map_err(|source| MockScriptError::Pattern { index, source })
            })
            .collect::<Result<_, _>>()?;
        Ok(MockGenerator {
            rules,
            fallback: script.fallback,
            requests: Mutex::new(Vec::new()),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, MockScriptError> {
        Self::new(serde_json::from_str(text)?)
    }

    /// Answers every query with the same steps.
    pub fn always(steps: Vec<MockStep>) -> Self {
        Self::new(MockScript {
            rules: Vec::new(),
            fallback: steps,
        })
        .expect("no patterns to compile")
    }

    /// Every request received so far, in order.
    pub fn requests(&self) -> Vec<GeneratorRequest> {
        self.requests.lock().expect("mock lock").clone()
    }

    pub fn calls(&self) -> usize {
        self.requests.lock().expect("mock lock").len()
    }
}

impl Generator for MockGenerator {
    fn generate(&self, request: &GeneratorRequest) -> Result<GeneratorResponse, GeneratorError> {
        self.requests.lock().expect("mock lock").push(request.clone());
        let steps = self
            .rules
            .iter()
            .find(|(re, _)| re.is_match(&request.query))
            .map(|(_, s)| s)
            .unwrap_or(&self.fallback);
        let Some(step) = steps.get(request.attempt).or(steps.last()) else {
            return Ok(GeneratorResponse {
                abstain: true,
                ..GeneratorResponse::default()
            });
        };
        match step {
            MockStep::Timeout { .. } => Err(GeneratorError::Timeout),
            MockStep::Failure { failure } => Err(GeneratorError::Failed(failure.clone())),
            MockStep::Unreachable { .. } => Err(GeneratorError::Unreachable("scripted".into())),
            MockStep::Respond(r) => Ok(r.clone()),
        }
    }
}
