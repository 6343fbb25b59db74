//! Retrieve, generate, verify; revise on rejection; abstain when revisions
//! run out.

mod generator;

pub use generator::{
    Generator, GeneratorError, GeneratorRequest, GeneratorResponse, HttpGenerator, MockGenerator, MockRule,
    MockScript, MockScriptError, MockStep, WireCandidate, INSTRUCTION,
};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::LegalGraph;
use crate::ingest::Citation;
use crate::procedural::{procedural_next_step, ProceduralContext};
use crate::retrieval::{retrieve, Query, RetrievalError, DEFAULT_LIMIT};
use crate::text::{resolve_sections, scan_citations};
use crate::verifier::{verify, Claim, ConfidenceLabel, ConflictType, VerificationReport, VerificationStatus};

pub const SCOPE_NOTE: &str = "Verification is relative to the ingested case graph only. \
A VALID status means the cited cases exist in that graph with no recorded overruling or \
unresolved conflict; it is not a statement about all of Indian law.";

pub const NO_VERIFIED_ANSWER: &str = "No verified answer is available from the current corpus.";

pub const UNRESOLVED_RESOLUTION: &str = "unresolved - refer to larger bench ruling if available";

/// Confidence reported for abstentions. A fixed marker, not a probability.
pub const ABSTAIN_CONFIDENCE: f64 = 0.50;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub max_revisions: usize,
    pub generator_timeout_seconds: u64,
    pub retrieval_limit: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_url: Option<String>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            max_revisions: 2,
            generator_timeout_seconds: 300,
            retrieval_limit: DEFAULT_LIMIT,
            generator_url: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OutputStatus {
    Valid,
    Invalid,
    Conflict,
    Stale,
    Abstained,
}

impl From<VerificationStatus> for OutputStatus {
    fn from(s: VerificationStatus) -> Self {
        match s {
            VerificationStatus::Valid => OutputStatus::Valid,
            VerificationStatus::Invalid => OutputStatus::Invalid,
            VerificationStatus::Conflict => OutputStatus::Conflict,
            VerificationStatus::Stale => OutputStatus::Stale,
        }
    }
}

impl fmt::Display for OutputStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputStatus::Valid => "VALID",
            OutputStatus::Invalid => "INVALID",
            OutputStatus::Conflict => "CONFLICT",
            OutputStatus::Stale => "STALE",
            OutputStatus::Abstained => "ABSTAINED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub answer: String,
    pub citations: Vec<Citation>,
    pub verification: OutputStatus,
    pub confidence: f64,
    pub confidence_label: Option<ConfidenceLabel>,
    pub supporting_paths: Vec<String>,
    pub conflict: bool,
    pub conflict_type: Option<ConflictType>,
    pub resolution: Option<String>,
    pub procedural_next_step: Option<String>,
    pub attempts: usize,
    #[serde(default)]
    pub cited_sections: Vec<String>,
    pub scope_note: String,
}

/// An abstention record; `reason` follows the fixed no-verified-answer
/// sentence when non-empty.
pub fn abstain_output(reason: &str, attempts: usize) -> PipelineOutput {
    let answer = if reason.trim().is_empty() {
        NO_VERIFIED_ANSWER.to_owned()
    } else {
        format!("{NO_VERIFIED_ANSWER} {}", reason.trim())
    };
    PipelineOutput {
        answer,
        citations: Vec::new(),
        verification: OutputStatus::Abstained,
        confidence: ABSTAIN_CONFIDENCE,
        confidence_label: None,
        supporting_paths: Vec::new(),
        conflict: false,
        conflict_type: None,
        resolution: None,
        procedural_next_step: None,
        attempts,
        cited_sections: Vec::new(),
        scope_note: SCOPE_NOTE.to_owned(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltClaim {
    pub claim: Claim,
    pub warnings: Vec<String>,
}

/// Turns a generator response into a verifiable claim. Section references
/// come from the answer text; citations only from the structured list.
pub fn build_claim(response: &GeneratorResponse, graph: &LegalGraph) -> BuiltClaim {
    let mut warnings = Vec::new();
    let mut cited: Vec<Citation> = Vec::new();
    for raw in &response.citations {
        match Citation::parse(raw) {
            Ok(c) => cited.push(c),
            Err(_) => warnings.push(format!("ignored empty citation entry {raw:?}")),
        }
    }
    let claim = Claim {
        answer_text: response.answer_text.clone(),
        cited_cases: cited,
        cited_sections: resolve_sections(graph, &response.answer_text),
        claimed_rule: None,
        procedural_claim: None,
    }
    .normalized();
    for prose in scan_citations(&response.answer_text) {
        if !claim.cited_cases.iter().any(|c| c.matches(&prose)) {
            warnings.push(format!("answer text mentions {prose} but the citation list does not"));
        }
    }
    BuiltClaim { claim, warnings }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error("{0}")]
    GeneratorUnreachable(String),
}

/// Output plus the non-fatal diagnostics gathered on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub output: PipelineOutput,
    pub diagnostics: Vec<String>,
}

fn rejection_reason(report: &VerificationReport) -> String {
    let mut reason = format!("Previous answer was rejected as {}: {}", report.status, report.note);
    if !report.missing.is_empty() {
        let list: Vec<&str> = report.missing.iter().map(Citation::as_str).collect();
        reason.push_str(&format!(" Not in the candidate graph: {}.", list.join(", ")));
    }
    reason
}

/// The output record for a verified claim, without any generation step.
pub fn verified_output(
    claim: &Claim,
    report: VerificationReport,
    procedural_next_step: Option<String>,
    attempts: usize,
) -> PipelineOutput {
    let first_conflict = report.unresolved_conflicts().next().cloned();
    let conflict = first_conflict.is_some();
    // rejected claims keep their unverifiable citations so metrics can count them
    let citations = if report.status.is_grounded() {
        report.grounded.clone()
    } else {
        claim.cited_cases.clone()
    };
    PipelineOutput {
        answer: claim.answer_text.clone(),
        citations,
        verification: report.status.into(),
        confidence: report.confidence,
        confidence_label: Some(report.confidence_label),
        supporting_paths: report.support_paths,
        conflict,
        conflict_type: first_conflict.map(|c| c.conflict_type),
        resolution: conflict.then(|| UNRESOLVED_RESOLUTION.to_owned()),
        procedural_next_step,
        attempts,
        cited_sections: claim.cited_sections.clone(),
        scope_note: SCOPE_NOTE.to_owned(),
    }
}

/// Runs one query. At most `1 + max_revisions` generations; timeouts and
/// failed calls use up an attempt. Only an unreachable generator is an error.
pub fn run(
    query: &str,
    graph: &LegalGraph,
    generator: &dyn Generator,
    config: &PipelineConfig,
) -> Result<PipelineRun, PipelineError> {
    let retrieval = retrieve(&Query::from_text(query, graph), graph, config.retrieval_limit.max(1))?;
    let candidates: Vec<WireCandidate> = retrieval.candidates.iter().map(WireCandidate::from).collect();
    let mut diagnostics = Vec::new();
    if candidates.is_empty() {
        diagnostics.push("retrieval returned no candidate cases".to_owned());
    }
    let mut rejection: Option<String> = None;
    let total = 1 + config.max_revisions;
    for attempt in 0..total {
        let request = GeneratorRequest {
            query: query.to_owned(),
            candidates: candidates.clone(),
            instruction: INSTRUCTION.to_owned(),
            rejection_reason: rejection.clone(),
            attempt,
        };
        let response = match generator.generate(&request) {
            Ok(r) => r,
            Err(GeneratorError::Unreachable(msg)) => return Err(PipelineError::GeneratorUnreachable(msg)),
            Err(GeneratorError::Timeout) => {
                let msg = format!(
                    "Previous attempt produced no answer within {} seconds.",
                    config.generator_timeout_seconds
                );
                diagnostics.push(format!("attempt {}: generator timed out", attempt + 1));
                rejection = Some(msg);
                continue;
            }
            Err(GeneratorError::Failed(msg)) => {
                diagnostics.push(format!("attempt {}: generator failed: {msg}", attempt + 1));
                rejection = Some("Previous attempt failed to produce a well-formed answer.".to_owned());
                continue;
            }
        };
        if response.abstain {
            let reason = if candidates.is_empty() {
                "The generator abstained; retrieval found no candidate cases."
            } else {
                "The generator abstained."
            };
            return Ok(PipelineRun {
                output: abstain_output(reason, attempt + 1),
                diagnostics,
            });
        }
        let built = build_claim(&response, graph);
        diagnostics.extend(built.warnings.iter().map(|w| format!("attempt {}: {w}", attempt + 1)));
        let report = verify(&built.claim, graph);
        match report.status {
            VerificationStatus::Valid | VerificationStatus::Conflict => {
                let next = procedural_next_step(&ProceduralContext::Query(query.to_owned()), graph);
                return Ok(PipelineRun {
                    output: verified_output(&built.claim, report, next, attempt + 1),
                    diagnostics,
                });
            }
            VerificationStatus::Invalid | VerificationStatus::Stale => {
                diagnostics.push(format!("attempt {}: rejected as {}", attempt + 1, report.status));
                rejection = Some(rejection_reason(&report));
            }
        }
    }
    let reason = format!("Every answer was rejected after {total} attempts.");
    Ok(PipelineRun {
        output: abstain_output(&reason, total),
        diagnostics,
    })
}

pub fn run_query(
    query: &str,
    graph: &LegalGraph,
    generator: &dyn Generator,
    config: &PipelineConfig,
) -> Result<PipelineOutput, PipelineError> {
    run(query, graph, generator, config).map(|r| r.output)
}
