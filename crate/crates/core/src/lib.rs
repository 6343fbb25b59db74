//! Legal knowledge graph over IRAC-structured judgments, with a verifier that
//! checks generated answers against citation paths in the graph.

pub mod fixtures;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod procedural;
pub mod retrieval;
pub mod snapshot;
pub mod synth;
pub mod text;
pub mod verifier;

pub use graph::{Direction, EdgeType, LegalGraph, NodeLabel};
pub use ingest::{load, Citation, IngestError, JudgmentRecord};
pub use pipeline::{run_query, PipelineConfig, PipelineOutput};
pub use verifier::{verify, Claim, VerificationReport, VerificationStatus};
