//! Graph-native evaluation metrics over labelled query runs and claims.
//!
//! Every metric carries its numerator and denominator. A zero denominator
//! yields an undefined value rather than 0.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::graph::{LegalGraph, NodeLabel};
use crate::ingest::{Citation, IngestError};
use crate::pipeline::{OutputStatus, PipelineOutput};
use crate::procedural::{validate_sequence, EventSequence};
use crate::verifier::{check_statute_freshness, verify, Claim, VerificationStatus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub numerator: usize,
    pub denominator: usize,
    pub value: Option<f64>,
}

impl Metric {
    pub fn new(name: &str, numerator: usize, denominator: usize) -> Self {
        Metric {
            name: name.to_owned(),
            numerator,
            denominator,
            value: (denominator > 0).then(|| numerator as f64 / denominator as f64),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truth {
    #[serde(default)]
    pub expected_grounded: BTreeSet<Citation>,
    #[serde(default)]
    pub conflict_expected: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub procedural_sequence: Option<EventSequence>,
    #[serde(default)]
    pub repealed_sections: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub query: String,
    /// `None` when the query did not complete.
    #[serde(default)]
    pub output: Option<PipelineOutput>,
    #[serde(default)]
    pub truth: Truth,
}

impl EvalRecord {
    fn answered(&self) -> Option<&PipelineOutput> {
        self.output
            .as_ref()
            .filter(|o| o.verification != OutputStatus::Abstained)
    }
}

pub fn parse_records(text: &str) -> Result<Vec<EvalRecord>, IngestError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let de = &mut serde_json::Deserializer::from_str(line);
            serde_path_to_error::deserialize(de).map_err(|e| {
                let path = e.path().to_string();
                let path = if path == "." { format!("line {}", i + 1) } else { format!("line {}.{path}", i + 1) };
                IngestError::MalformedRecord {
                    path,
                    message: e.into_inner().to_string(),
                }
            })
        })
        .collect()
}

/// Share of cited cases in answered outputs that exist as Case nodes. Stubs
/// count as grounded.
pub fn citation_grounding_accuracy(records: &[EvalRecord], graph: &LegalGraph) -> Metric {
    let (found, total) = count_grounded(records, graph, |_| true);
    Metric::new("citation_grounding_accuracy", found, total)
}

/// Share of grounded citations that resolve only to stub cases.
pub fn stub_fraction(records: &[EvalRecord], graph: &LegalGraph) -> Metric {
    let (stubs, _) = count_grounded(records, graph, |stub| stub);
    let (grounded, _) = count_grounded(records, graph, |_| true);
    Metric::new("stub_fraction", stubs, grounded)
}

fn count_grounded(records: &[EvalRecord], graph: &LegalGraph, keep: impl Fn(bool) -> bool) -> (usize, usize) {
    let mut hit = 0;
    let mut total = 0;
    for out in records.iter().filter_map(EvalRecord::answered) {
        for c in &out.citations {
            total += 1;
            if graph.get_node(NodeLabel::Case, c.as_str()).is_some_and(|n| keep(n.is_stub())) {
                hit += 1;
            }
        }
    }
    (hit, total)
}

/// Answered outputs whose citations all have support paths (VALID or
/// CONFLICT) over all answered outputs.
pub fn path_validity_rate(records: &[EvalRecord]) -> Metric {
    let answered: Vec<&PipelineOutput> = records.iter().filter_map(EvalRecord::answered).collect();
    let valid = answered
        .iter()
        .filter(|o| matches!(o.verification, OutputStatus::Valid | OutputStatus::Conflict))
        .count();
    Metric::new("path_validity_rate", valid, answered.len())
}

/// Claims the verifier rejects (INVALID or STALE) over all claims.
pub fn hallucinated_precedent_rate(claims: &[Claim], graph: &LegalGraph) -> Metric {
    let bad = claims
        .iter()
        .filter(|c| !verify(c, graph).status.is_grounded())
        .count();
    Metric::new("hallucinated_precedent_rate", bad, claims.len())
}

/// Complement of [`hallucinated_precedent_rate`] on the same claims.
pub fn fully_valid_fraction(claims: &[Claim], graph: &LegalGraph) -> Metric {
    let good = claims.iter().filter(|c| verify(c, graph).status.is_grounded()).count();
    Metric::new("fully_valid_fraction", good, claims.len())
}

pub fn procedural_consistency(records: &[EvalRecord], graph: &LegalGraph) -> Metric {
    let seqs: Vec<&EventSequence> = records
        .iter()
        .filter_map(|r| r.truth.procedural_sequence.as_ref())
        .collect();
    let valid = seqs.iter().filter(|s| validate_sequence(s, graph).valid).count();
    Metric::new("procedural_consistency", valid, seqs.len())
}

/// Recall of conflict flags over answered records expected to conflict.
pub fn conflict_detection_rate(records: &[EvalRecord]) -> Metric {
    conflict_rate(records, true, "conflict_detection_rate")
}

/// Conflict flags raised on answered records not expected to conflict.
pub fn false_conflict_rate(records: &[EvalRecord]) -> Metric {
    conflict_rate(records, false, "false_conflict_rate")
}

fn conflict_rate(records: &[EvalRecord], expected: bool, name: &str) -> Metric {
    let pool: Vec<&PipelineOutput> = records
        .iter()
        .filter(|r| r.truth.conflict_expected == expected)
        .filter_map(EvalRecord::answered)
        .collect();
    let flagged = pool.iter().filter(|o| o.conflict).count();
    Metric::new(name, flagged, pool.len())
}

/// Cited sections in answered outputs that exist and are not repealed.
pub fn statute_freshness_rate(records: &[EvalRecord], graph: &LegalGraph) -> Metric {
    let mut fresh = 0;
    let mut total = 0;
    for out in records.iter().filter_map(EvalRecord::answered) {
        let check = check_statute_freshness(&out.cited_sections, graph);
        total += out.cited_sections.len();
        fresh += out.cited_sections.len() - check.stale.len() - check.unknown.len();
    }
    Metric::new("statute_freshness_rate", fresh, total)
}

fn output_claim(out: &PipelineOutput) -> Claim {
    Claim {
        answer_text: out.answer.clone(),
        cited_cases: out.citations.clone(),
        cited_sections: out.cited_sections.clone(),
        claimed_rule: None,
        procedural_claim: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub records: usize,
    pub completion_rate: Metric,
    pub abstention_rate: Metric,
    pub metrics: Vec<Metric>,
}

impl MetricReport {
    pub fn get(&self, name: &str) -> Option<&Metric> {
        [&self.completion_rate, &self.abstention_rate]
            .into_iter()
            .chain(self.metrics.iter())
            .find(|m| m.name == name)
    }
}

pub fn evaluate(records: &[EvalRecord], graph: &LegalGraph) -> MetricReport {
    let completed = records.iter().filter(|r| r.output.is_some()).count();
    let abstained = records
        .iter()
        .filter_map(|r| r.output.as_ref())
        .filter(|o| o.verification == OutputStatus::Abstained)
        .count();
    let claims: Vec<Claim> = records
        .iter()
        .filter_map(EvalRecord::answered)
        .map(output_claim)
        .collect();
    MetricReport {
        records: records.len(),
        completion_rate: Metric::new("completion_rate", completed, records.len()),
        abstention_rate: Metric::new("abstention_rate", abstained, completed),
        metrics: vec![
            citation_grounding_accuracy(records, graph),
            stub_fraction(records, graph),
            path_validity_rate(records),
            hallucinated_precedent_rate(&claims, graph),
            procedural_consistency(records, graph),
            conflict_detection_rate(records),
            false_conflict_rate(records),
            statute_freshness_rate(records, graph),
        ],
    }
}

/// Fixed-width table, one row per metric.
pub fn render_table(report: &MetricReport) -> String {
    let rows: Vec<&Metric> = [&report.completion_rate, &report.abstention_rate]
        .into_iter()
        .chain(report.metrics.iter())
        .collect();
    let width = rows.iter().map(|m| m.name.len()).max().unwrap_or(0).max("metric".len());
    let mut out = String::new();
    writeln!(out, "{:<width$}  {:>9}  {:>9}  {:>9}", "metric", "value", "num", "den").unwrap();
    for m in rows {
        let value = m.value.map_or_else(|| "undefined".to_owned(), |v| format!("{v:.4}"));
        writeln!(out, "{:<width$}  {:>9}  {:>9}  {:>9}", m.name, value, m.numerator, m.denominator).unwrap();
    }
    out
}

/// Status counts, for callers that want the raw partition.
pub fn status_counts(claims: &[Claim], graph: &LegalGraph) -> [(VerificationStatus, usize); 4] {
    let mut counts = [
        (VerificationStatus::Valid, 0),
        (VerificationStatus::Invalid, 0),
        (VerificationStatus::Conflict, 0),
        (VerificationStatus::Stale, 0),
    ];
    for c in claims {
        let s = verify(c, graph).status;
        for entry in counts.iter_mut() {
            if entry.0 == s {
                entry.1 += 1;
            }
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{props, EdgeType};
    use crate::pipeline::{abstain_output, verified_output};
    use crate::procedural::SequenceEvent;

    fn cite(s: &str) -> Citation {
        Citation::parse(s).unwrap()
    }

    fn graph() -> LegalGraph {
        let mut g = LegalGraph::new();
        for c in ["A", "B", "C", "D"] {
            g.merge_node(NodeLabel::Case, c, props([("stub", false)])).unwrap();
        }
        g.merge_node(NodeLabel::Case, "S", props([("stub", true)])).unwrap();
        g.merge_edge(
            EdgeType::ConflictsWith,
            (NodeLabel::Case, "C"),
            (NodeLabel::Case, "D"),
            props([("conflict_type", "coordinate_bench")]),
        )
        .unwrap();
        g.merge_node(NodeLabel::Section, "CrPC-1973/439", props([("repealed", false)])).unwrap();
        g.merge_node(NodeLabel::Section, "IPC-1860/309", props([("repealed", true)])).unwrap();
        g
    }

    fn record(g: &LegalGraph, claim: Claim, conflict_expected: bool) -> EvalRecord {
        let report = verify(&claim, g);
        EvalRecord {
            query: String::new(),
            output: Some(verified_output(&claim, report, None, 1)),
            truth: Truth {
                conflict_expected,
                ..Truth::default()
            },
        }
    }

    #[test]
    fn undefined_denominators() {
        let g = graph();
        let report = evaluate(&[], &g);
        assert!(report.metrics.iter().all(|m| m.value.is_none() && m.denominator == 0));
        assert!(report.completion_rate.value.is_none());
        assert!(render_table(&report).contains("undefined"));
    }

    #[test]
    fn grounding_counts_every_citation() {
        let g = graph();
        let cites: Vec<&str> = vec!["A", "B", "C", "S", "X1", "X2", "X3", "A", "B", "D"];
        let recs: Vec<EvalRecord> = cites
            .iter()
            .map(|c| record(&g, Claim::citing([cite(c)]), false))
            .collect();
        let m = citation_grounding_accuracy(&recs, &g);
        assert_eq!((m.numerator, m.denominator), (7, 10));
        assert_eq!(m.value, Some(0.7));
        assert_eq!(stub_fraction(&recs, &g).numerator, 1);
    }

    #[test]
    fn pvr_counts_conflicts_and_skips_abstentions() {
        let g = graph();
        let mut recs = vec![
            record(&g, Claim::citing([cite("A")]), false),
            record(&g, Claim::citing([cite("X1")]), false),
            record(&g, Claim::citing([cite("C"), cite("D")]), true),
        ];
        recs.push(EvalRecord {
            query: String::new(),
            output: Some(abstain_output("", 3)),
            truth: Truth::default(),
        });
        recs.push(EvalRecord {
            query: String::new(),
            output: None,
            truth: Truth::default(),
        });
        let m = path_validity_rate(&recs);
        assert_eq!((m.numerator, m.denominator), (2, 3));
        let r = evaluate(&recs, &g);
        assert_eq!(r.completion_rate.value, Some(0.8));
        assert_eq!((r.abstention_rate.numerator, r.abstention_rate.denominator), (1, 4));
        assert_eq!(conflict_detection_rate(&recs).value, Some(1.0));
        assert_eq!(false_conflict_rate(&recs).value, Some(0.0));
    }

    #[test]
    fn hallucination_rate_is_complement_of_valid_fraction() {
        let g = graph();
        let mut claims: Vec<Claim> = (0..7).map(|_| Claim::citing([cite("A")])).collect();
        claims.push(Claim::citing([cite("A"), cite("X")]));
        claims.push(Claim::citing([cite("B")]).with_sections(["IPC-1860/309"]));
        claims.push(Claim::default());
        let h = hallucinated_precedent_rate(&claims, &g);
        let v = fully_valid_fraction(&claims, &g);
        assert_eq!((h.numerator, h.denominator), (3, 10));
        assert_eq!(h.value.unwrap() + v.value.unwrap(), 1.0);
        let counts = status_counts(&claims, &g);
        assert_eq!(counts[1], (VerificationStatus::Invalid, 2));
        assert_eq!(counts[3], (VerificationStatus::Stale, 1));
    }

    #[test]
    fn freshness_and_procedural() {
        let g = graph();
        let fresh = record(&g, Claim::citing([cite("A")]).with_sections(["CrPC-1973/439"]), false);
        assert_eq!(statute_freshness_rate(std::slice::from_ref(&fresh), &g).value, Some(1.0));
        let mut mixed = fresh.clone();
        mixed.output.as_mut().unwrap().cited_sections.push("IPC-1860/309".into());
        assert_eq!(statute_freshness_rate(&[mixed], &g).value, Some(0.5));

        let ok = EventSequence(vec![
            SequenceEvent::new("A", 1, Some("2020-01-01".parse().unwrap())),
            SequenceEvent::new("B", 2, Some("2020-01-05".parse().unwrap())),
        ]);
        let mut bad = ok.clone();
        bad.0[1].date = Some("2019-12-01".parse().unwrap());
        let mut recs: Vec<EvalRecord> = (0..3)
            .map(|_| EvalRecord {
                truth: Truth {
                    procedural_sequence: Some(ok.clone()),
                    ..Truth::default()
                },
                ..fresh.clone()
            })
            .collect();
        recs.push(EvalRecord {
            truth: Truth {
                procedural_sequence: Some(bad),
                ..Truth::default()
            },
            ..fresh.clone()
        });
        assert_eq!(procedural_consistency(&recs, &g).value, Some(0.75));
        assert!(procedural_consistency(&[fresh], &g).value.is_none());
    }

    #[test]
    fn records_parse_with_line_paths() {
        let ok = r#"{"query":"q","output":null,"truth":{"conflict_expected":true}}"#;
        assert_eq!(parse_records(ok).unwrap().len(), 1);
        let bad = format!("{ok}\n{{\"query\":\"q\",\"truth\":{{\"conflict_expected\":3}}}}");
        let err = parse_records(&bad).unwrap_err();
        assert!(err.to_string().contains("line 2.truth.conflict_expected"), "{err}");
    }
}
