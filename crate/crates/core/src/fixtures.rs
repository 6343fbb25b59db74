//! Bundled corpora, queries and generator scripts used by tests, benches and
//! the CLI demo commands.

use crate::graph::LegalGraph;
use crate::ingest::{load, parse_corpus, JudgmentRecord};
use crate::pipeline::MockGenerator;

pub const SAMPLE_CORPUS: &str = include_str!("../fixtures/sample_corpus.json");
/// 51 Supreme Court judgments over ten matter types and eight decades.
pub const CORPUS51: &str = include_str!("../fixtures/corpus51.jsonl");
pub const CONFLICT_PAIR: &str = include_str!("../fixtures/conflict_pair.json");
/// A made-up bail matter with dated events.
pub const DATED_BAIL_CHAIN: &str = include_str!("../fixtures/bail_chain.json");

pub const BAIL_MOCK: &str = include_str!("../fixtures/mock/bail.json");
pub const FABRICATING_MOCK: &str = include_str!("../fixtures/mock/fabricating.json");
pub const CONFLICT_MOCK: &str = include_str!("../fixtures/mock/conflict.json");

pub const BAIL_QUERY: &str = "The Sessions Court rejected my bail application. Can I apply again?";
pub const SERVICE_QUERY: &str = "What are the conditions for reinstatement after wrongful termination?";
pub const CONFLICT_QUERY: &str = "Is the law settled on this question?";

pub const CONFLICT_A: &str = "(2012) 9 SCC 1";
pub const CONFLICT_B: &str = "(2013) 4 SCC 20";

/// Well-formed citations that appear in none of the bundled corpora.
pub const FABRICATED: [&str; 2] = ["(1999) 99 SCC 9999", "(2021) 77 SCC 7777"];

/// Parses a bundled corpus. Panics on a malformed fixture.
pub fn records(text: &str) -> Vec<JudgmentRecord> {
    parse_corpus(text)
        .expect("bundled fixture parses")
        .into_iter()
        .map(|p| p.record)
        .collect()
}

pub fn graph_from(texts: &[&str]) -> LegalGraph {
    let mut g = LegalGraph::new();
    for t in texts {
        load(&records(t), &mut g);
    }
    g
}

pub fn sample_graph() -> LegalGraph {
    graph_from(&[SAMPLE_CORPUS])
}

pub fn corpus51_graph() -> LegalGraph {
    graph_from(&[CORPUS51])
}

pub fn conflict_graph() -> LegalGraph {
    graph_from(&[SAMPLE_CORPUS, CONFLICT_PAIR])
}

pub fn mock(script: &str) -> MockGenerator {
    MockGenerator::from_json(script).expect("bundled mock script parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeLabel;
    use crate::ingest::parse_corpus;

    #[test]
    fn fixtures_parse_without_warnings() {
        for text in [SAMPLE_CORPUS, CORPUS51, CONFLICT_PAIR, DATED_BAIL_CHAIN] {
            for p in parse_corpus(text).unwrap() {
                assert!(p.warnings.is_empty(), "{}: {:?}", p.record.citation, p.warnings);
            }
        }
        for m in [BAIL_MOCK, FABRICATING_MOCK, CONFLICT_MOCK] {
            mock(m);
        }
    }

    #[test]
    fn corpus51_shape() {
        let recs = records(CORPUS51);
        assert_eq!(recs.len(), 51);
        let g = corpus51_graph();
        let full = g.nodes_with_label(NodeLabel::Case).filter(|n| !n.is_stub()).count();
        assert_eq!(full, 51);
        for f in FABRICATED {
            assert!(g.get_node(NodeLabel::Case, f).is_none());
        }
    }
}
