//! Candidate retrieval by graph traversal.
//!
//! Five strategies each produce a set of cases; the union is ranked by court
//! authority and recency. Conflict detection only annotates the final set.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Direction, EdgeType, LegalGraph, Node, NodeId, NodeLabel};
use crate::ingest::Citation;
use crate::text::{content_tokens, phrase_in, resolve_sections, tokens};
use crate::verifier::{check_conflicts, ConflictRecord};

pub const DEFAULT_LIMIT: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RetrievalError {
    #[error("citation {0} is not a case in the graph")]
    UnknownCitation(String),
    #[error("query needs text, a matter type or statute references")]
    EmptyQuery,
    #[error("limit must be at least 1")]
    ZeroLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    MatterType,
    StatuteSection,
    IssueKeyword,
    CitationChain,
    ConflictDetection,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::MatterType => "matter_type",
            Strategy::StatuteSection => "statute_section",
            Strategy::IssueKeyword => "issue_keyword",
            Strategy::CitationChain => "citation_chain",
            Strategy::ConflictDetection => "conflict_detection",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered: the first row whose subject words and qualifier words both
/// appear in the text decides the matter type.
const MATTER_TABLE: &[(&str, &[&str], &[&str])] = &[
    ("anticipatory bail", &["anticipatory"], &["bail", "arrest"]),
    ("bail", &["bail"], &[]),
    ("contempt", &["contempt"], &[]),
    (
        "service",
        &["reinstatement", "termination", "dismissal", "retrenchment", "seniority", "promotion", "pension", "disciplinary"],
        &[],
    ),
    ("service", &["service"], &["employee", "employer", "post", "judicial", "government"]),
    ("employment", &["employment", "workman", "wages", "employer", "employee", "labour"], &[]),
    (
        "constitutional",
        &["constitution", "constitutional", "fundamental", "article", "amendment", "writ"],
        &[],
    ),
    ("criminal appeal", &["conviction", "acquittal", "sentence", "murder", "appeal"], &["criminal", "conviction", "acquittal", "sentence", "murder", "ipc"]),
];

pub fn classify_matter_type(text: &str) -> Option<String> {
    let toks: BTreeSet<String> = tokens(text).into_iter().collect();
    let has = |words: &[&str]| words.iter().any(|w| toks.contains(*w));
    MATTER_TABLE
        .iter()
        .find(|(_, subject, qualifier)| has(subject) && (qualifier.is_empty() || has(qualifier)))
        .map(|(m, _, _)| (*m).to_owned())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    #[serde(default)]
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matter_type: Option<String>,
    #[serde(default)]
    pub statute_refs: Vec<String>,
    #[serde(default)]
    pub keywords: Vec<String>,
}

impl Query {
    /// Derives matter type, section references and keywords from free text.
    pub fn from_text(text: &str, graph: &LegalGraph) -> Self {
        Query {
            text: text.to_owned(),
            matter_type: classify_matter_type(text),
            statute_refs: resolve_sections(graph, text),
            keywords: content_tokens(text).into_iter().collect(),
        }
    }

    fn is_empty(&self) -> bool {
        self.text.trim().is_empty()
            && self.matter_type.as_deref().is_none_or(|m| m.trim().is_empty())
            && self.statute_refs.is_empty()
    }

    fn keyword_set(&self) -> BTreeSet<String> {
        if self.keywords.is_empty() {
            content_tokens(&self.text)
        } else {
            self.keywords.iter().flat_map(|k| content_tokens(k)).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub citation: Citation,
    pub name: String,
    pub court: String,
    pub year: Option<i64>,
    pub summary: String,
    pub authority_rank: u8,
    pub strategies: BTreeSet<Strategy>,
}

impl Candidate {
    fn from_node(node: &Node) -> Self {
        let court = node.text("court").unwrap_or("").to_owned();
        Candidate {
            citation: Citation::parse(&node.key).expect("case keys are non-empty"),
            name: node.text("name").unwrap_or("").to_owned(),
            authority_rank: authority_rank(&court),
            court,
            year: node.int("year"),
            summary: node.text("summary").unwrap_or("").to_owned(),
            strategies: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievalResult {
    pub candidates: Vec<Candidate>,
    pub candidate_conflicts: Vec<ConflictRecord>,
}

pub fn authority_rank(court: &str) -> u8 {
    if phrase_in(court, "supreme court") {
        0
    } else if phrase_in(court, "high court") {
        1
    } else {
        2
    }
}

fn rank_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.authority_rank
        .cmp(&b.authority_rank)
        .then_with(|| match (a.year, b.year) {
            (Some(x), Some(y)) => y.cmp(&x),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        })
        .then_with(|| a.citation.cmp(&b.citation))
}

/// Authority ascending, then newest first (undated last), then citation.
pub fn rank(mut candidates: Vec<Candidate>) -> Vec<Candidate> {
    candidates.sort_by(rank_order);
    candidates
}

/// Cases reachable from `seeds` through outgoing `CITES` within `depth`
/// hops, seeds included.
pub fn expand_citation_chain(
    graph: &LegalGraph,
    seeds: &[Citation],
    depth: usize,
) -> Result<BTreeSet<Citation>, RetrievalError> {
    let mut frontier = VecDeque::new();
    let mut seen: BTreeSet<NodeId> = BTreeSet::new();
    for s in seeds {
        let id = graph
            .lookup(NodeLabel::Case, s.as_str())
            .ok_or_else(|| RetrievalError::UnknownCitation(s.to_string()))?;
        if seen.insert(id) {
            frontier.push_back((id, 0));
        }
    }
    while let Some((id, d)) = frontier.pop_front() {
        if d == depth {
            continue;
        }
        for (_, next) in graph.neighbors(id, EdgeType::Cites, Direction::Out).expect("node exists") {
            if seen.insert(next.id) {
                frontier.push_back((next.id, d + 1));
            }
        }
    }
    Ok(seen
        .into_iter()
        .map(|id| Citation::parse(&graph.node(id).expect("seen ids exist").key).expect("non-empty"))
        .collect())
}

fn full_cases(graph: &LegalGraph) -> impl Iterator<Item = &Node> {
    graph.nodes_with_label(NodeLabel::Case).filter(|n| !n.is_stub())
}

fn by_matter_type(graph: &LegalGraph, query: &Query) -> BTreeSet<NodeId> {
    let Some(m) = query.matter_type.as_deref().map(str::trim).filter(|m| !m.is_empty()) else {
        return BTreeSet::new();
    };
    full_cases(graph)
        .filter(|n| n.text("matter_type").is_some_and(|t| t.trim().eq_ignore_ascii_case(m)))
        .map(|n| n.id)
        .collect()
}

fn by_statute_section(graph: &LegalGraph, query: &Query) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    for key in &query.statute_refs {
        let target = graph
            .lookup(NodeLabel::Section, key)
            .or_else(|| graph.lookup(NodeLabel::Statute, key));
        let Some(target) = target else { continue };
        for (_, src) in graph
            .neighbors(target, EdgeType::GovernedBy, Direction::In)
            .expect("node exists")
        {
            if src.label == NodeLabel::Case && !src.is_stub() {
                out.insert(src.id);
            }
        }
    }
    out
}

fn by_issue_keyword(graph: &LegalGraph, query: &Query) -> BTreeSet<NodeId> {
    let wanted = query.keyword_set();
    if wanted.is_empty() {
        return BTreeSet::new();
    }
    let overlaps = |text: &str| content_tokens(text).iter().any(|t| wanted.contains(t));
    full_cases(graph)
        .filter(|case| {
            overlaps(case.text("summary").unwrap_or(""))
                || graph
                    .neighbors(case.id, EdgeType::Addresses, Direction::Out)
                    .expect("node exists")
                    .into_iter()
                    .any(|(_, issue)| overlaps(issue.text("text").unwrap_or("")))
        })
        .map(|n| n.id)
        .collect()
}

/// Full cases one `CITES` hop away from some other seed.
fn by_citation_chain(graph: &LegalGraph, seeds: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    for &seed in seeds {
        for (_, next) in graph.neighbors(seed, EdgeType::Cites, Direction::Out).expect("node exists") {
            if next.id != seed && !next.is_stub() {
                out.insert(next.id);
            }
        }
    }
    out
}

pub fn retrieve(query: &Query, graph: &LegalGraph, limit: usize) -> Result<RetrievalResult, RetrievalError> {
    if limit == 0 {
        return Err(RetrievalError::ZeroLimit);
    }
    if query.is_empty() {
        return Err(RetrievalError::EmptyQuery);
    }
    let mut hits: BTreeMap<NodeId, BTreeSet<Strategy>> = BTreeMap::new();
    fn record(hits: &mut BTreeMap<NodeId, BTreeSet<Strategy>>, ids: BTreeSet<NodeId>, s: Strategy) {
        for id in ids {
            hits.entry(id).or_default().insert(s);
        }
    }
    record(&mut hits, by_matter_type(graph, query), Strategy::MatterType);
    record(&mut hits, by_statute_section(graph, query), Strategy::StatuteSection);
    record(&mut hits, by_issue_keyword(graph, query), Strategy::IssueKeyword);
    let seeds: BTreeSet<NodeId> = hits.keys().copied().collect();
    let chained = by_citation_chain(graph, &seeds);
    record(&mut hits, chained, Strategy::CitationChain);

    let candidates: Vec<Candidate> = hits
        .into_iter()
        .map(|(id, strategies)| Candidate {
            strategies,
            ..Candidate::from_node(graph.node(id).expect("hit ids exist"))
        })
        .collect();
    let mut candidates = rank(candidates);
    candidates.truncate(limit);

    let cites: Vec<Citation> = candidates.iter().map(|c| c.citation.clone()).collect();
    let candidate_conflicts = check_conflicts(&cites, graph);
    let in_conflict: BTreeSet<&Citation> = candidate_conflicts
        .iter()
        .flat_map(|c| [&c.case_a, &c.case_b])
        .collect();
    for c in &mut candidates {
        if in_conflict.contains(&c.citation) {
            c.strategies.insert(Strategy::ConflictDetection);
        }
    }
    Ok(RetrievalResult {
        candidates,
        candidate_conflicts,
    })
}
