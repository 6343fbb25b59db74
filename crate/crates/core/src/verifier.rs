//! Checks a claim against the graph: citations, overrulings, conflicts,
//! statute freshness and procedural transitions.
//!
//! A claim is accepted only when the graph can witness every part of it:
//! each cited case exists and is not overruled, a claimed rule is applied by
//! one of the cited judgments, cited sections exist and are in force, and a
//! claimed procedural step is a recorded `TRIGGERS` transition. A missing
//! witness is a veto; confidence never rescues it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::{Direction, EdgeType, LegalGraph, Node, NodeId, NodeLabel};
use crate::ingest::Citation;
use crate::text::content_tokens;

/// Note attached to every report with an unknown citation.
pub const HALLUCINATION_NOTE: &str = "Citations not found in graph. Possible hallucination.";

pub const NO_CITATIONS_REASON: &str = "no_citations";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProceduralClaim {
    pub current: String,
    pub next: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    #[serde(default)]
    pub answer_text: String,
    #[serde(default)]
    pub cited_cases: Vec<Citation>,
    #[serde(default)]
    pub cited_sections: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub procedural_claim: Option<ProceduralClaim>,
}

impl Claim {
    pub fn citing<I, C>(cases: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: Into<Citation>,
    {
        Claim {
            cited_cases: cases.into_iter().map(Into::into).collect(),
            ..Claim::default()
        }
        .normalized()
    }

    pub fn with_sections<I: IntoIterator<Item = S>, S: Into<String>>(mut self, sections: I) -> Self {
        self.cited_sections.extend(sections.into_iter().map(Into::into));
        self.normalized()
    }

    pub fn with_rule(mut self, rule: impl Into<String>) -> Self {
        self.claimed_rule = Some(rule.into());
        self
    }

    /// Drops duplicate citations (case-insensitively) and sections, keeping
    /// first occurrences.
    pub fn normalized(mut self) -> Self {
        let mut seen = BTreeSet::new();
        self.cited_cases.retain(|c| seen.insert(c.match_key()));
        let mut seen = BTreeSet::new();
        self.cited_sections = self
            .cited_sections
            .into_iter()
            .map(|s| s.trim().to_owned())
            .filter(|s| !s.is_empty() && seen.insert(s.clone()))
            .collect();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictType {
    CoordinateBench,
    PerIncuriam,
    Distinguished,
}

impl ConflictType {
    pub fn as_str(self) -> &'static str {
        match self {
            ConflictType::CoordinateBench => "coordinate_bench",
            ConflictType::PerIncuriam => "per_incuriam",
            ConflictType::Distinguished => "distinguished",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "coordinate_bench" => Some(ConflictType::CoordinateBench),
            "per_incuriam" => Some(ConflictType::PerIncuriam),
            "distinguished" => Some(ConflictType::Distinguished),
            _ => None,
        }
    }
}

impl fmt::Display for ConflictType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolutionType {
    LargerBench,
    FullBench,
    ConstitutionalBench,
}

impl ResolutionType {
    pub fn as_str(self) -> &'static str {
        match self {
            ResolutionType::LargerBench => "larger_bench",
            ResolutionType::FullBench => "full_bench",
            ResolutionType::ConstitutionalBench => "constitutional_bench",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "larger_bench" => Some(ResolutionType::LargerBench),
            "full_bench" => Some(ResolutionType::FullBench),
            "constitutional_bench" => Some(ResolutionType::ConstitutionalBench),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConflictRecord {
    pub case_a: Citation,
    pub case_b: Citation,
    pub conflict_type: ConflictType,
    pub unresolved: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution_type: Option<ResolutionType>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerificationStatus {
    Valid,
    Invalid,
    Conflict,
    Stale,
}

impl VerificationStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VerificationStatus::Valid => "VALID",
            VerificationStatus::Invalid => "INVALID",
            VerificationStatus::Conflict => "CONFLICT",
            VerificationStatus::Stale => "STALE",
        }
    }

    /// True when every citation has a support path (conflict only annotates).
    pub fn is_grounded(self) -> bool {
        matches!(self, VerificationStatus::Valid | VerificationStatus::Conflict)
    }
}

impl fmt::Display for VerificationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfidenceLabel {
    High,
    Medium,
    Low,
}

impl ConfidenceLabel {
    pub fn from_value(confidence: f64) -> Self {
        if confidence >= 0.8 {
            ConfidenceLabel::High
        } else if confidence >= 0.5 {
            ConfidenceLabel::Medium
        } else {
            ConfidenceLabel::Low
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverruledCitation {
    pub citation: Citation,
    pub overruled_by: Citation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub status: VerificationStatus,
    pub confidence: f64,
    pub confidence_label: ConfidenceLabel,
    pub grounded: Vec<Citation>,
    pub missing: Vec<Citation>,
    pub overruled: Vec<OverruledCitation>,
    pub conflicts: Vec<ConflictRecord>,
    pub stale_sections: Vec<String>,
    pub support_paths: Vec<String>,
    pub note: String,
}

impl VerificationReport {
    pub fn unresolved_conflicts(&self) -> impl Iterator<Item = &ConflictRecord> {
        self.conflicts.iter().filter(|c| c.unresolved)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationCheck {
    pub exists: bool,
    pub stub: bool,
}

pub fn check_citation_exists(citation: &Citation, graph: &LegalGraph) -> CitationCheck {
    match graph.get_node(NodeLabel::Case, citation.as_str()) {
        Some(n) => CitationCheck {
            exists: true,
            stub: n.is_stub(),
        },
        None => CitationCheck {
            exists: false,
            stub: false,
        },
    }
}

fn case_citation(node: &Node) -> Citation {
    Citation::parse(&node.key).expect("case keys are non-empty")
}

/// Cases holding an `OVERRULES` edge into `citation`, oldest first.
pub fn check_overruled(citation: &Citation, graph: &LegalGraph) -> Vec<Citation> {
    let Some(id) = graph.lookup(NodeLabel::Case, citation.as_str()) else {
        return Vec::new();
    };
    let mut by: Vec<(Option<i64>, &str)> = graph
        .neighbors(id, EdgeType::Overrules, Direction::In)
        .expect("node exists")
        .into_iter()
        .map(|(_, n)| (n.int("year"), n.key.as_str()))
        .collect();
    by.sort_by(|a, b| {
        let ya = a.0.unwrap_or(i64::MAX);
        let yb = b.0.unwrap_or(i64::MAX);
        (ya, a.1).cmp(&(yb, b.1))
    });
    by.into_iter()
        .map(|(_, k)| Citation::parse(k).expect("case keys are non-empty"))
        .collect()
}

/// Resolution of a conflicting pair: a case both sides are `RESOLVED_BY`,
/// or one side resolved directly by the other.
fn resolution_between(graph: &LegalGraph, a: NodeId, b: NodeId) -> Option<ResolutionType> {
    let resolvers = |n: NodeId| -> BTreeMap<NodeId, Option<ResolutionType>> {
        graph
            .neighbors(n, EdgeType::ResolvedBy, Direction::Out)
            .expect("node exists")
            .into_iter()
            .map(|(e, r)| (r.id, e.text("resolution_type").and_then(ResolutionType::parse)))
            .collect()
    };
    let ra = resolvers(a);
    let rb = resolvers(b);
    let mut found: Option<Option<ResolutionType>> = None;
    if let Some(t) = ra.get(&b) {
        found = Some(*t);
    } else if let Some(t) = rb.get(&a) {
        found = Some(*t);
    } else {
        // shared resolver; the map is id-ordered, so this is deterministic
        for (r, ta) in &ra {
            if let Some(tb) = rb.get(r) {
                found = Some(ta.or(*tb));
                break;
            }
        }
    }
    // an untyped RESOLVED_BY edge still settles the conflict
    found.map(|t| t.unwrap_or(ResolutionType::LargerBench))
}

/// One record per conflicting unordered pair within `citations`.
pub fn check_conflicts(citations: &[Citation], graph: &LegalGraph) -> Vec<ConflictRecord> {
    let ids: BTreeMap<NodeId, Citation> = citations
        .iter()
        .filter_map(|c| graph.lookup(NodeLabel::Case, c.as_str()))
        .map(|id| (id, case_citation(graph.node(id).expect("id from lookup"))))
        .collect();
    let mut pairs: BTreeMap<(Citation, Citation), ConflictType> = BTreeMap::new();
    for &id in ids.keys() {
        for (e, other) in graph
            .neighbors(id, EdgeType::ConflictsWith, Direction::Out)
            .expect("node exists")
        {
            if other.id == id || !ids.contains_key(&other.id) {
                continue;
            }
            let (x, y) = (ids[&id].clone(), ids[&other.id].clone());
            let key = if x <= y { (x, y) } else { (y, x) };
            let ty = e
                .text("conflict_type")
                .and_then(ConflictType::parse)
                .unwrap_or(ConflictType::CoordinateBench);
            pairs
                .entry(key)
                .and_modify(|t| *t = (*t).min(ty))
                .or_insert(ty);
        }
    }
    pairs
        .into_iter()
        .map(|((a, b), conflict_type)| {
            let ia = graph.lookup(NodeLabel::Case, a.as_str()).expect("present");
            let ib = graph.lookup(NodeLabel::Case, b.as_str()).expect("present");
            let resolution_type = resolution_between(graph, ia, ib);
            ConflictRecord {
                case_a: a,
                case_b: b,
                conflict_type,
                unresolved: resolution_type.is_none(),
                resolution_type,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreshnessCheck {
    pub stale: Vec<String>,
    /// Section keys with no node in the graph.
    pub unknown: Vec<String>,
}

/// Repealed sections, directly or through their parent statute.
pub fn check_statute_freshness(section_keys: &[String], graph: &LegalGraph) -> FreshnessCheck {
    let mut out = FreshnessCheck::default();
    for key in section_keys {
        match graph.get_node(NodeLabel::Section, key) {
            None => out.unknown.push(key.clone()),
            Some(sec) => {
                let parent_repealed = sec
                    .text("statute_name")
                    .and_then(|s| graph.get_node(NodeLabel::Statute, s))
                    .is_some_and(|st| st.flag("repealed"));
                if sec.flag("repealed") || parent_repealed {
                    out.stale.push(key.clone());
                }
            }
        }
    }
    out
}

fn rule_matches(rule: &Node, claimed: &str) -> bool {
    if rule.key == claimed.trim() {
        return true;
    }
    let wanted = content_tokens(claimed);
    if wanted.is_empty() {
        return false;
    }
    let have = content_tokens(rule.text("text").unwrap_or(""));
    wanted.is_subset(&have)
}

/// `Case -[APPLIES_RULE]-> Rule` for a rule matching `claimed`, also
/// through the case's issues.
fn rule_segment(graph: &LegalGraph, case: &Node, claimed: &str) -> Option<String> {
    let direct = graph
        .neighbors(case.id, EdgeType::AppliesRule, Direction::Out)
        .ok()?
        .into_iter()
        .find(|(_, r)| rule_matches(r, claimed))
        .map(|(_, r)| format!("{} -[APPLIES_RULE]-> Rule:{}", case.key, r.key));
    if direct.is_some() {
        return direct;
    }
    for (_, issue) in graph.neighbors(case.id, EdgeType::Addresses, Direction::Out).ok()? {
        if let Some((_, r)) = graph
            .neighbors(issue.id, EdgeType::AppliesRule, Direction::Out)
            .ok()?
            .into_iter()
            .find(|(_, r)| rule_matches(r, claimed))
        {
            return Some(format!(
                "{} -[ADDRESSES]-> LegalIssue:{} -[APPLIES_RULE]-> Rule:{}",
                case.key, issue.key, r.key
            ));
        }
    }
    None
}

fn extra_segments(graph: &LegalGraph, case: &Node, claim: &Claim) -> Vec<String> {
    let mut segs = Vec::new();
    for (_, sec) in graph
        .neighbors(case.id, EdgeType::GovernedBy, Direction::Out)
        .unwrap_or_default()
    {
        if sec.label == NodeLabel::Section && claim.cited_sections.contains(&sec.key) {
            segs.push(format!("{} -[GOVERNED_BY]-> Section:{}", case.key, sec.key));
        }
    }
    for (_, later) in graph
        .neighbors(case.id, EdgeType::Cites, Direction::In)
        .unwrap_or_default()
    {
        if claim.cited_cases.iter().any(|c| c.match_key() == later.key.to_lowercase()) {
            segs.push(format!("{} -[CITES]-> {}", later.key, case.key));
        }
    }
    for (_, outcome) in graph
        .neighbors(case.id, EdgeType::ResultsIn, Direction::Out)
        .unwrap_or_default()
    {
        if claim.claimed_rule.is_some() {
            segs.push(format!("{} -[RESULTS_IN]-> Outcome:{}", case.key, outcome.key));
        }
    }
    segs
}

fn support_path(graph: &LegalGraph, claim: &Claim, citation: &Citation, require_rule: bool) -> Option<String> {
    let case = graph.get_node(NodeLabel::Case, citation.as_str())?;
    if case.is_stub() {
        return None;
    }
    let mut parts = vec![case.key.clone()];
    if let Some(rule) = &claim.claimed_rule {
        match rule_segment(graph, case, rule) {
            Some(seg) => parts[0] = seg,
            None if require_rule => return None,
            None => {}
        }
    }
    parts.extend(extra_segments(graph, case, claim));
    Some(parts.join(" ; "))
}

/// A path witnessing `citation` for `claim`. When the claim names a rule,
/// the case itself must apply it. Stubs cannot witness anything.
pub fn find_support_path(claim: &Claim, citation: &Citation, graph: &LegalGraph) -> Option<String> {
    support_path(graph, claim, citation, true)
}

fn has_transition(graph: &LegalGraph, current: &str, next: &str) -> bool {
    graph.edges_of_type(EdgeType::Triggers).any(|e| {
        let ty = |id| graph.node(id).and_then(|n| n.text("event_type")).unwrap_or("");
        ty(e.src).eq_ignore_ascii_case(current.trim()) && ty(e.dst).eq_ignore_ascii_case(next.trim())
    })
}

/// Verdict precedence is INVALID > STALE > CONFLICT > VALID; the report
/// lists every finding regardless of which one decided the status.
pub fn verify(claim: &Claim, graph: &LegalGraph) -> VerificationReport {
    let claim = claim.clone().normalized();
    let mut grounded = Vec::new();
    let mut missing = Vec::new();
    let mut overruled = Vec::new();
    for c in &claim.cited_cases {
        match graph.get_node(NodeLabel::Case, c.as_str()) {
            Some(n) => {
                grounded.push(case_citation(n));
                for by in check_overruled(c, graph) {
                    overruled.push(OverruledCitation {
                        citation: case_citation(n),
                        overruled_by: by,
                    });
                }
            }
            None => missing.push(c.clone()),
        }
    }

    let mut notes: Vec<String> = Vec::new();
    let mut invalid = false;
    if claim.cited_cases.is_empty() {
        invalid = true;
        notes.push(format!("{NO_CITATIONS_REASON}: the answer cites no cases, so it cannot be grounded."));
    }
    if !missing.is_empty() {
        invalid = true;
        notes.push(HALLUCINATION_NOTE.to_owned());
    }
    if !overruled.is_empty() {
        invalid = true;
        let list: Vec<String> = overruled
            .iter()
            .map(|o| format!("{} (by {})", o.citation, o.overruled_by))
            .collect();
        notes.push(format!("Overruled precedent cited: {}.", list.join(", ")));
    }

    let mut support_paths = Vec::new();
    for c in &grounded {
        match support_path(graph, &claim, c, false) {
            Some(p) => support_paths.push(p),
            None => support_paths.push(format!("{c} [stub]")),
        }
    }
    if let Some(rule) = &claim.claimed_rule {
        let witnessed = grounded.iter().any(|c| find_support_path(&claim, c, graph).is_some());
        if !witnessed {
            invalid = true;
            notes.push(format!("Claimed rule is not applied by any cited judgment: {rule:?}."));
        }
    }

    let freshness = check_statute_freshness(&claim.cited_sections, graph);
    if !freshness.unknown.is_empty() {
        invalid = true;
        notes.push(format!("Sections not found in graph: {}.", freshness.unknown.join(", ")));
    }
    if !freshness.stale.is_empty() {
        notes.push(format!("Repealed provisions cited: {}.", freshness.stale.join(", ")));
    }

    if let Some(p) = &claim.procedural_claim {
        if !has_transition(graph, &p.current, &p.next) {
            invalid = true;
            notes.push(format!("No TRIGGERS transition from {} to {} in graph.", p.current, p.next));
        }
    }

    let conflicts = check_conflicts(&grounded, graph);
    for c in conflicts.iter().filter(|c| c.unresolved) {
        notes.push(format!(
            "Unresolved {} conflict between {} and {}.",
            c.conflict_type, c.case_a, c.case_b
        ));
    }

    let status = if invalid {
        VerificationStatus::Invalid
    } else if !freshness.stale.is_empty() {
        VerificationStatus::Stale
    } else if conflicts.iter().any(|c| c.unresolved) {
        VerificationStatus::Conflict
    } else {
        VerificationStatus::Valid
    };
    if status == VerificationStatus::Valid {
        notes.push("All citations are grounded in the ingested graph.".to_owned());
    }

    let overruled_set: BTreeSet<&Citation> = overruled.iter().map(|o| &o.citation).collect();
    let good = grounded.iter().filter(|c| !overruled_set.contains(c)).count();
    let confidence = if claim.cited_cases.is_empty() {
        0.0
    } else {
        good as f64 / claim.cited_cases.len() as f64
    };
    let confidence_label = if status == VerificationStatus::Conflict {
        ConfidenceLabel::Low
    } else {
        ConfidenceLabel::from_value(confidence)
    };

    VerificationReport {
        status,
        confidence,
        confidence_label,
        grounded,
        missing,
        overruled,
        conflicts,
        stale_sections: freshness.stale,
        support_paths,
        note: notes.join(" "),
    }
}
