//! Structured judgment records and the graph loader.
//!
//! A [`JudgmentRecord`] is one judgment already broken into IRAC parts. The
//! loader turns it into nodes and edges with merge semantics, so loading the
//! same corpus twice (or in a different order) gives the same graph.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use chrono::NaiveDate;
use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::graph::{props, EdgeType, GraphError, LegalGraph, NodeLabel, Properties, PropertyValue};

/// Number of leading characters scanned by [`extract_metadata`].
pub const METADATA_WINDOW: usize = 2_000;

/// Relations a record may assert towards another case.
pub const PRECEDENT_RELATIONS: [EdgeType; 6] = [
    EdgeType::Cites,
    EdgeType::Overrules,
    EdgeType::Distinguishes,
    EdgeType::ConflictsWith,
    EdgeType::ResolvedBy,
    EdgeType::NarrowedBy,
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IngestError {
    #[error("empty citation")]
    EmptyCitation,
    #[error("malformed record at {path}: {message}")]
    MalformedRecord { path: String, message: String },
}

impl IngestError {
    fn malformed(path: impl Into<String>, message: impl Into<String>) -> Self {
        IngestError::MalformedRecord {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// A normalized case citation such as `(2004) 7 SCC 528`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Citation(String);

impl Citation {
    pub fn parse(raw: &str) -> Result<Self, IngestError> {
        normalize_citation(raw)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Comparison key: reporter abbreviations match case-insensitively.
    pub fn match_key(&self) -> String {
        self.0.to_lowercase()
    }

    pub fn matches(&self, other: &Citation) -> bool {
        self.match_key() == other.match_key()
    }
}

impl TryFrom<String> for Citation {
    type Error = IngestError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        normalize_citation(&value)
    }
}

impl From<Citation> for String {
    fn from(c: Citation) -> Self {
        c.0
    }
}

impl fmt::Display for Citation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Citation {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

const STRIP: &[char] = &['"', '\'', '\u{201c}', '\u{201d}', '\u{2018}', '\u{2019}', '.', '`'];

/// Trims, strips surrounding quotes and periods, and collapses whitespace.
pub fn normalize_citation(raw: &str) -> Result<Citation, IngestError> {
    let collapsed = raw.split_whitespace().collect::<Vec<_>>().join(" ");
    let mut s = collapsed.as_str();
    loop {
        let next = s.trim_matches(STRIP).trim();
        if next == s {
            break;
        }
        s = next;
    }
    if s.is_empty() {
        return Err(IngestError::EmptyCitation);
    }
    Ok(Citation(s.to_owned()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssueRecord {
    pub text: String,
    #[serde(default)]
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionRecord {
    pub number: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repealed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatuteRecord {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repealed: Option<bool>,
    #[serde(default)]
    pub sections: Vec<SectionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecedentRecord {
    pub citation: Citation,
    pub relation: EdgeType,
    #[serde(default)]
    pub attributes: Properties,
}

/// Link from one procedural event to the next one in the list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
    /// `TRIGGERS` (default) or `RESULTS_IN`.
    #[serde(default = "default_transition")]
    pub relation: EdgeType,
}

fn default_transition() -> EdgeType {
    EdgeType::Triggers
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub event_type: String,
    pub order: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub court_level: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triggers_next: Option<TransitionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub outcome_type: String,
    #[serde(default)]
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentRecord {
    pub citation: Citation,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub court: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench_size: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench_type: Option<String>,
    pub matter_type: String,
    #[serde(default)]
    pub summary: String,
    #[serde(default)]
    pub judges: Vec<String>,
    #[serde(default)]
    pub issues: Vec<IssueRecord>,
    #[serde(default)]
    pub rules: Vec<RuleRecord>,
    #[serde(default)]
    pub statutes: Vec<StatuteRecord>,
    #[serde(default)]
    pub precedents: Vec<PrecedentRecord>,
    #[serde(default)]
    pub procedural_events: Vec<EventRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<OutcomeRecord>,
}

impl JudgmentRecord {
    /// A record with only the required header fields set.
    pub fn minimal(citation: Citation, matter_type: &str) -> Self {
        JudgmentRecord {
            citation,
            name: String::new(),
            court: String::new(),
            year: None,
            bench_size: None,
            bench_type: None,
            matter_type: matter_type.to_owned(),
            summary: String::new(),
            judges: Vec::new(),
            issues: Vec::new(),
            rules: Vec::new(),
            statutes: Vec::new(),
            precedents: Vec::new(),
            procedural_events: Vec::new(),
            outcome: None,
        }
    }

    pub fn issue_key(&self, ordinal: usize) -> String {
        scoped_key(&self.citation, "issue", ordinal)
    }

    pub fn rule_key(&self, ordinal: usize) -> String {
        scoped_key(&self.citation, "rule", ordinal)
    }

    pub fn event_key(&self, order: i64) -> String {
        format!("{}#event#{}", self.citation, order)
    }

    pub fn outcome_key(&self) -> String {
        scoped_key(&self.citation, "outcome", 1)
    }

    fn validate(&self) -> Result<(), IngestError> {
        if self.matter_type.trim().is_empty() {
            return Err(IngestError::malformed("matter_type", "must not be empty"));
        }
        if let Some(year) = self.year {
            if !(1800..=2100).contains(&year) {
                return Err(IngestError::malformed("year", format!("{year} outside 1800..=2100")));
            }
        }
        for (i, p) in self.precedents.iter().enumerate() {
            if !PRECEDENT_RELATIONS.contains(&p.relation) {
                return Err(IngestError::malformed(
                    format!("precedents[{i}].relation"),
                    format!("{} is not a precedent relation", p.relation),
                ));
            }
        }
        for pair in self.procedural_events.windows(2).enumerate() {
            let (i, w) = pair;
            if w[1].order <= w[0].order {
                return Err(IngestError::malformed(
                    format!("procedural_events[{}].order", i + 1),
                    format!("order {} does not follow {}", w[1].order, w[0].order),
                ));
            }
        }
        for (i, e) in self.procedural_events.iter().enumerate() {
            if e.event_type.trim().is_empty() {
                return Err(IngestError::malformed(
                    format!("procedural_events[{i}].event_type"),
                    "must not be empty",
                ));
            }
            if let Some(t) = &e.triggers_next {
                if !matches!(t.relation, EdgeType::Triggers | EdgeType::ResultsIn) {
                    return Err(IngestError::malformed(
                        format!("procedural_events[{i}].triggers_next.relation"),
                        format!("{} is not a procedural transition", t.relation),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Merge key for nodes that only exist inside one judgment.
pub fn scoped_key(citation: &Citation, kind: &str, ordinal: usize) -> String {
    format!("{citation}#{kind}#{ordinal}")
}

pub fn section_key(statute: &str, number: &str) -> String {
    format!("{}/{}", statute.trim(), number.trim())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRecord {
    pub record: JudgmentRecord,
    /// Paths of fields that were present but not part of the schema.
    pub warnings: Vec<String>,
}

/// Parses one JSON judgment record.
pub fn parse_record(document: &str) -> Result<ParsedRecord, IngestError> {
    let value: Value = serde_json::from_str(document)
        .map_err(|e| IngestError::malformed("$", format!("invalid JSON: {e}")))?;
    parse_value(value)
}

pub fn parse_value(value: Value) -> Result<ParsedRecord, IngestError> {
    let mut warnings = Vec::new();
    let record: JudgmentRecord = {
        let mut on_ignored = |path: serde_ignored::Path| {
            warnings.push(format!("ignored unknown field {path}"))
        };
        let de = serde_ignored::Deserializer::new(value, &mut on_ignored);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            IngestError::malformed(path, e.into_inner().to_string())
        })?
    };
    record.validate()?;
    Ok(ParsedRecord { record, warnings })
}

/// Parses a corpus file: a JSON array, a single record object, or JSON lines.
/// Errors carry the record position in the path.
pub fn parse_corpus(text: &str) -> Result<Vec<ParsedRecord>, IngestError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    let at = |prefix: String, e: IngestError| match e {
        IngestError::MalformedRecord { path, message } => {
            IngestError::malformed(format!("{prefix}.{path}"), message)
        }
        other => other,
    };
    if trimmed.starts_with('[') {
        let values: Vec<Value> = serde_json::from_str(trimmed)
            .map_err(|e| IngestError::malformed("$", format!("invalid JSON: {e}")))?;
        return values
            .into_iter()
            .enumerate()
            .map(|(i, v)| parse_value(v).map_err(|e| at(format!("[{i}]"), e)))
            .collect();
    }
    if let Ok(v @ Value::Object(_)) = serde_json::from_str::<Value>(trimmed) {
        return Ok(vec![parse_value(v)?]);
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_record(l).map_err(|e| at(format!("line {}", i + 1), e)))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub cases_loaded: usize,
    pub nodes_merged: usize,
    pub edges_merged: usize,
    pub nodes_created: usize,
    pub edges_created: usize,
    pub warnings: Vec<String>,
}

struct Loader<'g> {
    graph: &'g mut LegalGraph,
    report: LoadReport,
}

impl Loader<'_> {
    fn node(&mut self, label: NodeLabel, key: &str, properties: Properties) -> Result<(), GraphError> {
        let before = self.graph.node_count();
        self.graph.merge_node(label, key, properties)?;
        self.report.nodes_merged += 1;
        self.report.nodes_created += self.graph.node_count() - before;
        Ok(())
    }

    fn edge(
        &mut self,
        edge_type: EdgeType,
        src: (NodeLabel, &str),
        dst: (NodeLabel, &str),
        properties: Properties,
    ) -> Result<(), GraphError> {
        let before = self.graph.edge_count();
        self.graph.merge_edge(edge_type, src, dst, properties)?;
        self.report.edges_merged += 1;
        self.report.edges_created += self.graph.edge_count() - before;
        Ok(())
    }

    fn warn(&mut self, citation: &Citation, what: &str, err: GraphError) {
        self.report.warnings.push(format!("{citation}: {what}: {err}"));
    }

    fn load_record(&mut self, r: &JudgmentRecord) -> Result<(), GraphError> {
        let cite = r.citation.as_str();
        let case = (NodeLabel::Case, cite);

        let mut case_props: Properties = props([
            ("citation", cite),
            ("name", r.name.as_str()),
            ("court", r.court.as_str()),
            ("matter_type", r.matter_type.as_str()),
            ("summary", r.summary.as_str()),
        ]);
        case_props.insert("stub".into(), false.into());
        if let Some(y) = r.year {
            case_props.insert("year".into(), i64::from(y).into());
        }
        if let Some(b) = r.bench_size {
            case_props.insert("bench_size".into(), b.into());
        }
        if let Some(b) = &r.bench_type {
            case_props.insert("bench_type".into(), b.clone().into());
        }
        self.node(NodeLabel::Case, cite, case_props)?;

        if !r.court.trim().is_empty() {
            self.node(NodeLabel::Jurisdiction, r.court.trim(), props([("name", r.court.trim())]))?;
        }
        for judge in r.judges.iter().filter(|j| !j.trim().is_empty()) {
            self.node(NodeLabel::Judge, judge.trim(), props([("name", judge.trim())]))?;
        }

        for (i, issue) in r.issues.iter().enumerate() {
            let key = r.issue_key(i + 1);
            self.node(
                NodeLabel::LegalIssue,
                &key,
                props([("text", issue.text.as_str()), ("category", issue.category.as_str())]),
            )?;
            self.edge(EdgeType::Addresses, case, (NodeLabel::LegalIssue, &key), Properties::new())?;
        }
        for (i, rule) in r.rules.iter().enumerate() {
            let key = r.rule_key(i + 1);
            self.node(NodeLabel::Rule, &key, props([("text", rule.text.as_str())]))?;
            self.edge(EdgeType::AppliesRule, case, (NodeLabel::Rule, &key), Properties::new())?;
        }

        for statute in &r.statutes {
            let name = statute.name.trim();
            let mut sp = props([("name", name)]);
            if let Some(rep) = statute.repealed {
                sp.insert("repealed".into(), rep.into());
            }
            self.node(NodeLabel::Statute, name, sp)?;
            if statute.sections.is_empty() {
                self.edge(EdgeType::GovernedBy, case, (NodeLabel::Statute, name), Properties::new())?;
            }
            for section in &statute.sections {
                let key = section_key(name, &section.number);
                let mut secp = props([("number", section.number.trim()), ("statute_name", name)]);
                if let Some(rep) = section.repealed {
                    secp.insert("repealed".into(), rep.into());
                }
                self.node(NodeLabel::Section, &key, secp)?;
                self.edge(EdgeType::GovernedBy, case, (NodeLabel::Section, &key), Properties::new())?;
            }
        }

        for p in &r.precedents {
            let other = p.citation.as_str();
            if self.graph.lookup(NodeLabel::Case, other).is_none() {
                let mut stub = props([("citation", other)]);
                stub.insert("stub".into(), true.into());
                self.node(NodeLabel::Case, other, stub)?;
            }
            let mut attrs = p.attributes.clone();
            if p.relation == EdgeType::Overrules && !attrs.contains_key("year") {
                if let Some(y) = r.year {
                    attrs.insert("year".into(), PropertyValue::Int(y.into()));
                }
            }
            if let Err(e) = self.edge(p.relation, case, (NodeLabel::Case, other), attrs) {
                self.warn(&r.citation, &format!("{} {other}", p.relation), e);
            }
        }

        for e in &r.procedural_events {
            let key = r.event_key(e.order);
            let mut ep = props([("event_type", e.event_type.trim())]);
            ep.insert("sequence".into(), e.order.into());
            if let Some(level) = &e.court_level {
                ep.insert("court_level".into(), level.clone().into());
            }
            if let Some(d) = e.date {
                ep.insert("date".into(), d.to_string().into());
            }
            self.node(NodeLabel::ProceduralEvent, &key, ep)?;
        }
        for w in r.procedural_events.windows(2) {
            let (a, b) = (r.event_key(w[0].order), r.event_key(w[1].order));
            let src = (NodeLabel::ProceduralEvent, a.as_str());
            let dst = (NodeLabel::ProceduralEvent, b.as_str());
            let mut gap = Properties::new();
            if let (Some(da), Some(db)) = (w[0].date, w[1].date) {
                let days = (db - da).num_days();
                if days >= 0 {
                    gap.insert("time_gap_days".into(), days.into());
                }
            }
            self.edge(EdgeType::Precedes, src, dst, gap)?;
            if let Some(t) = &w[0].triggers_next {
                let mut tp = Properties::new();
                if t.relation == EdgeType::Triggers {
                    if let Some(c) = &t.condition {
                        tp.insert("condition".into(), c.clone().into());
                    }
                }
                self.edge(t.relation, src, dst, tp)?;
            }
        }

        if let Some(o) = &r.outcome {
            let key = r.outcome_key();
            self.node(
                NodeLabel::Outcome,
                &key,
                props([("outcome_type", o.outcome_type.as_str()), ("text", o.text.as_str())]),
            )?;
            self.edge(EdgeType::ResultsIn, case, (NodeLabel::Outcome, &key), Properties::new())?;
        }
        Ok(())
    }
}

/// Loads records into the graph. Unresolved precedent citations become stub
/// cases (`stub = true`) that a later full record promotes in place.
pub fn load(records: &[JudgmentRecord], graph: &mut LegalGraph) -> LoadReport {
    let mut loader = Loader {
        graph,
        report: LoadReport::default(),
    };
    for r in records {
        match loader.load_record(r) {
            Ok(()) => loader.report.cases_loaded += 1,
            Err(e) => loader.warn(&r.citation, "record skipped", e),
        }
    }
    loader.report
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetadataGuess {
    pub citation: Option<Citation>,
    pub court: Option<String>,
    pub year: Option<i32>,
    pub bench: Option<String>,
    pub confidence: f64,
}

struct MetadataPatterns {
    citation: Vec<Regex>,
    supreme: Regex,
    high_of: Regex,
    high_place: Regex,
    bench: Regex,
    year: Regex,
}

fn patterns() -> &'static MetadataPatterns {
    static P: OnceLock<MetadataPatterns> = OnceLock::new();
    P.get_or_init(|| MetadataPatterns {
        citation: vec![
            Regex::new(r"(?i)\((1[89]\d\d|20\d\d)\)\s+\d+\s+SCC\s+\d+").unwrap(),
            Regex::new(r"(?i)\b(1[89]\d\d|20\d\d)\s+Supp\s+\(\d+\)\s+SCC\s+\d+").unwrap(),
            Regex::new(r"(?i)\bAIR\s+(1[89]\d\d|20\d\d)\s+SC\s+\d+").unwrap(),
            Regex::new(r"(?i)\[(1[89]\d\d|20\d\d)\]\s+\d+\s+S\.?C\.?R\.?\s+\d+").unwrap(),
        ],
        supreme: Regex::new(r"(?i)\bsupreme\s+court\s+of\s+india\b").unwrap(),
        high_of: Regex::new(r"(?i)\bhigh\s+court\s+of\s+([a-z]+(?:\s+(?:and\s+)?[a-z]+){0,2})").unwrap(),
        high_place: Regex::new(r"(?im)^\s*(?:in\s+the\s+)?([a-z]+)\s+high\s+court\b").unwrap(),
        bench: Regex::new(r"(?im)^\s*(?:bench|coram)\s*:\s*(.+?)\s*$").unwrap(),
        year: Regex::new(r"\b(1[89]\d\d|20\d\d)\b").unwrap(),
    })
}

fn title_case(s: &str) -> String {
    s.split_whitespace()
        .map(|w| {
            let lower = w.to_lowercase();
            if lower == "and" {
                return lower;
            }
            let mut c = lower.chars();
            match c.next() {
                Some(f) => f.to_uppercase().chain(c).collect(),
                None => String::new(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Regex-based header extraction over the first [`METADATA_WINDOW`]
/// characters of judgment text.
pub fn extract_metadata(text: &str) -> MetadataGuess {
    let end = text
        .char_indices()
        .nth(METADATA_WINDOW)
        .map(|(i, _)| i)
        .unwrap_or(text.len());
    let head = &text[..end];
    let p = patterns();

    let mut guess = MetadataGuess::default();
    let first_citation = p
        .citation
        .iter()
        .filter_map(|re| re.captures(head))
        .min_by_key(|c| c.get(0).map(|m| m.start()));
    if let Some(caps) = first_citation {
        guess.citation = normalize_citation(&caps[0]).ok();
        guess.year = caps[1].parse().ok();
    }
    if p.supreme.is_match(head) {
        guess.court = Some("Supreme Court".to_owned());
    } else if let Some(c) = p.high_of.captures(head) {
        let place = title_case(&c[1]);
        guess.court = Some(format!("High Court of {place}"));
    } else if let Some(c) = p.high_place.captures(head) {
        guess.court = Some(format!("{} High Court", title_case(&c[1])));
    }
    if let Some(c) = p.bench.captures(head) {
        guess.bench = Some(c[1].to_owned());
    }
    if guess.year.is_none() {
        guess.year = p.year.captures(head).and_then(|c| c[1].parse().ok());
    }
    let found = [
        guess.citation.is_some(),
        guess.court.is_some(),
        guess.year.is_some(),
        guess.bench.is_some(),
    ];
    guess.confidence = found.iter().filter(|f| **f).count() as f64 / found.len() as f64;
    guess
}

/// Count of fully ingested cases per decade, keyed `"1970s"` etc.
pub fn compute_decade_histogram(graph: &LegalGraph) -> BTreeMap<String, usize> {
    let mut hist = BTreeMap::new();
    for n in graph.nodes_with_label(NodeLabel::Case) {
        if n.is_stub() {
            continue;
        }
        if let Some(year) = n.int("year") {
            *hist.entry(format!("{}s", year - year.rem_euclid(10))).or_default() += 1;
        }
    }
    hist
}
