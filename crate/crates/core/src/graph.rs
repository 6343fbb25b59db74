//! In-memory typed property graph for the IRAC schema.
//!
//! Nodes are unique per `(label, key)` and edges per `(type, src, dst)`;
//! every write goes through a merge so repeated loads never duplicate.
//! Case keys are matched case-insensitively, every other label exactly.
//!
//! Query results are ordered by `(edge_type, dst key, src key)` so that
//! neighbour lists and BFS tie-breaks are reproducible.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("missing endpoint {label}:{key}")]
    MissingEndpoint { label: NodeLabel, key: String },
    #[error("{edge_type} cannot connect {src} -> {dst}")]
    IllegalEndpoints {
        edge_type: EdgeType,
        src: NodeLabel,
        dst: NodeLabel,
    },
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NodeLabel {
    Case,
    Judge,
    Statute,
    Section,
    LegalIssue,
    Rule,
    Argument,
    ProceduralEvent,
    Outcome,
    Jurisdiction,
}

impl NodeLabel {
    pub const ALL: [NodeLabel; 10] = [
        NodeLabel::Case,
        NodeLabel::Judge,
        NodeLabel::Statute,
        NodeLabel::Section,
        NodeLabel::LegalIssue,
        NodeLabel::Rule,
        NodeLabel::Argument,
        NodeLabel::ProceduralEvent,
        NodeLabel::Outcome,
        NodeLabel::Jurisdiction,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeLabel::Case => "Case",
            NodeLabel::Judge => "Judge",
            NodeLabel::Statute => "Statute",
            NodeLabel::Section => "Section",
            NodeLabel::LegalIssue => "LegalIssue",
            NodeLabel::Rule => "Rule",
            NodeLabel::Argument => "Argument",
            NodeLabel::ProceduralEvent => "ProceduralEvent",
            NodeLabel::Outcome => "Outcome",
            NodeLabel::Jurisdiction => "Jurisdiction",
        }
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeLabel {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| GraphError::SchemaViolation(format!("unknown node label {s:?}")))
    }
}

/// Relationship types. The declaration order is the sort order used for
/// neighbour and path results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdgeType {
    Cites,
    Overrules,
    Distinguishes,
    ConflictsWith,
    ResolvedBy,
    NarrowedBy,
    Triggers,
    Precedes,
    AppliesRule,
    ResultsIn,
    Addresses,
    GovernedBy,
}

impl EdgeType {
    pub const ALL: [EdgeType; 12] = [
        EdgeType::Cites,
        EdgeType::Overrules,
        EdgeType::Distinguishes,
        EdgeType::ConflictsWith,
        EdgeType::ResolvedBy,
        EdgeType::NarrowedBy,
        EdgeType::Triggers,
        EdgeType::Precedes,
        EdgeType::AppliesRule,
        EdgeType::ResultsIn,
        EdgeType::Addresses,
        EdgeType::GovernedBy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeType::Cites => "CITES",
            EdgeType::Overrules => "OVERRULES",
            EdgeType::Distinguishes => "DISTINGUISHES",
            EdgeType::ConflictsWith => "CONFLICTS_WITH",
            EdgeType::ResolvedBy => "RESOLVED_BY",
            EdgeType::NarrowedBy => "NARROWED_BY",
            EdgeType::Triggers => "TRIGGERS",
            EdgeType::Precedes => "PRECEDES",
            EdgeType::AppliesRule => "APPLIES_RULE",
            EdgeType::ResultsIn => "RESULTS_IN",
            EdgeType::Addresses => "ADDRESSES",
            EdgeType::GovernedBy => "GOVERNED_BY",
        }
    }

    /// Legal `(src, dst)` label combinations.
    fn endpoints(self) -> (&'static [NodeLabel], &'static [NodeLabel]) {
        use NodeLabel::*;
        match self {
            EdgeType::Cites
            | EdgeType::Overrules
            | EdgeType::Distinguishes
            | EdgeType::ConflictsWith
            | EdgeType::ResolvedBy
            | EdgeType::NarrowedBy => (&[Case], &[Case]),
            EdgeType::Triggers | EdgeType::Precedes => (&[ProceduralEvent], &[ProceduralEvent]),
            EdgeType::AppliesRule => (&[Case, LegalIssue], &[Rule]),
            EdgeType::ResultsIn => (&[Case, LegalIssue, ProceduralEvent], &[Outcome, ProceduralEvent]),
            EdgeType::Addresses => (&[Case, Argument], &[LegalIssue]),
            EdgeType::GovernedBy => (&[Case, LegalIssue], &[Section, Statute]),
        }
    }

    fn attribute_schema(self) -> &'static [(&'static str, PropertyKind)] {
        use PropertyKind::*;
        match self {
            EdgeType::Cites => &[("proposition", Text)],
            EdgeType::Overrules => &[("year", Integer)],
            EdgeType::Distinguishes | EdgeType::NarrowedBy => &[("basis", Text)],
            EdgeType::ConflictsWith => &[("conflict_type", Text), ("unresolved", Boolean)],
            EdgeType::ResolvedBy => &[("resolution_type", Text)],
            EdgeType::Triggers => &[("condition", Text)],
            EdgeType::Precedes => &[("time_gap_days", Integer)],
            EdgeType::AppliesRule | EdgeType::ResultsIn | EdgeType::Addresses | EdgeType::GovernedBy => &[],
        }
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EdgeType {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EdgeType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| GraphError::SchemaViolation(format!("unknown edge type {s:?}")))
    }
}

pub const CONFLICT_TYPES: [&str; 3] = ["coordinate_bench", "per_incuriam", "distinguished"];
pub const RESOLUTION_TYPES: [&str; 3] = ["larger_bench", "full_bench", "constitutional_bench"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PropertyValue {
    Bool(bool),
    Int(i64),
    Text(String),
    List(Vec<String>),
}

impl PropertyValue {
    pub fn as_str(&self) -> Option<&str> {
        match self {
            PropertyValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            PropertyValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            PropertyValue::Bool(v) => Some(*v),
            _ => None,
        }
    }

    fn kind(&self) -> PropertyKind {
        match self {
            PropertyValue::Bool(_) => PropertyKind::Boolean,
            PropertyValue::Int(_) => PropertyKind::Integer,
            PropertyValue::Text(_) => PropertyKind::Text,
            PropertyValue::List(_) => PropertyKind::List,
        }
    }
}

impl From<&str> for PropertyValue {
    fn from(v: &str) -> Self {
        PropertyValue::Text(v.to_owned())
    }
}

impl From<String> for PropertyValue {
    fn from(v: String) -> Self {
        PropertyValue::Text(v)
    }
}

impl From<i64> for PropertyValue {
    fn from(v: i64) -> Self {
        PropertyValue::Int(v)
    }
}

impl From<bool> for PropertyValue {
    fn from(v: bool) -> Self {
        PropertyValue::Bool(v)
    }
}

impl From<Vec<String>> for PropertyValue {
    fn from(v: Vec<String>) -> Self {
        PropertyValue::List(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PropertyKind {
    Text,
    Integer,
    Boolean,
    List,
}

pub type Properties = BTreeMap<String, PropertyValue>;

/// Builds a property map from `(name, value)` pairs.
pub fn props<I, K, V>(pairs: I) -> Properties
where
    I: IntoIterator<Item = (K, V)>,
    K: Into<String>,
    V: Into<PropertyValue>,
{
    pairs.into_iter().map(|(k, v)| (k.into(), v.into())).collect()
}

fn node_schema(label: NodeLabel) -> &'static [(&'static str, PropertyKind)] {
    use PropertyKind::*;
    match label {
        NodeLabel::Case => &[
            ("citation", Text),
            ("name", Text),
            ("court", Text),
            ("year", Integer),
            ("bench_size", Integer),
            ("bench_type", Text),
            ("matter_type", Text),
            ("summary", Text),
            ("stub", Boolean),
        ],
        NodeLabel::Judge => &[("name", Text)],
        NodeLabel::Statute => &[("name", Text), ("repealed", Boolean)],
        NodeLabel::Section => &[("number", Text), ("statute_name", Text), ("repealed", Boolean)],
        NodeLabel::LegalIssue => &[("text", Text), ("category", Text)],
        NodeLabel::Rule | NodeLabel::Argument => &[("text", Text)],
        NodeLabel::ProceduralEvent => &[
            ("event_type", Text),
            ("court_level", Text),
            ("sequence", Integer),
            ("date", Text),
        ],
        NodeLabel::Outcome => &[("outcome_type", Text), ("text", Text)],
        NodeLabel::Jurisdiction => &[("name", Text)],
    }
}

fn check_schema(
    what: &str,
    schema: &[(&str, PropertyKind)],
    properties: &Properties,
) -> Result<(), GraphError> {
    for (name, value) in properties {
        if name.is_empty() {
            return Err(GraphError::SchemaViolation(format!("{what}: empty property name")));
        }
        if let Some((_, kind)) = schema.iter().find(|(n, _)| n == name) {
            if value.kind() != *kind {
                return Err(GraphError::SchemaViolation(format!(
                    "{what}.{name}: expected {kind:?}, found {:?}",
                    value.kind()
                )));
            }
        }
    }
    Ok(())
}

fn validate_node(label: NodeLabel, properties: &Properties) -> Result<(), GraphError> {
    check_schema(label.as_str(), node_schema(label), properties)?;
    if label == NodeLabel::Case {
        if let Some(year) = properties.get("year").and_then(PropertyValue::as_int) {
            if !(1000..=9999).contains(&year) {
                return Err(GraphError::SchemaViolation(format!(
                    "Case.year must have four digits, got {year}"
                )));
            }
        }
    }
    Ok(())
}

fn validate_edge(edge_type: EdgeType, properties: &Properties) -> Result<(), GraphError> {
    check_schema(edge_type.as_str(), edge_type.attribute_schema(), properties)?;
    let text = |k: &str| properties.get(k).and_then(PropertyValue::as_str);
    match edge_type {
        EdgeType::ConflictsWith => {
            if let Some(t) = text("conflict_type") {
                if !CONFLICT_TYPES.contains(&t) {
                    return Err(GraphError::SchemaViolation(format!("unknown conflict_type {t:?}")));
                }
            }
        }
        EdgeType::ResolvedBy => {
            if let Some(t) = text("resolution_type") {
                if !RESOLUTION_TYPES.contains(&t) {
                    return Err(GraphError::SchemaViolation(format!(
                        "unknown resolution_type {t:?}"
                    )));
                }
            }
        }
        EdgeType::Precedes => {
            if let Some(gap) = properties.get("time_gap_days").and_then(PropertyValue::as_int) {
                if gap < 0 {
                    return Err(GraphError::SchemaViolation(format!(
                        "time_gap_days must be non-negative, got {gap}"
                    )));
                }
            }
        }
        _ => {}
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    pub id: NodeId,
    pub label: NodeLabel,
    pub key: String,
    pub properties: Properties,
}

impl Node {
    pub fn text(&self, name: &str) -> Option<&str> {
        self.properties.get(name).and_then(PropertyValue::as_str)
    }

    pub fn int(&self, name: &str) -> Option<i64> {
        self.properties.get(name).and_then(PropertyValue::as_int)
    }

    pub fn flag(&self, name: &str) -> bool {
        self.properties
            .get(name)
            .and_then(PropertyValue::as_bool)
            .unwrap_or(false)
    }

    pub fn is_stub(&self) -> bool {
        self.flag("stub")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub id: EdgeId,
    pub edge_type: EdgeType,
    pub src: NodeId,
    pub dst: NodeId,
    pub properties: Properties,
}

impl Edge {
    pub fn text(&self, name: &str) -> Option<&str> {
        self.properties.get(name).and_then(PropertyValue::as_str)
    }

    pub fn int(&self, name: &str) -> Option<i64> {
        self.properties.get(name).and_then(PropertyValue::as_int)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    Both,
}

/// An alternating node/edge sequence. `nodes.len() == edges.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub node_count_by_label: BTreeMap<NodeLabel, usize>,
    pub edge_count_by_type: BTreeMap<EdgeType, usize>,
    pub total_nodes: usize,
    pub total_edges: usize,
}

impl GraphStats {
    pub fn nodes(&self, label: NodeLabel) -> usize {
        self.node_count_by_label.get(&label).copied().unwrap_or(0)
    }

    pub fn edges(&self, edge_type: EdgeType) -> usize {
        self.edge_count_by_type.get(&edge_type).copied().unwrap_or(0)
    }
}

fn index_key(label: NodeLabel, key: &str) -> String {
    match label {
        NodeLabel::Case => key.to_lowercase(),
        _ => key.to_owned(),
    }
}

/// The property graph. Readers share `&LegalGraph`; writers need `&mut`.
#[derive(Debug, Clone, Default)]
pub struct LegalGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    node_index: HashMap<(NodeLabel, String), NodeId>,
    edge_index: HashMap<(EdgeType, NodeId, NodeId), EdgeId>,
    outgoing: Vec<Vec<EdgeId>>,
    incoming: Vec<Vec<EdgeId>>,
}

impl LegalGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Creates the node or shallow-updates its properties. Returns the id
    /// either way.
    pub fn merge_node(
        &mut self,
        label: NodeLabel,
        key: &str,
        properties: Properties,
    ) -> Result<NodeId, GraphError> {
        let key = key.trim();
        if key.is_empty() {
            return Err(GraphError::SchemaViolation(format!("{label} key is empty")));
        }
        validate_node(label, &properties)?;
        if let Some(&id) = self.node_index.get(&(label, index_key(label, key))) {
            self.nodes[id.0 as usize].properties.extend(properties);
            return Ok(id);
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            id,
            label,
            key: key.to_owned(),
            properties,
        });
        self.outgoing.push(Vec::new());
        self.incoming.push(Vec::new());
        self.node_index.insert((label, index_key(label, key)), id);
        Ok(id)
    }

    pub fn merge_edge(
        &mut self,
        edge_type: EdgeType,
        src: (NodeLabel, &str),
        dst: (NodeLabel, &str),
        properties: Properties,
    ) -> Result<EdgeId, GraphError> {
        let src_id = self.lookup(src.0, src.1).ok_or_else(|| GraphError::MissingEndpoint {
            label: src.0,
            key: src.1.to_owned(),
        })?;
        let dst_id = self.lookup(dst.0, dst.1).ok_or_else(|| GraphError::MissingEndpoint {
            label: dst.0,
            key: dst.1.to_owned(),
        })?;
        self.merge_edge_by_id(edge_type, src_id, dst_id, properties)
    }

    pub fn merge_edge_by_id(
        &mut self,
        edge_type: EdgeType,
        src: NodeId,
        dst: NodeId,
        properties: Properties,
    ) -> Result<EdgeId, GraphError> {
        let src_label = self.node_by_id(src)?.label;
        let dst_label = self.node_by_id(dst)?.label;
        let (allowed_src, allowed_dst) = edge_type.endpoints();
        if !allowed_src.contains(&src_label) || !allowed_dst.contains(&dst_label) {
            return Err(GraphError::IllegalEndpoints {
                edge_type,
                src: src_label,
                dst: dst_label,
            });
        }
        validate_edge(edge_type, &properties)?;
        if let Some(&id) = self.edge_index.get(&(edge_type, src, dst)) {
            self.edges[id.0 as usize].properties.extend(properties);
            return Ok(id);
        }
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(Edge {
            id,
            edge_type,
            src,
            dst,
            properties,
        });
        self.edge_index.insert((edge_type, src, dst), id);
        self.outgoing[src.0 as usize].push(id);
        self.incoming[dst.0 as usize].push(id);
        Ok(id)
    }

    pub fn lookup(&self, label: NodeLabel, key: &str) -> Option<NodeId> {
        self.node_index
            .get(&(label, index_key(label, key.trim())))
            .copied()
    }

    pub fn get_node(&self, label: NodeLabel, key: &str) -> Option<&Node> {
        self.lookup(label, key).map(|id| &self.nodes[id.0 as usize])
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.0 as usize)
    }

    fn node_by_id(&self, id: NodeId) -> Result<&Node, GraphError> {
        self.node(id).ok_or(GraphError::UnknownNode(id))
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(id.0 as usize)
    }

    pub fn find_edge(&self, edge_type: EdgeType, src: NodeId, dst: NodeId) -> Option<&Edge> {
        self.edge_index
            .get(&(edge_type, src, dst))
            .map(|id| &self.edges[id.0 as usize])
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter()
    }

    pub fn nodes_with_label(&self, label: NodeLabel) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.label == label)
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter()
    }

    pub fn edges_of_type(&self, edge_type: EdgeType) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.edge_type == edge_type)
    }

    fn edge_sort_key(&self, e: &Edge) -> (EdgeType, &str, &str) {
        (
            e.edge_type,
            self.nodes[e.dst.0 as usize].key.as_str(),
            self.nodes[e.src.0 as usize].key.as_str(),
        )
    }

    /// Edges of one type touching `node`, paired with the node at the other
    /// end, ordered by `(edge_type, dst key, src key)`.
    pub fn neighbors(
        &self,
        node: NodeId,
        edge_type: EdgeType,
        direction: Direction,
    ) -> Result<Vec<(&Edge, &Node)>, GraphError> {
        self.node_by_id(node)?;
        let mut out: Vec<(&Edge, &Node)> = Vec::new();
        let idx = node.0 as usize;
        if matches!(direction, Direction::Out | Direction::Both) {
            for &eid in &self.outgoing[idx] {
                let e = &self.edges[eid.0 as usize];
                if e.edge_type == edge_type {
                    out.push((e, &self.nodes[e.dst.0 as usize]));
                }
            }
        }
        if matches!(direction, Direction::In | Direction::Both) {
            for &eid in &self.incoming[idx] {
                let e = &self.edges[eid.0 as usize];
                // a self-loop was already collected on the outgoing side
                if e.edge_type == edge_type && !(direction == Direction::Both && e.src == e.dst) {
                    out.push((e, &self.nodes[e.src.0 as usize]));
                }
            }
        }
        out.sort_by(|a, b| self.edge_sort_key(a.0).cmp(&self.edge_sort_key(b.0)));
        Ok(out)
    }

    fn sorted_outgoing(&self, node: NodeId, allowed: &BTreeSet<EdgeType>) -> Vec<&Edge> {
        let mut edges: Vec<&Edge> = self.outgoing[node.0 as usize]
            .iter()
            .map(|id| &self.edges[id.0 as usize])
            .filter(|e| allowed.contains(&e.edge_type))
            .collect();
        edges.sort_by(|a, b| self.edge_sort_key(a).cmp(&self.edge_sort_key(b)));
        edges
    }

    /// Shortest directed path using only `allowed` edge types, at most
    /// `max_depth` edges long.
    pub fn find_path(
        &self,
        src: NodeId,
        dst: NodeId,
        allowed: &BTreeSet<EdgeType>,
        max_depth: usize,
    ) -> Result<Option<Path>, GraphError> {
        self.node_by_id(src)?;
        self.node_by_id(dst)?;
        if max_depth == 0 {
            return Err(GraphError::InvalidArgument("max_depth must be at least 1".into()));
        }
        if src == dst {
            return Ok(Some(Path {
                nodes: vec![src],
                edges: Vec::new(),
            }));
        }
        let mut parent: HashMap<NodeId, EdgeId> = HashMap::new();
        let mut queue = VecDeque::from([(src, 0usize)]);
        let mut seen = BTreeSet::from([src]);
        while let Some((at, depth)) = queue.pop_front() {
            if depth == max_depth {
                continue;
            }
            for e in self.sorted_outgoing(at, allowed) {
                if !seen.insert(e.dst) {
                    continue;
                }
                parent.insert(e.dst, e.id);
                if e.dst == dst {
                    return Ok(Some(self.unwind(src, dst, &parent)));
                }
                queue.push_back((e.dst, depth + 1));
            }
        }
        Ok(None)
    }

    fn unwind(&self, src: NodeId, dst: NodeId, parent: &HashMap<NodeId, EdgeId>) -> Path {
        let mut nodes = vec![dst];
        let mut edges = Vec::new();
        let mut at = dst;
        while at != src {
            let eid = parent[&at];
            edges.push(eid);
            at = self.edges[eid.0 as usize].src;
            nodes.push(at);
        }
        nodes.reverse();
        edges.reverse();
        Path { nodes, edges }
    }

    /// Renders a path as `Label:key -[TYPE]-> Label:key`.
    pub fn describe_path(&self, path: &Path) -> String {
        let mut out = String::new();
        for (i, nid) in path.nodes.iter().enumerate() {
            if i > 0 {
                let e = &self.edges[path.edges[i - 1].0 as usize];
                out.push_str(&format!(" -[{}]-> ", e.edge_type));
            }
            let n = &self.nodes[nid.0 as usize];
            out.push_str(&format!("{}:{}", n.label, n.key));
        }
        out
    }

    pub fn stats(&self) -> GraphStats {
        let mut stats = GraphStats::default();
        for n in &self.nodes {
            *stats.node_count_by_label.entry(n.label).or_default() += 1;
        }
        for e in &self.edges {
            *stats.edge_count_by_type.entry(e.edge_type).or_default() += 1;
        }
        stats.total_nodes = self.nodes.len();
        stats.total_edges = self.edges.len();
        stats
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}
