//! JSON snapshot files for [`LegalGraph`].
//!
//! Nodes are sorted by `(label, key)` and edges by `(type, src, dst)` so two
//! graphs with the same content always serialize to the same bytes,
//! regardless of the order they were built in.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeType, GraphError, LegalGraph, NodeLabel, Properties};

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("snapshot json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("snapshot content: {0}")]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeRef {
    pub label: NodeLabel,
    pub key: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotNode {
    pub label: NodeLabel,
    pub key: String,
    #[serde(default)]
    pub properties: Properties,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEdge {
    #[serde(rename = "type")]
    pub edge_type: EdgeType,
    pub src: NodeRef,
    pub dst: NodeRef,
    #[serde(default)]
    pub properties: Properties,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub nodes: Vec<SnapshotNode>,
    pub edges: Vec<SnapshotEdge>,
}

impl Snapshot {
    pub fn from_graph(graph: &LegalGraph) -> Self {
        let mut nodes: Vec<SnapshotNode> = graph
            .nodes()
            .map(|n| SnapshotNode {
                label: n.label,
                key: n.key.clone(),
                properties: n.properties.clone(),
            })
            .collect();
        nodes.sort_by(|a, b| (a.label, &a.key).cmp(&(b.label, &b.key)));

        let node_ref = |id| {
            let n = graph.node(id).expect("edge endpoint exists");
            NodeRef {
                label: n.label,
                key: n.key.clone(),
            }
        };
        let mut edges: Vec<SnapshotEdge> = graph
            .edges()
            .map(|e| SnapshotEdge {
                edge_type: e.edge_type,
                src: node_ref(e.src),
                dst: node_ref(e.dst),
                properties: e.properties.clone(),
            })
            .collect();
        edges.sort_by(|a, b| (a.edge_type, &a.src, &a.dst).cmp(&(b.edge_type, &b.src, &b.dst)));
        Snapshot { nodes, edges }
    }

    pub fn into_graph(self) -> Result<LegalGraph, SnapshotError> {
        let mut graph = LegalGraph::new();
        for n in self.nodes {
            graph.merge_node(n.label, &n.key, n.properties)?;
        }
        for e in self.edges {
            graph.merge_edge(
                e.edge_type,
                (e.src.label, &e.src.key),
                (e.dst.label, &e.dst.key),
                e.properties,
            )?;
        }
        Ok(graph)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }
}

/// Canonical JSON text of a graph; equal strings mean isomorphic graphs.
pub fn canonical_json(graph: &LegalGraph) -> String {
    Snapshot::from_graph(graph).to_json()
}

pub fn save(graph: &LegalGraph, path: impl AsRef<Path>) -> Result<(), SnapshotError> {
    let mut text = canonical_json(graph);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<LegalGraph, SnapshotError> {
    let text = fs::read_to_string(path)?;
    from_json(&text)
}

pub fn from_json(text: &str) -> Result<LegalGraph, SnapshotError> {
    let snapshot: Snapshot = serde_json::from_str(text)?;
    snapshot.into_graph()
}
