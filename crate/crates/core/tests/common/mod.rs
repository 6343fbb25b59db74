//! Independent recomputation of verifier verdicts by linear scans over the
//! raw node and edge lists, plus a seeded builder for fuzz cases.

#![allow(dead_code)]

use irac_core::graph::{props, Edge, EdgeType, LegalGraph, Node, NodeLabel, PropertyValue};
use irac_core::ingest::Citation;
use irac_core::verifier::{Claim, VerificationStatus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn case_node<'g>(g: &'g LegalGraph, c: &Citation) -> Option<&'g Node> {
    g.nodes()
        .find(|n| n.label == NodeLabel::Case && n.key.eq_ignore_ascii_case(c.as_str()))
}

fn edges(g: &LegalGraph, ty: EdgeType) -> Vec<&Edge> {
    g.edges().filter(|e| e.edge_type == ty).collect()
}

fn flag(props: &irac_core::graph::Properties, name: &str) -> bool {
    matches!(props.get(name), Some(PropertyValue::Bool(true)))
}

pub fn is_overruled(g: &LegalGraph, c: &Citation) -> bool {
    let Some(n) = case_node(g, c) else { return false };
    edges(g, EdgeType::Overrules).iter().any(|e| e.dst == n.id)
}

fn resolved(g: &LegalGraph, a: &Node, b: &Node) -> bool {
    let rb = edges(g, EdgeType::ResolvedBy);
    let direct = rb.iter().any(|e| (e.src, e.dst) == (a.id, b.id) || (e.src, e.dst) == (b.id, a.id));
    let shared = rb
        .iter()
        .filter(|e| e.src == a.id)
        .any(|ea| rb.iter().any(|eb| eb.src == b.id && eb.dst == ea.dst));
    direct || shared
}

fn unresolved_conflict(g: &LegalGraph, cites: &[&Node]) -> bool {
    let cw = edges(g, EdgeType::ConflictsWith);
    for (i, a) in cites.iter().enumerate() {
        for b in &cites[i + 1..] {
            if a.id == b.id {
                continue;
            }
            let linked = cw
                .iter()
                .any(|e| (e.src, e.dst) == (a.id, b.id) || (e.src, e.dst) == (b.id, a.id));
            if linked && !resolved(g, a, b) {
                return true;
            }
        }
    }
    false
}

/// Status for claims without a claimed rule or procedural claim.
pub fn brute_status(claim: &Claim, g: &LegalGraph) -> VerificationStatus {
    assert!(claim.claimed_rule.is_none() && claim.procedural_claim.is_none());
    if claim.cited_cases.is_empty() {
        return VerificationStatus::Invalid;
    }
    let mut found = Vec::new();
    for c in &claim.cited_cases {
        match case_node(g, c) {
            Some(n) if !is_overruled(g, c) => found.push(n),
            _ => return VerificationStatus::Invalid,
        }
    }
    let mut stale = false;
    for s in &claim.cited_sections {
        let Some(sec) = g.nodes().find(|n| n.label == NodeLabel::Section && n.key == s.trim()) else {
            return VerificationStatus::Invalid;
        };
        let parent_repealed = match sec.properties.get("statute_name") {
            Some(PropertyValue::Text(name)) => g
                .nodes()
                .any(|n| n.label == NodeLabel::Statute && &n.key == name && flag(&n.properties, "repealed")),
            _ => false,
        };
        stale |= flag(&sec.properties, "repealed") || parent_repealed;
    }
    if stale {
        VerificationStatus::Stale
    } else if unresolved_conflict(g, &found) {
        VerificationStatus::Conflict
    } else {
        VerificationStatus::Valid
    }
}

pub fn cite(s: &str) -> Citation {
    Citation::parse(s).unwrap()
}

fn fuzz_cite(i: usize) -> String {
    format!("({}) {} SCC {}", 1950 + i, i % 9 + 1, 100 + i)
}

/// A small random graph and a claim over it, including citations and
/// sections that are absent from the graph.
pub fn fuzz_case(seed: u64) -> (LegalGraph, Claim) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = LegalGraph::new();
    let n = rng.gen_range(1..=10);
    for i in 0..n {
        let stub = rng.gen_bool(0.15);
        g.merge_node(NodeLabel::Case, &fuzz_cite(i), props([("stub", stub)])).unwrap();
    }
    let statutes = ["Act A", "Act B"];
    for (i, s) in statutes.iter().enumerate() {
        g.merge_node(NodeLabel::Statute, s, props([("repealed", i == 1 && rng.gen_bool(0.3))]))
            .unwrap();
        for num in 1..=2 {
            let key = format!("{s}/{num}");
            let mut p = props([("repealed", rng.gen_bool(0.25))]);
            p.insert("statute_name".into(), (*s).into());
            g.merge_node(NodeLabel::Section, &key, p).unwrap();
        }
    }
    let edge_types = [
        EdgeType::Cites,
        EdgeType::Overrules,
        EdgeType::ConflictsWith,
        EdgeType::ResolvedBy,
        EdgeType::Distinguishes,
    ];
    for _ in 0..rng.gen_range(0..=2 * n) {
        let a = fuzz_cite(rng.gen_range(0..n));
        let b = fuzz_cite(rng.gen_range(0..n));
        if a == b {
            continue;
        }
        let ty = edge_types[rng.gen_range(0..edge_types.len())];
        g.merge_edge(ty, (NodeLabel::Case, &a), (NodeLabel::Case, &b), Default::default())
            .unwrap();
    }
    let mut claim = Claim::default();
    for _ in 0..rng.gen_range(0..=4) {
        let c = if rng.gen_bool(0.2) {
            format!("(1800) {} SCC {}", rng.gen_range(1..9), rng.gen_range(1..999))
        } else {
            fuzz_cite(rng.gen_range(0..n))
        };
        claim.cited_cases.push(cite(&c));
    }
    for _ in 0..rng.gen_range(0..=2) {
        let s = match rng.gen_range(0..5) {
            0 => "Act C/9".to_owned(),
            k => format!("{}/{}", statutes[k % 2], k / 2 + 1),
        };
        claim.cited_sections.push(s);
    }
    (g, claim)
}

/// Adds one OVERRULES edge between random existing cases.
pub fn add_random_overrule(g: &mut LegalGraph, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let keys: Vec<String> = g
        .nodes()
        .filter(|n| n.label == NodeLabel::Case)
        .map(|n| n.key.clone())
        .collect();
    let a = &keys[rng.gen_range(0..keys.len())];
    let b = &keys[rng.gen_range(0..keys.len())];
    if a != b {
        g.merge_edge(EdgeType::Overrules, (NodeLabel::Case, a), (NodeLabel::Case, b), Default::default())
            .unwrap();
    }
}
