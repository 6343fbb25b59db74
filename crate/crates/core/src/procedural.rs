//! Procedural state machine over `ProceduralEvent` chains.
//!
//! States are free-text event types. Transitions are whatever `TRIGGERS`
//! edges the corpus recorded between events of those types; nothing is
//! inferred.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::graph::{Edge, EdgeType, LegalGraph, NodeLabel};
use crate::text::tokens;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProceduralStep {
    pub event_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub court_level: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
}

fn event_type_of(graph: &LegalGraph, id: crate::graph::NodeId) -> Option<&str> {
    graph
        .node(id)
        .filter(|n| n.label == NodeLabel::ProceduralEvent)
        .and_then(|n| n.text("event_type"))
}

fn same_state(a: &str, b: &str) -> bool {
    a.trim().eq_ignore_ascii_case(b.trim())
}

/// Transitions out of `current_event_type`, merged across every case that
/// recorded one. Steps seen in more cases come first, then alphabetical.
pub fn next_steps(current_event_type: &str, graph: &LegalGraph) -> Vec<ProceduralStep> {
    let mut support: BTreeMap<ProceduralStep, usize> = BTreeMap::new();
    for e in graph.edges_of_type(EdgeType::Triggers) {
        if !event_type_of(graph, e.src).is_some_and(|t| same_state(t, current_event_type)) {
            continue;
        }
        let Some(dst) = graph.node(e.dst) else { continue };
        let Some(event_type) = dst.text("event_type") else { continue };
        let step = ProceduralStep {
            event_type: event_type.to_owned(),
            court_level: dst.text("court_level").map(str::to_owned),
            condition: e.text("condition").map(str::to_owned),
        };
        *support.entry(step).or_default() += 1;
    }
    let mut steps: Vec<(ProceduralStep, usize)> = support.into_iter().collect();
    steps.sort_by(|(a, na), (b, nb)| nb.cmp(na).then_with(|| a.cmp(b)));
    steps.into_iter().map(|(s, _)| s).collect()
}

/// Every state reachable from `event_type` through `TRIGGERS`, in BFS order.
/// Includes the start state only if some cycle leads back to it.
pub fn reachable_states(event_type: &str, graph: &LegalGraph) -> Vec<String> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::from([event_type.trim().to_uppercase()]);
    while let Some(state) = queue.pop_front() {
        for step in next_steps(&state, graph) {
            let key = step.event_type.to_uppercase();
            if seen.insert(key.clone()) {
                order.push(step.event_type);
                queue.push_back(key);
            }
        }
    }
    order
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceEvent {
    pub event_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<NaiveDate>,
    pub order: i64,
}

impl SequenceEvent {
    pub fn new(event_type: &str, order: i64, date: Option<NaiveDate>) -> Self {
        SequenceEvent {
            event_type: event_type.to_owned(),
            date,
            order,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventSequence(pub Vec<SequenceEvent>);

impl EventSequence {
    pub fn events(&self) -> &[SequenceEvent] {
        &self.0
    }

    /// The sequence recorded for one case, by event order.
    pub fn from_case(graph: &LegalGraph, citation: &str) -> Self {
        let prefix = format!("{}#event#", citation.trim()).to_lowercase();
        let mut events: Vec<SequenceEvent> = graph
            .nodes_with_label(NodeLabel::ProceduralEvent)
            .filter(|n| n.key.to_lowercase().starts_with(&prefix))
            .filter_map(|n| {
                Some(SequenceEvent {
                    event_type: n.text("event_type")?.to_owned(),
                    date: n.text("date").and_then(|d| d.parse().ok()),
                    order: n.int("sequence")?,
                })
            })
            .collect();
        events.sort_by_key(|e| e.order);
        EventSequence(events)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    OrderNotIncreasing { index: usize, previous: i64, order: i64 },
    DateInversion { index: usize, previous: NaiveDate, date: NaiveDate },
    ReverseTransition { index: usize, from: String, to: String },
    GapMismatch { index: usize, recorded: Vec<i64>, actual: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OrderNotIncreasing { index, previous, order } => {
                write!(f, "event {index}: order {order} does not follow {previous}")
            }
            Violation::DateInversion { index, previous, date } => {
                write!(f, "event {index}: dated {date}, before the previous event on {previous}")
            }
            Violation::ReverseTransition { index, from, to } => {
                write!(f, "event {index}: graph only records {to} leading to {from}, not the reverse")
            }
            Violation::GapMismatch { index, recorded, actual } => {
                write!(f, "event {index}: {actual} days elapsed but recorded gaps are {recorded:?}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceCheck {
    pub valid: bool,
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

const TRANSITION_TYPES: [EdgeType; 3] = [EdgeType::Triggers, EdgeType::Precedes, EdgeType::ResultsIn];

fn connects(graph: &LegalGraph, e: &Edge, from: &str, to: &str) -> bool {
    event_type_of(graph, e.src).is_some_and(|t| same_state(t, from))
        && event_type_of(graph, e.dst).is_some_and(|t| same_state(t, to))
}

/// Checks chronology, transition direction and recorded day gaps for each
/// consecutive pair. A pair the graph has never seen in either direction is
/// only a warning.
pub fn validate_sequence(seq: &EventSequence, graph: &LegalGraph) -> SequenceCheck {
    let mut out = SequenceCheck::default();
    for (i, w) in seq.events().windows(2).enumerate() {
        let index = i + 1;
        let (a, b) = (&w[0], &w[1]);
        if b.order <= a.order {
            out.violations.push(Violation::OrderNotIncreasing {
                index,
                previous: a.order,
                order: b.order,
            });
        }
        if let (Some(da), Some(db)) = (a.date, b.date) {
            if db < da {
                out.violations.push(Violation::DateInversion {
                    index,
                    previous: da,
                    date: db,
                });
            }
        }

        let forward: Vec<&Edge> = TRANSITION_TYPES
            .iter()
            .flat_map(|t| graph.edges_of_type(*t))
            .filter(|e| connects(graph, e, &a.event_type, &b.event_type))
            .collect();
        if forward.is_empty() {
            let reverse = TRANSITION_TYPES
                .iter()
                .flat_map(|t| graph.edges_of_type(*t))
                .any(|e| connects(graph, e, &b.event_type, &a.event_type));
            if reverse {
                out.violations.push(Violation::ReverseTransition {
                    index,
                    from: a.event_type.clone(),
                    to: b.event_type.clone(),
                });
            } else {
                out.warnings.push(format!(
                    "event {index}: no recorded transition from {} to {}",
                    a.event_type, b.event_type
                ));
            }
        }

        if let (Some(da), Some(db)) = (a.date, b.date) {
            let mut recorded: Vec<i64> = forward
                .iter()
                .filter(|e| e.edge_type == EdgeType::Precedes)
                .filter_map(|e| e.int("time_gap_days"))
                .collect();
            recorded.sort_unstable();
            recorded.dedup();
            let actual = (db - da).num_days();
            if !recorded.is_empty() && !recorded.contains(&actual) {
                out.violations.push(Violation::GapMismatch { index, recorded, actual });
            }
        }
    }
    out.valid = out.violations.is_empty();
    out
}

/// What the caller knows about where a matter currently stands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProceduralContext {
    State(String),
    History(EventSequence),
    Query(String),
}

const QUERY_STATES: &[(&[&str], &[&str], &str)] = &[
    (&["anticipatory"], &["rejected", "denied", "refused", "dismissed"], "ANTICIPATORY_BAIL_DENIED"),
    (&["bail"], &["rejected", "denied", "refused", "dismissed", "cancelled"], "BAIL_DENIED"),
    (&["bail"], &["granted", "allowed"], "BAIL_GRANTED"),
    (&["chargesheet", "charge"], &["filed"], "CHARGESHEET_FILED"),
    (&["convicted", "conviction"], &[], "CONVICTION"),
    (&["arrested", "arrest"], &[], "ARREST"),
];

/// Maps a free-text query to a procedural state, if it names one.
pub fn infer_state(query: &str) -> Option<String> {
    let explicit = query
        .split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .find(|w| w.contains('_') && w.chars().all(|c| c.is_ascii_uppercase() || c == '_'));
    if let Some(w) = explicit {
        return Some(w.to_owned());
    }
    let toks: BTreeSet<String> = tokens(query).into_iter().collect();
    QUERY_STATES
        .iter()
        .find(|(subject, verbs, _)| {
            subject.iter().any(|s| toks.contains(*s)) && (verbs.is_empty() || verbs.iter().any(|v| toks.contains(*v)))
        })
        .map(|(_, _, state)| (*state).to_owned())
}

pub fn current_state(context: &ProceduralContext) -> Option<String> {
    match context {
        ProceduralContext::State(s) => Some(s.trim().to_owned()).filter(|s| !s.is_empty()),
        ProceduralContext::History(seq) => seq.events().last().map(|e| e.event_type.clone()),
        ProceduralContext::Query(q) => infer_state(q),
    }
}

/// First entry of [`next_steps`] for the context's current state.
pub fn procedural_next_step(context: &ProceduralContext, graph: &LegalGraph) -> Option<String> {
    let state = current_state(context)?;
    next_steps(&state, graph).into_iter().next().map(|s| s.event_type)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{props, Properties, PropertyValue};

    fn event(g: &mut LegalGraph, key: &str, ty: &str) {
        g.merge_node(NodeLabel::ProceduralEvent, key, props([("event_type", ty)]))
            .unwrap();
    }

    fn edge(g: &mut LegalGraph, t: EdgeType, a: &str, b: &str, p: Properties) {
        g.merge_edge(t, (NodeLabel::ProceduralEvent, a), (NodeLabel::ProceduralEvent, b), p)
            .unwrap();
    }

    fn bail_chain() -> LegalGraph {
        let mut g = LegalGraph::new();
        for (k, t) in [
            ("e1", "BAIL_DENIED"),
            ("e2", "BAIL_APPLICATION_HIGH_COURT"),
            ("e3", "HEARING_HELD"),
            ("e4", "BAIL_GRANTED"),
        ] {
            event(&mut g, k, t);
        }
        edge(
            &mut g,
            EdgeType::Triggers,
            "e1",
            "e2",
            props([("condition", "fresh grounds or changed circumstances")]),
        );
        edge(&mut g, EdgeType::Triggers, "e2", "e3", Properties::new());
        edge(&mut g, EdgeType::ResultsIn, "e3", "e4", Properties::new());
        for (a, b, gap) in [("e1", "e2", 30), ("e2", "e3", 14), ("e3", "e4", 0)] {
            edge(&mut g, EdgeType::Precedes, a, b, props([("time_gap_days", PropertyValue::Int(gap))]));
        }
        g
    }

    fn d(s: &str) -> Option<NaiveDate> {
        Some(s.parse().unwrap())
    }

    fn chain_seq() -> EventSequence {
        EventSequence(vec![
            SequenceEvent::new("BAIL_DENIED", 1, d("2023-01-10")),
            SequenceEvent::new("BAIL_APPLICATION_HIGH_COURT", 2, d("2023-02-09")),
            SequenceEvent::new("HEARING_HELD", 3, d("2023-02-23")),
            SequenceEvent::new("BAIL_GRANTED", 4, d("2023-02-23")),
        ])
    }

    #[test]
    fn next_steps_carry_conditions() {
        let g = bail_chain();
        let steps = next_steps("BAIL_DENIED", &g);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].event_type, "BAIL_APPLICATION_HIGH_COURT");
        assert_eq!(steps[0].condition.as_deref(), Some("fresh grounds or changed circumstances"));
        assert!(next_steps("NO_SUCH_STATE", &g).is_empty());
        // RESULTS_IN is not a TRIGGERS transition
        assert!(next_steps("HEARING_HELD", &g).is_empty());
        assert!(next_steps("BAIL_GRANTED", &g).is_empty());
    }

    #[test]
    fn ambiguous_state_is_deterministic() {
        let mut g = bail_chain();
        event(&mut g, "x1", "BAIL_DENIED");
        event(&mut g, "x2", "ANTICIPATORY_BAIL_APPLICATION");
        edge(&mut g, EdgeType::Triggers, "x1", "x2", Properties::new());
        let steps = next_steps("BAIL_DENIED", &g);
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].event_type, "ANTICIPATORY_BAIL_APPLICATION");
        assert_eq!(
            procedural_next_step(&ProceduralContext::State("BAIL_DENIED".into()), &g).as_deref(),
            Some("ANTICIPATORY_BAIL_APPLICATION")
        );
        // a second case recording the high court route outranks it
        event(&mut g, "y1", "BAIL_DENIED");
        event(&mut g, "y2", "BAIL_APPLICATION_HIGH_COURT");
        edge(
            &mut g,
            EdgeType::Triggers,
            "y1",
            "y2",
            props([("condition", "fresh grounds or changed circumstances")]),
        );
        assert_eq!(next_steps("BAIL_DENIED", &g)[0].event_type, "BAIL_APPLICATION_HIGH_COURT");
    }

    #[test]
    fn cycles_terminate() {
        let mut g = bail_chain();
        event(&mut g, "e5", "BAIL_DENIED");
        edge(&mut g, EdgeType::Triggers, "e3", "e5", Properties::new());
        let steps: Vec<String> = next_steps("HEARING_HELD", &g).into_iter().map(|s| s.event_type).collect();
        assert_eq!(steps, ["BAIL_DENIED"]);
        let reach = reachable_states("BAIL_DENIED", &g);
        assert_eq!(reach, ["BAIL_APPLICATION_HIGH_COURT", "HEARING_HELD", "BAIL_DENIED"]);
    }

    #[test]
    fn bail_chain_validates() {
        let check = validate_sequence(&chain_seq(), &bail_chain());
        assert!(check.valid, "{:?}", check.violations);
        assert!(check.warnings.is_empty());
    }

    #[test]
    fn date_inversion_rejected() {
        let mut seq = chain_seq();
        seq.0[1].date = d("2022-12-01");
        let check = validate_sequence(&seq, &bail_chain());
        assert!(!check.valid);
        assert!(check.violations.iter().any(|v| matches!(v, Violation::DateInversion { index: 1, .. })));
    }

    #[test]
    fn gap_mismatch_rejected() {
        let mut seq = chain_seq();
        // 30 days recorded, 10 elapsed
        seq.0[1].date = d("2023-01-20");
        seq.0[2].date = d("2023-02-03");
        seq.0[3].date = d("2023-02-03");
        let check = validate_sequence(&seq, &bail_chain());
        assert_eq!(
            check.violations,
            [Violation::GapMismatch {
                index: 1,
                recorded: vec![30],
                actual: 10
            }]
        );
    }

    #[test]
    fn unknown_pairs_warn_and_reverse_pairs_fail() {
        let g = bail_chain();
        let seq = EventSequence(vec![
            SequenceEvent::new("BAIL_DENIED", 1, None),
            SequenceEvent::new("APPEAL_FILED", 2, None),
        ]);
        let check = validate_sequence(&seq, &g);
        assert!(check.valid);
        assert_eq!(check.warnings.len(), 1);

        let seq = EventSequence(vec![
            SequenceEvent::new("BAIL_APPLICATION_HIGH_COURT", 1, None),
            SequenceEvent::new("BAIL_DENIED", 2, None),
        ]);
        let check = validate_sequence(&seq, &g);
        assert!(matches!(check.violations[..], [Violation::ReverseTransition { .. }]));
    }

    #[test]
    fn query_context_inference() {
        assert_eq!(
            infer_state("My bail application was rejected by the Sessions Court. What next?").as_deref(),
            Some("BAIL_DENIED")
        );
        assert_eq!(infer_state("state is BAIL_DENIED").as_deref(), Some("BAIL_DENIED"));
        assert_eq!(infer_state("what is res judicata"), None);
        let g = bail_chain();
        let ctx = ProceduralContext::Query("bail was denied".into());
        assert_eq!(procedural_next_step(&ctx, &g).as_deref(), Some("BAIL_APPLICATION_HIGH_COURT"));
        let ctx = ProceduralContext::History(chain_seq());
        assert_eq!(procedural_next_step(&ctx, &g), None);
    }

    #[test]
    fn sequence_from_case_keys() {
        let mut g = LegalGraph::new();
        for (order, ty) in [(2, "B"), (1, "A")] {
            g.merge_node(
                NodeLabel::ProceduralEvent,
                &format!("(2004) 7 SCC 528#event#{order}"),
                props([("event_type", PropertyValue::from(ty)), ("sequence", PropertyValue::Int(order))]),
            )
            .unwrap();
        }
        let seq = EventSequence::from_case(&g, "(2004) 7 SCC 528");
        let types: Vec<&str> = seq.events().iter().map(|e| e.event_type.as_str()).collect();
        assert_eq!(types, ["A", "B"]);
    }
}
