//! Seeded synthetic corpora with planted faults and their ground truth.
//!
//! Every planted count is honored exactly, and the same seed always yields
//! byte-identical records.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeType, LegalGraph, NodeLabel, Properties, PropertyValue};
use crate::ingest::{
    section_key, Citation, EventRecord, JudgmentRecord, PrecedentRecord, SectionRecord, StatuteRecord,
    TransitionRecord,
};
use crate::procedural::{EventSequence, SequenceEvent};
use crate::verifier::{Claim, ConflictType, VerificationStatus};

pub const SYNTHETIC_STATUTE: &str = "Synthetic Procedure Act-1990";

const MATTERS: &[&str] = &["bail", "constitutional", "service", "criminal appeal", "contempt", "employment"];
const COURTS: &[&str] = &["Supreme Court of India", "Delhi High Court", "Bombay High Court"];
const EVENT_TYPES: &[&str] = &[
    "FIR_REGISTERED",
    "ARREST",
    "BAIL_DENIED",
    "BAIL_APPLICATION_HIGH_COURT",
    "HEARING_HELD",
    "BAIL_GRANTED",
    "CHARGESHEET_FILED",
    "TRIAL_COMMENCED",
    "JUDGMENT_DELIVERED",
    "APPEAL_FILED",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultPlan {
    pub seed: u64,
    pub n_cases: usize,
    #[serde(default)]
    pub n_cites: usize,
    #[serde(default)]
    pub n_overrules: usize,
    #[serde(default)]
    pub n_conflicts: usize,
    #[serde(default)]
    pub resolved_fraction: f64,
    #[serde(default)]
    pub n_repealed_sections: usize,
    #[serde(default)]
    pub n_procedural_chains: usize,
    #[serde(default = "default_chain_length")]
    pub chain_length: usize,
}

fn default_chain_length() -> usize {
    4
}

impl FaultPlan {
    pub fn new(seed: u64, n_cases: usize) -> Self {
        FaultPlan {
            seed,
            n_cases,
            n_cites: 0,
            n_overrules: 0,
            n_conflicts: 0,
            resolved_fraction: 0.0,
            n_repealed_sections: 0,
            n_procedural_chains: 0,
            chain_length: default_chain_length(),
        }
    }

    pub fn n_resolved(&self) -> usize {
        (self.n_conflicts as f64 * self.resolved_fraction).round() as usize
    }

    /// Fresh sections planted next to the repealed ones.
    pub fn n_fresh_sections(&self) -> usize {
        3
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let n = self.n_cases;
        let bad = |m: &str| Err(SynthError::InvalidPlan(m.to_owned()));
        if n == 0 {
            return bad("n_cases must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.resolved_fraction) || self.resolved_fraction.is_nan() {
            return bad("resolved_fraction must lie in [0, 1]");
        }
        if self.n_cites > n * (n - 1) {
            return bad("n_cites exceeds the number of distinct case pairs");
        }
        if self.n_overrules > n.saturating_sub(1) {
            return bad("n_overrules needs a distinct target and a separate overruler per edge");
        }
        if self.n_conflicts > n * (n - 1) / 2 {
            return bad("n_conflicts exceeds the number of unordered case pairs");
        }
        if self.n_resolved() > 0 && n < 3 {
            return bad("resolved conflicts need a third case as resolver");
        }
        if self.n_procedural_chains > 0 && !(2..=EVENT_TYPES.len()).contains(&self.chain_length) {
            return bad("chain_length must be between 2 and 10");
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("cannot sample claims: {0}")]
    Unavailable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedConflict {
    pub case_a: Citation,
    pub case_b: Citation,
    pub conflict_type: ConflictType,
    pub resolved: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub cases: BTreeSet<Citation>,
    pub overruled_cases: BTreeSet<Citation>,
    pub conflict_pairs: Vec<PlantedConflict>,
    pub repealed_sections: BTreeSet<String>,
    pub sections: BTreeSet<String>,
    pub procedural_sequences: Vec<EventSequence>,
}

impl GroundTruth {
    pub fn unresolved_between(&self, a: &Citation, b: &Citation) -> bool {
        self.conflict_pairs
            .iter()
            .any(|p| !p.resolved && ((&p.case_a, &p.case_b) == (a, b) || (&p.case_a, &p.case_b) == (b, a)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthCorpus {
    pub records: Vec<JudgmentRecord>,
    pub truth: GroundTruth,
}

impl SynthCorpus {
    pub fn records_json(&self) -> String {
        serde_json::to_string_pretty(&self.records).expect("records serialize")
    }

    pub fn truth_json(&self) -> String {
        serde_json::to_string_pretty(&self.truth).expect("truth serializes")
    }

    pub fn graph(&self) -> LegalGraph {
        let mut g = LegalGraph::new();
        crate::ingest::load(&self.records, &mut g);
        g
    }
}

fn citation(year: i32, volume: u32, page: u32) -> Citation {
    Citation::parse(&format!("({year}) {volume} SCC {page}")).expect("non-empty")
}

fn precedent(citation: &Citation, relation: EdgeType, attrs: &[(&str, &str)]) -> PrecedentRecord {
    let attributes: Properties = attrs
        .iter()
        .map(|(k, v)| ((*k).to_owned(), PropertyValue::from(*v)))
        .collect();
    PrecedentRecord {
        citation: citation.clone(),
        relation,
        attributes,
    }
}

/// Builds a corpus for `plan`.
pub fn generate(plan: &FaultPlan) -> Result<SynthCorpus, SynthError> {
    plan.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let n = plan.n_cases;

    let mut seen = BTreeSet::new();
    let mut records: Vec<JudgmentRecord> = Vec::with_capacity(n);
    while records.len() < n {
        let year = rng.gen_range(1950..=2024);
        let cite = citation(year, rng.gen_range(1..=12), rng.gen_range(1..=999));
        if !seen.insert(cite.clone()) {
            continue;
        }
        let i = records.len();
        let mut r = JudgmentRecord::minimal(cite, MATTERS[rng.gen_range(0..MATTERS.len())]);
        r.name = format!("Synthetic Appellant {i} v. Synthetic Respondent {i}");
        r.court = COURTS[rng.gen_range(0..COURTS.len())].to_owned();
        r.year = Some(year);
        r.summary = format!("Synthetic judgment {i}.");
        records.push(r);
    }
    let cites: Vec<Citation> = records.iter().map(|r| r.citation.clone()).collect();

    let n_sections = plan.n_repealed_sections + plan.n_fresh_sections();
    let mut numbers: Vec<u32> = (1..=n_sections as u32).map(|k| 100 + k).collect();
    numbers.shuffle(&mut rng);
    let repealed: BTreeSet<u32> = numbers.iter().take(plan.n_repealed_sections).copied().collect();
    let mut truth = GroundTruth {
        cases: cites.iter().cloned().collect(),
        ..GroundTruth::default()
    };
    numbers.sort_unstable();
    for num in &numbers {
        let key = section_key(SYNTHETIC_STATUTE, &num.to_string());
        if repealed.contains(num) {
            truth.repealed_sections.insert(key.clone());
        }
        truth.sections.insert(key);
    }
    // every section hangs off some case so it reaches the graph
    for (k, num) in numbers.iter().enumerate() {
        let owner = if k < n { k } else { rng.gen_range(0..n) };
        push_section(&mut records[owner], *num, repealed.contains(num));
    }
    for r in records.iter_mut() {
        if r.statutes.is_empty() && rng.gen_bool(0.5) {
            let num = numbers[rng.gen_range(0..numbers.len())];
            push_section(r, num, repealed.contains(&num));
        }
    }

    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |b| *b != a).map(move |b| (a, b))).collect();
    pairs.shuffle(&mut rng);
    for &(a, b) in pairs.iter().take(plan.n_cites) {
        let target = cites[b].clone();
        records[a].precedents.push(precedent(&target, EdgeType::Cites, &[]));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for &target in order.iter().take(plan.n_overrules) {
        let mut by = rng.gen_range(0..n - 1);
        if by >= target {
            by += 1;
        }
        let t = cites[target].clone();
        records[by].precedents.push(precedent(&t, EdgeType::Overrules, &[]));
        truth.overruled_cases.insert(t);
    }

    let mut unordered: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    unordered.shuffle(&mut rng);
    let chosen: Vec<(usize, usize)> = unordered.into_iter().take(plan.n_conflicts).collect();
    let n_resolved = plan.n_resolved();
    let open_pairs: BTreeSet<(usize, usize)> = chosen[n_resolved..].iter().copied().collect();
    let mut resolvers: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (k, &(a, b)) in chosen.iter().enumerate() {
        let ty = [ConflictType::CoordinateBench, ConflictType::PerIncuriam, ConflictType::Distinguished]
            [rng.gen_range(0..3)];
        let tb = cites[b].clone();
        records[a].precedents.push(precedent(&tb, EdgeType::ConflictsWith, &[("conflict_type", ty.as_str())]));
        let resolved = k < n_resolved;
        if resolved {
            let r = pick_resolver(n, a, b, &open_pairs, &resolvers, &mut rng)?;
            let resolver = cites[r].clone();
            for side in [a, b] {
                resolvers.entry(side).or_default().insert(r);
                records[side].precedents.push(precedent(
                    &resolver,
                    EdgeType::ResolvedBy,
                    &[("resolution_type", "larger_bench")],
                ));
            }
        }
        let (ca, cb) = (cites[a].clone(), tb);
        let (case_a, case_b) = if ca <= cb { (ca, cb) } else { (cb, ca) };
        truth.conflict_pairs.push(PlantedConflict {
            case_a,
            case_b,
            conflict_type: ty,
            resolved,
        });
    }

    for c in 0..plan.n_procedural_chains {
        let owner = c % n;
        let start = NaiveDate::from_ymd_opt(2000 + rng.gen_range(0..24), 1 + rng.gen_range(0..12), 1)
            .expect("valid date");
        let first = rng.gen_range(0..=EVENT_TYPES.len() - plan.chain_length);
        let mut date = start;
        let base = records[owner].procedural_events.len() as i64;
        let mut seq = Vec::new();
        for step in 0..plan.chain_length {
            let order = base + step as i64 + 1;
            let event_type = EVENT_TYPES[first + step];
            let last = step + 1 == plan.chain_length;
            records[owner].procedural_events.push(EventRecord {
                event_type: event_type.to_owned(),
                order,
                date: Some(date),
                court_level: None,
                triggers_next: (!last).then_some(TransitionRecord {
                    condition: None,
                    relation: EdgeType::Triggers,
                }),
            });
            seq.push(SequenceEvent::new(event_type, order, Some(date)));
            date += Duration::days(rng.gen_range(0..60));
        }
        truth.procedural_sequences.push(EventSequence(seq));
    }
    Ok(SynthCorpus { records, truth })
}

/// A resolver for `(a, b)` whose edges cannot make any still-open conflict
/// pair look resolved.
fn pick_resolver(
    n: usize,
    a: usize,
    b: usize,
    open_pairs: &BTreeSet<(usize, usize)>,
    resolvers: &BTreeMap<usize, BTreeSet<usize>>,
    rng: &mut ChaCha8Rng,
) -> Result<usize, SynthError> {
    let mut options: Vec<usize> = (0..n).filter(|r| *r != a && *r != b).collect();
    options.shuffle(rng);
    let of = |x: usize, extra: Option<usize>| -> BTreeSet<usize> {
        let mut s = resolvers.get(&x).cloned().unwrap_or_default();
        s.extend(extra);
        s
    };
    options
        .into_iter()
        .find(|&r| {
            open_pairs.iter().all(|&(x, y)| {
                let rx = of(x, (x == a || x == b).then_some(r));
                let ry = of(y, (y == a || y == b).then_some(r));
                rx.is_disjoint(&ry) && !rx.contains(&y) && !ry.contains(&x)
            })
        })
        .ok_or_else(|| SynthError::InvalidPlan("no resolver keeps the open conflicts unresolved".into()))
}

fn push_section(r: &mut JudgmentRecord, num: u32, repealed: bool) {
    let section = SectionRecord {
        number: num.to_string(),
        repealed: Some(repealed),
    };
    if let Some(st) = r.statutes.iter_mut().find(|s| s.name == SYNTHETIC_STATUTE) {
        if !st.sections.iter().any(|s| s.number == section.number) {
            st.sections.push(section);
        }
    } else {
        r.statutes.push(StatuteRecord {
            name: SYNTHETIC_STATUTE.to_owned(),
            repealed: Some(false),
            sections: vec![section],
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimKind {
    Grounded,
    ConflictingPair,
    ResolvedPair,
    Fabricated,
    Overruled,
    RepealedSection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedFindings {
    pub status: VerificationStatus,
    pub missing: BTreeSet<Citation>,
    pub overruled: BTreeSet<Citation>,
    pub stale: BTreeSet<String>,
    pub unresolved_conflict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledClaim {
    pub kind: ClaimKind,
    pub valid: bool,
    pub claim: Claim,
    pub expected: ExpectedFindings,
}

/// A format-valid citation derived from `base` that names no case in the
/// graph.
pub fn fabricate_citation(graph: &LegalGraph, base: &Citation, rng: &mut impl Rng) -> Citation {
    let year: i32 = base
        .as_str()
        .get(1..5)
        .and_then(|y| y.parse().ok())
        .unwrap_or(2000);
    loop {
        let c = citation(year, rng.gen_range(1..=99), rng.gen_range(1000..=9999));
        if graph.lookup(NodeLabel::Case, c.as_str()).is_none() {
            return c;
        }
    }
}

/// Findings implied by the truth for an arbitrary claim.
pub fn expected_findings(truth: &GroundTruth, claim: &Claim) -> ExpectedFindings {
    let missing: BTreeSet<Citation> = claim
        .cited_cases
        .iter()
        .filter(|c| !truth.cases.contains(*c))
        .cloned()
        .collect();
    let overruled: BTreeSet<Citation> = claim
        .cited_cases
        .iter()
        .filter(|c| truth.overruled_cases.contains(*c))
        .cloned()
        .collect();
    let stale: BTreeSet<String> = claim
        .cited_sections
        .iter()
        .filter(|s| truth.repealed_sections.contains(*s))
        .cloned()
        .collect();
    let unknown_section = claim.cited_sections.iter().any(|s| !truth.sections.contains(s));
    let cites = &claim.cited_cases;
    let unresolved_conflict = cites
        .iter()
        .enumerate()
        .any(|(i, a)| cites[i + 1..].iter().any(|b| truth.unresolved_between(a, b)));
    let status = if cites.is_empty() || !missing.is_empty() || !overruled.is_empty() || unknown_section {
        VerificationStatus::Invalid
    } else if !stale.is_empty() {
        VerificationStatus::Stale
    } else if unresolved_conflict {
        VerificationStatus::Conflict
    } else {
        VerificationStatus::Valid
    };
    ExpectedFindings {
        status,
        missing,
        overruled,
        stale,
        unresolved_conflict,
    }
}

fn labeled(kind: ClaimKind, claim: Claim, truth: &GroundTruth) -> LabeledClaim {
    let expected = expected_findings(truth, &claim);
    LabeledClaim {
        kind,
        valid: expected.status.is_grounded(),
        claim,
        expected,
    }
}

/// Samples `n_valid` claims the verifier must accept and `n_invalid` it must
/// reject. Valid claims mix single grounded citations with conflicting and
/// resolved pairs; invalid ones rotate through fabricated, overruled and
/// repealed-section faults as the corpus allows.
pub fn sample_claims(
    graph: &LegalGraph,
    truth: &GroundTruth,
    n_valid: usize,
    n_invalid: usize,
    seed: u64,
) -> Result<Vec<LabeledClaim>, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let good: Vec<&Citation> = truth.cases.difference(&truth.overruled_cases).collect();
    let fresh: Vec<&String> = truth.sections.difference(&truth.repealed_sections).collect();
    if n_valid > 0 && good.is_empty() {
        return Err(SynthError::Unavailable("every case is overruled".into()));
    }
    if n_invalid > 0 && truth.cases.is_empty() {
        return Err(SynthError::Unavailable("corpus has no cases".into()));
    }
    let pair_ok = |p: &&PlantedConflict| {
        !truth.overruled_cases.contains(&p.case_a) && !truth.overruled_cases.contains(&p.case_b)
    };
    let unresolved: Vec<&PlantedConflict> = truth.conflict_pairs.iter().filter(|p| !p.resolved).filter(pair_ok).collect();
    let resolved: Vec<&PlantedConflict> = truth.conflict_pairs.iter().filter(|p| p.resolved).filter(pair_ok).collect();

    let mut out = Vec::with_capacity(n_valid + n_invalid);
    for i in 0..n_valid {
        let claim = match i % 4 {
            1 if !unresolved.is_empty() => {
                let p = unresolved[rng.gen_range(0..unresolved.len())];
                (ClaimKind::ConflictingPair, Claim::citing([p.case_a.clone(), p.case_b.clone()]))
            }
            2 if !resolved.is_empty() => {
                let p = resolved[rng.gen_range(0..resolved.len())];
                (ClaimKind::ResolvedPair, Claim::citing([p.case_a.clone(), p.case_b.clone()]))
            }
            _ => {
                let c = good[rng.gen_range(0..good.len())].clone();
                let mut claim = Claim::citing([c]);
                if !fresh.is_empty() && rng.gen_bool(0.5) {
                    claim = claim.with_sections([fresh[rng.gen_range(0..fresh.len())].clone()]);
                }
                (ClaimKind::Grounded, claim)
            }
        };
        out.push(labeled(claim.0, claim.1, truth));
    }

    let all: Vec<&Citation> = truth.cases.iter().collect();
    let overruled: Vec<&Citation> = truth.overruled_cases.iter().collect();
    let repealed: Vec<&String> = truth.repealed_sections.iter().collect();
    for i in 0..n_invalid {
        let (kind, claim) = match i % 3 {
            1 if !overruled.is_empty() => (
                ClaimKind::Overruled,
                Claim::citing([overruled[rng.gen_range(0..overruled.len())].clone()]),
            ),
            2 if !repealed.is_empty() && !good.is_empty() => {
                let c = good[rng.gen_range(0..good.len())].clone();
                let s = repealed[rng.gen_range(0..repealed.len())].clone();
                (ClaimKind::RepealedSection, Claim::citing([c]).with_sections([s]))
            }
            _ => {
                let base = all[rng.gen_range(0..all.len())];
                let fake = fabricate_citation(graph, base, &mut rng);
                let mut cites = vec![fake];
                if !good.is_empty() && rng.gen_bool(0.5) {
                    cites.insert(0, good[rng.gen_range(0..good.len())].clone());
                }
                (ClaimKind::Fabricated, Claim::citing(cites))
            }
        };
        out.push(labeled(kind, claim, truth));
    }
    Ok(out)
}
