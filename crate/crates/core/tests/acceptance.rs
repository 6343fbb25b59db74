//! Acceptance criteria 1-9. Runs without the libtest harness so each
//! criterion prints exactly one PASS/FAIL line.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use irac_core::fixtures::{self, CONFLICT_A, CONFLICT_B};
use irac_core::graph::{EdgeType, LegalGraph, NodeLabel};
use irac_core::ingest::{compute_decade_histogram, load, parse_corpus, JudgmentRecord};
use irac_core::metrics::{fully_valid_fraction, hallucinated_precedent_rate, path_validity_rate, EvalRecord, Truth};
use irac_core::metrics::citation_grounding_accuracy;
use irac_core::pipeline::{abstain_output, run_query, verified_output, OutputStatus, PipelineConfig, NO_VERIFIED_ANSWER};
use irac_core::procedural::{validate_sequence, EventSequence, Violation};
use irac_core::snapshot::canonical_json;
use irac_core::synth::{generate, sample_claims, FaultPlan};
use irac_core::verifier::{verify, Claim, ConfidenceLabel, ConflictType, VerificationStatus, HALLUCINATION_NOTE};

use common::{add_random_overrule, brute_status, cite, fuzz_case};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const REAL_EIGHT: [&str; 8] = [
    "(1973) 4 SCC 225",
    "(1978) 1 SCC 248",
    "(2017) 10 SCC 1",
    "(2018) 10 SCC 1",
    "(2004) 7 SCC 528",
    "(2014) 8 SCC 273",
    "(2012) 1 SCC 40",
    "(1997) 1 SCC 416",
];

fn answered(claim: &Claim, g: &LegalGraph) -> EvalRecord {
    EvalRecord {
        query: String::new(),
        output: Some(verified_output(claim, verify(claim, g), None, 1)),
        truth: Truth::default(),
    }
}

fn oracle_replication() -> Outcome {
    let start = Instant::now();
    let g = fixtures::corpus51_graph();
    let real: Vec<Claim> = REAL_EIGHT.iter().map(|c| Claim::citing([cite(c)])).collect();
    let mut false_positives = 0;
    for claim in &real {
        if verify(claim, &g).status == VerificationStatus::Invalid {
            false_positives += 1;
        }
    }
    let records: Vec<EvalRecord> = real.iter().map(|c| answered(c, &g)).collect();
    let grounding = citation_grounding_accuracy(&records, &g);
    ensure!(grounding.value == Some(1.0), "grounding accuracy {:?}", grounding.value);
    ensure!(false_positives == 0, "{false_positives} real citations rejected");
    for fake in fixtures::FABRICATED {
        let r = verify(&Claim::citing([cite(fake)]), &g);
        ensure!(r.status == VerificationStatus::Invalid, "{fake} returned {}", r.status);
        ensure!(r.note == HALLUCINATION_NOTE, "{fake} note was {:?}", r.note);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("8/8 grounded, 2/2 fabricated rejected, FPR 0.00, {elapsed:.2?}"))
}

fn worked_example() -> Outcome {
    let g = fixtures::sample_graph();
    let m = fixtures::mock(fixtures::BAIL_MOCK);
    let out = run_query(fixtures::BAIL_QUERY, &g, &m, &PipelineConfig::default()).map_err(|e| e.to_string())?;
    ensure!(out.verification == OutputStatus::Valid, "verification {}", out.verification);
    ensure!(out.confidence == 1.0, "confidence {}", out.confidence);
    let cites: Vec<&str> = out.citations.iter().map(|c| c.as_str()).collect();
    ensure!(cites == ["(2004) 7 SCC 528"], "citations {cites:?}");
    ensure!(
        out.procedural_next_step.as_deref() == Some("BAIL_APPLICATION_HIGH_COURT"),
        "next step {:?}",
        out.procedural_next_step
    );
    Ok("VALID, 1.0, [(2004) 7 SCC 528], BAIL_APPLICATION_HIGH_COURT".into())
}

fn conflict_output() -> Outcome {
    let g = fixtures::conflict_graph();
    let claim = Claim::citing([cite(CONFLICT_A), cite(CONFLICT_B)]);
    let report = verify(&claim, &g);
    ensure!(report.status == VerificationStatus::Conflict, "direct verify gave {}", report.status);
    let m = fixtures::mock(fixtures::CONFLICT_MOCK);
    let out = run_query(fixtures::CONFLICT_QUERY, &g, &m, &PipelineConfig::default()).map_err(|e| e.to_string())?;
    ensure!(out.verification == OutputStatus::Conflict, "verification {}", out.verification);
    ensure!(out.conflict, "conflict flag unset");
    ensure!(out.conflict_type == Some(ConflictType::CoordinateBench), "type {:?}", out.conflict_type);
    let json = serde_json::to_value(&out).map_err(|e| e.to_string())?;
    ensure!(json["conflict_type"] == "coordinate_bench", "serialized type {}", json["conflict_type"]);
    ensure!(json["confidence_label"] == "low", "serialized label {}", json["confidence_label"]);
    ensure!(out.confidence_label == Some(ConfidenceLabel::Low), "label {:?}", out.confidence_label);
    let resolution = out.resolution.unwrap_or_default();
    ensure!(resolution.contains("unresolved"), "resolution {resolution:?}");
    Ok("CONFLICT, coordinate_bench, unresolved, low".into())
}

fn abstention_bound() -> Outcome {
    let g = fixtures::corpus51_graph();
    for max_revisions in 0..=3 {
        let m = fixtures::mock(fixtures::FABRICATING_MOCK);
        let cfg = PipelineConfig {
            max_revisions,
            ..PipelineConfig::default()
        };
        let out = run_query(fixtures::SERVICE_QUERY, &g, &m, &cfg).map_err(|e| e.to_string())?;
        ensure!(out.verification == OutputStatus::Abstained, "max_revisions {max_revisions}: {}", out.verification);
        ensure!(m.calls() == 1 + max_revisions, "max_revisions {max_revisions}: {} calls", m.calls());
        ensure!(out.attempts == 1 + max_revisions, "attempts {}", out.attempts);
        ensure!(out.confidence == 0.50, "confidence {}", out.confidence);
        ensure!(out.answer.starts_with(NO_VERIFIED_ANSWER), "answer {:?}", out.answer);
    }
    Ok("ABSTAINED after 1 + max_revisions calls for max_revisions 0..=3, confidence 0.50".into())
}

fn formula_conformance() -> Outcome {
    let start = Instant::now();
    let mut corpora = 0;
    for seed in 0..24u64 {
        let plan = FaultPlan {
            n_cites: 40,
            n_overrules: 3 + (seed as usize % 3),
            n_conflicts: 4,
            resolved_fraction: 0.5,
            n_repealed_sections: 2,
            n_procedural_chains: 2,
            chain_length: 4,
            ..FaultPlan::new(seed, 25 + (seed as usize % 4) * 5)
        };
        let corpus = generate(&plan).map_err(|e| e.to_string())?;
        let g = corpus.graph();
        ensure!(g.node_count() <= 200, "seed {seed}: {} nodes", g.node_count());
        let labeled = sample_claims(&g, &corpus.truth, 12, 9, seed).map_err(|e| e.to_string())?;
        let claims: Vec<Claim> = labeled.iter().map(|l| l.claim.clone()).collect();

        let brute_bad = claims.iter().filter(|c| !brute_status(c, &g).is_grounded()).count();
        let truth_bad = labeled.iter().filter(|l| !l.valid).count();
        ensure!(brute_bad == truth_bad, "seed {seed}: graph scan {brute_bad} vs planted {truth_bad}");
        let h = hallucinated_precedent_rate(&claims, &g);
        ensure!(
            (h.numerator, h.denominator) == (brute_bad, claims.len()),
            "seed {seed}: H {}/{} vs {brute_bad}/{}",
            h.numerator,
            h.denominator,
            claims.len()
        );
        let v = fully_valid_fraction(&claims, &g);
        ensure!(h.numerator + v.numerator == v.denominator, "seed {seed}: H + valid != 1");
        ensure!(h.value.unwrap() + v.value.unwrap() == 1.0, "seed {seed}: H + valid fraction float sum");

        let mut records: Vec<EvalRecord> = claims.iter().map(|c| answered(c, &g)).collect();
        for _ in 0..2 {
            records.push(EvalRecord {
                query: String::new(),
                output: Some(abstain_output("", 3)),
                truth: Truth::default(),
            });
        }
        let pvr = path_validity_rate(&records);
        let brute_ok = claims.iter().filter(|c| brute_status(c, &g).is_grounded()).count();
        ensure!(
            (pvr.numerator, pvr.denominator) == (brute_ok, claims.len()),
            "seed {seed}: PVR {}/{} vs {brute_ok}/{}",
            pvr.numerator,
            pvr.denominator,
            claims.len()
        );
        corpora += 1;
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!("{corpora} corpora, H and PVR match brute force, {elapsed:.2?}"))
}

fn veto_soundness() -> Outcome {
    let mut flips = 0;
    let mut valid = 0;
    for seed in 0..10_000u64 {
        let (mut g, claim) = fuzz_case(seed);
        let before = verify(&claim, &g);
        if before.status == VerificationStatus::Valid {
            valid += 1;
            for c in &claim.cited_cases {
                ensure!(g.get_node(NodeLabel::Case, c.as_str()).is_some(), "seed {seed}: VALID with absent {c}");
                ensure!(!common::is_overruled(&g, c), "seed {seed}: VALID with overruled {c}");
            }
        }
        ensure!(
            before.status == brute_status(&claim, &g),
            "seed {seed}: verify {} vs brute force {}",
            before.status,
            brute_status(&claim, &g)
        );
        add_random_overrule(&mut g, seed);
        let after = verify(&claim, &g);
        if before.status != VerificationStatus::Valid && after.status == VerificationStatus::Valid {
            flips += 1;
        }
    }
    ensure!(flips == 0, "{flips} non-VALID claims became VALID after an added overruling");
    Ok(format!("10000 fuzzed cases ({valid} VALID before mutation), 0 violations"))
}

fn idempotency() -> Outcome {
    let synth = generate(&FaultPlan {
        n_cites: 30,
        n_overrules: 3,
        n_conflicts: 3,
        resolved_fraction: 0.5,
        n_repealed_sections: 2,
        n_procedural_chains: 2,
        ..FaultPlan::new(11, 30)
    })
    .map_err(|e| e.to_string())?;
    let corpora: Vec<(&str, Vec<JudgmentRecord>)> = vec![
        ("sample", fixtures::records(fixtures::SAMPLE_CORPUS)),
        ("corpus51", fixtures::records(fixtures::CORPUS51)),
        ("conflict", fixtures::records(fixtures::CONFLICT_PAIR)),
        ("bail chain", fixtures::records(fixtures::DATED_BAIL_CHAIN)),
        ("synthetic", synth.records),
    ];
    for (name, records) in &corpora {
        let mut g = LegalGraph::new();
        load(records, &mut g);
        let once = (g.node_count(), g.edge_count(), canonical_json(&g));
        let report = load(records, &mut g);
        let twice = (g.node_count(), g.edge_count(), canonical_json(&g));
        ensure!(once.0 == twice.0 && once.1 == twice.1, "{name}: counts changed");
        ensure!(once.2 == twice.2, "{name}: snapshot changed");
        ensure!(report.nodes_created == 0 && report.edges_created == 0, "{name}: second load created items");
    }
    Ok(format!("{} corpora unchanged by a second ingestion", corpora.len()))
}

const PUBLISHED_DECADES: [(&str, usize); 9] = [
    ("1940s", 1),
    ("1950s", 3),
    ("1960s", 5),
    ("1970s", 17),
    ("1980s", 29),
    ("1990s", 35),
    ("2000s", 39),
    ("2010s", 108),
    ("2020s", 151),
];

fn dataset_records(path: &Path) -> Result<Vec<JudgmentRecord>, String> {
    let mut files = Vec::new();
    if path.is_dir() {
        for entry in std::fs::read_dir(path).map_err(|e| e.to_string())? {
            let p = entry.map_err(|e| e.to_string())?.path();
            if matches!(p.extension().and_then(|e| e.to_str()), Some("json" | "jsonl")) {
                files.push(p);
            }
        }
        files.sort();
    } else {
        files.push(path.to_path_buf());
    }
    let mut out = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f).map_err(|e| format!("{}: {e}", f.display()))?;
        let parsed = parse_corpus(&text).map_err(|e| format!("{}: {e}", f.display()))?;
        out.extend(parsed.into_iter().map(|p| p.record));
    }
    Ok(out)
}

fn decade_histogram() -> Outcome {
    let hist = compute_decade_histogram(&fixtures::sample_graph());
    let expected: BTreeMap<String, usize> = [("1970s", 1), ("2000s", 1), ("2010s", 2)]
        .into_iter()
        .map(|(k, v)| (k.to_owned(), v))
        .collect();
    ensure!(hist == expected, "sample histogram {hist:?}");
    let Some(path) = std::env::var_os("IRAC_INIRAC_PATH") else {
        return Ok("sample {1970s:1, 2000s:1, 2010s:2}; dataset run skipped (IRAC_INIRAC_PATH unset)".into());
    };
    let mut g = LegalGraph::new();
    load(&dataset_records(Path::new(&path))?, &mut g);
    let got = compute_decade_histogram(&g);
    let want: BTreeMap<String, usize> = PUBLISHED_DECADES.iter().map(|(k, v)| ((*k).to_owned(), *v)).collect();
    ensure!(got == want, "dataset histogram {got:?}");
    Ok(format!("sample matches; dataset matches, total {}", got.values().sum::<usize>()))
}

fn temporal_validity() -> Outcome {
    let g = fixtures::graph_from(&[fixtures::DATED_BAIL_CHAIN]);
    let citation = fixtures::records(fixtures::DATED_BAIL_CHAIN)[0].citation.clone();
    let chain = EventSequence::from_case(&g, citation.as_str());
    ensure!(chain.events().len() == 4, "chain has {} events", chain.events().len());
    ensure!(g.edges_of_type(EdgeType::Precedes).count() == 3, "missing PRECEDES edges");
    let check = validate_sequence(&chain, &g);
    ensure!(check.valid, "bail chain rejected: {:?}", check.violations);

    let mut inverted = chain.clone();
    inverted.0[1].date = Some("2022-12-01".parse().unwrap());
    let check = validate_sequence(&inverted, &g);
    ensure!(!check.valid, "date-inverted chain accepted");
    ensure!(
        check.violations.iter().any(|v| matches!(v, Violation::DateInversion { .. })),
        "no date inversion reported: {:?}",
        check.violations
    );

    let mut shifted = chain.clone();
    shifted.0[3].date = Some("2023-02-26".parse().unwrap());
    let check = validate_sequence(&shifted, &g);
    ensure!(!check.valid, "gap-mismatched chain accepted");
    ensure!(
        check.violations.iter().any(|v| matches!(v, Violation::GapMismatch { .. })),
        "no gap mismatch reported: {:?}",
        check.violations
    );
    Ok("chain accepted; date-inverted and gap-mismatched variants rejected".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("verifier oracle replication", oracle_replication),
        ("worked bail example", worked_example),
        ("conflict output", conflict_output),
        ("abstention bound", abstention_bound),
        ("formula conformance", formula_conformance),
        ("veto soundness", veto_soundness),
        ("ingestion idempotency", idempotency),
        ("decade histogram", decade_histogram),
        ("temporal validity", temporal_validity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
