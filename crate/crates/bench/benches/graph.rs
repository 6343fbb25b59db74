use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use irac_core::fixtures;
use irac_core::graph::LegalGraph;
use irac_core::ingest::{load, Citation};
use irac_core::procedural::{validate_sequence, EventSequence};
use irac_core::retrieval::{retrieve, Query};
use irac_core::synth::{generate, FaultPlan};
use irac_core::verifier::{verify, Claim};

fn ingest(c: &mut Criterion) {
    let records = fixtures::records(fixtures::CORPUS51);
    c.bench_function("ingest corpus51", |b| {
        b.iter(|| {
            let mut g = LegalGraph::new();
            load(black_box(&records), &mut g);
            g
        })
    });
}

fn verification(c: &mut Criterion) {
    let g = fixtures::corpus51_graph();
    let cites = ["(1973) 4 SCC 225", "(2017) 10 SCC 1", "(2004) 7 SCC 528", "(1999) 99 SCC 9999"];
    let claim = Claim::citing(cites.iter().map(|s| Citation::parse(s).unwrap()));
    c.bench_function("verify 4 citations", |b| b.iter(|| verify(black_box(&claim), &g)));

    let chain_graph = fixtures::graph_from(&[fixtures::DATED_BAIL_CHAIN]);
    let citation = fixtures::records(fixtures::DATED_BAIL_CHAIN)[0].citation.clone();
    let seq = EventSequence::from_case(&chain_graph, citation.as_str());
    c.bench_function("validate bail chain", |b| b.iter(|| validate_sequence(black_box(&seq), &chain_graph)));
}

fn retrieval(c: &mut Criterion) {
    let g = fixtures::corpus51_graph();
    let q = Query::from_text(fixtures::BAIL_QUERY, &g);
    c.bench_function("retrieve bail query", |b| b.iter(|| retrieve(black_box(&q), &g, 10).unwrap()));
}

fn synthetic(c: &mut Criterion) {
    let plan = FaultPlan {
        n_cites: 150,
        n_overrules: 10,
        n_conflicts: 8,
        resolved_fraction: 0.5,
        n_repealed_sections: 3,
        n_procedural_chains: 5,
        ..FaultPlan::new(3, 100)
    };
    c.bench_function("generate 100-case corpus", |b| b.iter(|| generate(black_box(&plan)).unwrap()));
}

criterion_group!(benches, ingest, verification, retrieval, synthetic);
criterion_main!(benches);
