use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use irac_core::fixtures;
use irac_core::graph::LegalGraph;
use irac_core::ingest::{compute_decade_histogram, load, parse_corpus, Citation, JudgmentRecord};
use irac_core::metrics::{evaluate, parse_records, render_table, EvalRecord, Truth};
use irac_core::pipeline::{
    run, verified_output, Generator, HttpGenerator, MockGenerator, PipelineConfig, PipelineError,
};
use irac_core::retrieval::{retrieve, Query, DEFAULT_LIMIT};
use irac_core::snapshot;
use irac_core::synth::{generate, sample_claims, FaultPlan};
use irac_core::verifier::{verify, Claim, ProceduralClaim, VerificationStatus};
use serde::Serialize;

mod exit {
    pub const USAGE: u8 = 1;
    pub const INPUT: u8 = 2;
    pub const INVALID: u8 = 3;
    pub const UNREACHABLE: u8 = 4;
}

#[derive(Parser)]
#[command(name = "irac", version, about = "Legal knowledge graph with citation-path verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a corpus file and print the load report.
    Ingest {
        corpus: PathBuf,
        /// Write the resulting graph snapshot here.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Node and edge counts plus the decade histogram.
    Stats(GraphArgs),
    /// Candidate cases for a query, ranked.
    Retrieve {
        text: String,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        #[arg(long)]
        matter_type: Option<String>,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Verify a claim's citations against the graph. Exits 3 when INVALID.
    Verify {
        /// Comma-separated citations.
        #[arg(long, value_delimiter = ',')]
        citations: Vec<String>,
        /// One citation; repeatable, for citations that contain commas.
        #[arg(long = "citation")]
        citation: Vec<String>,
        /// Comma-separated section keys, e.g. "Code of Criminal Procedure, 1973/439" via --section.
        #[arg(long, value_delimiter = ',')]
        sections: Vec<String>,
        #[arg(long = "section")]
        section: Vec<String>,
        #[arg(long)]
        rule: Option<String>,
        /// Procedural transition claimed as CURRENT:NEXT.
        #[arg(long)]
        transition: Option<String>,
        #[arg(long, default_value = "")]
        answer: String,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Run the retrieve, generate, verify loop for one query.
    Query {
        text: String,
        #[arg(long, env = "IRAC_GENERATOR_URL", conflicts_with = "mock")]
        generator_url: Option<String>,
        /// Scripted generator (JSON mock script) instead of a remote one.
        #[arg(long)]
        mock: Option<PathBuf>,
        #[arg(long, default_value_t = 300)]
        timeout: u64,
        #[arg(long, default_value_t = 2)]
        max_revisions: usize,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Compute metrics over evaluation records (JSON lines).
    Eval {
        records: PathBuf,
        /// Also print a fixed-width table on stderr.
        #[arg(long)]
        table: bool,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Generate a synthetic corpus with planted faults.
    Synth {
        plan: PathBuf,
        /// Write corpus.json, truth.json, claims.json and records.jsonl here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        valid_claims: usize,
        #[arg(long, default_value_t = 2)]
        invalid_claims: usize,
    },
    /// Save or inspect graph snapshots.
    #[command(subcommand)]
    Snapshot(SnapshotCommand),
}

#[derive(Subcommand)]
enum SnapshotCommand {
    /// Build a graph from corpora and write its snapshot.
    Save {
        out: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Read a snapshot and print its stats.
    Load { path: PathBuf },
}

#[derive(Args, Clone, Default)]
struct GraphArgs {
    /// Read the graph from a snapshot file.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Ingest a corpus file (repeatable); merged after any snapshot.
    #[arg(long)]
    corpus: Vec<PathBuf>,
    /// Include the bundled four-case sample corpus.
    #[arg(long)]
    sample: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type CliResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(exit::INPUT, format!("{}: {e}", path.display())))
}

fn read_corpus(path: &Path) -> Result<Vec<JudgmentRecord>, Failure> {
    let parsed = parse_corpus(&read(path)?)
        .map_err(|e| Failure::new(exit::INPUT, format!("{}: {e}", path.display())))?;
    let mut out = Vec::with_capacity(parsed.len());
    for p in parsed {
        for w in &p.warnings {
            eprintln!("{}: {}: {w}", path.display(), p.record.citation);
        }
        out.push(p.record);
    }
    Ok(out)
}

fn build_graph(args: &GraphArgs) -> Result<LegalGraph, Failure> {
    if args.snapshot.is_none() && args.corpus.is_empty() && !args.sample {
        return Err(Failure::new(exit::USAGE, "no graph given: pass --snapshot, --corpus or --sample"));
    }
    let mut g = match &args.snapshot {
        Some(p) => snapshot::load(p).map_err(|e| Failure::new(exit::INPUT, format!("{}: {e}", p.display())))?,
        None => LegalGraph::new(),
    };
    if args.sample {
        load(&fixtures::records(fixtures::SAMPLE_CORPUS), &mut g);
    }
    for path in &args.corpus {
        let report = load(&read_corpus(path)?, &mut g);
        for w in &report.warnings {
            eprintln!("{}: {w}", path.display());
        }
    }
    Ok(g)
}

fn emit(value: &impl Serialize) {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    // a closed pipe (e.g. `| head`) is not an error for the caller
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn parse_citations(raw: impl IntoIterator<Item = String>) -> Result<Vec<Citation>, Failure> {
    raw.into_iter()
        .filter(|c| !c.trim().is_empty())
        .map(|c| Citation::parse(&c).map_err(|e| Failure::new(exit::INPUT, format!("citation {c:?}: {e}"))))
        .collect()
}

#[derive(Serialize)]
struct StatsOut {
    #[serde(flatten)]
    stats: irac_core::graph::GraphStats,
    decade_histogram: std::collections::BTreeMap<String, usize>,
}

fn stats_of(g: &LegalGraph) -> StatsOut {
    StatsOut {
        stats: g.stats(),
        decade_histogram: compute_decade_histogram(g),
    }
}

fn cmd_ingest(corpus: &Path, out: Option<&Path>) -> CliResult {
    let records = read_corpus(corpus)?;
    let mut g = LegalGraph::new();
    let report = load(&records, &mut g);
    if let Some(out) = out {
        snapshot::save(&g, out).map_err(|e| Failure::new(exit::INPUT, format!("{}: {e}", out.display())))?;
    }
    emit(&report);
    Ok(0)
}

fn cmd_verify(
    citations: Vec<String>,
    sections: Vec<String>,
    rule: Option<String>,
    transition: Option<String>,
    answer: String,
    g: &LegalGraph,
) -> CliResult {
    let procedural_claim = match transition {
        Some(t) => {
            let (current, next) = t
                .split_once(':')
                .ok_or_else(|| Failure::new(exit::USAGE, "--transition expects CURRENT:NEXT"))?;
            Some(ProceduralClaim {
                current: current.trim().to_owned(),
                next: next.trim().to_owned(),
            })
        }
        None => None,
    };
    let claim = Claim {
        answer_text: answer,
        cited_cases: parse_citations(citations)?,
        cited_sections: sections.into_iter().filter(|s| !s.trim().is_empty()).collect(),
        claimed_rule: rule,
        procedural_claim,
    };
    let report = verify(&claim, g);
    emit(&report);
    Ok(if report.status == VerificationStatus::Invalid { exit::INVALID } else { 0 })
}

fn cmd_query(
    text: &str,
    generator: &dyn Generator,
    config: &PipelineConfig,
    g: &LegalGraph,
) -> CliResult {
    let started = Instant::now();
    let outcome = run(text, g, generator, config);
    eprintln!("query finished in {:.2?}", started.elapsed());
    match outcome {
        Ok(run) => {
            for d in &run.diagnostics {
                eprintln!("{d}");
            }
            emit(&run.output);
            Ok(0)
        }
        Err(PipelineError::GeneratorUnreachable(msg)) => {
            Err(Failure::new(exit::UNREACHABLE, format!("generator unreachable: {msg}")))
        }
        Err(e @ PipelineError::Retrieval(_)) => Err(Failure::new(exit::INPUT, e.to_string())),
    }
}

#[derive(Serialize)]
struct SynthSummary {
    seed: u64,
    cases: usize,
    overruled_cases: usize,
    conflict_pairs: usize,
    repealed_sections: usize,
    procedural_sequences: usize,
    claims: usize,
    invalid_claims: usize,
    files: Vec<String>,
}

fn cmd_synth(plan_path: &Path, out_dir: Option<&Path>, n_valid: usize, n_invalid: usize) -> CliResult {
    let plan: FaultPlan = serde_json::from_str(&read(plan_path)?)
        .map_err(|e| Failure::new(exit::INPUT, format!("{}: {e}", plan_path.display())))?;
    let corpus = generate(&plan).map_err(|e| Failure::new(exit::INPUT, e.to_string()))?;
    let g = corpus.graph();
    let claims = sample_claims(&g, &corpus.truth, n_valid, n_invalid, plan.seed)
        .map_err(|e| Failure::new(exit::INPUT, e.to_string()))?;
    let records: Vec<EvalRecord> = claims
        .iter()
        .map(|l| EvalRecord {
            query: format!("synthetic {:?} claim", l.kind).to_lowercase(),
            output: Some(verified_output(&l.claim, verify(&l.claim, &g), None, 1)),
            truth: Truth {
                expected_grounded: l.claim.cited_cases.iter().filter(|c| corpus.truth.cases.contains(*c)).cloned().collect(),
                conflict_expected: l.expected.unresolved_conflict,
                procedural_sequence: None,
                repealed_sections: l.expected.stale.clone(),
            },
        })
        .collect();
    let Some(dir) = out_dir else {
        emit(&serde_json::json!({
            "records": corpus.records,
            "truth": corpus.truth,
            "claims": claims,
        }));
        return Ok(0);
    };
    std::fs::create_dir_all(dir).map_err(|e| Failure::new(exit::INPUT, format!("{}: {e}", dir.display())))?;
    let jsonl: String = records
        .iter()
        .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
        .collect();
    let files = [
        ("corpus.json", corpus.records_json() + "\n"),
        ("truth.json", corpus.truth_json() + "\n"),
        ("claims.json", serde_json::to_string_pretty(&claims).expect("claims serialize") + "\n"),
        ("records.jsonl", jsonl),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Failure::new(exit::INPUT, format!("{}: {e}", p.display())))?;
        written.push(p.display().to_string());
    }
    emit(&SynthSummary {
        seed: plan.seed,
        cases: corpus.truth.cases.len(),
        overruled_cases: corpus.truth.overruled_cases.len(),
        conflict_pairs: corpus.truth.conflict_pairs.len(),
        repealed_sections: corpus.truth.repealed_sections.len(),
        procedural_sequences: corpus.truth.procedural_sequences.len(),
        claims: claims.len(),
        invalid_claims: claims.iter().filter(|c| !c.valid).count(),
        files: written,
    });
    Ok(0)
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Ingest { corpus, snapshot } => cmd_ingest(&corpus, snapshot.as_deref()),
        Command::Stats(graph) => {
            emit(&stats_of(&build_graph(&graph)?));
            Ok(0)
        }
        Command::Retrieve {
            text,
            limit,
            matter_type,
            graph,
        } => {
            let g = build_graph(&graph)?;
            let mut query = Query::from_text(&text, &g);
            if matter_type.is_some() {
                query.matter_type = matter_type;
            }
            let res = retrieve(&query, &g, limit).map_err(|e| Failure::new(exit::INPUT, e.to_string()))?;
            emit(&res);
            Ok(0)
        }
        Command::Verify {
            mut citations,
            citation,
            mut sections,
            section,
            rule,
            transition,
            answer,
            graph,
        } => {
            let g = build_graph(&graph)?;
            citations.extend(citation);
            sections.extend(section);
            cmd_verify(citations, sections, rule, transition, answer, &g)
        }
        Command::Query {
            text,
            generator_url,
            mock,
            timeout,
            max_revisions,
            limit,
            graph,
        } => {
            let g = build_graph(&graph)?;
            let config = PipelineConfig {
                max_revisions,
                generator_timeout_seconds: timeout,
                retrieval_limit: limit,
                generator_url: generator_url.clone(),
            };
            let generator: Box<dyn Generator> = match (mock, generator_url) {
                (Some(path), _) => Box::new(
                    MockGenerator::from_json(&read(&path)?)
                        .map_err(|e| Failure::new(exit::INPUT, format!("{}: {e}", path.display())))?,
                ),
                (None, Some(url)) => Box::new(HttpGenerator::new(url, Duration::from_secs(timeout))),
                (None, None) => {
                    return Err(Failure::new(
                        exit::USAGE,
                        "no generator: pass --generator-url, set IRAC_GENERATOR_URL, or pass --mock",
                    ))
                }
            };
            cmd_query(&text, generator.as_ref(), &config, &g)
        }
        Command::Eval { records, table, graph } => {
            let g = build_graph(&graph)?;
            let recs = parse_records(&read(&records)?)
                .map_err(|e| Failure::new(exit::INPUT, format!("{}: {e}", records.display())))?;
            let report = evaluate(&recs, &g);
            if table {
                eprint!("{}", render_table(&report));
            }
            emit(&report);
            Ok(0)
        }
        Command::Synth {
            plan,
            out_dir,
            valid_claims,
            invalid_claims,
        } => cmd_synth(&plan, out_dir.as_deref(), valid_claims, invalid_claims),
        Command::Snapshot(SnapshotCommand::Save { out, graph }) => {
            let g = build_graph(&graph)?;
            snapshot::save(&g, &out).map_err(|e| Failure::new(exit::INPUT, format!("{}: {e}", out.display())))?;
            emit(&stats_of(&g));
            Ok(0)
        }
        Command::Snapshot(SnapshotCommand::Load { path }) => {
            let g = snapshot::load(&path).map_err(|e| Failure::new(exit::INPUT, format!("{}: {e}", path.display())))?;
            emit(&stats_of(&g));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
