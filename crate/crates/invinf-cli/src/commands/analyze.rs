//! `invinf analyze`: score every kept document.

use crate::commands::{filter_parallel, ingest_reporting, print_funnel, thread_pool};
use crate::config::ConfigFile;
use crate::error::CliError;
use crate::manifest::RunManifest;
use clap::Args;
use invinf::corpus::{Document, FilterPolicy, Gender};
use invinf::stylometry::{compute_scores, count_features, FeatureCounts, StyleScores};
use invinf::tagger::{tag_document, Lexicon};
use invinf::tokenizer::tokenize;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Corpus file (.jsonl or .csv)
    #[arg(long)]
    pub input: PathBuf,
    /// Output scores file (.csv or .jsonl)
    #[arg(long)]
    pub output: PathBuf,
    /// Keep only abstracts with more than this many words
    #[arg(long)]
    pub min_words: Option<usize>,
    /// Keep only solo-authored documents
    #[arg(long)]
    pub solo_only: bool,
    /// Patents must have a lawyer on record
    #[arg(long)]
    pub require_single_lawyer: bool,
    /// Keep documents with no declared language
    #[arg(long)]
    pub allow_missing_language: bool,
    /// Apply the published sample years (papers ≥ 1991, patents ≥ 1976)
    #[arg(long)]
    pub strict_sample: bool,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Optional key=value configuration file; flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct ScoreRow {
    pub id: String,
    pub kind: String,
    pub field: String,
    pub year: i32,
    pub female: Option<u8>,
    pub lawyer_female: Option<u8>,
    #[serde(flatten)]
    pub counts: FeatureCounts,
    pub involved_rate: f64,
    pub informational_rate: f64,
    pub ratio: Option<f64>,
    pub status: &'static str,
}

fn gender_bit(g: Option<Gender>) -> Option<u8> {
    match g {
        Some(Gender::Female) => Some(1),
        Some(Gender::Male) => Some(0),
        _ => None,
    }
}

pub fn score_document(doc: &Document) -> (FeatureCounts, StyleScores) {
    let tagged = tag_document(tokenize(&doc.text), Lexicon::builtin());
    let counts = count_features(&tagged);
    let scores = compute_scores(&counts).expect("kept documents are non-empty");
    (counts, scores)
}

fn row_for(doc: &Document) -> ScoreRow {
    let (counts, scores) = score_document(doc);
    ScoreRow {
        id: doc.id.clone(),
        kind: doc.kind.to_string(),
        field: doc.field.clone(),
        year: doc.year,
        female: gender_bit(doc.author_gender),
        lawyer_female: gender_bit(doc.lawyer_gender),
        counts,
        involved_rate: scores.involved_rate,
        informational_rate: scores.informational_rate,
        ratio: scores.ratio,
        status: "kept",
    }
}

pub const SCORE_CSV_HEADER: &[&str] = &[
    "id",
    "kind",
    "field",
    "year",
    "female",
    "lawyer_female",
    "n_pron",
    "n_and",
    "n_q",
    "n_det",
    "n_past",
    "n_num",
    "n_tokens",
    "involved_rate",
    "informational_rate",
    "ratio",
    "status",
];

pub fn write_scores_csv<W: Write>(rows: &[ScoreRow], writer: W) -> Result<(), CliError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(SCORE_CSV_HEADER)?;
    let opt = |v: Option<u8>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        wtr.write_record([
            r.id.as_str(),
            &r.kind,
            &r.field,
            &r.year.to_string(),
            &opt(r.female),
            &opt(r.lawyer_female),
            &r.counts.n_pron.to_string(),
            &r.counts.n_and.to_string(),
            &r.counts.n_q.to_string(),
            &r.counts.n_det.to_string(),
            &r.counts.n_past.to_string(),
            &r.counts.n_num.to_string(),
            &r.counts.n_tokens.to_string(),
            &r.involved_rate.to_string(),
            &r.informational_rate.to_string(),
            &r.ratio.map(|x| x.to_string()).unwrap_or_default(),
            r.status,
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn resolve_policy(args: &AnalyzeArgs, cfg: &ConfigFile) -> Result<FilterPolicy, CliError> {
    let base = if args.strict_sample {
        FilterPolicy::strict_defaults()
    } else {
        FilterPolicy::default()
    };
    Ok(FilterPolicy {
        min_words: cfg.resolve(args.min_words, "min_words", base.min_words)?,
        solo_only: cfg.resolve_flag(args.solo_only, "solo_only")? || base.solo_only,
        require_single_lawyer: cfg.resolve_flag(args.require_single_lawyer, "require_single_lawyer")?
            || base.require_single_lawyer,
        allow_missing_language: cfg
            .resolve_flag(args.allow_missing_language, "allow_missing_language")?,
        ..base
    })
}

pub fn run(args: &AnalyzeArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let policy = resolve_policy(args, &cfg)?;
    let threads = cfg.resolve(args.threads, "threads", 0usize)?;
    let pool = thread_pool(threads)?;

    let ingested = ingest_reporting(&args.input)?;
    let reject_count = ingested.rejects.len();
    let filtered = filter_parallel(ingested.docs, &policy, &pool);
    print_funnel(&filtered);

    let rows: Vec<ScoreRow> =
        pool.install(|| filtered.kept.par_iter().map(row_for).collect());
    let undefined = rows.iter().filter(|r| r.ratio.is_none()).count();
    if undefined > 0 {
        eprintln!("diagnostics: {undefined} document(s) have an undefined ratio (zero informational features)");
    }

    let jsonl = args
        .output
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("jsonl") || e.eq_ignore_ascii_case("json"));
    let file = std::fs::File::create(&args.output)?;
    if jsonl {
        let mut w = std::io::BufWriter::new(file);
        for row in &rows {
            serde_json::to_writer(&mut w, row)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
    } else {
        write_scores_csv(&rows, file)?;
    }

    let mut manifest = RunManifest::new(
        "analyze",
        serde_json::json!({
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
            "policy": policy,
            "threads": threads,
        }),
    );
    manifest.hash_input(&args.input)?;
    manifest.count("kept", rows.len() as u64);
    manifest.count("rejected_records", reject_count as u64);
    manifest.count("undefined_ratio", undefined as u64);
    for (reason, count) in filtered.funnel() {
        manifest.count(&format!("dropped_{reason}"), count as u64);
    }
    manifest.write_beside(&args.output)?;
    Ok(())
}
