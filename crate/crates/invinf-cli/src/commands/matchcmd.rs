//! `invinf match`: build the gender-matched sample.

use crate::commands::{filter_parallel, ingest_reporting, print_funnel, thread_pool};
use crate::config::ConfigFile;
use crate::error::CliError;
use crate::manifest::RunManifest;
use clap::Args;
use invinf::corpus::{match_sample, MatchedPair};
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct MatchArgs {
    /// Corpus file with resolved author genders
    #[arg(long)]
    pub input: PathBuf,
    /// Output pairs CSV
    #[arg(long)]
    pub output: PathBuf,
    /// RNG seed for the male draw within each stratum
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub min_words: Option<usize>,
    #[arg(long)]
    pub solo_only: bool,
    #[arg(long)]
    pub require_single_lawyer: bool,
    #[arg(long)]
    pub allow_missing_language: bool,
    #[arg(long)]
    pub strict_sample: bool,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn write_pairs_csv<W: Write>(pairs: &[MatchedPair], writer: W) -> Result<(), CliError> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["female_id", "male_id", "field", "year"])?;
    for p in pairs {
        wtr.write_record([
            p.female_id.as_str(),
            p.male_id.as_str(),
            p.field.as_str(),
            &p.year.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn run(args: &MatchArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let analyze_view = crate::commands::analyze::AnalyzeArgs {
        input: args.input.clone(),
        output: args.output.clone(),
        min_words: args.min_words,
        solo_only: args.solo_only,
        require_single_lawyer: args.require_single_lawyer,
        allow_missing_language: args.allow_missing_language,
        strict_sample: args.strict_sample,
        threads: args.threads,
        config: args.config.clone(),
    };
    let policy = crate::commands::analyze::resolve_policy(&analyze_view, &cfg)?;
    let seed = cfg.resolve(args.seed, "seed", 0u64)?;
    let threads = cfg.resolve(args.threads, "threads", 0usize)?;
    let pool = thread_pool(threads)?;

    let ingested = ingest_reporting(&args.input)?;
    let filtered = filter_parallel(ingested.docs, &policy, &pool);
    print_funnel(&filtered);

    let outcome = match_sample(&filtered.kept, seed);
    if !outcome.unmatched_female.is_empty() {
        eprintln!(
            "{} female document(s) had no available male match",
            outcome.unmatched_female.len()
        );
    }
    if outcome.skipped_unknown > 0 {
        eprintln!(
            "{} document(s) skipped for unknown author gender",
            outcome.skipped_unknown
        );
    }

    let file = std::fs::File::create(&args.output)?;
    write_pairs_csv(&outcome.pairs, file)?;

    let mut manifest = RunManifest::new(
        "match",
        serde_json::json!({
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
            "policy": policy,
            "threads": threads,
        }),
    );
    manifest.seed = Some(seed);
    manifest.hash_input(&args.input)?;
    manifest.count("pairs", outcome.pairs.len() as u64);
    manifest.count("unmatched_female", outcome.unmatched_female.len() as u64);
    manifest.count("skipped_unknown_gender", outcome.skipped_unknown as u64);
    manifest.write_beside(&args.output)?;
    Ok(())
}
