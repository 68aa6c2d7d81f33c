//! `invinf cite`: per-document citation decomposition, optionally merged
//! with a scores table so the citation regressions can run directly.

use crate::commands::{ingest_reporting, thread_pool};
use crate::error::CliError;
use crate::manifest::RunManifest;
use clap::Args;
use invinf::citation::{decompose, CitationProfile};
use rayon::prelude::*;
use std::collections::HashMap;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct CiteArgs {
    /// Corpus file with cited_by records
    #[arg(long)]
    pub input: PathBuf,
    /// Output profiles CSV
    #[arg(long)]
    pub output: PathBuf,
    /// Scores CSV from `analyze`; merged by document id
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

const MERGE_COLUMNS: &[&str] = &[
    "involved_rate",
    "informational_rate",
    "ratio",
    "female",
    "lawyer_female",
    "field",
    "year",
    "kind",
];

fn load_scores(path: &PathBuf) -> Result<HashMap<String, Vec<String>>, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr.headers()?.clone();
    let idx_of = |name: &str| headers.iter().position(|h| h == name);
    let id_idx = idx_of("id").ok_or_else(|| CliError::spec("scores file has no 'id' column"))?;
    let merge_idx: Vec<Option<usize>> = MERGE_COLUMNS.iter().map(|c| idx_of(c)).collect();
    let mut map = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        let id = record.get(id_idx).unwrap_or("").to_string();
        let values = merge_idx
            .iter()
            .map(|idx| {
                idx.and_then(|i| record.get(i))
                    .unwrap_or("")
                    .to_string()
            })
            .collect();
        map.insert(id, values);
    }
    Ok(map)
}

pub fn run(args: &CiteArgs) -> Result<(), CliError> {
    let pool = thread_pool(args.threads)?;
    let ingested = ingest_reporting(&args.input)?;
    let profiles: Vec<CitationProfile> =
        pool.install(|| ingested.docs.par_iter().map(decompose).collect());
    let imputed = profiles.iter().filter(|p| p.imputed_zero).count();

    let file = std::fs::File::create(&args.output)?;
    let mut unmatched_ids = 0u64;
    match &args.scores {
        None => invinf::citation::write_csv(&profiles, file)?,
        Some(scores_path) => {
            let scores = load_scores(scores_path)?;
            let mut wtr = csv::Writer::from_writer(file);
            let mut header = vec![
                "doc_id",
                "total_cites",
                "rate_female_first",
                "rate_male_first",
                "rate_female_last",
                "rate_male_last",
                "imputed_zero",
            ];
            header.extend(MERGE_COLUMNS);
            wtr.write_record(&header)?;
            for p in &profiles {
                let empty = vec![String::new(); MERGE_COLUMNS.len()];
                let extra = match scores.get(&p.doc_id) {
                    Some(values) => values,
                    None => {
                        unmatched_ids += 1;
                        &empty
                    }
                };
                let mut record = vec![
                    p.doc_id.clone(),
                    p.total_cites.to_string(),
                    p.rate_female_first.to_string(),
                    p.rate_male_first.to_string(),
                    p.rate_female_last.to_string(),
                    p.rate_male_last.to_string(),
                    // numeric indicator so it can enter a regression directly
                    u8::from(p.imputed_zero).to_string(),
                ];
                record.extend(extra.iter().cloned());
                wtr.write_record(&record)?;
            }
            wtr.flush()?;
            if unmatched_ids > 0 {
                eprintln!("{unmatched_ids} document(s) had no row in the scores file");
            }
        }
    }

    let mut manifest = RunManifest::new(
        "cite",
        serde_json::json!({
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
            "scores": args.scores.as_ref().map(|p| p.display().to_string()),
            "threads": args.threads,
            "unknown_citers_in_denominator": true,
        }),
    );
    manifest.hash_input(&args.input)?;
    if let Some(scores_path) = &args.scores {
        manifest.hash_input(scores_path)?;
    }
    manifest.count("documents", profiles.len() as u64);
    manifest.count("imputed_zero", imputed as u64);
    manifest.count("ids_missing_from_scores", unmatched_ids);
    manifest.write_beside(&args.output)?;
    Ok(())
}
