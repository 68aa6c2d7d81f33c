//! `invinf gender`: resolve author and lawyer genders from names, with the
//! persistent cache and cross-document propagation.

use crate::commands::ingest_reporting;
use crate::error::CliError;
use crate::manifest::RunManifest;
use clap::Args;
use invinf::corpus::{export_jsonl, Document, PersonName};
use invinf::gender::{
    name_key, propagate, resolve_batch, AssignmentSource, GenderCache, GenderProvider,
    HttpProvider, LexiconProvider, NameOccurrence,
};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct GenderArgs {
    /// Corpus file to annotate
    #[arg(long)]
    pub input: PathBuf,
    /// Annotated corpus JSONL to write
    #[arg(long)]
    pub output: PathBuf,
    /// Persistent lookup cache (created if missing)
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Probability cutoff for accepting a lookup
    #[arg(long, default_value_t = 0.9)]
    pub cutoff: f64,
    /// Lookup backend: "local" (offline table) or "http"
    #[arg(long, default_value = "local")]
    pub provider: String,
    /// Endpoint for the http provider
    #[arg(long, default_value = "https://api.genderize.io")]
    pub base_url: String,
    /// Replacement table for the local provider (name<TAB>gender<TAB>prob)
    #[arg(long)]
    pub names: Option<PathBuf>,
    /// Re-query names even when cached
    #[arg(long)]
    pub refresh: bool,
    /// Concurrent provider lookups
    #[arg(long, default_value_t = 4)]
    pub concurrency: usize,
}

pub fn run(args: &GenderArgs) -> Result<(), CliError> {
    if !(args.cutoff > 0.0 && args.cutoff <= 1.0) {
        return Err(CliError::spec("cutoff must be in (0, 1]"));
    }
    let local_table;
    let http_provider;
    let provider: &dyn GenderProvider = match args.provider.as_str() {
        "local" => match &args.names {
            Some(path) => {
                local_table =
                    LexiconProvider::from_path(path).map_err(|e| CliError::io(e.to_string()))?;
                &local_table
            }
            None => LexiconProvider::builtin(),
        },
        "http" => {
            http_provider = HttpProvider::new(&args.base_url);
            &http_provider
        }
        other => return Err(CliError::spec(format!("unknown provider '{other}'"))),
    };
    let mut cache = match &args.cache {
        Some(path) => GenderCache::open(path)
            .map_err(|e| CliError::io(format!("cache {}: {e}", path.display())))?,
        None => GenderCache::in_memory(),
    };

    let ingested = ingest_reporting(&args.input)?;
    let mut docs: Vec<Document> = ingested.docs;

    // gather every name that still needs resolution
    let mut pending_names: Vec<PersonName> = Vec::new();
    for doc in &docs {
        if doc.author_gender.is_none() {
            if let Some(author) = doc.authors.first() {
                pending_names.push(author.clone());
            }
        }
        if doc.lawyer_gender.is_none() {
            if let Some(lawyer) = &doc.lawyer {
                pending_names.push(lawyer.clone());
            }
        }
    }
    let resolved = resolve_batch(
        &pending_names,
        args.cutoff,
        provider,
        &mut cache,
        args.refresh,
        args.concurrency,
    );

    // author occurrences go through propagation; lawyers are direct
    let mut occurrences: Vec<NameOccurrence> = Vec::new();
    let mut occurrence_doc: Vec<usize> = Vec::new();
    for (i, doc) in docs.iter().enumerate() {
        if doc.author_gender.is_some() {
            continue;
        }
        let Some(author) = doc.authors.first() else {
            continue;
        };
        let Some(assignment) = resolved.get(&name_key(author)) else {
            continue;
        };
        occurrences.push(NameOccurrence {
            doc_id: doc.id.clone(),
            author_id: doc.author_ids.as_ref().and_then(|ids| ids.first().cloned()),
            name: author.clone(),
            assignment: assignment.clone(),
        });
        occurrence_doc.push(i);
    }
    let propagation = propagate(&mut occurrences);
    for group in &propagation.conflicted_groups {
        eprintln!("propagation conflict in author group {group}");
    }

    let mut source_counts: BTreeMap<AssignmentSource, u64> = BTreeMap::new();
    let mut count_source = |s: AssignmentSource| *source_counts.entry(s).or_insert(0) += 1;
    for (occ, &doc_idx) in occurrences.iter().zip(&occurrence_doc) {
        docs[doc_idx].author_gender = Some(occ.assignment.gender);
        count_source(occ.assignment.source);
    }
    for doc in &mut docs {
        if doc.lawyer_gender.is_some() || doc.lawyer.is_none() {
            continue;
        }
        let lawyer = doc.lawyer.as_ref().unwrap();
        if let Some(assignment) = resolved.get(&name_key(lawyer)) {
            doc.lawyer_gender = Some(assignment.gender);
            count_source(assignment.source);
        }
    }

    let out = std::fs::File::create(&args.output)?;
    export_jsonl(&docs, std::io::BufWriter::new(out))?;

    let mut manifest = RunManifest::new(
        "gender",
        serde_json::json!({
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
            "cutoff": args.cutoff,
            "provider": args.provider,
            "refresh": args.refresh,
            "concurrency": args.concurrency,
            "grouping_key": "explicit author id, else (last name, first initial)",
        }),
    );
    manifest.hash_input(&args.input)?;
    manifest.count("documents", docs.len() as u64);
    manifest.count("propagated", propagation.promoted as u64);
    manifest.count(
        "propagation_conflicts",
        propagation.conflicted_groups.len() as u64,
    );
    for (source, count) in source_counts {
        manifest.count(&format!("source_{source}"), count);
    }
    manifest.write_beside(&args.output)?;
    Ok(())
}
