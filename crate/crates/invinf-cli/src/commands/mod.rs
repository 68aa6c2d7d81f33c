pub mod analyze;
pub mod cite;
pub mod gen;
pub mod gender;
pub mod matchcmd;
pub mod regress;
pub mod report;

use crate::error::CliError;
use invinf::corpus::{Document, FilterOutcome, FilterPolicy, IngestOutcome};
use rayon::prelude::*;
use std::path::Path;

/// Builds a rayon pool honoring `--threads` (0 = library default).
pub fn thread_pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::spec(format!("cannot build thread pool: {e}")))
}

/// Ingests a corpus file, reporting per-record rejects to stderr without
/// stopping the run.
pub fn ingest_reporting(path: &Path) -> Result<IngestOutcome, CliError> {
    let outcome = invinf::corpus::ingest_path(path)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    for reject in &outcome.rejects {
        eprintln!("reject: line {}: {}", reject.line, reject.reason);
    }
    if !outcome.rejects.is_empty() {
        eprintln!("rejected {} record(s); run continues", outcome.rejects.len());
    }
    Ok(outcome)
}

/// Policy filter with the word counts computed in parallel; document order
/// is preserved so downstream output is deterministic.
pub fn filter_parallel(
    docs: Vec<Document>,
    policy: &FilterPolicy,
    pool: &rayon::ThreadPool,
) -> FilterOutcome {
    let checks: Vec<Option<invinf::corpus::DropReason>> = pool.install(|| {
        docs.par_iter().map(|doc| policy.evaluate(doc)).collect()
    });
    let mut out = FilterOutcome::default();
    for (doc, check) in docs.into_iter().zip(checks) {
        match check {
            None => out.kept.push(doc),
            Some(reason) => out.dropped.push((doc, reason)),
        }
    }
    out
}

pub fn print_funnel(outcome: &FilterOutcome) {
    if outcome.dropped.is_empty() {
        return;
    }
    eprintln!("filter funnel ({} dropped):", outcome.dropped.len());
    for (reason, count) in outcome.funnel() {
        eprintln!("  {reason}: {count}");
    }
}
