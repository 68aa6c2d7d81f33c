//! `invinf gen`: emit a synthetic corpus plus its truth sidecar.

use crate::config::ConfigFile;
use crate::error::CliError;
use crate::manifest::RunManifest;
use clap::Args;
use invinf::synth::{export_truth_jsonl, generate, ClassRates, GeneratorConfig};
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Corpus JSONL to write
    #[arg(long)]
    pub output: PathBuf,
    /// Truth sidecar JSONL to write
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub n_docs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Generate with no gender effect (null calibration runs)
    #[arg(long)]
    pub null_effect: bool,
    /// Probability a citer shares the cited author's gender
    #[arg(long)]
    pub homophily: Option<f64>,
    /// Poisson mean of per-document citation counts
    #[arg(long)]
    pub mean_citations: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: &GenArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let n_docs = cfg.resolve(args.n_docs, "n_docs", 1000usize)?;
    let seed = cfg.resolve(args.seed, "seed", 0u64)?;
    let mut config = GeneratorConfig::default_with(n_docs, seed);
    config.homophily = cfg.resolve(args.homophily, "homophily", config.homophily)?;
    config.mean_citations =
        cfg.resolve(args.mean_citations, "mean_citations", config.mean_citations)?;
    if cfg.resolve_flag(args.null_effect, "null_effect")? {
        config.female_shift = ClassRates::ZERO;
        config.effect_beta = 0.0;
    }

    let corpus = generate(&config).map_err(|e| CliError::spec(e.to_string()))?;
    let out = std::fs::File::create(&args.output)?;
    invinf::corpus::export_jsonl(&corpus.docs, std::io::BufWriter::new(out))?;
    let truth_file = std::fs::File::create(&args.truth)?;
    export_truth_jsonl(&corpus.truth, std::io::BufWriter::new(truth_file))?;

    let mut manifest = RunManifest::new(
        "gen",
        serde_json::to_value(&config).map_err(CliError::from)?,
    );
    manifest.seed = Some(seed);
    manifest.count("documents", corpus.docs.len() as u64);
    manifest.count("redraws", corpus.redraws as u64);
    manifest.write_beside(&args.output)?;
    manifest.write_beside(&args.truth)?;
    Ok(())
}
