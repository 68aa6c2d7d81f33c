//! `invinf report`: the ratio-by-gender histogram (SVG + CSV twin), or a
//! coefficient dot plot from a `regress` JSON result.

use crate::config::ConfigFile;
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::report::{bin_ratios, bins_csv, coef_csv, coef_plot_svg, histogram_svg, CoefPoint};
use clap::Args;
use invinf::corpus::Gender;
use std::collections::HashSet;
use std::path::{Path, PathBuf};

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Scores CSV from `analyze` (histogram mode)
    #[arg(long, conflicts_with = "coefficients")]
    pub scores: Option<PathBuf>,
    /// Regression JSON from `regress` (dot-plot mode)
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
    /// Output SVG path; the CSV twin lands beside it with a .csv extension
    #[arg(long)]
    pub output: PathBuf,
    /// Ratio bin width (papers default 0.1; use a narrower width for patents)
    #[arg(long)]
    pub bin_width: Option<f64>,
    /// Optional pairs CSV; restricts the histogram to matched documents
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn load_pair_ids(path: &Path) -> Result<HashSet<String>, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr.headers()?.clone();
    let f_idx = headers.iter().position(|h| h == "female_id");
    let m_idx = headers.iter().position(|h| h == "male_id");
    let (Some(f_idx), Some(m_idx)) = (f_idx, m_idx) else {
        return Err(CliError::spec("pairs file needs female_id and male_id columns"));
    };
    let mut ids = HashSet::new();
    for record in rdr.records() {
        let record = record?;
        ids.insert(record.get(f_idx).unwrap_or("").to_string());
        ids.insert(record.get(m_idx).unwrap_or("").to_string());
    }
    Ok(ids)
}

fn load_ratios(
    path: &Path,
    keep: Option<&HashSet<String>>,
) -> Result<(Vec<(f64, Gender)>, usize), CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr.headers()?.clone();
    let idx = |name: &str| headers.iter().position(|h| h == name);
    let (Some(id_idx), Some(ratio_idx), Some(female_idx)) =
        (idx("id"), idx("ratio"), idx("female"))
    else {
        return Err(CliError::spec("scores file needs id, ratio, and female columns"));
    };
    let mut values = Vec::new();
    let mut skipped = 0usize;
    for record in rdr.records() {
        let record = record?;
        if let Some(keep) = keep {
            if !keep.contains(record.get(id_idx).unwrap_or("")) {
                continue;
            }
        }
        let gender = match record.get(female_idx).unwrap_or("") {
            "1" => Gender::Female,
            "0" => Gender::Male,
            _ => {
                skipped += 1;
                continue;
            }
        };
        match record.get(ratio_idx).unwrap_or("").parse::<f64>() {
            Ok(r) => values.push((r, gender)),
            Err(_) => skipped += 1,
        }
    }
    Ok((values, skipped))
}

fn csv_twin(output: &Path) -> PathBuf {
    output.with_extension("csv")
}

fn run_histogram(args: &ReportArgs, scores: &Path) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let bin_width = cfg.resolve(args.bin_width, "bin_width", 0.1f64)?;
    let keep = match &args.pairs {
        Some(p) => Some(load_pair_ids(p)?),
        None => None,
    };
    let (values, skipped) = load_ratios(scores, keep.as_ref())?;
    if skipped > 0 {
        eprintln!("skipped {skipped} row(s) with undefined ratio or unknown gender");
    }
    let hist = bin_ratios(&values, bin_width)?;
    let svg = histogram_svg(&hist, "Involved-Informational Ratio by author gender");
    std::fs::write(&args.output, svg)?;
    std::fs::write(csv_twin(&args.output), bins_csv(&hist))?;

    let mut manifest = RunManifest::new(
        "report",
        serde_json::json!({
            "mode": "histogram",
            "scores": scores.display().to_string(),
            "pairs": args.pairs.as_ref().map(|p| p.display().to_string()),
            "output": args.output.display().to_string(),
            "bin_width": bin_width,
        }),
    );
    manifest.hash_input(scores)?;
    if let Some(p) = &args.pairs {
        manifest.hash_input(p)?;
    }
    manifest.count("plotted", values.len() as u64);
    manifest.count("skipped", skipped as u64);
    manifest.count("bins", hist.bins.len() as u64);
    manifest.write_beside(&args.output)?;
    Ok(())
}

fn run_coefficients(args: &ReportArgs, json_path: &Path) -> Result<(), CliError> {
    let raw = std::fs::read_to_string(json_path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", json_path.display())))?;
    let parsed: serde_json::Value = serde_json::from_str(&raw)
        .map_err(|e| CliError::spec(format!("bad regression JSON: {e}")))?;
    let results = parsed["results"]
        .as_array()
        .ok_or_else(|| CliError::spec("regression JSON has no results array"))?;
    let mut points = Vec::new();
    for result in results {
        let prefix = result["by"].as_str().map(|b| format!("{b}: ")).unwrap_or_default();
        for term in result["terms"].as_array().into_iter().flatten() {
            let name = term["name"].as_str().unwrap_or("");
            if name == "Intercept" {
                continue;
            }
            let estimate = term["estimate"].as_f64().unwrap_or(f64::NAN);
            let se = term["std_error"].as_f64().unwrap_or(f64::NAN);
            points.push(CoefPoint {
                name: format!("{prefix}{name}"),
                estimate,
                lo: estimate - 1.96 * se,
                hi: estimate + 1.96 * se,
            });
        }
    }
    if points.is_empty() {
        return Err(CliError::spec("nothing to plot: no non-intercept terms"));
    }
    let svg = coef_plot_svg(&points, "Coefficient estimates (95% CI)");
    std::fs::write(&args.output, svg)?;
    std::fs::write(csv_twin(&args.output), coef_csv(&points))?;

    let mut manifest = RunManifest::new(
        "report",
        serde_json::json!({
            "mode": "coefficients",
            "coefficients": json_path.display().to_string(),
            "output": args.output.display().to_string(),
        }),
    );
    manifest.hash_input(json_path)?;
    manifest.count("terms", points.len() as u64);
    manifest.write_beside(&args.output)?;
    Ok(())
}

pub fn run(args: &ReportArgs) -> Result<(), CliError> {
    match (&args.scores, &args.coefficients) {
        (Some(scores), None) => run_histogram(args, &scores.clone()),
        (None, Some(json)) => run_coefficients(args, &json.clone()),
        _ => Err(CliError::spec(
            "report needs exactly one of --scores (histogram) or --coefficients (dot plot)",
        )),
    }
}
