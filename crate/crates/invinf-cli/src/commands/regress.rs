//! `invinf regress`: fixed-effects OLS over a scores table, with optional
//! per-field replication and predicted margins.

use crate::config::ConfigFile;
use crate::error::CliError;
use crate::formula::parse_spec;
use crate::manifest::RunManifest;
use clap::Args;
use invinf::stats::{
    fit_ols, margins, significance_stars, Column, DataTable, Legend, Margins, ModelSpec,
    RegressionResult,
};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct RegressArgs {
    /// Input table (CSV with a header row)
    #[arg(long)]
    pub input: PathBuf,
    /// Model, e.g. "ratio ~ female + fe(field) + fe(year)"
    #[arg(long)]
    pub spec: String,
    /// Coefficient table CSV
    #[arg(long)]
    pub output: PathBuf,
    /// Machine-readable result (defaults to the output path with .json)
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Significance legend: t4 (*/**/*** at .05/.01/.001) or t6 (.1/.05/.01)
    #[arg(long)]
    pub legend: Option<String>,
    /// Classical standard errors instead of HC1
    #[arg(long)]
    pub classical: bool,
    /// Fit the model separately per level of this column
    #[arg(long)]
    pub by: Option<String>,
    /// Report predicted margins for this binary predictor
    #[arg(long)]
    pub margins: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Serialize)]
struct TermOut {
    name: String,
    estimate: f64,
    std_error: f64,
    p_value: f64,
    stars: String,
}

#[derive(Serialize)]
struct FitOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    by: Option<String>,
    n: usize,
    r_squared: f64,
    robust: bool,
    terms: Vec<TermOut>,
    vifs: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    margins: Option<MarginsOut>,
}

#[derive(Serialize)]
struct MarginsOut {
    focal: String,
    pred_0: f64,
    pred_1: f64,
    pct_diff: Option<f64>,
}

#[derive(Serialize)]
struct JsonOut {
    spec: String,
    legend: Legend,
    results: Vec<FitOut>,
}

/// Drops rows with missing values in any used column; returns the count.
fn drop_missing(table: &mut DataTable, spec: &ModelSpec, by: Option<&str>) -> Result<usize, CliError> {
    let mut used: Vec<&str> = vec![spec.outcome.as_str()];
    used.extend(spec.predictors.iter().map(|s| s.as_str()));
    used.extend(spec.fixed_effects.iter().map(|s| s.as_str()));
    if let Some(b) = by {
        used.push(b);
    }
    let n = table.nrows();
    let mut mask = vec![true; n];
    for name in used {
        let col = table
            .column(name)
            .ok_or_else(|| CliError::spec(format!("column '{name}' not found in table")))?;
        match col {
            Column::Numeric(v) => {
                for (i, x) in v.iter().enumerate() {
                    if x.is_nan() {
                        mask[i] = false;
                    }
                }
            }
            Column::Categorical(v) => {
                for (i, s) in v.iter().enumerate() {
                    if s.is_empty() {
                        mask[i] = false;
                    }
                }
            }
        }
    }
    Ok(table.retain_rows(&mask))
}

fn level_values(table: &DataTable, by: &str) -> Result<Vec<String>, CliError> {
    let col = table
        .column(by)
        .ok_or_else(|| CliError::spec(format!("--by column '{by}' not found")))?;
    let labels: Vec<String> = match col {
        Column::Categorical(v) => v.clone(),
        Column::Numeric(v) => v.iter().map(|x| x.to_string()).collect(),
    };
    Ok(labels)
}

fn fit_one(
    table: &DataTable,
    spec: &ModelSpec,
    legend: Legend,
    focal: Option<&str>,
    by: Option<String>,
) -> Result<FitOut, CliError> {
    let result: RegressionResult = fit_ols(table, spec)?;
    let margins_out = match focal {
        Some(f) => {
            let m: Margins = margins(&result, table, f)?;
            Some(MarginsOut {
                focal: f.to_string(),
                pred_0: m.pred_0,
                pred_1: m.pred_1,
                pct_diff: m.pct_diff,
            })
        }
        None => None,
    };
    Ok(FitOut {
        by,
        n: result.n,
        r_squared: result.r_squared,
        robust: result.robust,
        terms: result
            .terms
            .iter()
            .map(|t| TermOut {
                name: t.name.clone(),
                estimate: t.estimate,
                std_error: t.std_error,
                p_value: t.p_value,
                stars: significance_stars(t.p_value, legend).to_string(),
            })
            .collect(),
        vifs: result.vifs.clone(),
        margins: margins_out,
    })
}

fn write_csv<W: Write>(fits: &[FitOut], grouped: bool, writer: W) -> Result<(), CliError> {
    let mut wtr = csv::Writer::from_writer(writer);
    if grouped {
        wtr.write_record(["by", "term", "estimate", "std_error", "p_value", "stars"])?;
    } else {
        wtr.write_record(["term", "estimate", "std_error", "p_value", "stars"])?;
    }
    for fit in fits {
        for t in &fit.terms {
            let mut record: Vec<String> = Vec::new();
            if grouped {
                record.push(fit.by.clone().unwrap_or_default());
            }
            record.extend([
                t.name.clone(),
                t.estimate.to_string(),
                t.std_error.to_string(),
                t.p_value.to_string(),
                t.stars.clone(),
            ]);
            wtr.write_record(&record)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn run(args: &RegressArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let legend: Legend = cfg
        .resolve(args.legend.clone(), "legend", "t4".to_string())?
        .parse()
        .map_err(CliError::Spec)?;
    let spec = parse_spec(&args.spec, !args.classical)?;

    let file = std::fs::File::open(&args.input)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", args.input.display())))?;
    let mut table = DataTable::from_csv(file)?;
    let dropped = drop_missing(&mut table, &spec, args.by.as_deref())?;
    if dropped > 0 {
        eprintln!("dropped {dropped} row(s) with missing values in used columns");
    }

    let focal = args.margins.as_deref();
    let fits: Vec<FitOut> = match &args.by {
        None => vec![fit_one(&table, &spec, legend, focal, None)?],
        Some(by) => {
            let labels = level_values(&table, by)?;
            let levels: Vec<String> = labels
                .iter()
                .cloned()
                .collect::<BTreeSet<String>>()
                .into_iter()
                .collect();
            // one independent fit per level; results stay in level order
            levels
                .par_iter()
                .map(|level| {
                    let mut subset = table.clone();
                    let mask: Vec<bool> = labels.iter().map(|l| l == level).collect();
                    subset.retain_rows(&mask);
                    fit_one(&subset, &spec, legend, focal, Some(level.clone()))
                })
                .collect::<Result<Vec<FitOut>, CliError>>()?
        }
    };

    let csv_file = std::fs::File::create(&args.output)?;
    write_csv(&fits, args.by.is_some(), csv_file)?;

    let json_path = args
        .json
        .clone()
        .unwrap_or_else(|| args.output.with_extension("json"));
    let json_out = JsonOut {
        spec: args.spec.clone(),
        legend,
        results: fits,
    };
    std::fs::write(&json_path, serde_json::to_string_pretty(&json_out)?)?;

    let mut manifest = RunManifest::new(
        "regress",
        serde_json::json!({
            "input": args.input.display().to_string(),
            "output": args.output.display().to_string(),
            "json": json_path.display().to_string(),
            "spec": args.spec,
            "robust": !args.classical,
            "by": args.by,
            "margins": args.margins,
        }),
    );
    manifest.policy.legend = Some(format!("{legend:?}"));
    manifest.hash_input(&args.input)?;
    manifest.count("rows_dropped_missing", dropped as u64);
    manifest.count("models_fit", json_out.results.len() as u64);
    manifest.write_beside(&args.output)?;
    Ok(())
}
