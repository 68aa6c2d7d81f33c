//! Tiny model-spec syntax for `--spec`:
//!
//! ```text
//! outcome ~ predictor + predictor + fe(column) + fe(column)
//! ```
//!
//! Plain terms are numeric predictors; `fe(...)` terms become categorical
//! fixed effects with the alphabetically-first level dropped.

use crate::error::CliError;
use invinf::stats::ModelSpec;

pub fn parse_spec(input: &str, robust: bool) -> Result<ModelSpec, CliError> {
    let (outcome, rhs) = input
        .split_once('~')
        .ok_or_else(|| CliError::spec(format!("model spec '{input}' is missing '~'")))?;
    let outcome = outcome.trim();
    if outcome.is_empty() || !is_ident(outcome) {
        return Err(CliError::spec(format!(
            "model spec has no valid outcome before '~': '{input}'"
        )));
    }
    let mut predictors = Vec::new();
    let mut fixed_effects = Vec::new();
    for raw in rhs.split('+') {
        let term = raw.trim();
        if term.is_empty() {
            return Err(CliError::spec(format!("empty term in model spec '{input}'")));
        }
        if let Some(inner) = term.strip_prefix("fe(").and_then(|t| t.strip_suffix(')')) {
            let inner = inner.trim();
            if inner.is_empty() || !is_ident(inner) {
                return Err(CliError::spec(format!("bad fixed-effect term '{term}'")));
            }
            fixed_effects.push(inner.to_string());
        } else if term == "1" {
            // the intercept is always included; accept the conventional "1"
        } else if is_ident(term) {
            predictors.push(term.to_string());
        } else {
            return Err(CliError::spec(format!("bad term '{term}' in model spec")));
        }
    }
    Ok(ModelSpec {
        outcome: outcome.to_string(),
        predictors,
        fixed_effects,
        robust,
    })
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '.')
}
