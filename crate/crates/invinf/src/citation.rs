//! Decomposition of each document's incoming citations by citing-author
//! gender, as rates per 100 citations.
//!
//! Self-citations are excluded before anything is counted. Citers with an
//! unknown gender stay in the denominator, so the female and male rates for
//! a position sum to at most 100. Documents with no remaining citations get
//! all-zero rates and the `imputed_zero` indicator.

use crate::corpus::{Document, Gender};
use std::collections::HashSet;
use std::io::Write;
use unicode_normalization::UnicodeNormalization;

/// Citation rates for one document.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CitationProfile {
    pub doc_id: String,
    /// Citations remaining after self-citation exclusion.
    pub total_cites: usize,
    pub rate_female_first: f64,
    pub rate_male_first: f64,
    pub rate_female_last: f64,
    pub rate_male_last: f64,
    pub imputed_zero: bool,
}

/// Identifiers used for self-citation matching: explicit `author_ids` when
/// present, normalized full names otherwise.
pub fn author_id_set(doc: &Document) -> HashSet<String> {
    match &doc.author_ids {
        Some(ids) => ids.iter().map(|s| normalize_id(s)).collect(),
        None => doc
            .authors
            .iter()
            .map(|n| {
                let middle = n.middle.as_deref().unwrap_or("");
                normalize_id(&format!("{} {} {}", n.first, middle, n.last))
            })
            .collect(),
    }
}

fn normalize_id(s: &str) -> String {
    s.nfc()
        .collect::<String>()
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Computes the four per-100 rates for one document.
pub fn decompose(doc: &Document) -> CitationProfile {
    let own_ids = author_id_set(doc);
    let mut total = 0usize;
    let mut female_first = 0usize;
    let mut male_first = 0usize;
    let mut female_last = 0usize;
    let mut male_last = 0usize;

    for record in &doc.cited_by {
        let is_self = record
            .citing_author_ids
            .iter()
            .any(|id| own_ids.contains(&normalize_id(id)));
        if is_self {
            continue;
        }
        total += 1;
        match record.first_author_gender {
            Some(Gender::Female) => female_first += 1,
            Some(Gender::Male) => male_first += 1,
            _ => {}
        }
        match record.last_author_gender {
            Some(Gender::Female) => female_last += 1,
            Some(Gender::Male) => male_last += 1,
            _ => {}
        }
    }

    if total == 0 {
        return CitationProfile {
            doc_id: doc.id.clone(),
            total_cites: 0,
            rate_female_first: 0.0,
            rate_male_first: 0.0,
            rate_female_last: 0.0,
            rate_male_last: 0.0,
            imputed_zero: true,
        };
    }
    let rate = |count: usize| 100.0 * count as f64 / total as f64;
    CitationProfile {
        doc_id: doc.id.clone(),
        total_cites: total,
        rate_female_first: rate(female_first),
        rate_male_first: rate(male_first),
        rate_female_last: rate(female_last),
        rate_male_last: rate(male_last),
        imputed_zero: false,
    }
}

/// CSV export: `doc_id, total_cites, rate_female_first, rate_male_first,
/// rate_female_last, rate_male_last, imputed_zero`.
pub fn write_csv<W: Write>(profiles: &[CitationProfile], writer: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record([
        "doc_id",
        "total_cites",
        "rate_female_first",
        "rate_male_first",
        "rate_female_last",
        "rate_male_last",
        "imputed_zero",
    ])?;
    for p in profiles {
        wtr.write_record([
            p.doc_id.as_str(),
            &p.total_cites.to_string(),
            &p.rate_female_first.to_string(),
            &p.rate_male_first.to_string(),
            &p.rate_female_last.to_string(),
            &p.rate_male_last.to_string(),
            &p.imputed_zero.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
