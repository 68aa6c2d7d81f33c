//! Feature counts and the involved/informational style measures.
//!
//! The involved rate is the number of pronoun, "and", and question-mark
//! tokens per 100 tokens; the informational rate is the number of
//! determiner, past-verb, and cardinal tokens per 100 tokens; the ratio is
//! involved over informational. The denominator is the full token count,
//! punctuation included — recorded in output metadata as
//! `denominator=all-tokens`.

use crate::tagger::{FeatureTag, TaggedToken};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Raw counts of the six feature classes plus the token total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FeatureCounts {
    pub n_pron: usize,
    pub n_and: usize,
    pub n_q: usize,
    pub n_det: usize,
    pub n_past: usize,
    pub n_num: usize,
    pub n_tokens: usize,
}

impl FeatureCounts {
    pub fn involved_sum(&self) -> usize {
        self.n_pron + self.n_and + self.n_q
    }

    pub fn informational_sum(&self) -> usize {
        self.n_det + self.n_past + self.n_num
    }
}

/// The three style measures for one document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StyleScores {
    /// Involved features per 100 tokens.
    pub involved_rate: f64,
    /// Informational features per 100 tokens.
    pub informational_rate: f64,
    /// Involved rate over informational rate; `None` when the informational
    /// rate is zero. Never infinity or NaN.
    pub ratio: Option<f64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("empty document")]
    EmptyDocument,
}

/// Tallies feature tags. `n_tokens` is the full tagged-sequence length.
pub fn count_features(tagged: &[TaggedToken]) -> FeatureCounts {
    let mut c = FeatureCounts {
        n_tokens: tagged.len(),
        ..FeatureCounts::default()
    };
    for t in tagged {
        match t.tag {
            FeatureTag::Pronoun => c.n_pron += 1,
            FeatureTag::AndCoord => c.n_and += 1,
            FeatureTag::Question => c.n_q += 1,
            FeatureTag::Determiner => c.n_det += 1,
            FeatureTag::PastVerb => c.n_past += 1,
            FeatureTag::Cardinal => c.n_num += 1,
            FeatureTag::Other => {}
        }
    }
    c
}

/// Computes the involved rate, informational rate, and their ratio.
/// Errors on an empty document; a zero informational rate yields
/// `ratio: None` rather than infinity.
pub fn compute_scores(counts: &FeatureCounts) -> Result<StyleScores, ScoreError> {
    if counts.n_tokens == 0 {
        return Err(ScoreError::EmptyDocument);
    }
    let n = counts.n_tokens as f64;
    let involved_rate = counts.involved_sum() as f64 / n * 100.0;
    let informational_rate = counts.informational_sum() as f64 / n * 100.0;
    let ratio = if counts.informational_sum() > 0 {
        Some(counts.involved_sum() as f64 / counts.informational_sum() as f64)
    } else {
        None
    };
    Ok(StyleScores {
        involved_rate,
        informational_rate,
        ratio,
    })
}
