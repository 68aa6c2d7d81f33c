//! Synthetic corpora with known ground truth.
//!
//! Documents are token streams drawn i.i.d. from a per-class distribution
//! and rendered through disjoint per-class vocabularies, so the tokenizer
//! and tagger recover the intended tags exactly and the truth sidecar can
//! assert pipeline correctness token-for-token. Female-labeled documents
//! get an additive shift on the class probabilities, and the exact implied
//! difference in expected ratio is available from an enumeration oracle,
//! which is what makes effect-recovery tests possible.

use crate::corpus::{CitingRecord, DocKind, Document, Gender, PersonName};
use crate::stylometry::{compute_scores, FeatureCounts, StyleScores};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Per-token probabilities for the six feature classes; the remainder of
/// the probability mass renders as filler words.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassRates {
    pub pronoun: f64,
    pub and_coord: f64,
    pub question: f64,
    pub determiner: f64,
    pub past_verb: f64,
    pub cardinal: f64,
}

impl ClassRates {
    pub fn involved(&self) -> f64 {
        self.pronoun + self.and_coord + self.question
    }

    pub fn informational(&self) -> f64 {
        self.determiner + self.past_verb + self.cardinal
    }

    pub fn total(&self) -> f64 {
        self.involved() + self.informational()
    }

    pub fn shifted(&self, delta: &ClassRates) -> ClassRates {
        ClassRates {
            pronoun: self.pronoun + delta.pronoun,
            and_coord: self.and_coord + delta.and_coord,
            question: self.question + delta.question,
            determiner: self.determiner + delta.determiner,
            past_verb: self.past_verb + delta.past_verb,
            cardinal: self.cardinal + delta.cardinal,
        }
    }

    pub const ZERO: ClassRates = ClassRates {
        pronoun: 0.0,
        and_coord: 0.0,
        question: 0.0,
        determiner: 0.0,
        past_verb: 0.0,
        cardinal: 0.0,
    };

    /// Class shares typical of male-authored academic abstracts
    /// (per-100-token means of large published samples, divided by 100).
    pub fn abstract_baseline() -> ClassRates {
        ClassRates {
            pronoun: 0.0158,
            and_coord: 0.0294,
            question: 0.0003,
            determiner: 0.1014,
            past_verb: 0.0445,
            cardinal: 0.0154,
        }
    }

    /// Observed female-minus-male differences in the same samples; added to
    /// the baseline this lands the expected ratio difference near 0.02.
    pub fn default_female_shift() -> ClassRates {
        ClassRates {
            pronoun: 0.0002,
            and_coord: 0.0022,
            question: 0.0,
            determiner: -0.0021,
            past_verb: 0.0005,
            cardinal: -0.0002,
        }
    }

    fn valid(&self) -> bool {
        let each_ok = [
            self.pronoun,
            self.and_coord,
            self.question,
            self.determiner,
            self.past_verb,
            self.cardinal,
        ]
        .iter()
        .all(|p| (0.0..=1.0).contains(p));
        each_ok && self.total() <= 1.0
    }
}

/// One (field, year) cell and its share of female-labeled documents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub field: String,
    pub year: i32,
    pub female_share: f64,
}

/// Generator configuration. `effect_beta` documents the intended ratio
/// difference; the exact value implied by the shift comes from
/// [`ratio_effect`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n_docs: usize,
    pub strata: Vec<Stratum>,
    pub base_rates: ClassRates,
    pub female_shift: ClassRates,
    pub effect_beta: f64,
    /// Probability that a citing author shares the cited author's gender.
    pub homophily: f64,
    /// Poisson mean of the per-document citation count.
    pub mean_citations: f64,
    pub tokens_min: usize,
    pub tokens_max: usize,
    pub seed: u64,
}

impl GeneratorConfig {
    /// A ready-to-use configuration with the calibrated baseline and shift.
    pub fn default_with(n_docs: usize, seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            n_docs,
            strata: default_strata(),
            base_rates: ClassRates::abstract_baseline(),
            female_shift: ClassRates::default_female_shift(),
            effect_beta: 0.02,
            homophily: 0.6,
            mean_citations: 8.0,
            tokens_min: 110,
            tokens_max: 160,
            seed,
        }
    }

    pub fn female_rates(&self) -> ClassRates {
        self.base_rates.shifted(&self.female_shift)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_docs == 0 {
            return Err(ConfigError::Invalid("n_docs must be positive".into()));
        }
        if self.strata.is_empty() {
            return Err(ConfigError::Invalid("at least one stratum".into()));
        }
        if self
            .strata
            .iter()
            .any(|s| !(0.0..=1.0).contains(&s.female_share))
        {
            return Err(ConfigError::Invalid("female_share must be in [0,1]".into()));
        }
        if !self.base_rates.valid() || !self.female_rates().valid() {
            return Err(ConfigError::Invalid(
                "class probabilities must be in [0,1] and sum to at most 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.homophily) {
            return Err(ConfigError::Invalid("homophily must be in [0,1]".into()));
        }
        if self.mean_citations < 0.0 {
            return Err(ConfigError::Invalid("mean_citations must be >= 0".into()));
        }
        if self.tokens_min <= 100 || self.tokens_min > self.tokens_max {
            return Err(ConfigError::Invalid(
                "need 100 < tokens_min <= tokens_max".into(),
            ));
        }
        Ok(())
    }
}

pub fn default_strata() -> Vec<Stratum> {
    let fields = ["Biology", "Economics", "Materials", "Sociology"];
    let mut strata = Vec::new();
    for field in fields {
        for year in 1995..2000 {
            strata.push(Stratum {
                field: field.into(),
                year,
                female_share: 0.5,
            });
        }
    }
    strata
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid generator config: {0}")]
    Invalid(String),
}

/// Ground truth for one generated document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub id: String,
    pub gender: Gender,
    pub field: String,
    pub year: i32,
    pub counts: FeatureCounts,
    pub scores: StyleScores,
}

/// A generated corpus with its truth sidecar.
#[derive(Debug)]
pub struct SyntheticCorpus {
    pub docs: Vec<Document>,
    pub truth: Vec<TruthRecord>,
    /// Documents redrawn because a draw landed under 101 words; with sane
    /// configs this stays at zero, keeping the enumeration oracle exact.
    pub redraws: usize,
}

// Disjoint per-class vocabularies: every word maps back to exactly one
// feature class under the builtin lexicon, so tagging recovers the
// intended counts exactly.
const VOCAB_PRONOUN: &[&str] = &["we", "they", "it", "she", "he", "them", "you"];
const VOCAB_AND: &[&str] = &["and"];
const VOCAB_QUESTION: &[&str] = &["?"];
const VOCAB_DETERMINER: &[&str] = &["the", "a", "an", "this", "these", "those", "each", "every"];
const VOCAB_PAST: &[&str] = &[
    "estimated",
    "observed",
    "measured",
    "analyzed",
    "examined",
    "compared",
    "was",
    "were",
];
const VOCAB_CARDINAL: &[&str] = &["5", "12", "100", "3.14", "2,000", "seven", "dozen", "1991"];
const VOCAB_OTHER: &[&str] = &[
    "results", "data", "method", "analysis", "model", "sample", "effect", "study", "measure",
    "approach", "system", "process", "region", "policy", "market", "firm", "growth", "rate",
    "value", "level",
];

#[derive(Clone, Copy)]
enum Class {
    Pronoun,
    And,
    Question,
    Determiner,
    Past,
    Cardinal,
    Other,
}

impl Class {
    fn vocab(self) -> &'static [&'static str] {
        match self {
            Class::Pronoun => VOCAB_PRONOUN,
            Class::And => VOCAB_AND,
            Class::Question => VOCAB_QUESTION,
            Class::Determiner => VOCAB_DETERMINER,
            Class::Past => VOCAB_PAST,
            Class::Cardinal => VOCAB_CARDINAL,
            Class::Other => VOCAB_OTHER,
        }
    }
}

fn doc_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

/// Multinomial counts via the conditional-binomial chain, in fixed class
/// order, so the same RNG stream always yields the same counts.
fn sample_counts(rng: &mut ChaCha8Rng, n: usize, rates: &ClassRates) -> FeatureCounts {
    let order = [
        rates.pronoun,
        rates.and_coord,
        rates.question,
        rates.determiner,
        rates.past_verb,
        rates.cardinal,
    ];
    let mut remaining = n as u64;
    let mut rest_p = 1.0_f64;
    let mut drawn = [0u64; 6];
    for (slot, &p) in order.iter().enumerate() {
        if remaining == 0 || p <= 0.0 {
            rest_p -= p;
            continue;
        }
        let cond = (p / rest_p).clamp(0.0, 1.0);
        let count = if cond >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, cond)
                .expect("validated probability")
                .sample(rng)
        };
        drawn[slot] = count;
        remaining -= count;
        rest_p -= p;
    }
    FeatureCounts {
        n_pron: drawn[0] as usize,
        n_and: drawn[1] as usize,
        n_q: drawn[2] as usize,
        n_det: drawn[3] as usize,
        n_past: drawn[4] as usize,
        n_num: drawn[5] as usize,
        n_tokens: n,
    }
}

struct DocPlan {
    counts: FeatureCounts,
    gender: Gender,
    redraws: usize,
}

fn sample_plan(rng: &mut ChaCha8Rng, config: &GeneratorConfig, stratum: &Stratum) -> DocPlan {
    let gender = if rng.gen_bool(stratum.female_share) {
        Gender::Female
    } else {
        Gender::Male
    };
    let rates = match gender {
        Gender::Female => config.female_rates(),
        _ => config.base_rates,
    };
    let mut redraws = 0;
    loop {
        let n = rng.gen_range(config.tokens_min..=config.tokens_max);
        let counts = sample_counts(rng, n, &rates);
        // question marks are punctuation; the word-count filter needs >100
        if counts.n_tokens - counts.n_q >= 101 {
            return DocPlan {
                counts,
                gender,
                redraws,
            };
        }
        redraws += 1;
    }
}

fn render_text(rng: &mut ChaCha8Rng, counts: &FeatureCounts) -> String {
    let mut classes: Vec<Class> = Vec::with_capacity(counts.n_tokens);
    let spec = [
        (Class::Pronoun, counts.n_pron),
        (Class::And, counts.n_and),
        (Class::Question, counts.n_q),
        (Class::Determiner, counts.n_det),
        (Class::Past, counts.n_past),
        (Class::Cardinal, counts.n_num),
    ];
    for (class, count) in spec {
        classes.extend(std::iter::repeat_n(class, count));
    }
    let fill = counts.n_tokens - classes.len();
    classes.extend(std::iter::repeat_n(Class::Other, fill));
    classes.shuffle(rng);
    let words: Vec<&str> = classes
        .iter()
        .map(|c| {
            let vocab = c.vocab();
            vocab[rng.gen_range(0..vocab.len())]
        })
        .collect();
    words.join(" ")
}

fn sample_citations(
    rng: &mut ChaCha8Rng,
    config: &GeneratorConfig,
    doc_index: usize,
    gender: Gender,
) -> Vec<CitingRecord> {
    if config.mean_citations <= 0.0 {
        return Vec::new();
    }
    let count = Poisson::new(config.mean_citations)
        .expect("validated mean")
        .sample(rng) as usize;
    (0..count)
        .map(|j| {
            let first = if rng.gen_bool(config.homophily) {
                gender
            } else {
                gender.opposite()
            };
            let last = if rng.gen_bool(config.homophily) {
                gender
            } else {
                gender.opposite()
            };
            CitingRecord {
                citing_doc_id: format!("cit-{doc_index:06}-{j:03}"),
                first_author_gender: Some(first),
                last_author_gender: Some(last),
                citing_author_ids: Vec::new(),
            }
        })
        .collect()
}

/// Generates the corpus and its truth sidecar. Byte-identical for a given
/// config; every document draws from its own seed stream, so the output
/// does not depend on evaluation order.
pub fn generate(config: &GeneratorConfig) -> Result<SyntheticCorpus, ConfigError> {
    config.validate()?;
    let mut docs = Vec::with_capacity(config.n_docs);
    let mut truth = Vec::with_capacity(config.n_docs);
    let mut redraws = 0;
    for i in 0..config.n_docs {
        let stratum = &config.strata[i % config.strata.len()];
        let mut rng = doc_rng(config.seed, i);
        let plan = sample_plan(&mut rng, config, stratum);
        let cited_by = sample_citations(&mut rng, config, i, plan.gender);
        let text = render_text(&mut rng, &plan.counts);
        redraws += plan.redraws;
        let id = format!("synth-{i:06}");
        let author = match plan.gender {
            Gender::Female => PersonName::new("Anna", None, format!("Author{i}").as_str()),
            _ => PersonName::new("John", None, format!("Author{i}").as_str()),
        };
        let scores = compute_scores(&plan.counts).expect("tokens_min > 0");
        truth.push(TruthRecord {
            id: id.clone(),
            gender: plan.gender,
            field: stratum.field.clone(),
            year: stratum.year,
            counts: plan.counts,
            scores,
        });
        docs.push(Document {
            id,
            kind: DocKind::Paper,
            text,
            field: stratum.field.clone(),
            year: stratum.year,
            authors: vec![author],
            lawyer: None,
            language: Some("en".into()),
            cited_by,
            author_gender: Some(plan.gender),
            lawyer_gender: None,
            author_ids: None,
        });
    }
    Ok(SyntheticCorpus {
        docs,
        truth,
        redraws,
    })
}

/// The fast path for statistical tests: identical sampling to [`generate`]
/// (counts are drawn before any rendering), without text or citations.
pub fn generate_truth_only(config: &GeneratorConfig) -> Result<(Vec<TruthRecord>, usize), ConfigError> {
    config.validate()?;
    let mut truth = Vec::with_capacity(config.n_docs);
    let mut redraws = 0;
    for i in 0..config.n_docs {
        let stratum = &config.strata[i % config.strata.len()];
        let mut rng = doc_rng(config.seed, i);
        let plan = sample_plan(&mut rng, config, stratum);
        redraws += plan.redraws;
        let scores = compute_scores(&plan.counts).expect("tokens_min > 0");
        truth.push(TruthRecord {
            id: format!("synth-{i:06}"),
            gender: plan.gender,
            field: stratum.field.clone(),
            year: stratum.year,
            counts: plan.counts,
            scores,
        });
    }
    Ok((truth, redraws))
}

/// Writes the truth sidecar as JSONL keyed by document id.
pub fn export_truth_jsonl<W: std::io::Write>(
    truth: &[TruthRecord],
    mut writer: W,
) -> std::io::Result<()> {
    for record in truth {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Exact expected involved and informational rates (per 100 tokens) under
/// a rate vector; the per-document rate is an unbiased estimate of these
/// regardless of document length.
pub fn expected_rates(rates: &ClassRates) -> (f64, f64) {
    (100.0 * rates.involved(), 100.0 * rates.informational())
}

/// Enumeration oracle for E[involved/informational | informational ≥ 1]
/// with document length uniform on [tokens_min, tokens_max]: a direct sum
/// of (a/b)·P(a,b|n) over the trinomial (involved, informational, other).
/// This is the ground truth that effect-recovery tests compare against.
pub fn expected_ratio(rates: &ClassRates, tokens_min: usize, tokens_max: usize) -> f64 {
    assert!(rates.informational() > 0.0, "informational mass required");
    assert!(tokens_min >= 1 && tokens_min <= tokens_max);
    let p_inv = rates.involved();
    let p_inf = rates.informational();
    let p_oth = (1.0 - p_inv - p_inf).max(0.0);

    let lf = ln_factorials(tokens_max);
    let ln_inv = if p_inv > 0.0 { p_inv.ln() } else { f64::NEG_INFINITY };
    let ln_inf = p_inf.ln();
    let ln_oth = if p_oth > 0.0 { p_oth.ln() } else { f64::NEG_INFINITY };

    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for n in tokens_min..=tokens_max {
        for b in 1..=n {
            for a in 0..=(n - b) {
                let c = n - a - b;
                if (a > 0 && ln_inv.is_infinite()) || (c > 0 && ln_oth.is_infinite()) {
                    continue;
                }
                let ln_p = lf[n] - lf[a] - lf[b] - lf[c]
                    + a as f64 * if a > 0 { ln_inv } else { 0.0 }
                    + b as f64 * ln_inf
                    + c as f64 * if c > 0 { ln_oth } else { 0.0 };
                let p = ln_p.exp();
                numerator += (a as f64 / b as f64) * p;
                denominator += p;
            }
        }
    }
    numerator / denominator
}

/// The exact female-minus-male difference in expected ratio implied by a
/// configuration.
pub fn ratio_effect(config: &GeneratorConfig) -> f64 {
    expected_ratio(
        &config.female_rates(),
        config.tokens_min,
        config.tokens_max,
    ) - expected_ratio(&config.base_rates, config.tokens_min, config.tokens_max)
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut lf = vec![0.0; n + 1];
    for i in 1..=n {
        lf[i] = lf[i - 1] + (i as f64).ln();
    }
    lf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stylometry::count_features;
    use crate::tagger::{tag_document, Lexicon};
    use crate::tokenizer::tokenize;

    fn small_config(seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            n_docs: 40,
            mean_citations: 3.0,
            ..GeneratorConfig::default_with(40, seed)
        }
    }

    #[test]
    fn same_seed_is_byte_identical() {
        let a = generate(&small_config(7)).unwrap();
        let b = generate(&small_config(7)).unwrap();
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        crate::corpus::export_jsonl(&a.docs, &mut buf_a).unwrap();
        crate::corpus::export_jsonl(&b.docs, &mut buf_b).unwrap();
        assert_eq!(buf_a, buf_b);
        let c = generate(&small_config(8)).unwrap();
        assert_ne!(a.docs[0].text, c.docs[0].text);
    }

    #[test]
    fn tagger_recovers_intended_counts_exactly() {
        let corpus = generate(&small_config(3)).unwrap();
        assert_eq!(corpus.redraws, 0);
        for (doc, truth) in corpus.docs.iter().zip(&corpus.truth) {
            let tagged = tag_document(tokenize(&doc.text), Lexicon::builtin());
            let counts = count_features(&tagged);
            assert_eq!(counts, truth.counts, "doc {}", doc.id);
        }
    }

    #[test]
    fn documents_pass_the_word_count_filter() {
        let corpus = generate(&small_config(5)).unwrap();
        for doc in &corpus.docs {
            let toks = tokenize(&doc.text);
            assert!(crate::tokenizer::word_count(&toks) > 100, "doc {}", doc.id);
        }
    }

    #[test]
    fn full_homophily_matches_genders_exactly() {
        let config = GeneratorConfig {
            homophily: 1.0,
            mean_citations: 5.0,
            ..small_config(11)
        };
        let corpus = generate(&config).unwrap();
        let mut saw_cited_doc = false;
        for (doc, truth) in corpus.docs.iter().zip(&corpus.truth) {
            if doc.cited_by.is_empty() {
                continue;
            }
            saw_cited_doc = true;
            for rec in &doc.cited_by {
                assert_eq!(rec.first_author_gender, Some(truth.gender));
                assert_eq!(rec.last_author_gender, Some(truth.gender));
            }
            let profile = crate::citation::decompose(doc);
            match truth.gender {
                Gender::Female => assert_eq!(profile.rate_female_first, 100.0),
                _ => assert_eq!(profile.rate_male_first, 100.0),
            }
        }
        assert!(saw_cited_doc);
    }

    #[test]
    fn truth_only_path_matches_full_generation() {
        let config = small_config(13);
        let full = generate(&config).unwrap();
        let (fast, redraws) = generate_truth_only(&config).unwrap();
        assert_eq!(full.truth, fast);
        assert_eq!(full.redraws, redraws);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = small_config(1);
        c.base_rates.determiner = 0.99; // total > 1
        assert!(c.validate().is_err());
        let mut c = small_config(1);
        c.tokens_min = 80;
        assert!(c.validate().is_err());
        let mut c = small_config(1);
        c.homophily = 1.5;
        assert!(c.validate().is_err());
        let mut c = small_config(1);
        c.n_docs = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn expected_rates_are_exact_class_sums() {
        let rates = ClassRates::abstract_baseline();
        let (inv, inf) = expected_rates(&rates);
        assert!((inv - 4.55).abs() < 1e-9);
        assert!((inf - 16.13).abs() < 1e-9);
    }

    #[test]
    fn enumeration_oracle_matches_monte_carlo() {
        let rates = ClassRates::abstract_baseline();
        let exact = expected_ratio(&rates, 110, 120);
        // independent check: straight simulation of the same quantity
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut sum = 0.0;
        let mut kept = 0usize;
        for _ in 0..200_000 {
            let n = rng.gen_range(110..=120);
            let c = sample_counts(&mut rng, n, &rates);
            if c.informational_sum() > 0 {
                sum += c.involved_sum() as f64 / c.informational_sum() as f64;
                kept += 1;
            }
        }
        let mc = sum / kept as f64;
        assert!(
            (exact - mc).abs() < 0.002,
            "enumeration {exact} vs monte carlo {mc}"
        );
    }

    #[test]
    fn default_shift_lands_near_the_intended_beta() {
        let config = GeneratorConfig::default_with(1, 0);
        let beta = ratio_effect(&config);
        assert!(
            (beta - config.effect_beta).abs() < 0.01,
            "implied beta {beta} too far from target {}",
            config.effect_beta
        );
    }

    #[test]
    fn truth_sidecar_round_trips() {
        let corpus = generate(&small_config(2)).unwrap();
        let mut buf = Vec::new();
        export_truth_jsonl(&corpus.truth, &mut buf).unwrap();
        let lines = buf.split(|b| *b == b'\n').filter(|l| !l.is_empty());
        let parsed: Vec<TruthRecord> = lines
            .map(|l| serde_json::from_slice(l).unwrap())
            .collect();
        assert_eq!(parsed, corpus.truth);
    }
}
