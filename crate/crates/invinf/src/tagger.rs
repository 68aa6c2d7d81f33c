//! Rule-based feature tagging.
//!
//! Each token gets exactly one of six feature classes or `Other`. The
//! classes collapse the Penn Treebank tags that define them: `Pronoun`
//! covers PRP/PRP$/WP/WP$, `Determiner` covers DT/PDT/WDT, `PastVerb`
//! covers VBD/VBN, and `Cardinal` covers CD. The connector "and" and the
//! question mark are plain string matches.
//!
//! Tagging is driven by a closed-class lexicon plus local context rules
//! for the handful of genuinely ambiguous function words ("that",
//! "which", "all", "both"). There is no statistical model anywhere, so
//! identical input always yields identical tags.

use crate::tokenizer::{Token, TokenKind};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;
use thiserror::Error;

/// Feature class of one token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FeatureTag {
    Pronoun,
    AndCoord,
    Question,
    Determiner,
    PastVerb,
    Cardinal,
    Other,
}

impl FeatureTag {
    pub const ALL: [FeatureTag; 7] = [
        FeatureTag::Pronoun,
        FeatureTag::AndCoord,
        FeatureTag::Question,
        FeatureTag::Determiner,
        FeatureTag::PastVerb,
        FeatureTag::Cardinal,
        FeatureTag::Other,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FeatureTag::Pronoun => "PRONOUN",
            FeatureTag::AndCoord => "AND_COORD",
            FeatureTag::Question => "QUESTION",
            FeatureTag::Determiner => "DETERMINER",
            FeatureTag::PastVerb => "PAST_VERB",
            FeatureTag::Cardinal => "CARDINAL",
            FeatureTag::Other => "OTHER",
        }
    }
}

impl fmt::Display for FeatureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FeatureTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown feature tag '{s}'"))
    }
}

/// A token together with its assigned feature class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub token: Token,
    pub tag: FeatureTag,
}

/// Context rule attached to an ambiguous lexicon entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disambiguation {
    /// "that": complementizer detection via neighbors, determiner otherwise.
    That,
    /// "which": relative pronoun before a verb, determiner otherwise.
    Which,
    AlwaysPronoun,
    AlwaysDeterminer,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon file: {0}")]
    Io(#[from] std::io::Error),
    #[error("lexicon line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("lexicon entry '{word}' appears in more than one class")]
    Overlap { word: String },
}

/// Closed-class word lists backing the tagger. Immutable after load.
#[derive(Debug, Clone)]
pub struct Lexicon {
    pronouns: HashSet<String>,
    determiners: HashSet<String>,
    predeterminers: HashSet<String>,
    irregular_past: HashSet<String>,
    number_words: HashSet<String>,
    ambiguous: HashMap<String, Disambiguation>,
}

const BUILTIN_LEXICON: &str = include_str!("../data/lexicon.tsv");

// Auxiliaries and modals only; lexical verbs stay out so that relative
// "that"/"which" before an ordinary verb reads as a wh-determiner.
const AUXILIARIES: &[&str] = &[
    "is", "are", "am", "was", "were", "be", "been", "being", "has", "have", "had", "having", "do",
    "does", "did", "done", "will", "would", "shall", "should", "can", "could", "may", "might",
    "must",
];

// Left-context words after which "that" is read as a complementizer
// ("suggest that", "the fact that", ...).
const COMPLEMENTIZER_TRIGGERS: &[&str] = &[
    "suggest", "suggests", "suggested", "show", "shows", "showed", "shown", "indicate",
    "indicates", "indicated", "find", "finds", "found", "note", "notes", "noted", "argue",
    "argues", "argued", "report", "reports", "reported", "assume", "assumes", "assumed", "imply",
    "implies", "implied", "conclude", "concludes", "concluded", "mean", "means", "meant",
    "believe", "believes", "believed", "demonstrate", "demonstrates", "demonstrated", "reveal",
    "reveals", "revealed", "confirm", "confirms", "confirmed", "ensure", "ensures", "ensured",
    "propose", "proposes", "proposed", "predict", "predicts", "predicted", "expect", "expects",
    "expected", "estimate", "estimates", "estimated", "know", "knows", "knew", "known", "think",
    "thinks", "thought", "say", "says", "said", "observe", "observes", "observed", "claim",
    "claims", "claimed", "state", "states", "stated", "hypothesize", "hypothesized", "given",
    "so", "such", "evidence", "fact", "hypothesis", "idea", "notion", "possibility", "likelihood",
    "probability", "extent", "degree", "sense", "doubt",
];

// Words ending in "ed" that are not past-tense or participle forms.
const ED_EXCEPTIONS: &[&str] = &[
    "need", "indeed", "exceed", "proceed", "succeed", "feed", "seed", "speed", "breed", "creed",
    "deed", "greed", "heed", "weed", "bleed", "embed", "imbed", "infrared", "hundred", "kindred",
    "sacred", "hatred", "naked", "wicked", "rugged", "wretched", "crooked", "ragged", "jagged",
    "dogged", "shed", "shred", "sled", "coed",
];

impl Lexicon {
    /// The lexicon shipped with the crate.
    pub fn builtin() -> &'static Lexicon {
        static LEX: OnceLock<Lexicon> = OnceLock::new();
        LEX.get_or_init(|| Lexicon::parse(BUILTIN_LEXICON).expect("builtin lexicon is valid"))
    }

    pub fn from_path(path: &Path) -> Result<Lexicon, LexiconError> {
        let src = std::fs::read_to_string(path)?;
        Lexicon::parse(&src)
    }

    /// Parses the tab-separated lexicon format: `word<TAB>class[<TAB>rule]`,
    /// `#` comments, one entry per line.
    pub fn parse(src: &str) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon {
            pronouns: HashSet::new(),
            determiners: HashSet::new(),
            predeterminers: HashSet::new(),
            irregular_past: HashSet::new(),
            number_words: HashSet::new(),
            ambiguous: HashMap::new(),
        };
        for (i, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let word = parts.next().unwrap_or("").trim().to_lowercase();
            let class = parts.next().unwrap_or("").trim();
            if word.is_empty() || class.is_empty() {
                return Err(LexiconError::Malformed {
                    line: i + 1,
                    reason: "expected word<TAB>class".into(),
                });
            }
            match class {
                "pronoun" => {
                    lex.pronouns.insert(word);
                }
                "determiner" => {
                    lex.determiners.insert(word);
                }
                "predeterminer" => {
                    lex.predeterminers.insert(word);
                }
                "irregular_past" => {
                    lex.irregular_past.insert(word);
                }
                "number_word" => {
                    lex.number_words.insert(word);
                }
                "ambiguous" => {
                    let rule = match parts.next().map(str::trim) {
                        Some("that") => Disambiguation::That,
                        Some("which") => Disambiguation::Which,
                        Some("always_pronoun") => Disambiguation::AlwaysPronoun,
                        Some("always_determiner") => Disambiguation::AlwaysDeterminer,
                        other => {
                            return Err(LexiconError::Malformed {
                                line: i + 1,
                                reason: format!("unknown disambiguation rule {other:?}"),
                            })
                        }
                    };
                    lex.ambiguous.insert(word, rule);
                }
                other => {
                    return Err(LexiconError::Malformed {
                        line: i + 1,
                        reason: format!("unknown class '{other}'"),
                    })
                }
            }
        }
        lex.validate()?;
        Ok(lex)
    }

    /// Classes must be pairwise disjoint; ambiguous entries live only in the
    /// ambiguous map.
    fn validate(&self) -> Result<(), LexiconError> {
        let sets = [
            &self.pronouns,
            &self.determiners,
            &self.predeterminers,
            &self.irregular_past,
            &self.number_words,
        ];
        let mut seen: HashSet<&str> = HashSet::new();
        for set in sets {
            for w in set {
                if !seen.insert(w) {
                    return Err(LexiconError::Overlap { word: w.clone() });
                }
            }
        }
        for w in self.ambiguous.keys() {
            if seen.contains(w.as_str()) {
                return Err(LexiconError::Overlap { word: w.clone() });
            }
        }
        Ok(())
    }

    pub fn is_pronoun(&self, lower: &str) -> bool {
        self.pronouns.contains(lower)
    }

    pub fn is_determiner(&self, lower: &str) -> bool {
        self.determiners.contains(lower) || self.predeterminers.contains(lower)
    }

    pub fn is_number_word(&self, lower: &str) -> bool {
        self.number_words.contains(lower)
    }

    pub fn is_irregular_past(&self, lower: &str) -> bool {
        self.irregular_past.contains(lower)
    }

    pub fn unambiguous_class(&self, lower: &str) -> Option<FeatureTag> {
        if self.pronouns.contains(lower) {
            Some(FeatureTag::Pronoun)
        } else if self.determiners.contains(lower) || self.predeterminers.contains(lower) {
            Some(FeatureTag::Determiner)
        } else if self.number_words.contains(lower) {
            Some(FeatureTag::Cardinal)
        } else if self.irregular_past.contains(lower) {
            Some(FeatureTag::PastVerb)
        } else {
            None
        }
    }
}

/// Tags the token at `index`. `index` must be in range; the sequence is
/// needed because the ambiguity rules look at neighboring tokens.
pub fn tag_token(tokens: &[Token], index: usize, lexicon: &Lexicon) -> FeatureTag {
    let tok = &tokens[index];
    if tok.surface == "?" {
        return FeatureTag::Question;
    }
    match tok.kind {
        TokenKind::Punct => FeatureTag::Other,
        TokenKind::Number => FeatureTag::Cardinal,
        TokenKind::Word => {
            let lower = tok.surface.to_lowercase();
            if lower == "and" {
                return FeatureTag::AndCoord;
            }
            if let Some(rule) = lexicon.ambiguous.get(&lower) {
                return apply_rule(*rule, tokens, index, lexicon);
            }
            if lexicon.is_pronoun(&lower) {
                return FeatureTag::Pronoun;
            }
            if lexicon.is_determiner(&lower) {
                return FeatureTag::Determiner;
            }
            if lexicon.is_number_word(&lower) || is_hyphenated_number(&lower, lexicon) {
                return FeatureTag::Cardinal;
            }
            if lexicon.is_irregular_past(&lower) {
                return FeatureTag::PastVerb;
            }
            if is_ed_past(tok, tokens, index) {
                return FeatureTag::PastVerb;
            }
            FeatureTag::Other
        }
    }
}

/// Tags a whole document; equal to mapping [`tag_token`] over all positions.
pub fn tag_document(tokens: Vec<Token>, lexicon: &Lexicon) -> Vec<TaggedToken> {
    let tags: Vec<FeatureTag> = (0..tokens.len())
        .map(|i| tag_token(&tokens, i, lexicon))
        .collect();
    tokens
        .into_iter()
        .zip(tags)
        .map(|(token, tag)| TaggedToken { token, tag })
        .collect()
}

fn apply_rule(
    rule: Disambiguation,
    tokens: &[Token],
    index: usize,
    lexicon: &Lexicon,
) -> FeatureTag {
    match rule {
        Disambiguation::AlwaysPronoun => FeatureTag::Pronoun,
        Disambiguation::AlwaysDeterminer => FeatureTag::Determiner,
        Disambiguation::That => disambiguate_that(tokens, index, lexicon),
        Disambiguation::Which => disambiguate_which(tokens, index, lexicon),
    }
}

/// "that" is a complementizer (Other) after verbs of saying/showing and
/// before pronouns, auxiliaries, or numbers; a determiner otherwise. This
/// keeps relative "that" before a lexical verb ("companies that distributed
/// dividends") in the wh-determiner class.
fn disambiguate_that(tokens: &[Token], index: usize, lexicon: &Lexicon) -> FeatureTag {
    if index > 0 {
        let prev = tokens[index - 1].surface.to_lowercase();
        if COMPLEMENTIZER_TRIGGERS.contains(&prev.as_str()) {
            return FeatureTag::Other;
        }
    }
    match tokens.get(index + 1) {
        Some(next) if next.kind == TokenKind::Word => {
            let lower = next.surface.to_lowercase();
            if AUXILIARIES.contains(&lower.as_str()) || lexicon.is_pronoun(&lower) {
                FeatureTag::Other
            } else {
                FeatureTag::Determiner
            }
        }
        Some(next) if next.kind == TokenKind::Number => FeatureTag::Other,
        // Clause-final "that" is read as a demonstrative.
        _ => FeatureTag::Determiner,
    }
}

/// "which" before a verb is a relative pronoun ("which were cited");
/// a wh-determiner otherwise ("which option").
fn disambiguate_which(tokens: &[Token], index: usize, lexicon: &Lexicon) -> FeatureTag {
    match tokens.get(index + 1) {
        Some(next) if next.kind == TokenKind::Word => {
            let lower = next.surface.to_lowercase();
            let verbish = AUXILIARIES.contains(&lower.as_str())
                || lexicon.is_irregular_past(&lower)
                || ed_morphology(&lower);
            if verbish {
                FeatureTag::Pronoun
            } else {
                FeatureTag::Determiner
            }
        }
        _ => FeatureTag::Determiner,
    }
}

fn is_hyphenated_number(lower: &str, lexicon: &Lexicon) -> bool {
    let mut parts = lower.split('-');
    let mut any = false;
    for p in &mut parts {
        if p.is_empty() || !lexicon.is_number_words_only(p) {
            return false;
        }
        any = true;
    }
    any && lower.contains('-')
}

impl Lexicon {
    fn is_number_words_only(&self, part: &str) -> bool {
        self.number_words.contains(part)
    }
}

fn ed_morphology(lower: &str) -> bool {
    lower.len() >= 4
        && lower.ends_with("ed")
        && !ED_EXCEPTIONS.contains(&lower)
        && lower[..lower.len() - 2]
            .chars()
            .any(|c| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y'))
}

/// "-ed" morphology with a proper-noun guard: a capitalized token in the
/// middle of a sentence ("United States") is not read as a past form.
fn is_ed_past(tok: &Token, tokens: &[Token], index: usize) -> bool {
    let lower = tok.surface.to_lowercase();
    if !ed_morphology(&lower) {
        return false;
    }
    let capitalized = tok.surface.chars().next().is_some_and(|c| c.is_uppercase());
    if capitalized && !sentence_initial(tokens, index) {
        return false;
    }
    true
}

fn sentence_initial(tokens: &[Token], index: usize) -> bool {
    if index == 0 {
        return true;
    }
    matches!(tokens[index - 1].surface.as_str(), "." | "!" | "?")
}
