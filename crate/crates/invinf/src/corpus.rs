//! Document ingestion, validation, filtering, and gender-matched sampling.
//!
//! JSONL is the canonical interchange format; CSV is supported for flat
//! metadata without citation lists. Malformed records are collected into a
//! rejects report with line numbers rather than silently dropped.

use crate::tokenizer;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use thiserror::Error;

/// Binary gender code with an explicit unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gender {
    #[serde(rename = "F")]
    Female,
    #[serde(rename = "M")]
    Male,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl Gender {
    pub fn as_str(&self) -> &'static str {
        match self {
            Gender::Female => "F",
            Gender::Male => "M",
            Gender::Unknown => "UNKNOWN",
        }
    }

    pub fn opposite(&self) -> Gender {
        match self {
            Gender::Female => Gender::Male,
            Gender::Male => Gender::Female,
            Gender::Unknown => Gender::Unknown,
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "F" => Ok(Gender::Female),
            "M" => Ok(Gender::Male),
            "UNKNOWN" => Ok(Gender::Unknown),
            other => Err(format!("unknown gender code '{other}'")),
        }
    }
}

/// Document kind: academic paper or utility patent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocKind {
    Paper,
    Patent,
}

impl fmt::Display for DocKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocKind::Paper => f.write_str("paper"),
            DocKind::Patent => f.write_str("patent"),
        }
    }
}

/// A person name as reported by the source database.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonName {
    pub first: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub middle: Option<String>,
    pub last: String,
}

impl PersonName {
    pub fn new(first: &str, middle: Option<&str>, last: &str) -> Self {
        PersonName {
            first: first.to_string(),
            middle: middle.map(str::to_string),
            last: last.to_string(),
        }
    }
}

/// One incoming citation with resolved citer genders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitingRecord {
    #[serde(rename = "id")]
    pub citing_doc_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_author_gender: Option<Gender>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_author_gender: Option<Gender>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub citing_author_ids: Vec<String>,
}

/// One abstract with its metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub kind: DocKind,
    pub text: String,
    /// Stratum label: WoS subject area or NBER subcategory.
    pub field: String,
    pub year: i32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub authors: Vec<PersonName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lawyer: Option<PersonName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cited_by: Vec<CitingRecord>,
    /// Resolved author (or inventor) gender; pre-coded in the input or
    /// filled in by the gender stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author_gender: Option<Gender>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lawyer_gender: Option<Gender>,
    /// Explicit author identifiers for self-citation exclusion; when absent,
    /// normalized full names are used instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author_ids: Option<Vec<String>>,
}

impl Document {
    pub fn resolved_gender(&self) -> Gender {
        self.author_gender.unwrap_or(Gender::Unknown)
    }
}

/// A record that failed validation, with its line number and reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedRecord {
    pub line: usize,
    pub reason: String,
}

/// Result of an ingest pass: documents, rejects, and non-fatal warnings.
#[derive(Debug, Default)]
pub struct IngestOutcome {
    pub docs: Vec<Document>,
    pub rejects: Vec<RejectedRecord>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("unsupported input extension for {0} (expected .jsonl or .csv)")]
    UnknownFormat(String),
}

const KNOWN_FIELDS: &[&str] = &[
    "id",
    "kind",
    "text",
    "field",
    "year",
    "authors",
    "lawyer",
    "language",
    "cited_by",
    "author_gender",
    "lawyer_gender",
    "author_ids",
];

/// Reads JSONL, one document per line. Blank lines are skipped; malformed
/// records become rejects; unknown top-level fields produce warnings and
/// are otherwise ignored.
pub fn ingest_jsonl<R: Read>(reader: R) -> Result<IngestOutcome, IngestError> {
    let mut out = IngestOutcome::default();
    let buf = BufReader::new(reader);
    for (i, line) in buf.lines().enumerate() {
        let line = line.map_err(|source| IngestError::Io {
            path: "<stream>".into(),
            source,
        })?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = match serde_json::from_str(&line) {
            Ok(v) => v,
            Err(e) => {
                out.rejects.push(RejectedRecord {
                    line: lineno,
                    reason: format!("invalid JSON: {e}"),
                });
                continue;
            }
        };
        if let Some(obj) = value.as_object() {
            for key in obj.keys() {
                if !KNOWN_FIELDS.contains(&key.as_str()) {
                    out.warnings
                        .push(format!("line {lineno}: ignoring unknown field '{key}'"));
                }
            }
        }
        match serde_json::from_value::<Document>(value) {
            Ok(doc) => out.docs.push(doc),
            Err(e) => out.rejects.push(RejectedRecord {
                line: lineno,
                reason: reject_reason(&e.to_string()),
            }),
        }
    }
    Ok(out)
}

fn reject_reason(serde_msg: &str) -> String {
    // serde_json reports "missing field `year` at line..."; keep the short form
    if let Some(rest) = serde_msg.strip_prefix("missing field `") {
        if let Some(field) = rest.split('`').next() {
            return format!("missing {field}");
        }
    }
    serde_msg.to_string()
}

/// Writes the canonical JSONL form, one document per line.
pub fn export_jsonl<W: Write>(docs: &[Document], mut writer: W) -> std::io::Result<()> {
    for doc in docs {
        serde_json::to_writer(&mut writer, doc)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

const CSV_HEADER: &[&str] = &[
    "id",
    "kind",
    "text",
    "field",
    "year",
    "author_first",
    "author_middle",
    "author_last",
    "author_gender",
    "lawyer_first",
    "lawyer_middle",
    "lawyer_last",
    "lawyer_gender",
    "language",
];

/// Reads the flat CSV form (single author, no citation lists).
pub fn ingest_csv<R: Read>(reader: R) -> Result<IngestOutcome, IngestError> {
    let mut out = IngestOutcome::default();
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| IngestError::Io {
            path: "<stream>".into(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        })?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    for (i, record) in rdr.records().enumerate() {
        let lineno = i + 2; // header is line 1
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                out.rejects.push(RejectedRecord {
                    line: lineno,
                    reason: format!("invalid CSV record: {e}"),
                });
                continue;
            }
        };
        let get = |name: &str| col(name).and_then(|j| record.get(j)).unwrap_or("");
        let mut missing = Vec::new();
        for required in ["id", "kind", "text", "field", "year"] {
            if get(required).is_empty() {
                missing.push(required);
            }
        }
        if !missing.is_empty() {
            out.rejects.push(RejectedRecord {
                line: lineno,
                reason: format!("missing {}", missing.join(", ")),
            });
            continue;
        }
        let kind = match get("kind") {
            "paper" => DocKind::Paper,
            "patent" => DocKind::Patent,
            other => {
                out.rejects.push(RejectedRecord {
                    line: lineno,
                    reason: format!("unknown kind '{other}'"),
                });
                continue;
            }
        };
        let year = match get("year").parse::<i32>() {
            Ok(y) => y,
            Err(_) => {
                out.rejects.push(RejectedRecord {
                    line: lineno,
                    reason: format!("invalid year '{}'", get("year")),
                });
                continue;
            }
        };
        let opt = |s: &str| {
            if s.is_empty() {
                None
            } else {
                Some(s.to_string())
            }
        };
        let authors = if get("author_first").is_empty() && get("author_last").is_empty() {
            Vec::new()
        } else {
            vec![PersonName {
                first: get("author_first").to_string(),
                middle: opt(get("author_middle")),
                last: get("author_last").to_string(),
            }]
        };
        let lawyer = if get("lawyer_first").is_empty() && get("lawyer_last").is_empty() {
            None
        } else {
            Some(PersonName {
                first: get("lawyer_first").to_string(),
                middle: opt(get("lawyer_middle")),
                last: get("lawyer_last").to_string(),
            })
        };
        let parse_gender = |s: &str| s.parse::<Gender>().ok();
        out.docs.push(Document {
            id: get("id").to_string(),
            kind,
            text: get("text").to_string(),
            field: get("field").to_string(),
            year,
            authors,
            lawyer,
            language: opt(get("language")),
            cited_by: Vec::new(),
            author_gender: parse_gender(get("author_gender")),
            lawyer_gender: parse_gender(get("lawyer_gender")),
            author_ids: None,
        });
    }
    Ok(out)
}

/// Writes the flat CSV form. Citation lists and extra authors are not
/// representable in CSV and are dropped.
pub fn export_csv<W: Write>(docs: &[Document], writer: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(CSV_HEADER)?;
    for doc in docs {
        let author = doc.authors.first();
        let blank = String::new();
        let field = |o: Option<&String>| o.cloned().unwrap_or_default();
        wtr.write_record([
            doc.id.as_str(),
            &doc.kind.to_string(),
            doc.text.as_str(),
            doc.field.as_str(),
            &doc.year.to_string(),
            author.map(|a| a.first.as_str()).unwrap_or(""),
            &field(author.and_then(|a| a.middle.as_ref())),
            author.map(|a| a.last.as_str()).unwrap_or(""),
            &doc.author_gender.map(|g| g.to_string()).unwrap_or_default(),
            doc.lawyer.as_ref().map(|l| l.first.as_str()).unwrap_or(""),
            &field(doc.lawyer.as_ref().and_then(|l| l.middle.as_ref())),
            doc.lawyer.as_ref().map(|l| l.last.as_str()).unwrap_or(""),
            &doc.lawyer_gender.map(|g| g.to_string()).unwrap_or_default(),
            doc.language.as_deref().unwrap_or(&blank),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Ingest with format chosen by file extension.
pub fn ingest_path(path: &Path) -> Result<IngestOutcome, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") | Some("json") => ingest_jsonl(file),
        Some("csv") => ingest_csv(file),
        _ => Err(IngestError::UnknownFormat(path.display().to_string())),
    }
}

/// Why a document was excluded from the analysis sample, in funnel order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DropReason {
    Language,
    Year,
    Team,
    Lawyer,
    WordCount,
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DropReason::Language => "LANGUAGE",
            DropReason::Year => "YEAR",
            DropReason::Team => "TEAM",
            DropReason::Lawyer => "LAWYER",
            DropReason::WordCount => "WORDCOUNT",
        };
        f.write_str(s)
    }
}

/// Sample-construction policy. `min_words` is a strict lower bound (a kept
/// abstract has *more than* `min_words` words).
#[derive(Debug, Clone, Serialize)]
pub struct FilterPolicy {
    pub min_words: usize,
    pub solo_only: bool,
    pub require_single_lawyer: bool,
    pub english_only: bool,
    pub allow_missing_language: bool,
    pub min_paper_year: Option<i32>,
    pub min_patent_year: Option<i32>,
}

impl Default for FilterPolicy {
    fn default() -> Self {
        FilterPolicy {
            min_words: 100,
            solo_only: false,
            require_single_lawyer: false,
            english_only: true,
            allow_missing_language: false,
            min_paper_year: None,
            min_patent_year: None,
        }
    }
}

impl FilterPolicy {
    /// The defaults used for the published samples: solo-authored,
    /// single-lawyer patents, papers from 1991 and patents from 1976.
    pub fn strict_defaults() -> Self {
        FilterPolicy {
            solo_only: true,
            require_single_lawyer: true,
            min_paper_year: Some(1991),
            min_patent_year: Some(1976),
            ..FilterPolicy::default()
        }
    }

    /// Checks one document, returning the first failing reason if any.
    pub fn evaluate(&self, doc: &Document) -> Option<DropReason> {
        match (&doc.language, self.english_only, self.allow_missing_language) {
            (_, false, _) => {}
            (Some(lang), true, _) if lang.eq_ignore_ascii_case("en") => {}
            (None, true, true) => {}
            _ => return Some(DropReason::Language),
        }
        let min_year = match doc.kind {
            DocKind::Paper => self.min_paper_year,
            DocKind::Patent => self.min_patent_year,
        };
        if let Some(min) = min_year {
            if doc.year < min {
                return Some(DropReason::Year);
            }
        }
        if self.solo_only && doc.authors.len() != 1 {
            return Some(DropReason::Team);
        }
        if self.require_single_lawyer && doc.kind == DocKind::Patent && doc.lawyer.is_none() {
            return Some(DropReason::Lawyer);
        }
        if tokenizer::word_count(&tokenizer::tokenize(&doc.text)) <= self.min_words {
            return Some(DropReason::WordCount);
        }
        None
    }
}

/// Documents kept and dropped by [`filter_corpus`], with per-reason counts.
#[derive(Debug, Default)]
pub struct FilterOutcome {
    pub kept: Vec<Document>,
    pub dropped: Vec<(Document, DropReason)>,
}

impl FilterOutcome {
    /// Exclusion counts by reason, in funnel order.
    pub fn funnel(&self) -> BTreeMap<DropReason, usize> {
        let mut map = BTreeMap::new();
        for (_, reason) in &self.dropped {
            *map.entry(*reason).or_insert(0) += 1;
        }
        map
    }
}

/// Applies the policy to every document. All exclusions are categorized;
/// nothing is silently dropped.
pub fn filter_corpus(docs: Vec<Document>, policy: &FilterPolicy) -> FilterOutcome {
    let mut out = FilterOutcome::default();
    for doc in docs {
        match policy.evaluate(&doc) {
            None => out.kept.push(doc),
            Some(reason) => out.dropped.push((doc, reason)),
        }
    }
    out
}

/// One female document paired with one male document from the same
/// (field, year) stratum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub female_id: String,
    pub male_id: String,
    pub field: String,
    pub year: i32,
}

/// Output of [`match_sample`].
#[derive(Debug, Default)]
pub struct MatchOutcome {
    pub pairs: Vec<MatchedPair>,
    /// Female documents for which no unmatched male was available.
    pub unmatched_female: Vec<String>,
    /// Documents excluded because their author gender is unknown.
    pub skipped_unknown: usize,
}

/// Pairs each female document with a seeded uniformly-random unmatched male
/// document from the same (field, year) stratum, without replacement.
///
/// Strata are processed in sorted order and every stratum draws from its own
/// seed stream, so the output is byte-identical for a given seed regardless
/// of input order or thread count.
pub fn match_sample(docs: &[Document], seed: u64) -> MatchOutcome {
    type StratumDocs<'d> = (Vec<&'d Document>, Vec<&'d Document>);
    let mut out = MatchOutcome::default();
    let mut strata: BTreeMap<(String, i32), StratumDocs> = BTreeMap::new();
    for doc in docs {
        match doc.resolved_gender() {
            Gender::Female => {
                strata
                    .entry((doc.field.clone(), doc.year))
                    .or_default()
                    .0
                    .push(doc);
            }
            Gender::Male => {
                strata
                    .entry((doc.field.clone(), doc.year))
                    .or_default()
                    .1
                    .push(doc);
            }
            Gender::Unknown => out.skipped_unknown += 1,
        }
    }
    for ((field, year), (mut females, mut males)) in strata {
        females.sort_by(|a, b| a.id.cmp(&b.id));
        males.sort_by(|a, b| a.id.cmp(&b.id));
        let mut rng = ChaCha8Rng::seed_from_u64(stratum_seed(seed, &field, year));
        for female in females {
            if males.is_empty() {
                out.unmatched_female.push(female.id.clone());
                continue;
            }
            let pick = rng.gen_range(0..males.len());
            let male = males.swap_remove(pick);
            out.pairs.push(MatchedPair {
                female_id: female.id.clone(),
                male_id: male.id.clone(),
                field: field.clone(),
                year,
            });
        }
    }
    out
}

/// Mixes the master seed with the stratum key (FNV-1a then splitmix64) so
/// strata can be processed in any order without changing their draws.
fn stratum_seed(master: u64, field: &str, year: i32) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in field.as_bytes() {
        h = (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    for b in year.to_le_bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(master ^ h)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, field: &str, year: i32, gender: Gender) -> Document {
        Document {
            id: id.into(),
            kind: DocKind::Paper,
            text: "word ".repeat(150),
            field: field.into(),
            year,
            authors: vec![PersonName::new("A", None, "B")],
            lawyer: None,
            language: Some("en".into()),
            cited_by: Vec::new(),
            author_gender: Some(gender),
            lawyer_gender: None,
            author_ids: None,
        }
    }

    #[test]
    fn jsonl_reject_reports_missing_year() {
        let input = concat!(
            r#"{"id":"a","kind":"paper","text":"t","field":"Bio","year":2000}"#,
            "\n",
            r#"{"id":"b","kind":"paper","text":"t","field":"Bio"}"#,
            "\n",
            r#"{"id":"c","kind":"patent","text":"t","field":"Mech","year":2001}"#,
            "\n"
        );
        let out = ingest_jsonl(input.as_bytes()).unwrap();
        assert_eq!(out.docs.len(), 2);
        assert_eq!(out.rejects.len(), 1);
        assert_eq!(out.rejects[0].line, 2);
        assert!(out.rejects[0].reason.contains("missing year"), "{}", out.rejects[0].reason);
    }

    #[test]
    fn empty_file_is_empty_outcome() {
        let out = ingest_jsonl(&b""[..]).unwrap();
        assert!(out.docs.is_empty());
        assert!(out.rejects.is_empty());
    }

    #[test]
    fn unknown_fields_warn_but_parse() {
        let input = r#"{"id":"a","kind":"paper","text":"t","field":"Bio","year":2000,"extra":1}"#;
        let out = ingest_jsonl(input.as_bytes()).unwrap();
        assert_eq!(out.docs.len(), 1);
        assert_eq!(out.warnings.len(), 1);
        assert!(out.warnings[0].contains("extra"));
    }

    #[test]
    fn jsonl_round_trip() {
        let mut d = doc("a", "Bio", 2000, Gender::Female);
        d.cited_by = vec![CitingRecord {
            citing_doc_id: "z".into(),
            first_author_gender: Some(Gender::Male),
            last_author_gender: None,
            citing_author_ids: vec!["auth1".into()],
        }];
        d.lawyer = Some(PersonName::new("Jo", Some("Q"), "Smith"));
        let docs = vec![d, doc("b", "Phys", 1999, Gender::Unknown)];
        let mut buf = Vec::new();
        export_jsonl(&docs, &mut buf).unwrap();
        let back = ingest_jsonl(buf.as_slice()).unwrap();
        assert!(back.rejects.is_empty());
        assert_eq!(back.docs, docs);
    }

    #[test]
    fn csv_round_trip_flat() {
        let docs = vec![doc("a", "Bio", 2000, Gender::Female)];
        let mut buf = Vec::new();
        export_csv(&docs, &mut buf).unwrap();
        let back = ingest_csv(buf.as_slice()).unwrap();
        assert_eq!(back.docs, docs);
    }

    #[test]
    fn csv_rejects_carry_line_numbers() {
        let input = "id,kind,text,field,year\n\
                     a,paper,t,Bio,2000\n\
                     b,paper,t,Bio,not-a-year\n\
                     c,magazine,t,Bio,2001\n\
                     ,paper,t,Bio,2002\n";
        let out = ingest_csv(input.as_bytes()).unwrap();
        assert_eq!(out.docs.len(), 1);
        let reasons: Vec<(usize, &str)> = out
            .rejects
            .iter()
            .map(|r| (r.line, r.reason.as_str()))
            .collect();
        assert_eq!(reasons.len(), 3);
        assert_eq!(reasons[0].0, 3);
        assert!(reasons[0].1.contains("invalid year"));
        assert!(reasons[1].1.contains("unknown kind"));
        assert!(reasons[2].1.contains("missing id"));
    }

    #[test]
    fn filter_drops_short_abstracts() {
        let mut short = doc("s", "Bio", 2000, Gender::Female);
        short.text = "word ".repeat(99);
        let kept_doc = doc("k", "Bio", 2000, Gender::Female);
        let out = filter_corpus(vec![short, kept_doc], &FilterPolicy::default());
        assert_eq!(out.kept.len(), 1);
        assert_eq!(out.kept[0].id, "k");
        assert_eq!(out.dropped.len(), 1);
        assert_eq!(out.dropped[0].1, DropReason::WordCount);
    }

    #[test]
    fn exactly_min_words_is_dropped() {
        let mut d = doc("s", "Bio", 2000, Gender::Female);
        d.text = "word ".repeat(100);
        let out = filter_corpus(vec![d], &FilterPolicy::default());
        assert_eq!(out.dropped.len(), 1, "100 words is not more than 100");
    }

    #[test]
    fn filter_drops_teams_when_solo_only() {
        let mut team = doc("t", "Bio", 2000, Gender::Female);
        team.authors.push(PersonName::new("C", None, "D"));
        let policy = FilterPolicy {
            solo_only: true,
            ..FilterPolicy::default()
        };
        let out = filter_corpus(vec![team], &policy);
        assert_eq!(out.dropped[0].1, DropReason::Team);
    }

    #[test]
    fn filter_checks_language_and_year_and_lawyer() {
        let mut nolang = doc("l", "Bio", 2000, Gender::Female);
        nolang.language = None;
        let mut old = doc("y", "Bio", 1985, Gender::Female);
        old.language = Some("en".into());
        let mut patent = doc("p", "Mech", 2000, Gender::Female);
        patent.kind = DocKind::Patent;
        patent.lawyer = None;
        let policy = FilterPolicy {
            require_single_lawyer: true,
            min_paper_year: Some(1991),
            ..FilterPolicy::default()
        };
        let out = filter_corpus(vec![nolang, old, patent], &policy);
        let reasons: Vec<DropReason> = out.dropped.iter().map(|(_, r)| *r).collect();
        assert_eq!(
            reasons,
            vec![DropReason::Language, DropReason::Year, DropReason::Lawyer]
        );
    }

    #[test]
    fn filter_is_idempotent() {
        let docs = vec![doc("a", "Bio", 2000, Gender::Female), doc("b", "Bio", 2000, Gender::Male)];
        let policy = FilterPolicy::default();
        let once = filter_corpus(docs, &policy);
        let twice = filter_corpus(once.kept.clone(), &policy);
        assert_eq!(once.kept, twice.kept);
        assert!(twice.dropped.is_empty());
    }

    #[test]
    fn match_three_females_five_males() {
        let mut docs = Vec::new();
        for i in 0..3 {
            docs.push(doc(&format!("f{i}"), "Bio", 2000, Gender::Female));
        }
        for i in 0..5 {
            docs.push(doc(&format!("m{i}"), "Bio", 2000, Gender::Male));
        }
        let out = match_sample(&docs, 42);
        assert_eq!(out.pairs.len(), 3);
        assert!(out.unmatched_female.is_empty());
        let mut males: Vec<&str> = out.pairs.iter().map(|p| p.male_id.as_str()).collect();
        males.sort_unstable();
        males.dedup();
        assert_eq!(males.len(), 3, "matching is one-to-one");
    }

    #[test]
    fn match_reports_unmatched_females() {
        let mut docs = Vec::new();
        for i in 0..4 {
            docs.push(doc(&format!("f{i}"), "Bio", 2000, Gender::Female));
        }
        for i in 0..2 {
            docs.push(doc(&format!("m{i}"), "Bio", 2000, Gender::Male));
        }
        let out = match_sample(&docs, 7);
        assert_eq!(out.pairs.len(), 2);
        assert_eq!(out.unmatched_female.len(), 2);
    }

    #[test]
    fn match_is_seed_deterministic_and_order_insensitive() {
        let mut docs = Vec::new();
        for i in 0..10 {
            docs.push(doc(&format!("f{i}"), "Bio", 2000, Gender::Female));
            docs.push(doc(&format!("m{i}"), "Bio", 2000, Gender::Male));
            docs.push(doc(&format!("g{i}"), "Phys", 2001, Gender::Female));
            docs.push(doc(&format!("n{i}"), "Phys", 2001, Gender::Male));
        }
        let a = match_sample(&docs, 42);
        docs.reverse();
        let b = match_sample(&docs, 42);
        assert_eq!(a.pairs, b.pairs);
        let c = match_sample(&docs, 43);
        assert_ne!(a.pairs, c.pairs, "different seed should reshuffle some pair");
    }

    #[test]
    fn unknown_gender_documents_are_skipped() {
        let docs = vec![
            doc("f0", "Bio", 2000, Gender::Female),
            doc("m0", "Bio", 2000, Gender::Male),
            doc("u0", "Bio", 2000, Gender::Unknown),
        ];
        let out = match_sample(&docs, 1);
        assert_eq!(out.pairs.len(), 1);
        assert_eq!(out.skipped_unknown, 1);
    }

    #[test]
    fn strata_never_mix() {
        let docs = vec![
            doc("f0", "Bio", 2000, Gender::Female),
            doc("m0", "Bio", 2001, Gender::Male),
            doc("m1", "Phys", 2000, Gender::Male),
        ];
        let out = match_sample(&docs, 1);
        assert!(out.pairs.is_empty());
        assert_eq!(out.unmatched_female, vec!["f0".to_string()]);
    }
}
