//! Name-based gender assignment.
//!
//! Given a first (+ middle) name, a lookup backend returns the most likely
//! gender and a probability; results below the cutoff (default 0.9) are set
//! to unknown. Lookups go through a persistent append-only cache, and
//! unknown initials-only names can later be filled in by propagating a
//! known gender across a same-author group ("J. Smith" / "John Smith").

use crate::corpus::{Gender, PersonName};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

/// Where an assignment came from. The two terminal unknown states —
/// initials-only names (never looked up) and transient provider failures
/// (retryable, never cached) — get their own markers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AssignmentSource {
    ExternalApi,
    LocalLexicon,
    Propagated,
    CutoffRejected,
    InitialsOnly,
    ProviderUnavailable,
}

impl AssignmentSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            AssignmentSource::ExternalApi => "EXTERNAL_API",
            AssignmentSource::LocalLexicon => "LOCAL_LEXICON",
            AssignmentSource::Propagated => "PROPAGATED",
            AssignmentSource::CutoffRejected => "CUTOFF_REJECTED",
            AssignmentSource::InitialsOnly => "INITIALS_ONLY",
            AssignmentSource::ProviderUnavailable => "PROVIDER_UNAVAILABLE",
        }
    }
}

impl fmt::Display for AssignmentSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AssignmentSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "EXTERNAL_API" => Ok(AssignmentSource::ExternalApi),
            "LOCAL_LEXICON" => Ok(AssignmentSource::LocalLexicon),
            "PROPAGATED" => Ok(AssignmentSource::Propagated),
            "CUTOFF_REJECTED" => Ok(AssignmentSource::CutoffRejected),
            "INITIALS_ONLY" => Ok(AssignmentSource::InitialsOnly),
            "PROVIDER_UNAVAILABLE" => Ok(AssignmentSource::ProviderUnavailable),
            other => Err(format!("unknown assignment source '{other}'")),
        }
    }
}

/// Resolved gender for one normalized name. A non-unknown gender always
/// carries a probability at or above the cutoff it was resolved under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenderAssignment {
    pub name_key: String,
    pub gender: Gender,
    pub probability: f64,
    pub source: AssignmentSource,
}

/// Raw backend response before the cutoff is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProviderReply {
    pub gender: Gender,
    pub probability: f64,
}

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("provider transport failure: {0}")]
    Transport(String),
    #[error("malformed provider response: {0}")]
    Malformed(String),
}

/// A lookup backend. The request carries the normalized first (+ middle)
/// name; the transport is up to the implementation.
pub trait GenderProvider: Sync {
    fn source(&self) -> AssignmentSource;
    fn lookup(&self, name_key: &str) -> Result<ProviderReply, ProviderError>;
}

/// Normalized first (+ middle) key used for lookups, caching, and merging:
/// NFC, lowercased, whitespace collapsed.
pub fn name_key(name: &PersonName) -> String {
    let mut composed = name.first.clone();
    if let Some(middle) = &name.middle {
        composed.push(' ');
        composed.push_str(middle);
    }
    normalize(&composed)
}

fn normalize(s: &str) -> String {
    s.nfc()
        .collect::<String>()
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// True when the first name carries no usable given name: every alphabetic
/// run is a single letter ("J.", "J.-P.", "A B"). Such names are set to
/// unknown without any lookup.
pub fn is_initials_only(first: &str) -> bool {
    let mut run = 0usize;
    for c in first.chars() {
        if c.is_alphabetic() {
            run += 1;
            if run > 1 {
                return false;
            }
        } else {
            run = 0;
        }
    }
    true
}

/// Offline name table; doubles as the test backend.
pub struct LexiconProvider {
    table: HashMap<String, (Gender, f64)>,
}

const BUILTIN_NAMES: &str = include_str!("../data/names.tsv");

impl LexiconProvider {
    pub fn builtin() -> &'static LexiconProvider {
        static TABLE: OnceLock<LexiconProvider> = OnceLock::new();
        TABLE.get_or_init(|| LexiconProvider::parse(BUILTIN_NAMES).expect("builtin name table"))
    }

    pub fn from_path(path: &Path) -> Result<LexiconProvider, ProviderError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        LexiconProvider::parse(&src)
    }

    pub fn parse(src: &str) -> Result<LexiconProvider, ProviderError> {
        let mut table = HashMap::new();
        for (i, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let (name, gender, prob) = (parts.next(), parts.next(), parts.next());
            match (name, gender, prob) {
                (Some(n), Some(g), Some(p)) => {
                    let gender: Gender = g
                        .trim()
                        .parse()
                        .map_err(|e: String| ProviderError::Malformed(format!("line {}: {e}", i + 1)))?;
                    let prob: f64 = p.trim().parse().map_err(|_| {
                        ProviderError::Malformed(format!("line {}: bad probability '{p}'", i + 1))
                    })?;
                    table.insert(normalize(n), (gender, prob));
                }
                _ => {
                    return Err(ProviderError::Malformed(format!(
                        "line {}: expected name<TAB>gender<TAB>probability",
                        i + 1
                    )))
                }
            }
        }
        Ok(LexiconProvider { table })
    }
}

impl GenderProvider for LexiconProvider {
    fn source(&self) -> AssignmentSource {
        AssignmentSource::LocalLexicon
    }

    fn lookup(&self, name_key: &str) -> Result<ProviderReply, ProviderError> {
        // exact key first, then the bare first name
        let hit = self.table.get(name_key).or_else(|| {
            name_key
                .split_whitespace()
                .next()
                .and_then(|first| self.table.get(first))
        });
        Ok(match hit {
            Some(&(gender, probability)) => ProviderReply {
                gender,
                probability,
            },
            None => ProviderReply {
                gender: Gender::Unknown,
                probability: 0.0,
            },
        })
    }
}

/// HTTP backend speaking the genderize.io wire shape:
/// `GET {base}?name=<first>` returning `{"gender": ..., "probability": ...}`.
pub struct HttpProvider {
    client: reqwest::blocking::Client,
    base_url: String,
}

#[derive(Deserialize)]
struct WireReply {
    gender: Option<String>,
    probability: Option<f64>,
}

impl HttpProvider {
    pub fn new(base_url: &str) -> HttpProvider {
        HttpProvider {
            client: reqwest::blocking::Client::new(),
            base_url: base_url.trim_end_matches('/').to_string(),
        }
    }

    pub(crate) fn parse_wire(body: &str) -> Result<ProviderReply, ProviderError> {
        let wire: WireReply =
            serde_json::from_str(body).map_err(|e| ProviderError::Malformed(e.to_string()))?;
        let gender = match wire.gender.as_deref() {
            Some("female") | Some("f") | Some("F") => Gender::Female,
            Some("male") | Some("m") | Some("M") => Gender::Male,
            None | Some("") => Gender::Unknown,
            Some(other) => {
                return Err(ProviderError::Malformed(format!(
                    "unrecognized gender value '{other}'"
                )))
            }
        };
        Ok(ProviderReply {
            gender,
            probability: wire.probability.unwrap_or(0.0),
        })
    }
}

impl GenderProvider for HttpProvider {
    fn source(&self) -> AssignmentSource {
        AssignmentSource::ExternalApi
    }

    fn lookup(&self, name_key: &str) -> Result<ProviderReply, ProviderError> {
        let resp = self
            .client
            .get(&self.base_url)
            .query(&[("name", name_key)])
            .send()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        let body = resp
            .text()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        HttpProvider::parse_wire(&body)
    }
}

/// Append-only lookup cache, keyed by normalized name. Entries never expire;
/// `refresh` in [`assign`] bypasses reads but still records the new result.
///
/// File format: `name_key<TAB>gender<TAB>probability<TAB>source`, UTF-8, LF.
pub struct GenderCache {
    entries: HashMap<String, GenderAssignment>,
    writer: Option<Mutex<BufWriter<File>>>,
}

impl GenderCache {
    pub fn in_memory() -> GenderCache {
        GenderCache {
            entries: HashMap::new(),
            writer: None,
        }
    }

    /// Opens (creating if needed) a cache file and loads existing entries.
    pub fn open(path: &Path) -> std::io::Result<GenderCache> {
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for line in reader.lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let parts: Vec<&str> = line.split('\t').collect();
                if parts.len() != 4 {
                    return Err(std::io::Error::new(
                        std::io::ErrorKind::InvalidData,
                        format!("malformed cache line: {line}"),
                    ));
                }
                let parse = || -> Result<GenderAssignment, String> {
                    Ok(GenderAssignment {
                        name_key: parts[0].to_string(),
                        gender: parts[1].parse()?,
                        probability: parts[2].parse().map_err(|e| format!("{e}"))?,
                        source: parts[3].parse()?,
                    })
                };
                let a = parse().map_err(|e| {
                    std::io::Error::new(std::io::ErrorKind::InvalidData, e)
                })?;
                entries.insert(a.name_key.clone(), a);
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(GenderCache {
            entries,
            writer: Some(Mutex::new(BufWriter::new(file))),
        })
    }

    pub fn get(&self, key: &str) -> Option<&GenderAssignment> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn put(&mut self, assignment: GenderAssignment) -> std::io::Result<()> {
        if let Some(writer) = &self.writer {
            let mut w = writer.lock().expect("cache writer poisoned");
            writeln!(
                w,
                "{}\t{}\t{}\t{}",
                assignment.name_key,
                assignment.gender,
                assignment.probability,
                assignment.source
            )?;
            w.flush()?;
        }
        self.entries
            .insert(assignment.name_key.clone(), assignment);
        Ok(())
    }
}

/// Resolves one name. Initials-only names are unknown without a lookup;
/// cached entries are returned verbatim; below-cutoff replies are unknown
/// with `CUTOFF_REJECTED`; provider failures are unknown with the
/// retryable `PROVIDER_UNAVAILABLE` marker and are never cached.
///
/// `cutoff` must lie in (0, 1].
pub fn assign(
    name: &PersonName,
    cutoff: f64,
    provider: &dyn GenderProvider,
    cache: &mut GenderCache,
    refresh: bool,
) -> GenderAssignment {
    assert!(cutoff > 0.0 && cutoff <= 1.0, "cutoff must be in (0, 1]");
    let key = name_key(name);
    if is_initials_only(&name.first) {
        return GenderAssignment {
            name_key: key,
            gender: Gender::Unknown,
            probability: 0.0,
            source: AssignmentSource::InitialsOnly,
        };
    }
    if !refresh {
        if let Some(hit) = cache.get(&key) {
            return hit.clone();
        }
    }
    let assignment = match provider.lookup(&key) {
        Ok(reply) => {
            let accepted = reply.gender != Gender::Unknown && reply.probability >= cutoff;
            GenderAssignment {
                name_key: key.clone(),
                gender: if accepted { reply.gender } else { Gender::Unknown },
                probability: reply.probability,
                source: if accepted {
                    provider.source()
                } else {
                    AssignmentSource::CutoffRejected
                },
            }
        }
        Err(_) => {
            return GenderAssignment {
                name_key: key,
                gender: Gender::Unknown,
                probability: 0.0,
                source: AssignmentSource::ProviderUnavailable,
            }
        }
    };
    let _ = cache.put(assignment.clone());
    assignment
}

/// Resolves a batch of names with at most `concurrency` simultaneous
/// provider lookups. Results are merged deterministically by name key, and
/// cache writes happen in key order after the lookups complete.
pub fn resolve_batch(
    names: &[PersonName],
    cutoff: f64,
    provider: &dyn GenderProvider,
    cache: &mut GenderCache,
    refresh: bool,
    concurrency: usize,
) -> BTreeMap<String, GenderAssignment> {
    assert!(cutoff > 0.0 && cutoff <= 1.0, "cutoff must be in (0, 1]");
    let concurrency = concurrency.max(1);
    let mut resolved: BTreeMap<String, GenderAssignment> = BTreeMap::new();
    let mut pending: BTreeMap<String, ()> = BTreeMap::new();

    for name in names {
        let key = name_key(name);
        if resolved.contains_key(&key) || pending.contains_key(&key) {
            continue;
        }
        if is_initials_only(&name.first) {
            resolved.insert(
                key.clone(),
                GenderAssignment {
                    name_key: key,
                    gender: Gender::Unknown,
                    probability: 0.0,
                    source: AssignmentSource::InitialsOnly,
                },
            );
            continue;
        }
        if !refresh {
            if let Some(hit) = cache.get(&key) {
                resolved.insert(key, hit.clone());
                continue;
            }
        }
        pending.insert(key, ());
    }

    let keys: Vec<String> = pending.into_keys().collect();
    let mut replies: BTreeMap<String, Result<ProviderReply, ProviderError>> = BTreeMap::new();
    if !keys.is_empty() {
        let chunk = keys.len().div_ceil(concurrency);
        let results = Mutex::new(Vec::new());
        std::thread::scope(|scope| {
            for batch in keys.chunks(chunk) {
                let results = &results;
                scope.spawn(move || {
                    let local: Vec<(String, Result<ProviderReply, ProviderError>)> = batch
                        .iter()
                        .map(|k| (k.clone(), provider.lookup(k)))
                        .collect();
                    results.lock().expect("results poisoned").extend(local);
                });
            }
        });
        for (k, r) in results.into_inner().expect("results poisoned") {
            replies.insert(k, r);
        }
    }

    for (key, reply) in replies {
        let assignment = match reply {
            Ok(reply) => {
                let accepted = reply.gender != Gender::Unknown && reply.probability >= cutoff;
                let a = GenderAssignment {
                    name_key: key.clone(),
                    gender: if accepted { reply.gender } else { Gender::Unknown },
                    probability: reply.probability,
                    source: if accepted {
                        provider.source()
                    } else {
                        AssignmentSource::CutoffRejected
                    },
                };
                let _ = cache.put(a.clone());
                a
            }
            Err(_) => GenderAssignment {
                name_key: key.clone(),
                gender: Gender::Unknown,
                probability: 0.0,
                source: AssignmentSource::ProviderUnavailable,
            },
        };
        resolved.insert(key, assignment);
    }
    resolved
}

/// One document-level occurrence of an author name, for propagation.
#[derive(Debug, Clone)]
pub struct NameOccurrence {
    pub doc_id: String,
    /// Explicit author identifier; overrides the name-based grouping key.
    pub author_id: Option<String>,
    pub name: PersonName,
    pub assignment: GenderAssignment,
}

impl NameOccurrence {
    fn group_key(&self) -> String {
        match &self.author_id {
            Some(id) => format!("id:{id}"),
            None => {
                let initial = self
                    .name
                    .first
                    .chars()
                    .find(|c| c.is_alphabetic())
                    .map(|c| c.to_lowercase().to_string())
                    .unwrap_or_default();
                format!("name:{}|{}", normalize(&self.name.last), initial)
            }
        }
    }
}

/// Outcome of a propagation pass.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct PropagationReport {
    pub promoted: usize,
    /// Groups whose full-name assignments disagree; left untouched.
    pub conflicted_groups: Vec<String>,
}

/// Fills in initials-only unknowns from same-author full-name assignments.
/// A group donates only when all its non-unknown assignments agree; a
/// conflicted group is flagged and left as-is. Assignments never flip from
/// one known gender to another.
pub fn propagate(occurrences: &mut [NameOccurrence]) -> PropagationReport {
    let mut report = PropagationReport::default();
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, occ) in occurrences.iter().enumerate() {
        groups.entry(occ.group_key()).or_default().push(i);
    }
    for (key, members) in groups {
        let mut donor: Option<(Gender, f64)> = None;
        let mut conflict = false;
        for &i in &members {
            let a = &occurrences[i].assignment;
            if a.gender == Gender::Unknown || a.source == AssignmentSource::Propagated {
                continue;
            }
            match donor {
                None => donor = Some((a.gender, a.probability)),
                Some((g, _)) if g != a.gender => {
                    conflict = true;
                    break;
                }
                Some(_) => {}
            }
        }
        if conflict {
            report.conflicted_groups.push(key);
            continue;
        }
        let Some((gender, probability)) = donor else {
            continue;
        };
        for &i in &members {
            let occ = &mut occurrences[i];
            if occ.assignment.gender == Gender::Unknown && is_initials_only(&occ.name.first) {
                occ.assignment = GenderAssignment {
                    name_key: occ.assignment.name_key.clone(),
                    gender,
                    probability,
                    source: AssignmentSource::Propagated,
                };
                report.promoted += 1;
            }
        }
    }
    report
}
