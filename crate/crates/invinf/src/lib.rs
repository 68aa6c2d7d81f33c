//! Stylometric analysis of formal abstracts along the involved/informational
//! dimension, plus the sampling and regression machinery needed to relate
//! style to author gender and citation patterns.
//!
//! The crate is organized as a pipeline:
//!
//! * [`tokenizer`] — deterministic token stream over raw abstract text
//! * [`tagger`] — rule-based assignment of the six feature classes
//! * [`stylometry`] — feature counts and the involved/informational rates
//! * [`corpus`] — document ingestion, filtering, and gender-matched sampling
//! * [`gender`] — name-based gender assignment with cache and propagation
//! * [`citation`] — per-document citation decomposition by citer gender
//! * [`stats`] — OLS with fixed effects, HC1 robust errors, VIFs, margins
//! * [`synth`] — synthetic corpora with known ground truth for testing

pub mod citation;
pub mod corpus;
pub mod gender;
pub mod stats;
pub mod stylometry;
pub mod synth;
pub mod tagger;
pub mod tokenizer;
