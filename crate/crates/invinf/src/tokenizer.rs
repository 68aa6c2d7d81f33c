//! Deterministic tokenizer for abstract text.
//!
//! Every downstream count is defined over this token stream, so the rules
//! here are deliberately small and stable: split on whitespace, peel
//! punctuation off span edges, keep hyphenated compounds and dotted
//! abbreviations intact, and classify bare numerals.

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

/// Lexical class of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    Number,
    Punct,
}

/// One surface token. Indices are consecutive from 0 within a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub index: usize,
    pub kind: TokenKind,
}

impl Token {
    pub fn is_word_like(&self) -> bool {
        matches!(self.kind, TokenKind::Word | TokenKind::Number)
    }
}

/// Splits text into tokens. Empty input yields an empty sequence.
///
/// Rules, in order:
/// * NFC normalization; curly quotes mapped to straight quotes.
/// * Whitespace separates spans; whitespace itself is dropped.
/// * Leading punctuation (brackets, quotes, currency signs) is peeled off
///   as single-character `Punct` tokens, so "$100" becomes `$` + `100`.
/// * Trailing punctuation is peeled the same way, except a final period
///   stays attached to dotted abbreviations ("i.e.", "U.S.").
/// * Hyphenated compounds ("scrip-dividend") remain single tokens, as do
///   words with internal symbols ("S&P", "don't").
/// * A remaining span matching the cardinal-literal grammar (digits with
///   optional thousands separators and decimal point) is a `Number`;
///   anything else is a `Word`.
pub fn tokenize(text: &str) -> Vec<Token> {
    let normalized: String = text.nfc().map(map_quote).collect();
    let mut tokens = Vec::new();
    for span in normalized.split_whitespace() {
        split_span(span, &mut tokens);
    }
    for (i, tok) in tokens.iter_mut().enumerate() {
        tok.index = i;
    }
    tokens
}

/// Number of `Word` and `Number` tokens; the corpus word-count filter is
/// defined over this, not over the full token count.
pub fn word_count(tokens: &[Token]) -> usize {
    tokens.iter().filter(|t| t.is_word_like()).count()
}

/// Reassembles the surface text with single spaces (whitespace is the only
/// information `tokenize` discards).
pub fn join_surfaces(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

fn map_quote(c: char) -> char {
    match c {
        '\u{2018}' | '\u{2019}' => '\'',
        '\u{201C}' | '\u{201D}' => '"',
        _ => c,
    }
}

fn is_core_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn split_span(span: &str, out: &mut Vec<Token>) {
    let chars: Vec<char> = span.chars().collect();
    let mut start = 0;
    let mut end = chars.len();

    while start < end && !is_core_char(chars[start]) {
        start += 1;
    }
    while end > start {
        let c = chars[end - 1];
        if is_core_char(c) {
            break;
        }
        if c == '.' && keeps_trailing_period(&chars[start..end - 1]) {
            break;
        }
        end -= 1;
    }

    for &c in &chars[..start] {
        out.push(punct(c));
    }
    if start < end {
        let core: String = chars[start..end].iter().collect();
        let kind = if is_cardinal_literal(&core) {
            TokenKind::Number
        } else {
            TokenKind::Word
        };
        out.push(Token {
            surface: core,
            index: 0,
            kind,
        });
    }
    for &c in &chars[end..] {
        out.push(punct(c));
    }
}

/// Dotted abbreviations ("i.e.", "U.S.") keep their final period; anything
/// else — including decimal numbers at sentence end — has it split off.
fn keeps_trailing_period(rest: &[char]) -> bool {
    rest.contains(&'.') && rest.iter().any(|c| c.is_alphabetic())
}

fn punct(c: char) -> Token {
    Token {
        surface: c.to_string(),
        index: 0,
        kind: TokenKind::Punct,
    }
}

/// Cardinal literal: digits with optional comma thousands-grouping and an
/// optional decimal part. Ordinal suffixes and sign characters disqualify.
pub fn is_cardinal_literal(s: &str) -> bool {
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit() || c == ',' || c == '.') {
        return false;
    }
    if !s.chars().any(|c| c.is_ascii_digit()) {
        return false;
    }
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    if let Some(f) = frac_part {
        if f.is_empty() || !f.chars().all(|c| c.is_ascii_digit()) || f.contains('.') {
            return false;
        }
    }
    if int_part.is_empty() {
        return false;
    }
    if int_part.contains(',') {
        let groups: Vec<&str> = int_part.split(',').collect();
        if groups[0].is_empty() || groups[0].len() > 3 {
            return false;
        }
        if !groups[0].chars().all(|c| c.is_ascii_digit()) {
            return false;
        }
        groups[1..]
            .iter()
            .all(|g| g.len() == 3 && g.chars().all(|c| c.is_ascii_digit()))
    } else {
        int_part.chars().all(|c| c.is_ascii_digit())
    }
}
