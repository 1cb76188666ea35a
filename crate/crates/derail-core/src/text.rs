//! Tokenization and idiom merging.
//!
//! The tokenizer splits a message into maximal runs of alphanumeric
//! characters and maximal runs of non-alphanumeric, non-whitespace
//! characters, case-folding as it goes. `mark_idioms` then collapses
//! contiguous token sequences that match a lexicon idiom into single tokens
//! so that multiword expressions like "give up" are scored as one unit.

use crate::lexicon::FusedLexicon;

/// A single token with its character span in the source text.
///
/// Spans are `(start, end)` character offsets (end exclusive) and are
/// strictly increasing across a token list. For idiom tokens produced by
/// [`mark_idioms`], `text` is the space-joined sequence of merged tokens and
/// the span covers the first through last merged token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub span: (usize, usize),
    pub is_idiom: bool,
}

impl Token {
    /// True when the token contains no alphanumeric character at all
    /// (pure punctuation or symbols).
    pub fn is_punctuation(&self) -> bool {
        !self.text.chars().any(|c| c.is_alphanumeric())
    }
}

/// Split `text` into case-folded tokens.
///
/// A token is either a maximal run of alphanumeric characters or a maximal
/// run of non-alphanumeric, non-whitespace characters. Whitespace only
/// separates tokens and is never part of one.
pub fn tokenize(text: &str) -> Vec<Token> {
    #[derive(PartialEq, Clone, Copy)]
    enum Kind {
        Word,
        Punct,
    }

    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut start = 0usize;
    let mut kind = Kind::Word;

    let flush = |tokens: &mut Vec<Token>, current: &mut String, start: usize, end: usize| {
        if !current.is_empty() {
            tokens.push(Token {
                text: std::mem::take(current),
                span: (start, end),
                is_idiom: false,
            });
        }
    };

    for (i, ch) in text.chars().enumerate() {
        if ch.is_whitespace() {
            flush(&mut tokens, &mut current, start, i);
            continue;
        }
        let k = if ch.is_alphanumeric() { Kind::Word } else { Kind::Punct };
        if current.is_empty() {
            start = i;
            kind = k;
        } else if k != kind {
            flush(&mut tokens, &mut current, start, i);
            start = i;
            kind = k;
        }
        for low in ch.to_lowercase() {
            current.push(low);
        }
    }
    let total = text.chars().count();
    flush(&mut tokens, &mut current, start, total);
    tokens
}

/// Case-fold and re-tokenize a lexicon term into its canonical key form:
/// the space-joined token texts. Returns the token count alongside the key.
pub fn canonical_term(term: &str) -> (String, usize) {
    let toks = tokenize(term);
    let key = toks.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ");
    (key, toks.len())
}

/// Merge idiom token sequences into single tokens.
///
/// Scans left to right; at each position the longest contiguous token
/// sequence whose space-joined text is an idiom key in `lexicon` is replaced
/// by one merged token with `is_idiom = true`. Matching resumes after the
/// merged token, so merged idioms never overlap.
pub fn mark_idioms(tokens: Vec<Token>, lexicon: &FusedLexicon) -> Vec<Token> {
    let max_len = lexicon.max_idiom_tokens();
    if max_len < 2 {
        return tokens;
    }
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let longest = max_len.min(tokens.len() - i);
        let mut merged = None;
        for width in (2..=longest).rev() {
            let key = tokens[i..i + width]
                .iter()
                .map(|t| t.text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            if lexicon.has_idiom(&key) {
                merged = Some((key, width));
                break;
            }
        }
        match merged {
            Some((key, width)) => {
                out.push(Token {
                    text: key,
                    span: (tokens[i].span.0, tokens[i + width - 1].span.1),
                    is_idiom: true,
                });
                i += width;
            }
            None => {
                out.push(tokens[i].clone());
                i += 1;
            }
        }
    }
    out
}

/// Expand a token list back into plain words: idiom tokens are split on
/// spaces, everything else passes through. Politeness detectors and tf-idf
/// prompt vectors work on this view so that idiom merging cannot hide a
/// bigram like "would you" from them.
pub fn expand_words(tokens: &[Token]) -> Vec<&str> {
    let mut words = Vec::with_capacity(tokens.len());
    for t in tokens {
        if t.is_idiom {
            words.extend(t.text.split(' '));
        } else {
            words.push(t.text.as_str());
        }
    }
    words
}
