//! Per-message sentiment features: fused word scores, top-k positive and
//! negative blocks, overall polarity, and the two-message tone one-hot.

use crate::lexicon::FusedLexicon;
use crate::tagger::TaggedToken;

/// A tagged token annotated with its fused lexicon scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredToken {
    pub tagged: TaggedToken,
    pub pos_score: f64,
    pub neg_score: f64,
}

/// Look up fused scores for every token. Idiom tokens consult the idiom
/// table; the four open tags consult their POS list; `Other`-tagged tokens
/// only score when an any-POS source entry exists (elementwise max over the
/// four POS slots).
pub fn score_tokens(tagged: &[TaggedToken], lexicon: &FusedLexicon) -> Vec<ScoredToken> {
    tagged
        .iter()
        .map(|tt| {
            let scores = if tt.token.is_idiom {
                lexicon.lookup_idiom(&tt.token.text)
            } else {
                match tt.tag.lexicon_pos() {
                    Some(pos) => lexicon.lookup(&tt.token.text, pos),
                    None => lexicon.lookup_any(&tt.token.text),
                }
            };
            ScoredToken { tagged: tt.clone(), pos_score: scores.pos, neg_score: scores.neg }
        })
        .collect()
}

/// The sentiment block of one message: its `k_pos` strongest positive word
/// scores and `k_neg` strongest negative word scores (each sorted
/// non-increasing, zero-padded), plus the message polarity
/// `sum(pos) - sum(neg)` over all tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct SentimentBlock {
    pub top_pos: Vec<f64>,
    pub top_neg: Vec<f64>,
    pub polarity: f64,
}

impl SentimentBlock {
    /// Sign convention for tone: zero polarity counts as positive.
    pub fn is_negative(&self) -> bool {
        self.polarity < 0.0
    }
}

/// Build the sentiment block. Ties between equal scores break toward the
/// earlier message position; duplicate words contribute independently.
pub fn sentiment_block(scored: &[ScoredToken], k_pos: usize, k_neg: usize) -> SentimentBlock {
    assert!(k_pos >= 1 && k_neg >= 1, "top-k sizes must be at least 1");
    let top_k = |key: fn(&ScoredToken) -> f64, k: usize| -> Vec<f64> {
        let mut scores: Vec<f64> = scored.iter().map(key).collect();
        // stable sort keeps earlier positions first among ties
        scores.sort_by(|a, b| b.partial_cmp(a).unwrap());
        scores.truncate(k);
        scores.resize(k, 0.0);
        scores
    };
    let polarity = scored.iter().map(|s| s.pos_score - s.neg_score).sum();
    SentimentBlock {
        top_pos: top_k(|s| s.pos_score, k_pos),
        top_neg: top_k(|s| s.neg_score, k_neg),
        polarity,
    }
}

/// Tone of the first two messages as a one-hot of length 4 over
/// (first sign, second sign): PP, PN, NP, NN. Zero polarity is positive.
pub fn tone_onehot(first: &SentimentBlock, second: &SentimentBlock) -> [f64; 4] {
    let index = 2 * usize::from(first.is_negative()) + usize::from(second.is_negative());
    let mut onehot = [0.0; 4];
    onehot[index] = 1.0;
    onehot
}
