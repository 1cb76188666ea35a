//! Coarse part-of-speech tagging with an averaged perceptron.
//!
//! The tagger assigns one of five coarse classes (noun, verb, adjective,
//! adverb, other) so that lexicon lookups consult the right POS list. It is
//! a small pretrained model shipped as a versioned JSON file of feature
//! weights plus an unambiguous-word dictionary; see `data/tagger/` for the
//! training corpus and the regeneration tool.
//!
//! Tagging is fully deterministic: ties between classes break toward the
//! first class in declaration order, and prediction never mutates state.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::Pos;
use crate::text::Token;

/// Format version embedded in tagger model files.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Error, Debug)]
pub enum TaggerError {
    #[error("reading {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("tagger model: {0}")]
    Model(String),
    #[error("unsupported tagger model format version {found} (expected {expected})")]
    FormatVersion { found: u32, expected: u32 },
    #[error("tagger corpus line {line}: {msg}")]
    Corpus { line: usize, msg: String },
}

/// The five coarse tag classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Other,
}

impl Tag {
    pub const ALL: [Tag; 5] = [Tag::Noun, Tag::Verb, Tag::Adjective, Tag::Adverb, Tag::Other];

    /// The lexicon POS list this tag consults, if any.
    pub fn lexicon_pos(self) -> Option<Pos> {
        match self {
            Tag::Noun => Some(Pos::Noun),
            Tag::Verb => Some(Pos::Verb),
            Tag::Adjective => Some(Pos::Adjective),
            Tag::Adverb => Some(Pos::Adverb),
            Tag::Other => None,
        }
    }

    fn index(self) -> usize {
        match self {
            Tag::Noun => 0,
            Tag::Verb => 1,
            Tag::Adjective => 2,
            Tag::Adverb => 3,
            Tag::Other => 4,
        }
    }

    fn short(self) -> &'static str {
        match self {
            Tag::Noun => "n",
            Tag::Verb => "v",
            Tag::Adjective => "a",
            Tag::Adverb => "r",
            Tag::Other => "o",
        }
    }

    fn from_short(s: &str) -> Option<Tag> {
        match s {
            "n" => Some(Tag::Noun),
            "v" => Some(Tag::Verb),
            "a" => Some(Tag::Adjective),
            "r" => Some(Tag::Adverb),
            "o" => Some(Tag::Other),
            _ => None,
        }
    }
}

/// A token together with its coarse tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub token: Token,
    pub tag: Tag,
}

/// Averaged-perceptron POS tagger over the five coarse classes.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptronTagger {
    weights: BTreeMap<String, [f64; 5]>,
    tagdict: BTreeMap<String, Tag>,
}

const START: [&str; 2] = ["-START-", "-START2-"];
const END: [&str; 2] = ["-END-", "-END2-"];

fn suffix(word: &str, n: usize) -> &str {
    let chars = word.char_indices().collect::<Vec<_>>();
    if chars.len() <= n {
        word
    } else {
        &word[chars[chars.len() - n].0..]
    }
}

fn prefix1(word: &str) -> &str {
    match word.char_indices().nth(1) {
        Some((i, _)) => &word[..i],
        None => word,
    }
}

fn features(
    i: usize,
    word: &str,
    context: &[String],
    prev: Tag,
    prev2: Tag,
) -> Vec<String> {
    // context is padded with two START markers in front and two END behind,
    // so context[i + 2] is the current word.
    let c = |offset: isize| -> &str {
        let idx = (i as isize + 2 + offset) as usize;
        &context[idx]
    };
    let mut feats = Vec::with_capacity(14);
    feats.push("bias".to_string());
    feats.push(format!("i suffix {}", suffix(word, 3)));
    feats.push(format!("i suffix2 {}", suffix(word, 2)));
    feats.push(format!("i pref1 {}", prefix1(word)));
    feats.push(format!("i-1 tag {}", prev.short()));
    feats.push(format!("i-2 tag {}", prev2.short()));
    feats.push(format!("i tag+i-2 tag {} {}", prev.short(), prev2.short()));
    feats.push(format!("i word {word}"));
    feats.push(format!("i-1 tag+i word {} {word}", prev.short()));
    feats.push(format!("i-1 word {}", c(-1)));
    feats.push(format!("i-1 suffix {}", suffix(c(-1), 3)));
    feats.push(format!("i-2 word {}", c(-2)));
    feats.push(format!("i+1 word {}", c(1)));
    feats.push(format!("i+1 suffix {}", suffix(c(1), 3)));
    feats.push(format!("i+2 word {}", c(2)));
    if word.chars().all(|ch| ch.is_ascii_digit()) {
        feats.push("i isdigit".to_string());
    }
    feats
}

fn is_punctuation_word(word: &str) -> bool {
    !word.chars().any(|c| c.is_alphanumeric())
}

/// Last-resort suffix heuristics for words whose shape the model has never
/// seen in any form.
fn suffix_heuristic(word: &str) -> Tag {
    const ADJ: [&str; 8] = ["less", "ful", "ous", "ish", "ive", "able", "ible", "ic"];
    const NOUN: [&str; 7] = ["ness", "ment", "tion", "sion", "ity", "ism", "ist"];
    const VERB: [&str; 4] = ["ing", "ed", "ize", "ise"];
    if word.ends_with("ly") {
        return Tag::Adverb;
    }
    for s in NOUN {
        if word.ends_with(s) {
            return Tag::Noun;
        }
    }
    for s in ADJ {
        if word.ends_with(s) {
            return Tag::Adjective;
        }
    }
    for s in VERB {
        if word.ends_with(s) {
            return Tag::Verb;
        }
    }
    Tag::Other
}

impl PerceptronTagger {
    /// Tag an idiom-merged token list. Output length equals input length.
    ///
    /// Idiom tokens are expanded into their constituent words for context
    /// and receive the tag of their head word (the last word). Tokens with
    /// no alphanumeric content are tagged `Other` outright.
    pub fn tag(&self, tokens: &[Token]) -> Vec<TaggedToken> {
        // expanded word sequence with a back-pointer into `tokens`
        let mut words: Vec<(String, usize)> = Vec::with_capacity(tokens.len());
        for (idx, tok) in tokens.iter().enumerate() {
            if tok.is_idiom {
                for w in tok.text.split(' ') {
                    words.push((w.to_string(), idx));
                }
            } else {
                words.push((tok.text.clone(), idx));
            }
        }

        let mut context: Vec<String> = Vec::with_capacity(words.len() + 4);
        context.extend(START.iter().map(|s| s.to_string()));
        context.extend(words.iter().map(|(w, _)| w.clone()));
        context.extend(END.iter().map(|s| s.to_string()));

        let mut prev = Tag::Other;
        let mut prev2 = Tag::Other;
        let mut word_tags: Vec<Tag> = Vec::with_capacity(words.len());
        for (i, (word, _)) in words.iter().enumerate() {
            let tag = if is_punctuation_word(word) {
                Tag::Other
            } else if let Some(&t) = self.tagdict.get(word) {
                t
            } else if self.knows_word_shape(word) {
                let feats = features(i, word, &context, prev, prev2);
                self.predict(&feats)
            } else {
                suffix_heuristic(word)
            };
            word_tags.push(tag);
            prev2 = prev;
            prev = tag;
        }

        tokens
            .iter()
            .enumerate()
            .map(|(idx, tok)| {
                // tag of the last expanded word belonging to this token
                let tag = words
                    .iter()
                    .zip(&word_tags)
                    .filter(|((_, owner), _)| *owner == idx)
                    .map(|(_, &t)| t)
                    .last()
                    .unwrap_or(Tag::Other);
                TaggedToken { token: tok.clone(), tag }
            })
            .collect()
    }

    /// True when at least one lexical feature of this word (the word
    /// itself, its suffixes, or its first character) carries weight in the
    /// model, i.e. the model has seen something of its shape before.
    fn knows_word_shape(&self, word: &str) -> bool {
        self.weights.contains_key(&format!("i word {word}"))
            || self.weights.contains_key(&format!("i suffix {}", suffix(word, 3)))
            || self.weights.contains_key(&format!("i suffix2 {}", suffix(word, 2)))
    }

    fn predict(&self, feats: &[String]) -> Tag {
        let mut scores = [0.0f64; 5];
        for f in feats {
            if let Some(ws) = self.weights.get(f) {
                for (s, w) in scores.iter_mut().zip(ws) {
                    *s += w;
                }
            }
        }
        let mut best = Tag::Noun;
        let mut best_score = f64::NEG_INFINITY;
        for tag in Tag::ALL {
            let s = scores[tag.index()];
            if s > best_score {
                best_score = s;
                best = tag;
            }
        }
        best
    }

    /// Train on an annotated corpus: one sentence per line, whitespace
    /// separated `word_t` items where `t` is one of n/v/a/r/o.
    pub fn train_from_corpus(corpus: &str, epochs: u32, seed: u64) -> Result<Self, TaggerError> {
        let mut sentences: Vec<Vec<(String, Tag)>> = Vec::new();
        for (lineno, line) in corpus.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut sentence = Vec::new();
            for item in line.split_whitespace() {
                let (word, tag) = item.rsplit_once('_').ok_or_else(|| TaggerError::Corpus {
                    line: lineno + 1,
                    msg: format!("item {item:?} is not word_tag"),
                })?;
                let tag = Tag::from_short(tag).ok_or_else(|| TaggerError::Corpus {
                    line: lineno + 1,
                    msg: format!("unknown tag in {item:?}"),
                })?;
                sentence.push((word.to_lowercase(), tag));
            }
            if !sentence.is_empty() {
                sentences.push(sentence);
            }
        }
        if sentences.is_empty() {
            return Err(TaggerError::Corpus { line: 0, msg: "no training sentences".into() });
        }

        // unambiguous-word dictionary from corpus counts
        let mut counts: BTreeMap<String, [u32; 5]> = BTreeMap::new();
        for sentence in &sentences {
            for (word, tag) in sentence {
                counts.entry(word.clone()).or_default()[tag.index()] += 1;
            }
        }
        let mut tagdict = BTreeMap::new();
        for (word, tag_counts) in &counts {
            let total: u32 = tag_counts.iter().sum();
            let (best_idx, &best) = tag_counts
                .iter()
                .enumerate()
                .max_by_key(|(i, &c)| (c, std::cmp::Reverse(*i)))
                .unwrap();
            if total >= 3 && best as f64 / total as f64 >= 0.97 {
                tagdict.insert(word.clone(), Tag::ALL[best_idx]);
            }
        }

        let mut trainer = Trainer::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..sentences.len()).collect();
        for _ in 0..epochs {
            order.shuffle(&mut rng);
            for &si in &order {
                let sentence = &sentences[si];
                let mut context: Vec<String> = Vec::with_capacity(sentence.len() + 4);
                context.extend(START.iter().map(|s| s.to_string()));
                context.extend(sentence.iter().map(|(w, _)| w.clone()));
                context.extend(END.iter().map(|s| s.to_string()));

                let mut prev = Tag::Other;
                let mut prev2 = Tag::Other;
                for (i, (word, truth)) in sentence.iter().enumerate() {
                    let guess = if is_punctuation_word(word) {
                        Tag::Other
                    } else if let Some(&t) = tagdict.get(word) {
                        t
                    } else {
                        let feats = features(i, word, &context, prev, prev2);
                        let guess = trainer.predict(&feats);
                        trainer.update(*truth, guess, &feats);
                        guess
                    };
                    prev2 = prev;
                    prev = guess;
                }
            }
        }
        Ok(PerceptronTagger { weights: trainer.averaged(), tagdict })
    }

    pub fn to_json(&self) -> String {
        let model = ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            tagdict: self.tagdict.iter().map(|(w, t)| (w.clone(), t.short().to_string())).collect(),
            weights: self
                .weights
                .iter()
                .map(|(f, ws)| {
                    let per_tag = Tag::ALL
                        .iter()
                        .filter(|t| ws[t.index()] != 0.0)
                        .map(|t| (t.short().to_string(), ws[t.index()]))
                        .collect();
                    (f.clone(), per_tag)
                })
                .collect(),
        };
        serde_json::to_string(&model).expect("model serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self, TaggerError> {
        let model: ModelFile =
            serde_json::from_str(json).map_err(|e| TaggerError::Model(e.to_string()))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(TaggerError::FormatVersion {
                found: model.format_version,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        let mut tagdict = BTreeMap::new();
        for (word, tag) in model.tagdict {
            let t = Tag::from_short(&tag)
                .ok_or_else(|| TaggerError::Model(format!("unknown tag {tag:?}")))?;
            tagdict.insert(word, t);
        }
        let mut weights = BTreeMap::new();
        for (feat, per_tag) in model.weights {
            let mut ws = [0.0f64; 5];
            for (tag, w) in per_tag {
                let t = Tag::from_short(&tag)
                    .ok_or_else(|| TaggerError::Model(format!("unknown tag {tag:?}")))?;
                ws[t.index()] = w;
            }
            weights.insert(feat, ws);
        }
        Ok(PerceptronTagger { weights, tagdict })
    }

    pub fn load(path: &Path) -> Result<Self, TaggerError> {
        let json = std::fs::read_to_string(path).map_err(|source| TaggerError::Io {
            file: path.display().to_string(),
            source,
        })?;
        Self::from_json(&json)
    }
}

/// Convenience free function mirroring the rest of the pipeline: tag an
/// idiom-merged token list with the given model.
pub fn pos_tag(tokens: &[Token], tagger: &PerceptronTagger) -> Vec<TaggedToken> {
    tagger.tag(tokens)
}

#[derive(Default)]
struct Trainer {
    weights: BTreeMap<String, [f64; 5]>,
    totals: BTreeMap<String, [f64; 5]>,
    stamps: BTreeMap<String, [u64; 5]>,
    instances: u64,
}

impl Trainer {
    fn predict(&self, feats: &[String]) -> Tag {
        let mut scores = [0.0f64; 5];
        for f in feats {
            if let Some(ws) = self.weights.get(f) {
                for (s, w) in scores.iter_mut().zip(ws) {
                    *s += w;
                }
            }
        }
        let mut best = Tag::Noun;
        let mut best_score = f64::NEG_INFINITY;
        for tag in Tag::ALL {
            if scores[tag.index()] > best_score {
                best_score = scores[tag.index()];
                best = tag;
            }
        }
        best
    }

    fn update(&mut self, truth: Tag, guess: Tag, feats: &[String]) {
        self.instances += 1;
        if truth == guess {
            return;
        }
        for f in feats {
            self.bump(f, truth.index(), 1.0);
            self.bump(f, guess.index(), -1.0);
        }
    }

    fn bump(&mut self, feat: &str, class: usize, delta: f64) {
        let w = self.weights.entry(feat.to_string()).or_insert([0.0; 5]);
        let tot = self.totals.entry(feat.to_string()).or_insert([0.0; 5]);
        let stamp = self.stamps.entry(feat.to_string()).or_insert([0; 5]);
        tot[class] += (self.instances - stamp[class]) as f64 * w[class];
        stamp[class] = self.instances;
        w[class] += delta;
    }

    fn averaged(mut self) -> BTreeMap<String, [f64; 5]> {
        let n = self.instances.max(1) as f64;
        let mut out = BTreeMap::new();
        for (feat, ws) in &self.weights {
            let tot = self.totals.entry(feat.clone()).or_insert([0.0; 5]);
            let stamp = self.stamps.entry(feat.clone()).or_insert([0; 5]);
            let mut averaged = [0.0f64; 5];
            let mut any = false;
            for c in 0..5 {
                let total = tot[c] + (self.instances - stamp[c]) as f64 * ws[c];
                let avg = total / n;
                // round to stabilize the serialized model
                averaged[c] = (avg * 1e6).round() / 1e6;
                if averaged[c] != 0.0 {
                    any = true;
                }
            }
            if any {
                out.insert(feat.clone(), averaged);
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    tagdict: BTreeMap<String, String>,
    weights: BTreeMap<String, BTreeMap<String, f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    fn tiny_tagger() -> PerceptronTagger {
        let corpus = "\
the_o mediation_n process_n is_v useless_a
a_o useless_a process_n never_r works_v
this_o discussion_n is_v pointless_a
they_o give_v up_v too_r quickly_r
we_o never_r give_v up_v
i_o think_v the_o article_n is_v fine_a
the_o editor_n reverted_v the_o edit_n quickly_r
you_o should_v read_v the_o source_n carefully_r
the_o worst_a part_n is_v the_o tone_n
it_o is_v a_o useless_a and_o hopeless_a mess_n
she_o edits_v the_o page_n daily_r
the_o talk_n page_n needs_v attention_n
he_o thinks_v the_o process_n works_v
a_o pointless_a revert_n war_n started_v
";
        PerceptronTagger::train_from_corpus(corpus, 6, 7).unwrap()
    }

    #[test]
    fn tags_adjective_by_context_and_shape() {
        let tagger = tiny_tagger();
        let tags = tagger.tag(&tokenize("a useless process"));
        assert_eq!(tags[1].tag, Tag::Adjective);
        assert_eq!(tags.len(), 3);
    }

    #[test]
    fn punctuation_is_other() {
        let tagger = tiny_tagger();
        let tags = tagger.tag(&tokenize("fine ."));
        assert_eq!(tags[1].tag, Tag::Other);
    }

    #[test]
    fn output_length_matches_input_and_is_deterministic() {
        let tagger = tiny_tagger();
        let toks = tokenize("they quickly reverted the useless edit , i think");
        let a = tagger.tag(&toks);
        let b = tagger.tag(&toks);
        assert_eq!(a.len(), toks.len());
        assert_eq!(a, b);
    }

    #[test]
    fn idiom_token_takes_head_word_tag() {
        let tagger = tiny_tagger();
        let mut toks = tokenize("they give up");
        // merge "give up" the way mark_idioms would
        let merged = Token {
            text: "give up".to_string(),
            span: (toks[1].span.0, toks[2].span.1),
            is_idiom: true,
        };
        toks.truncate(1);
        toks.push(merged);
        let tags = tagger.tag(&toks);
        assert_eq!(tags.len(), 2);
        assert_eq!(tags[1].tag, Tag::Verb);
    }

    #[test]
    fn unknown_shape_falls_back_to_suffix_heuristics() {
        let tagger = tiny_tagger();
        // fabricated words with telling suffixes, unseen by the tiny corpus
        let tags = tagger.tag(&tokenize("zzqzful zzqzly zzqz"));
        assert_eq!(tags[0].tag, Tag::Adjective);
        assert_eq!(tags[1].tag, Tag::Adverb);
        assert_eq!(tags[2].tag, Tag::Other);
    }

    #[test]
    fn model_json_round_trip() {
        let tagger = tiny_tagger();
        let json = tagger.to_json();
        let restored = PerceptronTagger::from_json(&json).unwrap();
        assert_eq!(restored, tagger);

        let bumped = json.replacen("\"format_version\":1", "\"format_version\":42", 1);
        assert!(matches!(
            PerceptronTagger::from_json(&bumped),
            Err(TaggerError::FormatVersion { found: 42, .. })
        ));
    }

    #[test]
    fn training_is_seed_deterministic() {
        let corpus = "the_o bad_a edit_n\nthe_o good_a page_n\n";
        let a = PerceptronTagger::train_from_corpus(corpus, 3, 11).unwrap();
        let b = PerceptronTagger::train_from_corpus(corpus, 3, 11).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
