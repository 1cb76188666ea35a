//! Conversation feature extraction: the 13 politeness-strategy detectors,
//! the 6 prompt-type similarities, and assembly of flat per-conversation
//! feature vectors with a stable name registry.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::FusedLexicon;
use crate::sentiment::{score_tokens, sentiment_block, tone_onehot, ScoredToken, SentimentBlock};
use crate::tagger::PerceptronTagger;
use crate::text::{expand_words, mark_idioms, tokenize, Token};

#[derive(Error, Debug)]
pub enum FeatureError {
    #[error("conversation {conversation_id}: needs at least {needed} messages, found {found}")]
    TooFewMessages { conversation_id: String, needed: usize, found: usize },
    #[error("conversation {conversation_id}: no prompt vector for message {message_id}")]
    MissingPromptVector { conversation_id: String, message_id: String },
    #[error("prompt model: {0}")]
    PromptModel(String),
    #[error("reading {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("feature config: {0}")]
    Config(String),
}

/// Conversation outcome label. `Derail` and `Moderated` are the positive
/// (toxicity) class of their respective tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Derail,
    Healthy,
    Moderated,
    Ignored,
}

impl Label {
    pub fn is_toxic(self) -> bool {
        matches!(self, Label::Derail | Label::Moderated)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub id: String,
    pub speaker: String,
    pub text: String,
}

/// One conversation with its label, optional pair id, and optional
/// precomputed prompt vectors keyed by message id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversationSample {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_id: Option<String>,
    pub label: Label,
    pub messages: Vec<Message>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_vectors: Option<BTreeMap<String, [f64; 6]>>,
}

/// Names of the 13 politeness-strategy slots, in vector order.
pub const POLITENESS_NAMES: [&str; 13] = [
    "gratitude",
    "apology",
    "please",
    "indirect_greeting",
    "subjunctive",
    "has_hedge",
    "hedges",
    "first_person",
    "first_person_start",
    "second_person",
    "second_person_start",
    "direct_question",
    "factuality",
];

const GRATITUDE: [&str; 6] = ["thank", "thanks", "thx", "grateful", "appreciate", "appreciated"];
const APOLOGY: [&str; 7] =
    ["sorry", "apologize", "apologise", "apologies", "apology", "oops", "whoops"];
const PLEASE: [&str; 3] = ["please", "pls", "plz"];
const GREETING: [&str; 3] = ["hey", "hello", "hi"];
const HEDGES: [&str; 24] = [
    "think", "thinks", "thought", "almost", "rather", "maybe", "perhaps", "probably", "possibly",
    "seems", "seem", "seemed", "appear", "appears", "might", "may", "guess", "suppose", "believe",
    "likely", "somewhat", "apparently", "suggest", "suggests",
];
const FIRST_PERSON: [&str; 10] =
    ["i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves"];
const SECOND_PERSON: [&str; 6] = ["you", "your", "yours", "yourself", "yourselves", "u"];
const WH_WORDS: [&str; 9] =
    ["what", "who", "whom", "whose", "which", "where", "when", "why", "how"];
const AUX_WORDS: [&str; 19] = [
    "do", "does", "did", "is", "are", "was", "were", "can", "could", "will", "would", "should",
    "shall", "may", "might", "am", "have", "has", "had",
];
const FACTUALITY_WORDS: [&str; 2] = ["actually", "really"];

fn in_list(list: &[&str], word: &str) -> bool {
    list.contains(&word)
}

/// The 13 politeness-strategy features of one message, in
/// [`POLITENESS_NAMES`] order. All detectors are transparent lexical rules
/// over the expanded word sequence (idiom merging cannot hide a bigram).
/// Pronoun counts are capped at 5 and scaled to [0,1]; everything else is
/// binary.
pub fn politeness_features(tokens: &[Token]) -> [f64; 13] {
    let words = expand_words(tokens);
    let first_alpha = words.iter().find(|w| w.chars().any(|c| c.is_alphanumeric()));

    let mut f = [0.0f64; 13];
    let any = |list: &[&str]| words.iter().any(|w| in_list(list, w)) as u8 as f64;
    f[0] = any(&GRATITUDE);
    f[1] = any(&APOLOGY);
    f[2] = any(&PLEASE);
    f[3] = any(&GREETING);
    // subjunctive: "would you" / "could you" bigram
    f[4] = words
        .windows(2)
        .any(|w| (w[0] == "would" || w[0] == "could") && w[1] == "you") as u8 as f64;
    f[5] = any(&HEDGES);
    // hedges with a first-person subject within the 3 preceding words
    f[6] = words.iter().enumerate().any(|(i, w)| {
        in_list(&HEDGES, w)
            && words[i.saturating_sub(3)..i].iter().any(|p| in_list(&FIRST_PERSON, p))
    }) as u8 as f64;
    let count = |list: &[&str]| words.iter().filter(|w| in_list(list, w)).count();
    f[7] = (count(&FIRST_PERSON).min(5) as f64) / 5.0;
    f[8] = first_alpha.is_some_and(|w| in_list(&FIRST_PERSON, w)) as u8 as f64;
    f[9] = (count(&SECOND_PERSON).min(5) as f64) / 5.0;
    f[10] = first_alpha.is_some_and(|w| in_list(&SECOND_PERSON, w)) as u8 as f64;
    // direct question: a question mark in a message led by a wh-word or aux
    let has_qmark = words.iter().any(|w| w.contains('?'));
    f[11] = (has_qmark
        && first_alpha.is_some_and(|w| in_list(&WH_WORDS, w) || in_list(&AUX_WORDS, w)))
        as u8 as f64;
    f[12] = (words.iter().any(|w| in_list(&FACTUALITY_WORDS, w))
        || words.windows(2).any(|w| {
            (w[0] == "in" && w[1] == "fact") || (w[0] == "the" && w[1] == "truth")
        })) as u8 as f64;
    f
}

/// Six prompt-type centroids over a fixed tf-idf vocabulary.
#[derive(Debug, Clone)]
pub struct PromptModel {
    index: BTreeMap<String, usize>,
    idf: Vec<f64>,
    centroids: Vec<Vec<f64>>,
    centroid_norms: [f64; 6],
}

#[derive(Serialize, Deserialize)]
struct PromptModelFile {
    vocabulary: Vec<String>,
    idf: Vec<f64>,
    centroids: Vec<Vec<f64>>,
}

impl PromptModel {
    pub fn from_json(json: &str) -> Result<Self, FeatureError> {
        let file: PromptModelFile =
            serde_json::from_str(json).map_err(|e| FeatureError::PromptModel(e.to_string()))?;
        if file.idf.len() != file.vocabulary.len() {
            return Err(FeatureError::PromptModel(format!(
                "idf length {} != vocabulary length {}",
                file.idf.len(),
                file.vocabulary.len()
            )));
        }
        if file.centroids.len() != 6 {
            return Err(FeatureError::PromptModel(format!(
                "expected 6 centroids, found {}",
                file.centroids.len()
            )));
        }
        for (i, c) in file.centroids.iter().enumerate() {
            if c.len() != file.vocabulary.len() {
                return Err(FeatureError::PromptModel(format!(
                    "centroid {i} length {} != vocabulary length {}",
                    c.len(),
                    file.vocabulary.len()
                )));
            }
        }
        let index: BTreeMap<String, usize> =
            file.vocabulary.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        if index.len() != file.vocabulary.len() {
            return Err(FeatureError::PromptModel("duplicate vocabulary terms".into()));
        }
        let mut centroid_norms = [0.0f64; 6];
        for (n, c) in centroid_norms.iter_mut().zip(&file.centroids) {
            *n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        }
        Ok(PromptModel { index, idf: file.idf, centroids: file.centroids, centroid_norms })
    }

    pub fn load(path: &Path) -> Result<Self, FeatureError> {
        let json = std::fs::read_to_string(path).map_err(|source| FeatureError::Io {
            file: path.display().to_string(),
            source,
        })?;
        Self::from_json(&json)
    }

    /// Cosine similarity of the message's tf-idf vector to each centroid,
    /// clamped at 0. A message sharing no vocabulary scores all zeros.
    pub fn similarities(&self, words: &[&str]) -> [f64; 6] {
        let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
        for w in words {
            if let Some(&i) = self.index.get(*w) {
                *tf.entry(i).or_insert(0.0) += 1.0;
            }
        }
        let weights: Vec<(usize, f64)> =
            tf.into_iter().map(|(i, count)| (i, count * self.idf[i])).collect();
        let norm = weights.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        let mut out = [0.0f64; 6];
        if norm == 0.0 {
            return out;
        }
        for (slot, (centroid, cnorm)) in
            out.iter_mut().zip(self.centroids.iter().zip(self.centroid_norms))
        {
            if cnorm == 0.0 {
                continue;
            }
            let dot: f64 = weights.iter().map(|&(i, v)| v * centroid[i]).sum();
            *slot = (dot / (norm * cnorm)).max(0.0);
        }
        out
    }
}

/// Where prompt features come from.
pub enum PromptSource<'a> {
    /// Compute tf-idf cosine similarity against a centroid model.
    Centroids(&'a PromptModel),
    /// Look up a standalone passthrough table keyed by message id.
    Passthrough(&'a BTreeMap<String, [f64; 6]>),
    /// Use the prompt vectors embedded in the conversation sample.
    Embedded,
}

/// Which contiguous run of messages feeds the feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MessageSelection {
    /// The first `window` messages (paired conversation-opening task).
    FirstWindow,
    /// The `window` messages immediately before the final message, which is
    /// never read (sliding-window moderation task).
    LastBeforeFinal,
}

/// Shape of the extracted feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    /// Number of messages M contributing per-message blocks.
    pub window: usize,
    pub k_pos: usize,
    pub k_neg: usize,
    /// Append the 4-slot tone one-hot of the first two selected messages.
    pub tone: bool,
    pub selection: MessageSelection,
}

impl FeatureConfig {
    /// Paired conversation-opening defaults: first 2 messages, 3/3
    /// sentiment words, no tone.
    pub fn paired_default() -> Self {
        FeatureConfig {
            window: 2,
            k_pos: 3,
            k_neg: 3,
            tone: false,
            selection: MessageSelection::FirstWindow,
        }
    }

    /// Sliding-window moderation defaults: 10 messages before the final
    /// one, 5/2 sentiment words, no tone.
    pub fn window_default() -> Self {
        FeatureConfig {
            window: 10,
            k_pos: 5,
            k_neg: 2,
            tone: false,
            selection: MessageSelection::LastBeforeFinal,
        }
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.window == 0 {
            return Err(FeatureError::Config("window must be at least 1".into()));
        }
        if self.k_pos == 0 || self.k_neg == 0 {
            return Err(FeatureError::Config("k_pos and k_neg must be at least 1".into()));
        }
        if self.tone && self.window < 2 {
            return Err(FeatureError::Config("tone requires a window of at least 2".into()));
        }
        Ok(())
    }

    /// Per-message block width: 13 politeness + 6 prompt + k_pos + k_neg.
    pub fn message_width(&self) -> usize {
        13 + 6 + self.k_pos + self.k_neg
    }

    /// Total vector length: window * message_width (+4 with tone).
    pub fn vector_len(&self) -> usize {
        self.window * self.message_width() + if self.tone { 4 } else { 0 }
    }
}

/// Stable feature names matching [`conversation_vector`] order. Names are
/// unique; per-message slots carry an `m<i>_` prefix with i starting at 1.
pub fn feature_registry(config: &FeatureConfig) -> Vec<String> {
    let mut names = Vec::with_capacity(config.vector_len());
    for m in 1..=config.window {
        for p in POLITENESS_NAMES {
            names.push(format!("m{m}_{p}"));
        }
        for j in 1..=6 {
            names.push(format!("m{m}_prompt{j}"));
        }
        for j in 1..=config.k_pos {
            names.push(format!("m{m}_pos{j}"));
        }
        for j in 1..=config.k_neg {
            names.push(format!("m{m}_neg{j}"));
        }
    }
    if config.tone {
        for t in ["tone_pp", "tone_pn", "tone_np", "tone_nn"] {
            names.push(t.to_string());
        }
    }
    names
}

/// The 1-based message index a feature name belongs to, if any.
pub fn message_index_of(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('m')?;
    let (digits, _) = rest.split_once('_')?;
    digits.parse().ok()
}

/// A message run through tokenization, idiom merging, tagging, and lexicon
/// scoring. `tokens` is the idiom-merged view; `scored` parallels it.
pub struct AnalyzedMessage {
    pub tokens: Vec<Token>,
    pub scored: Vec<ScoredToken>,
}

impl AnalyzedMessage {
    pub fn words(&self) -> Vec<&str> {
        expand_words(&self.tokens)
    }
}

/// Run the text-analysis pipeline on one message.
pub fn analyze_message(
    text: &str,
    lexicon: &FusedLexicon,
    tagger: &PerceptronTagger,
) -> AnalyzedMessage {
    let tokens = mark_idioms(tokenize(text), lexicon);
    let tagged = tagger.tag(&tokens);
    let scored = score_tokens(&tagged, lexicon);
    AnalyzedMessage { tokens, scored }
}

fn prompt_vector(
    sample: &ConversationSample,
    message: &Message,
    analyzed: &AnalyzedMessage,
    source: &PromptSource<'_>,
) -> Result<[f64; 6], FeatureError> {
    let missing = || FeatureError::MissingPromptVector {
        conversation_id: sample.id.clone(),
        message_id: message.id.clone(),
    };
    match source {
        PromptSource::Centroids(model) => Ok(model.similarities(&analyzed.words())),
        PromptSource::Passthrough(table) => table.get(&message.id).copied().ok_or_else(missing),
        PromptSource::Embedded => sample
            .prompt_vectors
            .as_ref()
            .and_then(|m| m.get(&message.id))
            .copied()
            .ok_or_else(missing),
    }
}

/// Extract the flat feature vector of one conversation.
///
/// Layout: for each selected message, 13 politeness slots, 6 prompt slots,
/// `k_pos` top positive scores, `k_neg` top negative scores; then the 4-slot
/// tone one-hot when enabled. In `LastBeforeFinal` mode the final message is
/// never read.
pub fn conversation_vector(
    sample: &ConversationSample,
    config: &FeatureConfig,
    lexicon: &FusedLexicon,
    tagger: &PerceptronTagger,
    prompts: &PromptSource<'_>,
) -> Result<Vec<f64>, FeatureError> {
    config.validate()?;
    let selected = select_messages(sample, config)?;
    let mut vector = Vec::with_capacity(config.vector_len());
    let mut blocks: Vec<SentimentBlock> = Vec::with_capacity(2);
    for message in &selected {
        let analyzed = analyze_message(&message.text, lexicon, tagger);
        let block = sentiment_block(&analyzed.scored, config.k_pos, config.k_neg);
        vector.extend_from_slice(&politeness_features(&analyzed.tokens));
        vector.extend_from_slice(&prompt_vector(sample, message, &analyzed, prompts)?);
        vector.extend_from_slice(&block.top_pos);
        vector.extend_from_slice(&block.top_neg);
        if blocks.len() < 2 {
            blocks.push(block);
        }
    }
    if config.tone {
        vector.extend_from_slice(&tone_onehot(&blocks[0], &blocks[1]));
    }
    debug_assert_eq!(vector.len(), config.vector_len());
    Ok(vector)
}

/// The messages a config selects, in order.
pub fn select_messages<'a>(
    sample: &'a ConversationSample,
    config: &FeatureConfig,
) -> Result<Vec<&'a Message>, FeatureError> {
    let needed = match config.selection {
        MessageSelection::FirstWindow => config.window,
        MessageSelection::LastBeforeFinal => config.window + 1,
    };
    if sample.messages.len() < needed {
        return Err(FeatureError::TooFewMessages {
            conversation_id: sample.id.clone(),
            needed,
            found: sample.messages.len(),
        });
    }
    let range = match config.selection {
        MessageSelection::FirstWindow => 0..config.window,
        MessageSelection::LastBeforeFinal => {
            let last = sample.messages.len() - 1;
            last - config.window..last
        }
    };
    Ok(sample.messages[range].iter().collect())
}

/// Words present in a message that appear in a plain word set; used for the
/// binary has-positive/has-negative baseline features.
pub fn contains_any(analyzed: &AnalyzedMessage, set: &BTreeSet<String>) -> bool {
    analyzed.words().iter().any(|w| set.contains(*w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::test_lexicon;
    use crate::tagger::PerceptronTagger;

    fn tagger() -> PerceptronTagger {
        PerceptronTagger::train_from_corpus(
            "the_o bad_a edit_n is_v useless_a\ni_o think_v it_o failed_v\n",
            3,
            1,
        )
        .unwrap()
    }

    fn pol(text: &str) -> BTreeMap<&'static str, f64> {
        let toks = tokenize(text);
        POLITENESS_NAMES.iter().copied().zip(politeness_features(&toks)).collect()
    }

    #[test]
    fn apology_and_first_person() {
        let f = pol("i am sorry about the mess , but this needs attention");
        assert_eq!(f["apology"], 1.0);
        assert!(f["first_person"] > 0.0);
        assert_eq!(f["first_person_start"], 1.0);
        assert_eq!(f["second_person"], 0.0);
    }

    #[test]
    fn greeting_and_second_person() {
        let f = pol("hey how are you");
        assert_eq!(f["indirect_greeting"], 1.0);
        assert!(f["second_person"] > 0.0);
        // no question mark, so no direct question
        assert_eq!(f["direct_question"], 0.0);
    }

    #[test]
    fn subjunctive_direct_question() {
        let f = pol("could you check this?");
        assert_eq!(f["subjunctive"], 1.0);
        assert_eq!(f["direct_question"], 1.0);
    }

    #[test]
    fn hedge_requires_first_person_subject_nearby() {
        let with_subject = pol("i think the edit is fine");
        assert_eq!(with_subject["has_hedge"], 1.0);
        assert_eq!(with_subject["hedges"], 1.0);

        let without_subject = pol("the edit might be fine");
        assert_eq!(without_subject["has_hedge"], 1.0);
        assert_eq!(without_subject["hedges"], 0.0);
    }

    #[test]
    fn pronoun_counts_cap_at_one() {
        let f = pol("you you you you you you you");
        assert_eq!(f["second_person"], 1.0);
        assert_eq!(f["second_person_start"], 1.0);
    }

    #[test]
    fn factuality_bigrams() {
        assert_eq!(pol("in fact the source says otherwise")["factuality"], 1.0);
        assert_eq!(pol("this is actually wrong")["factuality"], 1.0);
        assert_eq!(pol("the facts are elsewhere")["factuality"], 0.0);
    }

    fn prompt_model() -> PromptModel {
        let json = r#"{
            "vocabulary": ["article", "source", "revert", "ban"],
            "idf": [1.0, 1.0, 1.5, 2.0],
            "centroids": [
                [1.0, 0.5, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.5, 0.0, 0.5, 0.0],
                [0.0, 0.5, 0.0, 0.5]
            ]
        }"#;
        PromptModel::from_json(json).unwrap()
    }

    #[test]
    fn identical_text_maximizes_own_centroid() {
        let model = prompt_model();
        let sims = model.similarities(&["revert"]);
        assert_eq!(sims[2], 1.0);
        assert!(sims.iter().enumerate().all(|(i, &s)| i == 2 || s <= 1.0));
    }

    #[test]
    fn disjoint_vocabulary_scores_zero() {
        let model = prompt_model();
        assert_eq!(model.similarities(&["unrelated", "words"]), [0.0; 6]);
    }

    #[test]
    fn prompt_model_shape_validation() {
        let bad = r#"{"vocabulary": ["a"], "idf": [1.0], "centroids": [[1.0]]}"#;
        assert!(matches!(PromptModel::from_json(bad), Err(FeatureError::PromptModel(_))));
    }

    fn sample(n_messages: usize) -> ConversationSample {
        let messages: Vec<Message> = (0..n_messages)
            .map(|i| Message {
                id: format!("m{i}"),
                speaker: format!("s{}", i % 2),
                text: format!("message {i} about the article"),
            })
            .collect();
        let prompt_vectors =
            messages.iter().map(|m| (m.id.clone(), [0.1, 0.2, 0.0, 0.0, 0.6, 0.1])).collect();
        ConversationSample {
            id: "c1".into(),
            pair_id: None,
            label: Label::Healthy,
            messages,
            prompt_vectors: Some(prompt_vectors),
        }
    }

    #[test]
    fn wiki_default_vector_is_50_long() {
        let config = FeatureConfig::paired_default();
        assert_eq!(config.vector_len(), 50);
        let v = conversation_vector(
            &sample(4),
            &config,
            &test_lexicon(),
            &tagger(),
            &PromptSource::Embedded,
        )
        .unwrap();
        assert_eq!(v.len(), 50);
        assert_eq!(feature_registry(&config).len(), 50);
    }

    #[test]
    fn tone_adds_four_slots() {
        let config = FeatureConfig { tone: true, ..FeatureConfig::paired_default() };
        assert_eq!(config.vector_len(), 54);
        let v = conversation_vector(
            &sample(2),
            &config,
            &test_lexicon(),
            &tagger(),
            &PromptSource::Embedded,
        )
        .unwrap();
        assert_eq!(v.len(), 54);
        // exactly one tone slot is hot
        assert_eq!(v[50..].iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn chat_default_vector_is_260_long() {
        let config = FeatureConfig::window_default();
        assert_eq!(config.vector_len(), 260);
        let v = conversation_vector(
            &sample(11),
            &config,
            &test_lexicon(),
            &tagger(),
            &PromptSource::Embedded,
        )
        .unwrap();
        assert_eq!(v.len(), 260);
    }

    #[test]
    fn too_few_messages_identifies_sample() {
        let err = conversation_vector(
            &sample(1),
            &FeatureConfig::paired_default(),
            &test_lexicon(),
            &tagger(),
            &PromptSource::Embedded,
        )
        .unwrap_err();
        match err {
            FeatureError::TooFewMessages { conversation_id, needed, found } => {
                assert_eq!(conversation_id, "c1");
                assert_eq!((needed, found), (2, 1));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn passthrough_vectors_are_verbatim() {
        let mut table = BTreeMap::new();
        table.insert("m0".to_string(), [0.1, 0.2, 0.0, 0.0, 0.6, 0.1]);
        table.insert("m1".to_string(), [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let v = conversation_vector(
            &sample(2),
            &FeatureConfig::paired_default(),
            &test_lexicon(),
            &tagger(),
            &PromptSource::Passthrough(&table),
        )
        .unwrap();
        assert_eq!(&v[13..19], &[0.1, 0.2, 0.0, 0.0, 0.6, 0.1]);
        assert_eq!(&v[38..44], &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn passthrough_missing_id_errors() {
        let table = BTreeMap::new();
        let err = conversation_vector(
            &sample(2),
            &FeatureConfig::paired_default(),
            &test_lexicon(),
            &tagger(),
            &PromptSource::Passthrough(&table),
        )
        .unwrap_err();
        assert!(matches!(err, FeatureError::MissingPromptVector { .. }));
    }

    #[test]
    fn final_message_is_never_read_in_window_mode() {
        let config =
            FeatureConfig { window: 3, ..FeatureConfig::window_default() };
        let lex = test_lexicon();
        let tg = tagger();
        let mut s = sample(6);
        let before =
            conversation_vector(&s, &config, &lex, &tg, &PromptSource::Embedded).unwrap();
        s.messages.last_mut().unwrap().text = "worst useless problem entirely different".into();
        let after =
            conversation_vector(&s, &config, &lex, &tg, &PromptSource::Embedded).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn registry_names_are_unique_and_indexed() {
        let config = FeatureConfig::window_default();
        let names = feature_registry(&config);
        let unique: BTreeSet<&String> = names.iter().collect();
        assert_eq!(unique.len(), names.len());
        assert_eq!(message_index_of(&names[0]), Some(1));
        assert_eq!(message_index_of(names.last().unwrap()), Some(10));
        assert_eq!(message_index_of("tone_pp"), None);
    }
}
