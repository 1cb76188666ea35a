//! Core building blocks for preemptive toxicity prediction in online
//! conversations.
//!
//! The pipeline takes the opening messages of a conversation, scores every
//! word against a fused three-way sentiment lexicon, extracts politeness and
//! prompt-type features, and feeds the result either to an L2-regularized
//! logistic regression (paired conversation setting) or to a GRU sequence
//! classifier (sliding-window moderation setting).
//!
//! Everything in this crate is deterministic: given the same inputs and the
//! same seed, every function returns bit-identical results.

pub mod features;
pub mod gru;
pub mod lexicon;
pub mod logistic;
pub mod matrix;
pub mod seed;
pub mod sentiment;
pub mod tagger;
pub mod text;

pub use features::{ConversationSample, FeatureConfig, Label, Message, MessageSelection};
pub use lexicon::FusedLexicon;
pub use tagger::{PerceptronTagger, Tag};
