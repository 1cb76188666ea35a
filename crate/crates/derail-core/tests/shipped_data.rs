//! Checks against the data files shipped in-repo: the pinned lexicon
//! snapshots must reproduce the reference word scores, and the bundled
//! tagger model must tag the calibration sentences correctly.

use std::path::{Path, PathBuf};

use derail_core::lexicon::{self, Pos};
use derail_core::tagger::{PerceptronTagger, Tag};
use derail_core::text::{mark_idioms, tokenize};
use derail_core::FusedLexicon;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn shipped_lexicon() -> FusedLexicon {
    let dir = data_dir().join("lexicons");
    let mut entries = lexicon::load_sentiwordnet(&dir.join("sentiwordnet.tsv")).unwrap();
    entries.extend(lexicon::load_afinn(&dir.join("afinn.txt")).unwrap());
    let bl = lexicon::load_bingliu(
        &dir.join("bingliu_positive.txt"),
        &dir.join("bingliu_negative.txt"),
    )
    .unwrap();
    assert!(bl.dual_polarity.is_empty(), "dual-polarity terms: {:?}", bl.dual_polarity);
    entries.extend(bl.entries);
    lexicon::fuse(&entries)
}

fn shipped_tagger() -> PerceptronTagger {
    PerceptronTagger::load(&data_dir().join("tagger/model.json")).unwrap()
}

#[test]
fn calibration_word_scores() {
    let lex = shipped_lexicon();
    let neg = |term: &str, pos: Pos| lex.lookup(term, pos).neg;
    let pos = |term: &str, pos_tag: Pos| lex.lookup(term, pos_tag).pos;

    assert!((neg("useless", Pos::Adjective) - 0.67).abs() <= 0.05);
    assert!((neg("problem", Pos::Noun) - 0.60).abs() <= 0.05);
    assert!((neg("worst", Pos::Adjective) - 0.78).abs() <= 0.05);
    assert!((pos("pretty", Pos::Adjective) - 0.59).abs() <= 0.05);
    assert!((pos("pretty", Pos::Adverb) - 0.59).abs() <= 0.05);

    // supporting words quoted alongside the calibration set
    assert!((neg("failed", Pos::Verb) - 0.47).abs() <= 0.05);
    assert!((neg("unbelievable", Pos::Adjective) - 0.46).abs() <= 0.05);
    assert!((pos("well", Pos::Adverb) - 0.46).abs() <= 0.05);
    assert!((pos("all", Pos::Adverb) - 0.04).abs() <= 0.03);
    assert!((pos("think", Pos::Verb) - 0.02).abs() <= 0.03);
}

#[test]
fn idioms_present_and_negative() {
    let lex = shipped_lexicon();
    assert!(lex.lookup_idiom("give up").neg > 0.1);
    assert!(lex.lookup_idiom("give up on").neg > lex.lookup_idiom("give up").neg);
    assert!(lex.idiom_count() >= 15);
    let toks = mark_idioms(tokenize("don't give up on this"), &lex);
    assert!(toks.iter().any(|t| t.is_idiom && t.text == "give up on"));
}

#[test]
fn shipped_tagger_calibration_sentences() {
    let tagger = shipped_tagger();
    let lex = shipped_lexicon();

    let tags = tagger.tag(&tokenize("a useless process"));
    assert_eq!(tags[1].tag, Tag::Adjective);

    let tags = tagger.tag(&tokenize("that went well ."));
    assert_eq!(tags[3].tag, Tag::Other);

    // idiom head-word tag
    let toks = mark_idioms(tokenize("they give up"), &lex);
    let tags = tagger.tag(&toks);
    assert!(toks.iter().any(|t| t.is_idiom));
    assert_eq!(tags.last().unwrap().tag, Tag::Verb);

    // words whose POS routes the calibration lookups
    let tags = tagger.tag(&tokenize("this is the worst and most useless idea"));
    let by_text = |t: &str| tags.iter().find(|x| x.token.text == t).unwrap().tag;
    assert_eq!(by_text("worst"), Tag::Adjective);
    assert_eq!(by_text("useless"), Tag::Adjective);

    let tags = tagger.tag(&tokenize("the problem is obvious"));
    assert_eq!(tags[1].tag, Tag::Noun);

    let tags = tagger.tag(&tokenize("it is a pretty useless process"));
    let pretty = tags.iter().find(|x| x.token.text == "pretty").unwrap().tag;
    assert!(pretty == Tag::Adjective || pretty == Tag::Adverb);
}
