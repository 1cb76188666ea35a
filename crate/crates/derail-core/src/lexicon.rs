//! Loading and fusing the three source sentiment lexicons.
//!
//! SentiWordNet carries per-synset positive/negative scores in [0,1], AFINN
//! a single integer in [-5,5], and the opinion lexicon two plain word lists.
//! After per-source normalization to [0,1], the three are merged into one
//! lookup keyed by (term, part of speech, polarity): each fused score is the
//! arithmetic mean over the three sources, an absent source contributing 0.
//! Multiword terms are routed to a separate idiom table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::canonical_term;

/// Format version embedded in fused-lexicon snapshots.
pub const SNAPSHOT_FORMAT_VERSION: u32 = 1;

const SOURCE_COUNT: usize = 3;

#[derive(Error, Debug)]
pub enum LexiconError {
    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
    #[error("{file}: no lexicon entries found")]
    Empty { file: String },
    #[error("reading {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("fused lexicon snapshot: {0}")]
    Snapshot(String),
    #[error("unsupported snapshot format version {found} (expected {expected})")]
    FormatVersion { found: u32, expected: u32 },
}

/// The four open part-of-speech classes the lexicons distinguish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Noun,
    Verb,
    Adjective,
    Adverb,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adjective, Pos::Adverb];

    fn index(self) -> usize {
        match self {
            Pos::Noun => 0,
            Pos::Verb => 1,
            Pos::Adjective => 2,
            Pos::Adverb => 3,
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adjective => "adjective",
            Pos::Adverb => "adverb",
        };
        f.write_str(s)
    }
}

/// Part of speech attached to a raw lexicon entry. AFINN and the opinion
/// lexicon carry no POS information; their entries are `Any` and get
/// replicated into all four POS lists at fusion time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexiconPos {
    Tagged(Pos),
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexiconSource {
    SentiWordNet,
    Afinn,
    BingLiu,
}

impl LexiconSource {
    fn index(self) -> usize {
        match self {
            LexiconSource::SentiWordNet => 0,
            LexiconSource::Afinn => 1,
            LexiconSource::BingLiu => 2,
        }
    }
}

/// One normalized entry from a single source lexicon.
#[derive(Debug, Clone, PartialEq)]
pub struct RawLexiconEntry {
    /// Case-folded term; contains spaces for idiom candidates.
    pub term: String,
    pub pos: LexiconPos,
    /// Positive score in [0,1].
    pub pos_score: f64,
    /// Negative score in [0,1].
    pub neg_score: f64,
    pub source: LexiconSource,
}

/// A fused positive/negative score pair, each in [0,1].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Scores {
    pub pos: f64,
    pub neg: f64,
}

impl Scores {
    pub const ZERO: Scores = Scores { pos: 0.0, neg: 0.0 };
}

/// Lexicon terms may contain only alphabetic characters plus space,
/// apostrophe, and hyphen; anything else is dropped at load time.
fn valid_term(term: &str) -> bool {
    !term.is_empty()
        && term
            .chars()
            .all(|c| c.is_alphabetic() || c == ' ' || c == '\'' || c == '-')
}

fn read(path: &Path) -> Result<String, LexiconError> {
    std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
        file: path.display().to_string(),
        source,
    })
}

fn file_label(path: &Path) -> String {
    path.display().to_string()
}

/// Parse SentiWordNet 3.0 TSV content.
///
/// Expected columns: POS, ID, PosScore, NegScore, SynsetTerms, Gloss.
/// Lines starting with `#` are comments. Synset terms carry a `#sense`
/// suffix which is stripped; underscores become spaces, turning multiword
/// lemmas into idiom candidates. Duplicate (term, POS) occurrences across
/// synsets are averaged.
pub fn parse_sentiwordnet(content: &str, file: &str) -> Result<Vec<RawLexiconEntry>, LexiconError> {
    let mut acc: BTreeMap<(String, Pos), (f64, f64, u32)> = BTreeMap::new();
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 5 {
            return Err(LexiconError::Parse {
                file: file.to_string(),
                line: lineno,
                msg: format!("expected at least 5 tab-separated columns, found {}", cols.len()),
            });
        }
        let pos = match cols[0] {
            "n" => Pos::Noun,
            "v" => Pos::Verb,
            "a" | "s" => Pos::Adjective,
            "r" => Pos::Adverb,
            other => {
                return Err(LexiconError::Parse {
                    file: file.to_string(),
                    line: lineno,
                    msg: format!("unknown POS code {other:?}"),
                })
            }
        };
        let parse_score = |s: &str, name: &str| -> Result<f64, LexiconError> {
            let v: f64 = s.parse().map_err(|_| LexiconError::Parse {
                file: file.to_string(),
                line: lineno,
                msg: format!("{name} {s:?} is not a number"),
            })?;
            if !(0.0..=1.0).contains(&v) {
                return Err(LexiconError::Parse {
                    file: file.to_string(),
                    line: lineno,
                    msg: format!("{name} {v} outside [0,1]"),
                });
            }
            Ok(v)
        };
        let pos_score = parse_score(cols[2], "PosScore")?;
        let neg_score = parse_score(cols[3], "NegScore")?;
        for raw_term in cols[4].split_whitespace() {
            let lemma = match raw_term.rsplit_once('#') {
                Some((lemma, _sense)) => lemma,
                None => raw_term,
            };
            let term = lemma.replace('_', " ").to_lowercase();
            if !valid_term(&term) {
                continue;
            }
            let slot = acc.entry((term, pos)).or_insert((0.0, 0.0, 0));
            slot.0 += pos_score;
            slot.1 += neg_score;
            slot.2 += 1;
        }
    }
    if acc.is_empty() {
        return Err(LexiconError::Empty { file: file.to_string() });
    }
    Ok(acc
        .into_iter()
        .map(|((term, pos), (ps, ns, n))| RawLexiconEntry {
            term,
            pos: LexiconPos::Tagged(pos),
            pos_score: ps / n as f64,
            neg_score: ns / n as f64,
            source: LexiconSource::SentiWordNet,
        })
        .collect())
}

/// Load SentiWordNet from a file path. See [`parse_sentiwordnet`].
pub fn load_sentiwordnet(path: &Path) -> Result<Vec<RawLexiconEntry>, LexiconError> {
    parse_sentiwordnet(&read(path)?, &file_label(path))
}

/// Parse AFINN content: one `term<TAB>score` pair per line, scores integers
/// in [-5,5]. Positive scores map to `pos_score = s/5`, negative ones to
/// `neg_score = |s|/5`.
pub fn parse_afinn(content: &str, file: &str) -> Result<Vec<RawLexiconEntry>, LexiconError> {
    let mut entries = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let (term, score) = line.split_once('\t').ok_or_else(|| LexiconError::Parse {
            file: file.to_string(),
            line: lineno,
            msg: "expected term<TAB>score".to_string(),
        })?;
        let score: i32 = score.trim().parse().map_err(|_| LexiconError::Parse {
            file: file.to_string(),
            line: lineno,
            msg: format!("score {score:?} is not an integer"),
        })?;
        if !(-5..=5).contains(&score) {
            return Err(LexiconError::Parse {
                file: file.to_string(),
                line: lineno,
                msg: format!("score {score} outside [-5,5]"),
            });
        }
        let term = term.trim().to_lowercase();
        if !valid_term(&term) {
            continue;
        }
        let (pos_score, neg_score) = if score >= 0 {
            (score as f64 / 5.0, 0.0)
        } else {
            (0.0, score.unsigned_abs() as f64 / 5.0)
        };
        entries.push(RawLexiconEntry {
            term,
            pos: LexiconPos::Any,
            pos_score,
            neg_score,
            source: LexiconSource::Afinn,
        });
    }
    if entries.is_empty() {
        return Err(LexiconError::Empty { file: file.to_string() });
    }
    Ok(entries)
}

/// Load AFINN from a file path. See [`parse_afinn`].
pub fn load_afinn(path: &Path) -> Result<Vec<RawLexiconEntry>, LexiconError> {
    parse_afinn(&read(path)?, &file_label(path))
}

/// Result of loading the two opinion-lexicon word lists. A term present in
/// both lists keeps both polarities and is reported in `dual_polarity`.
#[derive(Debug)]
pub struct BingLiuLexicon {
    pub entries: Vec<RawLexiconEntry>,
    pub dual_polarity: Vec<String>,
}

fn parse_bingliu_list(content: &str) -> BTreeSet<String> {
    let mut terms = BTreeSet::new();
    for line in content.lines() {
        let line = line.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let term = line.to_lowercase();
        if valid_term(&term) {
            terms.insert(term);
        }
    }
    terms
}

/// Parse the opinion lexicon's positive and negative word lists. Lines
/// starting with `;` are headers. Membership in the positive list yields
/// `pos_score = 1.0`, in the negative list `neg_score = 1.0`.
pub fn parse_bingliu(
    pos_content: &str,
    neg_content: &str,
    pos_file: &str,
    neg_file: &str,
) -> Result<BingLiuLexicon, LexiconError> {
    let pos_terms = parse_bingliu_list(pos_content);
    let neg_terms = parse_bingliu_list(neg_content);
    if pos_terms.is_empty() {
        return Err(LexiconError::Empty { file: pos_file.to_string() });
    }
    if neg_terms.is_empty() {
        return Err(LexiconError::Empty { file: neg_file.to_string() });
    }
    let dual_polarity: Vec<String> = pos_terms.intersection(&neg_terms).cloned().collect();
    let mut entries = Vec::new();
    for term in &pos_terms {
        entries.push(RawLexiconEntry {
            term: term.clone(),
            pos: LexiconPos::Any,
            pos_score: 1.0,
            neg_score: 0.0,
            source: LexiconSource::BingLiu,
        });
    }
    for term in &neg_terms {
        entries.push(RawLexiconEntry {
            term: term.clone(),
            pos: LexiconPos::Any,
            pos_score: 0.0,
            neg_score: 1.0,
            source: LexiconSource::BingLiu,
        });
    }
    Ok(BingLiuLexicon { entries, dual_polarity })
}

/// Load the opinion lexicon from its two file paths. See [`parse_bingliu`].
pub fn load_bingliu(pos_path: &Path, neg_path: &Path) -> Result<BingLiuLexicon, LexiconError> {
    parse_bingliu(
        &read(pos_path)?,
        &read(neg_path)?,
        &file_label(pos_path),
        &file_label(neg_path),
    )
}

#[derive(Debug, Clone, Copy, Default)]
struct SourceAcc {
    pos_sum: f64,
    neg_sum: f64,
    count: u32,
}

impl SourceAcc {
    fn add(&mut self, pos: f64, neg: f64) {
        self.pos_sum += pos;
        self.neg_sum += neg;
        self.count += 1;
    }

    fn mean(&self) -> Option<Scores> {
        if self.count == 0 {
            None
        } else {
            Some(Scores {
                pos: self.pos_sum / self.count as f64,
                neg: self.neg_sum / self.count as f64,
            })
        }
    }
}

#[derive(Debug, Clone, Default)]
struct UnigramAcc {
    per_pos: [[SourceAcc; SOURCE_COUNT]; 4],
    any_pos: bool,
}

/// The fused three-source lexicon: unigrams keyed by (term, POS), idioms
/// keyed by their canonical tokenized form. Immutable once built and safe to
/// share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedLexicon {
    unigrams: BTreeMap<String, [Option<Scores>; 4]>,
    any_pos_terms: BTreeSet<String>,
    idioms: BTreeMap<String, Scores>,
    max_idiom_tokens: usize,
    source_count: u32,
}

/// Merge normalized entries from all sources into one [`FusedLexicon`].
///
/// For every (term, POS) the fused score is the sum of the per-source mean
/// scores divided by the number of sources (3), so an absent source
/// contributes 0 and fused scores stay in [0,1]. `Any`-POS entries are
/// replicated into all four POS lists. Terms whose canonical form spans two
/// or more tokens land in the idiom table, where POS is collapsed.
pub fn fuse(entries: &[RawLexiconEntry]) -> FusedLexicon {
    let mut unigrams: BTreeMap<String, UnigramAcc> = BTreeMap::new();
    let mut idioms: BTreeMap<String, [SourceAcc; SOURCE_COUNT]> = BTreeMap::new();

    for entry in entries {
        let (key, n_tokens) = canonical_term(&entry.term);
        if n_tokens == 0 {
            continue;
        }
        let src = entry.source.index();
        if n_tokens >= 2 {
            idioms.entry(key).or_default()[src].add(entry.pos_score, entry.neg_score);
        } else {
            let acc = unigrams.entry(key).or_default();
            match entry.pos {
                LexiconPos::Tagged(pos) => {
                    acc.per_pos[pos.index()][src].add(entry.pos_score, entry.neg_score);
                }
                LexiconPos::Any => {
                    acc.any_pos = true;
                    for slot in &mut acc.per_pos {
                        slot[src].add(entry.pos_score, entry.neg_score);
                    }
                }
            }
        }
    }

    let divisor = SOURCE_COUNT as f64;
    let mut unigram_table = BTreeMap::new();
    let mut any_pos_terms = BTreeSet::new();
    for (term, acc) in unigrams {
        let mut per_pos = [None; 4];
        for (i, sources) in acc.per_pos.iter().enumerate() {
            let mut fused = Scores::ZERO;
            let mut present = false;
            for s in sources {
                if let Some(mean) = s.mean() {
                    fused.pos += mean.pos;
                    fused.neg += mean.neg;
                    present = true;
                }
            }
            if present {
                per_pos[i] = Some(Scores { pos: fused.pos / divisor, neg: fused.neg / divisor });
            }
        }
        if acc.any_pos {
            any_pos_terms.insert(term.clone());
        }
        unigram_table.insert(term, per_pos);
    }

    let mut idiom_table = BTreeMap::new();
    let mut max_idiom_tokens = 0;
    for (key, sources) in idioms {
        let mut fused = Scores::ZERO;
        for s in &sources {
            if let Some(mean) = s.mean() {
                fused.pos += mean.pos;
                fused.neg += mean.neg;
            }
        }
        let n_tokens = key.split(' ').count();
        max_idiom_tokens = max_idiom_tokens.max(n_tokens);
        idiom_table.insert(key, Scores { pos: fused.pos / divisor, neg: fused.neg / divisor });
    }

    FusedLexicon {
        unigrams: unigram_table,
        any_pos_terms,
        idioms: idiom_table,
        max_idiom_tokens,
        source_count: SOURCE_COUNT as u32,
    }
}

impl FusedLexicon {
    /// Fused scores for a unigram under the given POS; absent terms or
    /// absent POS slots score (0,0).
    pub fn lookup(&self, term: &str, pos: Pos) -> Scores {
        self.unigrams
            .get(term)
            .and_then(|per_pos| per_pos[pos.index()])
            .unwrap_or(Scores::ZERO)
    }

    /// Fallback lookup for tokens tagged outside the four open classes:
    /// if the term has an any-POS source entry, take the elementwise max
    /// over its four POS slots, otherwise (0,0).
    pub fn lookup_any(&self, term: &str) -> Scores {
        if !self.any_pos_terms.contains(term) {
            return Scores::ZERO;
        }
        let mut best = Scores::ZERO;
        if let Some(per_pos) = self.unigrams.get(term) {
            for scores in per_pos.iter().flatten() {
                best.pos = best.pos.max(scores.pos);
                best.neg = best.neg.max(scores.neg);
            }
        }
        best
    }

    /// Fused scores for a canonical idiom key; absent keys score (0,0).
    pub fn lookup_idiom(&self, key: &str) -> Scores {
        self.idioms.get(key).copied().unwrap_or(Scores::ZERO)
    }

    pub fn has_idiom(&self, key: &str) -> bool {
        self.idioms.contains_key(key)
    }

    /// Token length of the longest idiom key, for bounding idiom matching.
    pub fn max_idiom_tokens(&self) -> usize {
        self.max_idiom_tokens
    }

    pub fn unigram_count(&self) -> usize {
        self.unigrams.len()
    }

    pub fn idiom_count(&self) -> usize {
        self.idioms.len()
    }

    pub fn source_count(&self) -> u32 {
        self.source_count
    }

    pub fn iter_idioms(&self) -> impl Iterator<Item = (&str, Scores)> {
        self.idioms.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Serialize to the versioned JSON snapshot format.
    pub fn to_snapshot_json(&self) -> String {
        let snapshot = Snapshot {
            format_version: SNAPSHOT_FORMAT_VERSION,
            source_count: self.source_count,
            unigrams: self
                .unigrams
                .iter()
                .flat_map(|(term, per_pos)| {
                    Pos::ALL.iter().filter_map(move |&pos| {
                        per_pos[pos.index()].map(|s| SnapshotEntry {
                            term: term.clone(),
                            pos,
                            pos_score: s.pos,
                            neg_score: s.neg,
                        })
                    })
                })
                .collect(),
            any_pos_terms: self.any_pos_terms.iter().cloned().collect(),
            idioms: self
                .idioms
                .iter()
                .map(|(k, s)| SnapshotIdiom { term: k.clone(), pos_score: s.pos, neg_score: s.neg })
                .collect(),
        };
        serde_json::to_string_pretty(&snapshot).expect("snapshot serialization cannot fail")
    }

    /// Rebuild a lexicon from its JSON snapshot, rejecting unknown format
    /// versions.
    pub fn from_snapshot_json(json: &str) -> Result<FusedLexicon, LexiconError> {
        let snapshot: Snapshot =
            serde_json::from_str(json).map_err(|e| LexiconError::Snapshot(e.to_string()))?;
        if snapshot.format_version != SNAPSHOT_FORMAT_VERSION {
            return Err(LexiconError::FormatVersion {
                found: snapshot.format_version,
                expected: SNAPSHOT_FORMAT_VERSION,
            });
        }
        let mut unigrams: BTreeMap<String, [Option<Scores>; 4]> = BTreeMap::new();
        for e in snapshot.unigrams {
            unigrams.entry(e.term).or_insert([None; 4])[e.pos.index()] =
                Some(Scores { pos: e.pos_score, neg: e.neg_score });
        }
        let mut max_idiom_tokens = 0;
        let mut idioms = BTreeMap::new();
        for e in snapshot.idioms {
            max_idiom_tokens = max_idiom_tokens.max(e.term.split(' ').count());
            idioms.insert(e.term, Scores { pos: e.pos_score, neg: e.neg_score });
        }
        Ok(FusedLexicon {
            unigrams,
            any_pos_terms: snapshot.any_pos_terms.into_iter().collect(),
            idioms,
            max_idiom_tokens,
            source_count: snapshot.source_count,
        })
    }

    /// Load a fused lexicon snapshot from a file path.
    pub fn load_snapshot(path: &Path) -> Result<FusedLexicon, LexiconError> {
        FusedLexicon::from_snapshot_json(&read(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    format_version: u32,
    source_count: u32,
    unigrams: Vec<SnapshotEntry>,
    any_pos_terms: Vec<String>,
    idioms: Vec<SnapshotIdiom>,
}

#[derive(Serialize, Deserialize)]
struct SnapshotEntry {
    term: String,
    pos: Pos,
    pos_score: f64,
    neg_score: f64,
}

#[derive(Serialize, Deserialize)]
struct SnapshotIdiom {
    term: String,
    pos_score: f64,
    neg_score: f64,
}

/// Small fused lexicon used by unit tests across the crate.
#[cfg(test)]
pub(crate) fn test_lexicon() -> FusedLexicon {
    let swn = "\
# test snapshot
a\t00001\t0\t0.75\tworst#1\tthe superlative of bad
a\t00002\t0\t0.5\tuseless#1 worthless#1\thaving no use
a\t00003\t0\t0.75\tuseless#2\tof no benefit
n\t00004\t0\t0.75\tproblem#1\ta source of difficulty
n\t00005\t0\t0.875\tproblem#2\ta question to consider
a\t00006\t0.625\t0\tpretty#1\tpleasing by delicacy
r\t00007\t0.5\t0\tpretty#2\tto a moderately high degree
v\t00008\t0\t0.5\tgive_up#1\tstop trying
v\t00009\t0\t0.625\tgive_up_on#1\tabandon hope for
a\t00010\t0\t0.375\tunbelievable#1\tbeyond belief
";
    let afinn = "worst\t-3\nuseless\t-2\nabandon\t-2\npretty\t1\ngood\t3\nfailed\t-2\n";
    let bl_pos = "; opinion lexicon positive\npretty\ngood\n";
    let bl_neg = "; opinion lexicon negative\nworst\nuseless\nproblem\nunbelievable\nfailed\n";
    let mut entries = parse_sentiwordnet(swn, "swn").unwrap();
    entries.extend(parse_afinn(afinn, "afinn").unwrap());
    entries.extend(parse_bingliu(bl_pos, bl_neg, "bl+", "bl-").unwrap().entries);
    fuse(&entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sentiwordnet_maps_fields() {
        let entries =
            parse_sentiwordnet("a\t123\t0.75\t0\tunbelievable#1\tgloss text", "swn").unwrap();
        assert_eq!(entries.len(), 1);
        let e = &entries[0];
        assert_eq!(e.term, "unbelievable");
        assert_eq!(e.pos, LexiconPos::Tagged(Pos::Adjective));
        assert_eq!(e.pos_score, 0.75);
        assert_eq!(e.neg_score, 0.0);
    }

    #[test]
    fn sentiwordnet_underscore_becomes_idiom_candidate() {
        let entries = parse_sentiwordnet("v\t1\t0\t0.5\tgive_up#1\tgloss", "swn").unwrap();
        assert_eq!(entries[0].term, "give up");
    }

    #[test]
    fn sentiwordnet_skips_comments_and_errors_when_empty() {
        let err = parse_sentiwordnet("# SentiWordNet v3.0\n# header only\n", "swn").unwrap_err();
        assert!(matches!(err, LexiconError::Empty { .. }));
    }

    #[test]
    fn sentiwordnet_reports_line_numbers() {
        let err = parse_sentiwordnet("a\t1\t0.5\t0\tok#1\tgloss\nbroken line", "swn").unwrap_err();
        match err {
            LexiconError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn sentiwordnet_averages_duplicate_term_pos() {
        let content = "a\t1\t0\t0.5\tuseless#1\tg\na\t2\t0\t0.75\tuseless#2\tg";
        let entries = parse_sentiwordnet(content, "swn").unwrap();
        assert_eq!(entries.len(), 1);
        assert_abs_diff_eq!(entries[0].neg_score, 0.625);
    }

    #[test]
    fn afinn_normalizes_to_unit_interval() {
        let entries = parse_afinn("worst\t-3\nabandon\t-2\nx\t0", "afinn").unwrap();
        assert_abs_diff_eq!(entries[0].neg_score, 0.6);
        assert_eq!(entries[0].pos_score, 0.0);
        assert_abs_diff_eq!(entries[1].neg_score, 0.4);
        assert_eq!(entries[2].pos_score, 0.0);
        assert_eq!(entries[2].neg_score, 0.0);
    }

    #[test]
    fn afinn_rejects_out_of_range_scores() {
        let err = parse_afinn("terrible\t-6", "afinn").unwrap_err();
        assert!(matches!(err, LexiconError::Parse { .. }));
    }

    #[test]
    fn bingliu_membership_and_headers() {
        let lex = parse_bingliu(
            ";;; opinion lexicon\ngood\n",
            ";;; opinion lexicon\nuseless\n",
            "p",
            "n",
        )
        .unwrap();
        let useless = lex.entries.iter().find(|e| e.term == "useless").unwrap();
        assert_eq!(useless.neg_score, 1.0);
        let good = lex.entries.iter().find(|e| e.term == "good").unwrap();
        assert_eq!(good.pos_score, 1.0);
        assert!(lex.dual_polarity.is_empty());
    }

    #[test]
    fn bingliu_dual_membership_keeps_both_and_warns() {
        let lex = parse_bingliu("odd\n", "odd\n", "p", "n").unwrap();
        assert_eq!(lex.dual_polarity, vec!["odd".to_string()]);
        let polarities: Vec<(f64, f64)> = lex
            .entries
            .iter()
            .filter(|e| e.term == "odd")
            .map(|e| (e.pos_score, e.neg_score))
            .collect();
        assert!(polarities.contains(&(1.0, 0.0)));
        assert!(polarities.contains(&(0.0, 1.0)));
    }

    #[test]
    fn fusion_reproduces_reported_word_scores() {
        let lex = test_lexicon();
        // worst: swn 0.75, afinn 0.6, opinion list 1.0 -> 0.7833
        assert_abs_diff_eq!(lex.lookup("worst", Pos::Adjective).neg, 0.78, epsilon = 0.05);
        // useless: swn mean(0.5, 0.75) = 0.625, afinn 0.4, list 1.0 -> 0.675
        assert_abs_diff_eq!(lex.lookup("useless", Pos::Adjective).neg, 0.67, epsilon = 0.05);
        // problem: swn mean(0.75, 0.875), list 1.0 -> 0.6042
        assert_abs_diff_eq!(lex.lookup("problem", Pos::Noun).neg, 0.60, epsilon = 0.05);
        // pretty: swn 0.625 (adjective), afinn 0.2, list 1.0 -> 0.6083
        assert_abs_diff_eq!(lex.lookup("pretty", Pos::Adjective).pos, 0.61, epsilon = 0.05);
    }

    #[test]
    fn absent_terms_score_zero() {
        let lex = test_lexicon();
        assert_eq!(lex.lookup("zzzxqy", Pos::Noun), Scores::ZERO);
        assert_eq!(lex.lookup_idiom("no such idiom"), Scores::ZERO);
    }

    #[test]
    fn single_source_score_is_divided_by_three() {
        let entries = vec![RawLexiconEntry {
            term: "solo".into(),
            pos: LexiconPos::Tagged(Pos::Noun),
            pos_score: 0.9,
            neg_score: 0.0,
            source: LexiconSource::SentiWordNet,
        }];
        let lex = fuse(&entries);
        assert_abs_diff_eq!(lex.lookup("solo", Pos::Noun).pos, 0.3);
    }

    #[test]
    fn any_pos_entries_replicate_to_all_four() {
        let lex = test_lexicon();
        for pos in Pos::ALL {
            // afinn 0.6 + opinion list 1.0, no swn outside adjective
            assert!(lex.lookup("worst", pos).neg >= 0.53);
        }
        // "good" never appears in SentiWordNet here but has any-POS sources
        assert!(lex.lookup_any("good").pos > 0.5);
        assert_eq!(lex.lookup_any("problem"), lex.lookup("problem", Pos::Noun));
    }

    #[test]
    fn lookup_any_requires_an_any_pos_source() {
        // swn-only terms have no any-POS fallback
        let entries = vec![RawLexiconEntry {
            term: "ponder".into(),
            pos: LexiconPos::Tagged(Pos::Verb),
            pos_score: 0.5,
            neg_score: 0.0,
            source: LexiconSource::SentiWordNet,
        }];
        let solo = fuse(&entries);
        assert_eq!(solo.lookup_any("ponder"), Scores::ZERO);
    }

    #[test]
    fn fusion_is_permutation_invariant() {
        let swn = parse_sentiwordnet("a\t1\t0\t0.75\tworst#1\tg\nn\t2\t0\t0.8\tproblem#1\tg", "s")
            .unwrap();
        let afinn = parse_afinn("worst\t-3\ngood\t3", "a").unwrap();
        let mut entries = swn;
        entries.extend(afinn);
        let fused = fuse(&entries);
        entries.reverse();
        assert_eq!(fuse(&entries), fused);
    }

    #[test]
    fn all_fused_scores_in_unit_interval() {
        let lex = test_lexicon();
        for (term, per_pos) in &lex.unigrams {
            for scores in per_pos.iter().flatten() {
                assert!((0.0..=1.0).contains(&scores.pos), "{term} pos out of range");
                assert!((0.0..=1.0).contains(&scores.neg), "{term} neg out of range");
            }
        }
        for (_, s) in lex.iter_idioms() {
            assert!((0.0..=1.0).contains(&s.pos));
            assert!((0.0..=1.0).contains(&s.neg));
        }
    }

    #[test]
    fn idiom_keys_span_multiple_tokens() {
        let lex = test_lexicon();
        for (key, _) in lex.iter_idioms() {
            assert!(crate::text::tokenize(key).len() >= 2, "bad idiom key {key:?}");
        }
        assert!(lex.has_idiom("give up"));
        assert!(lex.has_idiom("give up on"));
        assert_eq!(lex.max_idiom_tokens(), 3);
    }

    #[test]
    fn snapshot_round_trip_and_version_check() {
        let lex = test_lexicon();
        let json = lex.to_snapshot_json();
        let restored = FusedLexicon::from_snapshot_json(&json).unwrap();
        assert_eq!(restored, lex);

        let bumped = json.replace(
            &format!("\"format_version\": {SNAPSHOT_FORMAT_VERSION}"),
            "\"format_version\": 999",
        );
        assert!(matches!(
            FusedLexicon::from_snapshot_json(&bumped),
            Err(LexiconError::FormatVersion { found: 999, .. })
        ));
    }

    #[test]
    fn rebuilding_from_same_inputs_is_identical() {
        let a = test_lexicon();
        let b = test_lexicon();
        assert_eq!(a, b);
        assert_eq!(a.to_snapshot_json(), b.to_snapshot_json());
    }
}
