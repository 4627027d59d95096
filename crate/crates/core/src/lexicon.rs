//! Sentiment dictionaries: attribute whitelist, synonym map, positive and
//! negative word lists.
//!
//! Every entry is stored under its canonical match form (NFC, lower-cased,
//! internal whitespace collapsed to one space) together with the spelling it
//! was first loaded with, so a lexicon can be written back out unchanged.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

pub const WHITE_LIST_FILE: &str = "white_list.txt";
pub const NORMALIZATION_FILE: &str = "normalization.tsv";
pub const POSITIVE_FILE: &str = "pos_words.txt";
pub const NEGATIVE_FILE: &str = "neg_words.txt";

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: expected `canonical<TAB>synonym`", path.display())]
    MalformedSynonym { path: PathBuf, line: usize },
    #[error("synonym {synonym:?} refers to unknown attribute {base:?}")]
    UnknownBase { synonym: String, base: String },
    #[error("{word:?} is listed as both positive and negative")]
    PolarityConflict { word: String },
    #[error("attribute whitelist is empty")]
    EmptyAttributes,
}

/// Canonical match form: NFC, lower-cased, whitespace runs collapsed.
/// Diacritics are preserved, so "Aníbal" and "Anibal" stay distinct.
pub fn canonical_form(s: &str) -> String {
    let folded: String = s.nfc().collect::<String>().to_lowercase();
    let mut out = String::with_capacity(folded.len());
    for word in folded.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.nfc());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn weight(self) -> i64 {
        match self {
            Polarity::Positive => 1,
            Polarity::Negative => -1,
        }
    }
}

/// A set of canonical entries, each remembering its original spelling.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    entries: BTreeMap<String, String>,
}

impl Dictionary {
    /// Inserts `raw`; returns false when it was blank or already present.
    pub fn insert(&mut self, raw: &str) -> bool {
        let key = canonical_form(raw);
        if key.is_empty() || self.entries.contains_key(&key) {
            return false;
        }
        self.entries.insert(key, raw.trim().to_string());
        true
    }

    pub fn contains(&self, canonical: &str) -> bool {
        self.entries.contains_key(canonical)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn canonical(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn display(&self, canonical: &str) -> Option<&str> {
        self.entries.get(canonical).map(String::as_str)
    }

    fn max_phrase_len(&self) -> usize {
        self.entries
            .keys()
            .map(|k| k.split(' ').count())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synonym {
    /// Canonical attribute this surface form resolves to.
    pub attribute: String,
    pub display: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    attributes: Dictionary,
    synonyms: BTreeMap<String, Synonym>,
    positive: Dictionary,
    negative: Dictionary,
    max_phrase_len: usize,
}

/// Locations of the four dictionary files.
#[derive(Debug, Clone)]
pub struct LexiconPaths {
    pub white_list: PathBuf,
    pub normalization: PathBuf,
    pub positive: PathBuf,
    pub negative: PathBuf,
}

impl LexiconPaths {
    /// The standard file names inside `dir`.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        LexiconPaths {
            white_list: dir.join(WHITE_LIST_FILE),
            normalization: dir.join(NORMALIZATION_FILE),
            positive: dir.join(POSITIVE_FILE),
            negative: dir.join(NEGATIVE_FILE),
        }
    }
}

fn read(path: &Path) -> Result<String, LexiconError> {
    fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn word_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty())
}

pub fn load_lexicon(paths: &LexiconPaths) -> Result<Lexicon, LexiconError> {
    let white_list = read(&paths.white_list)?;
    let normalization = read(&paths.normalization)?;
    let positive = read(&paths.positive)?;
    let negative = read(&paths.negative)?;

    let mut synonyms = Vec::new();
    for (idx, line) in normalization.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = || LexiconError::MalformedSynonym {
            path: paths.normalization.clone(),
            line: idx + 1,
        };
        let (base, synonym) = line.split_once('\t').ok_or_else(malformed)?;
        let (base, synonym) = (base.trim(), synonym.trim());
        if base.is_empty() || synonym.is_empty() || synonym.contains('\t') {
            return Err(malformed());
        }
        synonyms.push((base, synonym));
    }

    Lexicon::from_entries(
        word_lines(&white_list),
        synonyms,
        word_lines(&positive),
        word_lines(&negative),
    )
}

impl Lexicon {
    /// A lexicon with no entries at all. `load_lexicon` never produces one,
    /// since it requires a non-empty whitelist.
    pub fn empty() -> Self {
        Lexicon::default()
    }

    /// Builds and validates a lexicon from raw entries.
    pub fn from_entries<'a>(
        attributes: impl IntoIterator<Item = &'a str>,
        synonyms: impl IntoIterator<Item = (&'a str, &'a str)>,
        positive: impl IntoIterator<Item = &'a str>,
        negative: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::default();
        for a in attributes {
            lex.attributes.insert(a);
        }
        if lex.attributes.is_empty() {
            return Err(LexiconError::EmptyAttributes);
        }
        for (base, synonym) in synonyms {
            let base_key = canonical_form(base);
            if !lex.attributes.contains(&base_key) {
                return Err(LexiconError::UnknownBase {
                    synonym: synonym.to_string(),
                    base: base.to_string(),
                });
            }
            let key = canonical_form(synonym);
            if key.is_empty() {
                continue;
            }
            lex.synonyms.entry(key).or_insert_with(|| Synonym {
                attribute: base_key,
                display: synonym.trim().to_string(),
            });
        }
        for w in positive {
            lex.positive.insert(w);
        }
        for w in negative {
            lex.negative.insert(w);
        }
        if let Some(word) = lex.positive.canonical().find(|w| lex.negative.contains(w)) {
            return Err(LexiconError::PolarityConflict {
                word: lex.positive.display(word).unwrap_or(word).to_string(),
            });
        }
        lex.refresh_phrase_len();
        Ok(lex)
    }

    fn refresh_phrase_len(&mut self) {
        let synonyms = self
            .synonyms
            .keys()
            .map(|k| k.split(' ').count())
            .max()
            .unwrap_or(0);
        self.max_phrase_len = [
            self.attributes.max_phrase_len(),
            self.positive.max_phrase_len(),
            self.negative.max_phrase_len(),
            synonyms,
        ]
        .into_iter()
        .max()
        .unwrap_or(0);
    }

    pub fn attributes(&self) -> &Dictionary {
        &self.attributes
    }

    pub fn positive_words(&self) -> &Dictionary {
        &self.positive
    }

    pub fn negative_words(&self) -> &Dictionary {
        &self.negative
    }

    pub fn synonyms(&self) -> &BTreeMap<String, Synonym> {
        &self.synonyms
    }

    /// Longest entry of any dictionary, in tokens.
    pub fn max_phrase_len(&self) -> usize {
        self.max_phrase_len
    }

    /// Canonical attribute named by `phrase`, directly or through a synonym.
    pub fn attribute_of(&self, phrase: &str) -> Option<&str> {
        if let Some((key, _)) = self.attributes.entries.get_key_value(phrase) {
            return Some(key);
        }
        self.synonyms.get(phrase).map(|s| s.attribute.as_str())
    }

    pub fn polarity_of(&self, phrase: &str) -> Option<Polarity> {
        if self.positive.contains(phrase) {
            Some(Polarity::Positive)
        } else if self.negative.contains(phrase) {
            Some(Polarity::Negative)
        } else {
            None
        }
    }

    /// True if the canonical `term` appears in any of the four dictionaries.
    pub fn contains(&self, term: &str) -> bool {
        self.attributes.contains(term)
            || self.synonyms.contains_key(term)
            || self.positive.contains(term)
            || self.negative.contains(term)
    }

    /// Writes the four dictionary files, using original spellings.
    pub fn save(&self, paths: &LexiconPaths) -> io::Result<()> {
        fn write_dict(path: &Path, dict: &Dictionary) -> io::Result<()> {
            let mut f = io::BufWriter::new(fs::File::create(path)?);
            for display in dict.entries.values() {
                writeln!(f, "{display}")?;
            }
            f.flush()
        }
        write_dict(&paths.white_list, &self.attributes)?;
        write_dict(&paths.positive, &self.positive)?;
        write_dict(&paths.negative, &self.negative)?;
        let mut f = io::BufWriter::new(fs::File::create(&paths.normalization)?);
        for syn in self.synonyms.values() {
            let base = self
                .attributes
                .display(&syn.attribute)
                .unwrap_or(&syn.attribute);
            writeln!(f, "{base}\t{}", syn.display)?;
        }
        f.flush()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermFrequency {
    pub term: String,
    pub count: u64,
}

/// Raw whitespace-delimited term counts. Partitions of a corpus can be
/// counted separately and merged.
#[derive(Debug, Clone, Default)]
pub struct TermCounts {
    counts: HashMap<String, u64>,
}

impl TermCounts {
    pub fn new() -> Self {
        TermCounts::default()
    }

    /// Splits on the single space character only; no other delimiter.
    pub fn add_text(&mut self, text: &str) {
        for term in text.split(' ').filter(|t| !t.is_empty()) {
            match self.counts.get_mut(term) {
                Some(c) => *c += 1,
                None => {
                    self.counts.insert(term.to_string(), 1);
                }
            }
        }
    }

    pub fn merge(&mut self, other: TermCounts) {
        for (term, n) in other.counts {
            *self.counts.entry(term).or_default() += n;
        }
    }

    /// Top `top_k` terms unknown to `lexicon`, count descending, ties by term.
    pub fn top_unknown(&self, lexicon: &Lexicon, top_k: usize) -> Vec<TermFrequency> {
        let mut terms: Vec<TermFrequency> = self
            .counts
            .iter()
            .filter(|(term, _)| !lexicon.contains(&canonical_form(term)))
            .map(|(term, &count)| TermFrequency {
                term: term.clone(),
                count,
            })
            .collect();
        terms.sort_unstable_by(|a, b| b.count.cmp(&a.count).then_with(|| a.term.cmp(&b.term)));
        terms.truncate(top_k);
        terms
    }
}

/// Most frequent corpus terms not yet in any dictionary, for the
/// dictionary tuning loop.
pub fn suggest_terms<'a>(
    texts: impl IntoIterator<Item = &'a str>,
    lexicon: &Lexicon,
    top_k: usize,
) -> Vec<TermFrequency> {
    let mut counts = TermCounts::new();
    for text in texts {
        counts.add_text(text);
    }
    counts.top_unknown(lexicon, top_k)
}
