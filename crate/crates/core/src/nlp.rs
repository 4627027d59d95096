//! Sentence segmentation, tokenization and dictionary scoring.

use serde::{Deserialize, Serialize};

use crate::ingest::TweetRecord;
use crate::lexicon::{canonical_form, Lexicon};

/// Token filters applied before scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScorerOptions {
    pub filter_links: bool,
    pub filter_user_mentions: bool,
    pub filter_hashtags: bool,
}

impl Default for ScorerOptions {
    fn default() -> Self {
        ScorerOptions {
            filter_links: true,
            filter_user_mentions: false,
            filter_hashtags: false,
        }
    }
}

/// Score of one sentence of one tweet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceSentiment {
    pub tweet_id: u64,
    pub screen_name: String,
    pub sentence_index: usize,
    pub attribute: Option<String>,
    pub sentiment_score: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SentenceScore {
    pub attribute: Option<String>,
    pub score: i64,
}

fn is_sentence_final(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '…')
}

/// Splits on line breaks and on sentence-final punctuation followed by
/// whitespace or end of text. Punctuation stays with its sentence.
pub fn segment_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        let cut = match c {
            '\n' | '\r' => Some((i, i + c.len_utf8())),
            c if is_sentence_final(c) => match chars.peek() {
                None => Some((i + c.len_utf8(), i + c.len_utf8())),
                Some(&(_, next)) if next.is_whitespace() => {
                    Some((i + c.len_utf8(), i + c.len_utf8()))
                }
                _ => None,
            },
            _ => None,
        };
        if let Some((end, resume)) = cut {
            push_segment(&mut out, &text[start..end]);
            start = resume;
        }
    }
    push_segment(&mut out, &text[start..]);
    out
}

fn push_segment<'a>(out: &mut Vec<&'a str>, seg: &'a str) {
    let seg = seg.trim();
    if !seg.is_empty() {
        out.push(seg);
    }
}

/// Trims non-alphanumeric characters from both ends, keeping one `#` or `@`
/// directly in front of the first alphanumeric character.
fn strip_punctuation(token: &str) -> &str {
    let token = token.trim_end_matches(|c: char| !c.is_alphanumeric());
    let Some(first) = token.find(char::is_alphanumeric) else {
        return "";
    };
    match token[..first].chars().next_back() {
        Some(p @ ('#' | '@')) => &token[first - p.len_utf8()..],
        _ => &token[first..],
    }
}

fn is_link(token: &str) -> bool {
    let t = token.trim_start_matches(|c: char| !c.is_alphanumeric());
    t.starts_with("http://") || t.starts_with("https://")
}

pub fn tokenize(sentence: &str, options: ScorerOptions) -> Vec<String> {
    tokenize_with(sentence, options, |_| false)
}

/// Like [`tokenize`], but a token whose unstripped canonical form satisfies
/// `keep_verbatim` is kept as-is. Lets emoticons and other punctuation-bearing
/// dictionary entries survive the punctuation strip.
pub fn tokenize_with(
    sentence: &str,
    options: ScorerOptions,
    keep_verbatim: impl Fn(&str) -> bool,
) -> Vec<String> {
    let mut tokens = Vec::new();
    for raw in sentence.split_whitespace() {
        let canonical = canonical_form(raw);
        if options.filter_links && is_link(&canonical) {
            continue;
        }
        let stripped = strip_punctuation(&canonical);
        let verbatim = keep_verbatim(&canonical);
        let marker = if verbatim {
            canonical.chars().next()
        } else {
            stripped.chars().next()
        };
        match marker {
            Some('@') if options.filter_user_mentions => continue,
            Some('#') if options.filter_hashtags => continue,
            _ => {}
        }
        if verbatim {
            tokens.push(canonical);
        } else if !stripped.is_empty() {
            tokens.push(stripped.to_string());
        }
    }
    tokens
}

/// Scores a canonical token sequence.
///
/// Scans left to right. At each position the longest attribute or synonym
/// phrase is tried first; failing that, the longest positive or negative
/// phrase. Matched tokens are consumed, so each token counts at most once.
/// The first attribute found is the sentence's attribute.
pub fn score_sentence<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> SentenceScore {
    let mut result = SentenceScore::default();
    let max_len = lexicon.max_phrase_len();
    let mut phrase = String::new();
    let mut ends = Vec::with_capacity(max_len);
    let mut i = 0;
    while i < tokens.len() {
        phrase.clear();
        ends.clear();
        for tok in tokens[i..].iter().take(max_len) {
            if !phrase.is_empty() {
                phrase.push(' ');
            }
            phrase.push_str(tok.as_ref());
            ends.push(phrase.len());
        }

        let attribute = ends
            .iter()
            .enumerate()
            .rev()
            .find_map(|(k, &end)| lexicon.attribute_of(&phrase[..end]).map(|a| (k + 1, a)));
        let consumed = if let Some((len, attr)) = attribute {
            if result.attribute.is_none() {
                result.attribute = Some(attr.to_string());
            }
            len
        } else if let Some((len, polarity)) = ends
            .iter()
            .enumerate()
            .rev()
            .find_map(|(k, &end)| lexicon.polarity_of(&phrase[..end]).map(|p| (k + 1, p)))
        {
            result.score += polarity.weight();
            len
        } else {
            1
        };
        i += consumed;
    }
    result
}

/// Per-sentence scores for raw text.
pub fn analyze_text(text: &str, lexicon: &Lexicon, options: ScorerOptions) -> Vec<SentenceScore> {
    segment_sentences(text)
        .into_iter()
        .map(|sentence| {
            let tokens = tokenize_with(sentence, options, |t| lexicon.contains(t));
            score_sentence(&tokens, lexicon)
        })
        .collect()
}

/// One [`SentenceSentiment`] per sentence of `record.text`, indexed from 0.
pub fn analyze_tweet(
    record: &TweetRecord,
    lexicon: &Lexicon,
    options: ScorerOptions,
) -> Vec<SentenceSentiment> {
    analyze_text(&record.text, lexicon, options)
        .into_iter()
        .enumerate()
        .map(|(sentence_index, s)| SentenceSentiment {
            tweet_id: record.id,
            screen_name: record.screen_name.clone(),
            sentence_index,
            attribute: s.attribute,
            sentiment_score: s.score,
        })
        .collect()
}
