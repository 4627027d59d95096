//! Helpers shared by the integration test targets: independent oracles and
//! seeded generators.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use pulso_core::aggregate::{CellKey, LabeledTweet};
use pulso_core::{
    AggregateState, CandidateLabel, Lexicon, LocationEntry, OfficialResult, SentimentLabel,
};
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture_state() -> AggregateState {
    let f = std::fs::File::open(data_dir().join("balotaje2015/aggregate.csv")).unwrap();
    AggregateState::read_csv(f).unwrap()
}

pub fn fixture_official() -> Vec<OfficialResult> {
    pulso_core::stats::load_official(data_dir().join("balotaje2015/official.tsv")).unwrap()
}

/// A lexicon as plain phrase lists, each phrase a sequence of canonical
/// tokens. Every phrase belongs to exactly one list.
#[derive(Debug, Clone)]
pub struct LexModel {
    /// (phrase, attribute it stands for); bare attributes map to themselves.
    pub attributes: Vec<(Vec<String>, String)>,
    pub positive: Vec<Vec<String>>,
    pub negative: Vec<Vec<String>>,
}

impl LexModel {
    pub fn build(&self) -> Lexicon {
        let joined = |p: &Vec<String>| p.join(" ");
        let bases: Vec<String> = self
            .attributes
            .iter()
            .filter(|(p, a)| joined(p) == *a)
            .map(|(_, a)| a.clone())
            .collect();
        let synonyms: Vec<(String, String)> = self
            .attributes
            .iter()
            .filter(|(p, a)| joined(p) != *a)
            .map(|(p, a)| (a.clone(), joined(p)))
            .collect();
        let pos: Vec<String> = self.positive.iter().map(joined).collect();
        let neg: Vec<String> = self.negative.iter().map(joined).collect();
        Lexicon::from_entries(
            bases.iter().map(String::as_str),
            synonyms.iter().map(|(a, s)| (a.as_str(), s.as_str())),
            pos.iter().map(String::as_str),
            neg.iter().map(String::as_str),
        )
        .unwrap()
    }
}

/// Brute-force reference scorer. At every position it enumerates all
/// phrases of the model that start there; an attribute phrase of any
/// length is preferred to a polarity phrase, and among phrases of the same
/// kind the longest is taken. Matched tokens are skipped.
pub fn oracle_score(tokens: &[String], lex: &LexModel) -> (Option<String>, i64) {
    let starts_with =
        |i: usize, p: &[String]| tokens.len() >= i + p.len() && tokens[i..i + p.len()] == *p;
    let mut attribute = None;
    let mut score = 0;
    let mut i = 0;
    while i < tokens.len() {
        let best_attr = lex
            .attributes
            .iter()
            .filter(|(p, _)| starts_with(i, p))
            .max_by_key(|(p, _)| p.len());
        if let Some((p, a)) = best_attr {
            attribute.get_or_insert_with(|| a.clone());
            i += p.len();
            continue;
        }
        let polar = lex
            .positive
            .iter()
            .map(|p| (p, 1))
            .chain(lex.negative.iter().map(|p| (p, -1)))
            .filter(|(p, _)| starts_with(i, p))
            .max_by_key(|(p, _)| p.len());
        match polar {
            Some((p, w)) => {
                score += w;
                i += p.len();
            }
            None => i += 1,
        }
    }
    (attribute, score)
}

pub const VOCAB: &[&str] = &[
    "macri",
    "scioli",
    "gana",
    "miedo",
    "campaña",
    "aníbal",
    "fernández",
    "2001",
    "voto",
    "hoy",
    "país",
    "#cambiemos",
    "@danieloscioli",
    "ajuste",
    "futuro",
    "no",
];

/// Random lexicon over [`VOCAB`] with phrases of one to three tokens.
pub fn random_lexicon(rng: &mut impl Rng) -> LexModel {
    let mut used = BTreeSet::new();
    let mut phrase = |rng: &mut _| -> Option<Vec<String>> {
        for _ in 0..20 {
            let len = random_len(rng);
            let p: Vec<String> = (0..len)
                .map(|_| VOCAB.choose(rng).unwrap().to_string())
                .collect();
            if used.insert(p.join(" ")) {
                return Some(p);
            }
        }
        None
    };
    let mut attributes = Vec::new();
    for _ in 0..rng.random_range(1..4) {
        if let Some(p) = phrase(rng) {
            let a = p.join(" ");
            attributes.push((p, a));
        }
    }
    let bases: Vec<String> = attributes.iter().map(|(_, a)| a.clone()).collect();
    for _ in 0..rng.random_range(0..4) {
        if let Some(p) = phrase(rng) {
            attributes.push((p, bases.choose(rng).unwrap().clone()));
        }
    }
    let positive = (0..rng.random_range(0..6))
        .filter_map(|_| phrase(rng))
        .collect();
    let negative = (0..rng.random_range(0..6))
        .filter_map(|_| phrase(rng))
        .collect();
    LexModel {
        attributes,
        positive,
        negative,
    }
}

fn random_len(rng: &mut impl Rng) -> usize {
    match rng.random_range(0..10) {
        0..=5 => 1,
        6..=8 => 2,
        _ => 3,
    }
}

pub fn random_sentence(rng: &mut impl Rng) -> Vec<String> {
    (0..rng.random_range(0..25))
        .map(|_| VOCAB.choose(rng).unwrap().to_string())
        .collect()
}

const COUNTRIES: &[&str] = &["Argentina", "Uruguay", "Sin País"];
const PROVINCES: &[&str] = &["Salta", "Córdoba", "Sin Provincia", "Montevideo", "Jujuy"];

pub fn random_tweet(rng: &mut impl Rng) -> LabeledTweet {
    LabeledTweet {
        sentiment: *[
            SentimentLabel::Negativo,
            SentimentLabel::Neutro,
            SentimentLabel::Positivo,
        ]
        .choose(rng)
        .unwrap(),
        candidate: *CandidateLabel::ALL.choose(rng).unwrap(),
        location: LocationEntry::new(
            *PROVINCES.choose(rng).unwrap(),
            *COUNTRIES.choose(rng).unwrap(),
        ),
    }
}

pub fn random_state(rng: &mut impl Rng) -> AggregateState {
    let mut s = AggregateState::new();
    for _ in 0..rng.random_range(0..12) {
        let t = random_tweet(rng);
        s.add(
            CellKey {
                country: t.location.country.clone(),
                province: t.location.province.clone(),
                candidate: t.candidate,
                sentiment: t.sentiment,
            },
            rng.random_range(0..1_000_000),
        );
    }
    s
}

/// Pearson r from exact integer sums; only the final square root and
/// division are rounded.
pub fn exact_pearson(x: &[i64], y: &[i64]) -> Option<f64> {
    let n = x.len() as i128;
    let sx: i128 = x.iter().map(|&v| v as i128).sum();
    let sy: i128 = y.iter().map(|&v| v as i128).sum();
    let sxx: i128 = x.iter().map(|&v| (v as i128) * (v as i128)).sum();
    let syy: i128 = y.iter().map(|&v| (v as i128) * (v as i128)).sum();
    let sxy: i128 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| (a as i128) * (b as i128))
        .sum();
    let num = n * sxy - sx * sy;
    let dx = n * sxx - sx * sx;
    let dy = n * syy - sy * sy;
    if dx == 0 || dy == 0 {
        return None;
    }
    Some(num as f64 / ((dx as f64).sqrt() * (dy as f64).sqrt()))
}

/// Randomly re-cases every character of `s`.
pub fn random_case(rng: &mut impl Rng, s: &str) -> String {
    s.chars()
        .flat_map(|c| {
            if rng.random_bool(0.5) {
                c.to_uppercase().collect::<Vec<_>>()
            } else {
                c.to_lowercase().collect::<Vec<_>>()
            }
        })
        .collect()
}
