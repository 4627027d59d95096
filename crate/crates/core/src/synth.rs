//! Seeded synthetic tweet corpora for load and determinism testing.

use chrono::{DateTime, Duration, FixedOffset};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::TweetRecord;

const MACRI: &[&str] = &[
    "Macri",
    "MACRI",
    "macri",
    "#MacriPresidente",
    "@mauriciomacri",
    "Mauricio Macri",
];
const SCIOLI: &[&str] = &[
    "Scioli",
    "scioli",
    "#ScioliPresidente",
    "@danieloscioli",
    "Daniel Scioli",
];
const POSITIVE: &[&str] = &[
    "gana",
    "vamos",
    "futuro",
    "esperanza",
    "#Cambiemos",
    "victoria",
    "fuerza",
    "apoyo",
];
const NEGATIVE: &[&str] = &[
    "miente",
    "miedo",
    "crisis",
    "ajuste",
    "#CampañaDeMiedo",
    "aumentará los impuestos",
    "fraude",
];
const FILLER: &[&str] = &[
    "hoy",
    "el",
    "la",
    "balotaje",
    "Argentina",
    "elecciones",
    "todos",
    "porque",
    "debate",
    "voto",
    "domingo",
    "país",
    "que",
    "se",
    "viene",
];
const LOCATIONS: &[&str] = &[
    "CABA",
    "Córdoba, Argentina",
    "Rosario",
    "Buenos Aires",
    "Mendoza",
    "Salta",
    "Tucumán",
    "La Plata",
    "Neuquén",
    "Madrid",
    "Montevideo",
    "Narnia",
    "En mi casa",
    "Ushuaia",
    "Argentina",
    "Chilecito, La Rioja",
    "Caracas",
];

#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    pub tweets: usize,
    pub seed: u64,
    /// Probability that a record repeats an earlier id.
    pub duplicate_rate: f64,
    /// Probability that a record is not Spanish.
    pub foreign_lang_rate: f64,
}

impl SynthConfig {
    pub fn new(tweets: usize, seed: u64) -> Self {
        SynthConfig {
            tweets,
            seed,
            duplicate_rate: 0.02,
            foreign_lang_rate: 0.05,
        }
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, words: &[&'a str]) -> &'a str {
    words.choose(rng).copied().unwrap_or_default()
}

fn insert(rng: &mut ChaCha8Rng, words: &mut Vec<&'static str>, w: &'static str) {
    let at = rng.random_range(0..=words.len());
    words.insert(at, w);
}

fn sentence(rng: &mut ChaCha8Rng) -> String {
    let mut words: Vec<&str> = (0..rng.random_range(2..6))
        .map(|_| pick(rng, FILLER))
        .collect();
    let mut mentions = Vec::new();
    match rng.random_range(0..10) {
        0..=3 => mentions.push(pick(rng, MACRI)),
        4..=7 => mentions.push(pick(rng, SCIOLI)),
        8 => {
            mentions.push(pick(rng, MACRI));
            mentions.push(pick(rng, SCIOLI));
        }
        _ => {}
    }
    for _ in 0..rng.random_range(0..3) {
        mentions.push(pick(rng, POSITIVE));
    }
    for _ in 0..rng.random_range(0..2) {
        mentions.push(pick(rng, NEGATIVE));
    }
    if rng.random_bool(0.15) {
        mentions.push("https://t.co/abc");
    }
    for w in mentions {
        insert(rng, &mut words, w);
    }
    let mut s = words.join(" ");
    s.push_str(pick(rng, &[".", "!", "", "?"]));
    s
}

/// Generates `config.tweets` records. The same config always yields the
/// same records.
pub fn generate(config: &SynthConfig) -> Vec<TweetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let start: DateTime<FixedOffset> =
        DateTime::parse_from_rfc3339("2015-11-05T00:00:00-03:00").unwrap();
    let span_secs = 20 * 24 * 3600;
    let mut out = Vec::with_capacity(config.tweets);
    for i in 0..config.tweets {
        let id = if i > 0 && rng.random_bool(config.duplicate_rate) {
            out.get(rng.random_range(0..i))
                .map_or(i as u64, |r: &TweetRecord| r.id)
        } else {
            700_000_000_000_000_000 + i as u64
        };
        let text = (0..rng.random_range(1..4))
            .map(|_| sentence(&mut rng))
            .collect::<Vec<_>>()
            .join(if rng.random_bool(0.3) { "\n" } else { " " });
        let mut r = TweetRecord::minimal(id, &text);
        r.created_at = start + Duration::seconds(rng.random_range(0..span_secs));
        r.screen_name = format!("user{}", rng.random_range(0..5000));
        r.user_name = r.screen_name.to_uppercase();
        r.followers_count = rng.random_range(0..100_000);
        if rng.random_bool(0.85) {
            r.user_location = Some(pick(&mut rng, LOCATIONS).to_string());
        }
        if rng.random_bool(config.foreign_lang_rate) {
            r.lang = pick(&mut rng, &["en", "pt", "it"]).to_string();
        }
        out.push(r);
    }
    out
}

/// Corpus as newline-terminated JSON lines.
pub fn generate_jsonl(config: &SynthConfig) -> String {
    let mut s = String::new();
    for r in generate(config) {
        s.push_str(&r.to_json_line());
        s.push('\n');
    }
    s
}
