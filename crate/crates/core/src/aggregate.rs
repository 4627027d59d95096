//! Tweet labels, mergeable group-by counters and the national / provincial
//! reports derived from them.
//!
//! `AggregateState` with `merge` is a commutative monoid whose identity is
//! the empty state, so workers can fold disjoint parts of a stream and
//! combine their states in any grouping.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attribution::{CandidateLabel, LocationEntry, NO_PROVINCE};
use crate::stats::OfficialResult;

/// Country whose provinces are joined against official results.
pub const HOME_COUNTRY: &str = "Argentina";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SentimentLabel {
    Negativo = -1,
    Neutro = 0,
    Positivo = 1,
}

impl SentimentLabel {
    pub fn value(self) -> i8 {
        self as i8
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Positivo => "Positivo",
            SentimentLabel::Neutro => "Neutro",
            SentimentLabel::Negativo => "Negativo",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentimentLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Positivo" => Ok(SentimentLabel::Positivo),
            "Neutro" => Ok(SentimentLabel::Neutro),
            "Negativo" => Ok(SentimentLabel::Negativo),
            _ => Err(format!("unknown sentiment label {s:?}")),
        }
    }
}

/// Sign of the summed sentence scores. An empty list is Neutro.
pub fn tweet_score(sentence_scores: &[i64]) -> SentimentLabel {
    let sum: i128 = sentence_scores.iter().map(|&s| i128::from(s)).sum();
    match sum.signum() {
        1 => SentimentLabel::Positivo,
        -1 => SentimentLabel::Negativo,
        _ => SentimentLabel::Neutro,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub country: String,
    pub province: String,
    pub candidate: CandidateLabel,
    pub sentiment: SentimentLabel,
}

/// What the aggregator needs to know about one scored tweet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledTweet {
    pub sentiment: SentimentLabel,
    pub candidate: CandidateLabel,
    pub location: LocationEntry,
}

impl LabeledTweet {
    pub fn key(&self) -> CellKey {
        CellKey {
            country: self.location.country.clone(),
            province: self.location.province.clone(),
            candidate: self.candidate,
            sentiment: self.sentiment,
        }
    }
}

#[derive(Debug, Error)]
pub enum AggregateError {
    #[error("aggregate csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("aggregate csv line {line}: {message}")]
    Field { line: u64, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AggregateState {
    counters: BTreeMap<CellKey, u64>,
    considered_total: u64,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    country: String,
    province: String,
    candidate: String,
    sentiment: String,
    count: u64,
}

impl AggregateState {
    pub fn new() -> Self {
        AggregateState::default()
    }

    pub fn fold(&mut self, tweet: &LabeledTweet) {
        self.add(tweet.key(), 1);
    }

    /// Adds `count` tweets to one cell at once.
    pub fn add(&mut self, key: CellKey, count: u64) {
        if count == 0 {
            return;
        }
        *self.counters.entry(key).or_default() += count;
        self.considered_total += count;
    }

    pub fn merge(&mut self, other: &AggregateState) {
        for (key, &n) in &other.counters {
            *self.counters.entry(key.clone()).or_default() += n;
        }
        self.considered_total += other.considered_total;
    }

    pub fn merged(mut self, other: &AggregateState) -> AggregateState {
        self.merge(other);
        self
    }

    pub fn considered_total(&self) -> u64 {
        self.considered_total
    }

    pub fn is_empty(&self) -> bool {
        self.considered_total == 0
    }

    pub fn cells(&self) -> impl Iterator<Item = (&CellKey, u64)> {
        self.counters.iter().map(|(k, &v)| (k, v))
    }

    pub fn count(&self, key: &CellKey) -> u64 {
        self.counters.get(key).copied().unwrap_or(0)
    }

    pub fn total_with(&self, sentiment: SentimentLabel) -> u64 {
        self.cells()
            .filter(|(k, _)| k.sentiment == sentiment)
            .map(|(_, n)| n)
            .sum()
    }

    /// `country,province,candidate,sentiment,count`, sorted by key.
    pub fn write_csv(&self, writer: impl Write) -> Result<(), AggregateError> {
        let mut w = csv::Writer::from_writer(writer);
        for (key, count) in self.cells() {
            w.serialize(CsvRow {
                country: key.country.clone(),
                province: key.province.clone(),
                candidate: key.candidate.to_string(),
                sentiment: key.sentiment.to_string(),
                count,
            })?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv(reader: impl Read) -> Result<Self, AggregateError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        let mut record = csv::StringRecord::new();
        let mut state = AggregateState::new();
        while rdr.read_record(&mut record)? {
            let line = record.position().map_or(0, |p| p.line());
            let row: CsvRow = record.deserialize(Some(&headers))?;
            let field = |message| AggregateError::Field { line, message };
            let candidate = row.candidate.parse().map_err(field)?;
            let sentiment = row.sentiment.parse().map_err(field)?;
            state.add(
                CellKey {
                    country: row.country,
                    province: row.province,
                    candidate,
                    sentiment,
                },
                row.count,
            );
        }
        Ok(state)
    }
}

impl<'a> Extend<&'a LabeledTweet> for AggregateState {
    fn extend<T: IntoIterator<Item = &'a LabeledTweet>>(&mut self, iter: T) {
        for t in iter {
            self.fold(t);
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SharesError {
    #[error("no positive tweets name exactly one candidate; shares are undefined")]
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NationalShares {
    pub n_macri: u64,
    pub n_scioli: u64,
    pub total: u64,
    pub pct_macri: f64,
    pub pct_scioli: f64,
}

impl NationalShares {
    pub fn from_counts(n_macri: u64, n_scioli: u64) -> Result<Self, SharesError> {
        let total = n_macri + n_scioli;
        if total == 0 {
            return Err(SharesError::Undefined);
        }
        Ok(NationalShares {
            n_macri,
            n_scioli,
            total,
            pct_macri: percent(n_macri, total),
            pct_scioli: percent(n_scioli, total),
        })
    }
}

fn percent(part: u64, whole: u64) -> f64 {
    part as f64 * 100.0 / whole as f64
}

/// Shares of positive tweets naming exactly one candidate. Negative and
/// neutral tweets, and tweets naming both or neither candidate, are left out.
pub fn national_shares(state: &AggregateState) -> Result<NationalShares, SharesError> {
    let mut n_macri = 0;
    let mut n_scioli = 0;
    for (key, n) in state.cells() {
        if key.sentiment != SentimentLabel::Positivo {
            continue;
        }
        match key.candidate {
            CandidateLabel::Macri => n_macri += n,
            CandidateLabel::Scioli => n_scioli += n,
            _ => {}
        }
    }
    NationalShares::from_counts(n_macri, n_scioli)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProvinceRow {
    pub country: String,
    pub province: String,
    pub tweets_scioli: u64,
    pub tweets_macri: u64,
    pub votes_scioli: Option<u64>,
    pub votes_macri: Option<u64>,
    pub population: Option<u64>,
    pub pct_tw_scioli: Option<f64>,
    pub pct_tw_macri: Option<f64>,
    pub pct_v_scioli: Option<f64>,
    pub pct_v_macri: Option<f64>,
    /// Row's share of all positive two-candidate tweets.
    pub pct_tweets: f64,
    pub pct_votes: Option<f64>,
    pub pct_population: Option<f64>,
    /// True when the row was joined to an official result.
    pub official: bool,
}

impl ProvinceRow {
    pub fn tweets(&self) -> u64 {
        self.tweets_scioli + self.tweets_macri
    }

    /// Candidate with more positive tweets; None on a tie.
    pub fn tweet_winner(&self) -> Option<CandidateLabel> {
        majority(self.tweets_scioli, self.tweets_macri)
    }

    pub fn vote_winner(&self) -> Option<CandidateLabel> {
        majority(self.votes_scioli?, self.votes_macri?)
    }

    pub fn agrees(&self) -> bool {
        self.official && self.tweet_winner().is_some() && self.tweet_winner() == self.vote_winner()
    }
}

fn majority(scioli: u64, macri: u64) -> Option<CandidateLabel> {
    match scioli.cmp(&macri) {
        std::cmp::Ordering::Greater => Some(CandidateLabel::Scioli),
        std::cmp::Ordering::Less => Some(CandidateLabel::Macri),
        std::cmp::Ordering::Equal => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProvinceTable {
    pub rows: Vec<ProvinceRow>,
    /// Official provinces where the tweet majority matches the vote majority.
    pub agreement_count: usize,
    pub official_provinces: usize,
    pub positive_total: u64,
    /// Positive two-candidate tweets joined to an official province.
    pub located_total: u64,
}

impl ProvinceTable {
    pub fn coverage_pct(&self) -> Option<f64> {
        (self.positive_total > 0).then(|| percent(self.located_total, self.positive_total))
    }

    pub fn official_rows(&self) -> impl Iterator<Item = &ProvinceRow> {
        self.rows.iter().filter(|r| r.official)
    }

    /// Rows with a Sin Provincia or foreign location; they are kept in the
    /// table but never compared against votes.
    pub fn residual_rows(&self) -> impl Iterator<Item = &ProvinceRow> {
        self.rows.iter().filter(|r| !r.official)
    }

    /// Writes the table as CSV, percentages rounded to `decimals`.
    pub fn write_csv(&self, writer: impl Write, decimals: usize) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "country",
            "province",
            "tweets_scioli",
            "tweets_macri",
            "tweets",
            "votes_scioli",
            "votes_macri",
            "votes",
            "population",
            "pct_tw_scioli",
            "pct_tw_macri",
            "pct_v_scioli",
            "pct_v_macri",
            "pct_tweets",
            "pct_votes",
            "pct_population",
            "official",
        ])?;
        let int = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
        let pct = |v: Option<f64>| v.map(|v| format!("{v:.decimals$}")).unwrap_or_default();
        for r in &self.rows {
            let votes = r.votes_scioli.zip(r.votes_macri).map(|(s, m)| s + m);
            w.write_record([
                r.country.clone(),
                r.province.clone(),
                r.tweets_scioli.to_string(),
                r.tweets_macri.to_string(),
                r.tweets().to_string(),
                int(r.votes_scioli),
                int(r.votes_macri),
                int(votes),
                int(r.population),
                pct(r.pct_tw_scioli),
                pct(r.pct_tw_macri),
                pct(r.pct_v_scioli),
                pct(r.pct_v_macri),
                pct(Some(r.pct_tweets)),
                pct(r.pct_votes),
                pct(r.pct_population),
                r.official.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Joins per-location positive tweet counts with official results.
///
/// Only home-country locations whose province appears in `official` are
/// joined and counted towards `agreement_count`. Other locations become
/// residual rows. Official provinces without tweets get zero-tweet rows.
pub fn province_table(state: &AggregateState, official: &[OfficialResult]) -> ProvinceTable {
    let mut tweets: BTreeMap<(&str, &str), (u64, u64)> = BTreeMap::new();
    for (key, n) in state.cells() {
        if key.sentiment != SentimentLabel::Positivo {
            continue;
        }
        let slot = tweets
            .entry((key.country.as_str(), key.province.as_str()))
            .or_default();
        match key.candidate {
            CandidateLabel::Scioli => slot.0 += n,
            CandidateLabel::Macri => slot.1 += n,
            _ => {}
        }
    }
    tweets.retain(|_, (s, m)| *s + *m > 0);
    for o in official {
        tweets
            .entry((HOME_COUNTRY, o.province.as_str()))
            .or_default();
    }

    let by_province: HashMap<&str, &OfficialResult> =
        official.iter().map(|o| (o.province.as_str(), o)).collect();
    let positive_total: u64 = tweets.values().map(|(s, m)| s + m).sum();
    let vote_total: u64 = official.iter().map(OfficialResult::total).sum();
    let population_total: Option<u64> = official.iter().map(|o| o.population).sum();

    let mut rows: Vec<ProvinceRow> = tweets
        .into_iter()
        .map(|((country, province), (ts, tm))| {
            let joined = (country == HOME_COUNTRY && province != NO_PROVINCE)
                .then(|| by_province.get(province).copied())
                .flatten();
            let tw_total = ts + tm;
            let mut row = ProvinceRow {
                country: country.to_string(),
                province: province.to_string(),
                tweets_scioli: ts,
                tweets_macri: tm,
                votes_scioli: None,
                votes_macri: None,
                population: None,
                pct_tw_scioli: (tw_total > 0).then(|| percent(ts, tw_total)),
                pct_tw_macri: (tw_total > 0).then(|| percent(tm, tw_total)),
                pct_v_scioli: None,
                pct_v_macri: None,
                pct_tweets: if positive_total > 0 {
                    percent(tw_total, positive_total)
                } else {
                    0.0
                },
                pct_votes: None,
                pct_population: None,
                official: joined.is_some(),
            };
            if let Some(o) = joined {
                let v_total = o.total();
                row.votes_scioli = Some(o.votes_scioli);
                row.votes_macri = Some(o.votes_macri);
                row.population = o.population;
                row.pct_v_scioli = (v_total > 0).then(|| percent(o.votes_scioli, v_total));
                row.pct_v_macri = (v_total > 0).then(|| percent(o.votes_macri, v_total));
                row.pct_votes = (vote_total > 0).then(|| percent(v_total, vote_total));
                row.pct_population = o
                    .population
                    .zip(population_total)
                    .filter(|&(_, t)| t > 0)
                    .map(|(p, t)| percent(p, t));
            }
            row
        })
        .collect();
    rows.sort_by(|a, b| {
        b.tweets()
            .cmp(&a.tweets())
            .then_with(|| b.official.cmp(&a.official))
            .then_with(|| a.country.cmp(&b.country))
            .then_with(|| a.province.cmp(&b.province))
    });

    let agreement_count = rows.iter().filter(|r| r.agrees()).count();
    let located_total = rows
        .iter()
        .filter(|r| r.official)
        .map(ProvinceRow::tweets)
        .sum();
    ProvinceTable {
        official_provinces: rows.iter().filter(|r| r.official).count(),
        rows,
        agreement_count,
        positive_total,
        located_total,
    }
}
