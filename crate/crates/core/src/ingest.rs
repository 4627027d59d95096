//! Line-delimited tweet records and the corpus filter.
//!
//! Each line is one JSON object whose keys are the flat, dotted column names
//! of the tweets table (`id`, `created_at`, `user.screen_name`, `text`,
//! `user.location`, `lang`, ...). Unknown keys are ignored; absent optional
//! columns stay empty.

use std::collections::HashSet;
use std::io::BufRead;

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Column width limits of the tweets table.
pub const MAX_TEXT_CHARS: usize = 500;
pub const MAX_LOCATION_CHARS: usize = 500;
pub const MAX_LANG_CHARS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct TweetRecord {
    pub id: u64,
    pub created_at: DateTime<FixedOffset>,
    pub user_name: String,
    pub screen_name: String,
    pub followers_count: i64,
    pub text: String,
    pub retweet_count: Option<i64>,
    pub retweeted_id: Option<u64>,
    pub retweeted_favorite_count: Option<i64>,
    pub retweeted_text: Option<String>,
    pub user_location: Option<String>,
    /// (longitude, latitude)
    pub coordinates: Option<(f64, f64)>,
    pub hashtag_0: Option<String>,
    pub hashtag_1: Option<String>,
    pub lang: String,
}

impl TweetRecord {
    /// A Spanish-language record with only id and text set.
    pub fn minimal(id: u64, text: &str) -> Self {
        TweetRecord {
            id,
            created_at: DateTime::parse_from_rfc3339("2015-11-20T10:00:00-03:00").unwrap(),
            user_name: String::new(),
            screen_name: String::new(),
            followers_count: 0,
            text: text.to_string(),
            retweet_count: None,
            retweeted_id: None,
            retweeted_favorite_count: None,
            retweeted_text: None,
            user_location: None,
            coordinates: None,
            hashtag_0: None,
            hashtag_1: None,
            lang: "es".to_string(),
        }
    }

    /// One JSON line, without the trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&WireRecord::from(self)).expect("record serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct WireRecord {
    id: u64,
    created_at: String,
    #[serde(rename = "user.name", default, skip_serializing_if = "Option::is_none")]
    user_name: Option<String>,
    #[serde(
        rename = "user.screen_name",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    screen_name: Option<String>,
    #[serde(
        rename = "user.followers_count",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    followers_count: Option<i64>,
    text: String,
    #[serde(
        rename = "retweeted_status.retweet_count",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    retweet_count: Option<i64>,
    #[serde(
        rename = "retweeted_status.id",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    retweeted_id: Option<u64>,
    #[serde(
        rename = "retweeted_status.favorite_count",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    retweeted_favorite_count: Option<i64>,
    #[serde(
        rename = "retweeted_status.text",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    retweeted_text: Option<String>,
    #[serde(
        rename = "user.location",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    user_location: Option<String>,
    #[serde(
        rename = "coordinates.coordinates.0",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    lon: Option<f64>,
    #[serde(
        rename = "coordinates.coordinates.1",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    lat: Option<f64>,
    #[serde(
        rename = "entities.hashtags.0.text",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    hashtag_0: Option<String>,
    #[serde(
        rename = "entities.hashtags.1.text",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    hashtag_1: Option<String>,
    lang: String,
}

impl From<&TweetRecord> for WireRecord {
    fn from(r: &TweetRecord) -> Self {
        let non_empty = |s: &str| (!s.is_empty()).then(|| s.to_string());
        WireRecord {
            id: r.id,
            created_at: r.created_at.to_rfc3339(),
            user_name: non_empty(&r.user_name),
            screen_name: non_empty(&r.screen_name),
            followers_count: (r.followers_count != 0).then_some(r.followers_count),
            text: r.text.clone(),
            retweet_count: r.retweet_count,
            retweeted_id: r.retweeted_id,
            retweeted_favorite_count: r.retweeted_favorite_count,
            retweeted_text: r.retweeted_text.clone(),
            user_location: r.user_location.clone(),
            lon: r.coordinates.map(|c| c.0),
            lat: r.coordinates.map(|c| c.1),
            hashtag_0: r.hashtag_0.clone(),
            hashtag_1: r.hashtag_1.clone(),
            lang: r.lang.clone(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RecordError {
    #[error("invalid record: {0}")]
    Json(String),
    #[error("invalid created_at {0:?}")]
    Timestamp(String),
    #[error("{field} exceeds {max} characters")]
    TooLong { field: &'static str, max: usize },
    #[error("invalid lang {0:?}")]
    Lang(String),
}

/// A record that could not be parsed, with its 1-based line number.
#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {error}")]
pub struct LineError {
    pub line: usize,
    pub error: RecordError,
}

/// Accepts RFC 3339 (`2015-11-20T10:00:00-03:00`), the same with a space
/// separator, and the streaming API's `Fri Nov 20 10:00:00 -0300 2015`.
pub fn parse_timestamp(s: &str) -> Option<DateTime<FixedOffset>> {
    let s = s.trim();
    DateTime::parse_from_rfc3339(s)
        .or_else(|_| DateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S%:z"))
        .or_else(|_| DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y"))
        .ok()
}

fn normalize_lang(raw: &str) -> Result<String, RecordError> {
    let raw = raw.trim();
    if raw.is_empty() || raw.chars().count() > MAX_LANG_CHARS {
        return Err(RecordError::Lang(raw.to_string()));
    }
    let primary = raw.split(['-', '_']).next().unwrap_or_default();
    if primary.is_empty() || !primary.chars().all(|c| c.is_ascii_alphabetic()) {
        return Err(RecordError::Lang(raw.to_string()));
    }
    Ok(primary.to_ascii_lowercase())
}

fn check_len(field: &'static str, value: &str, max: usize) -> Result<(), RecordError> {
    if value.chars().count() > max {
        Err(RecordError::TooLong { field, max })
    } else {
        Ok(())
    }
}

pub fn parse_record(line: &str) -> Result<TweetRecord, RecordError> {
    let wire: WireRecord =
        serde_json::from_str(line).map_err(|e| RecordError::Json(e.to_string()))?;
    let created_at =
        parse_timestamp(&wire.created_at).ok_or(RecordError::Timestamp(wire.created_at))?;
    check_len("text", &wire.text, MAX_TEXT_CHARS)?;
    if let Some(loc) = &wire.user_location {
        check_len("user.location", loc, MAX_LOCATION_CHARS)?;
    }
    Ok(TweetRecord {
        id: wire.id,
        created_at,
        user_name: wire.user_name.unwrap_or_default(),
        screen_name: wire.screen_name.unwrap_or_default(),
        followers_count: wire.followers_count.unwrap_or_default(),
        text: wire.text,
        retweet_count: wire.retweet_count,
        retweeted_id: wire.retweeted_id,
        retweeted_favorite_count: wire.retweeted_favorite_count,
        retweeted_text: wire.retweeted_text,
        user_location: wire.user_location,
        coordinates: wire.lon.zip(wire.lat),
        hashtag_0: wire.hashtag_0,
        hashtag_1: wire.hashtag_1,
        lang: normalize_lang(&wire.lang)?,
    })
}

/// Parses every non-blank line of `reader`. I/O errors end the stream;
/// malformed lines are yielded as [`LineError`]s and the stream continues.
pub fn read_records(
    reader: impl BufRead,
) -> impl Iterator<Item = std::io::Result<Result<TweetRecord, LineError>>> {
    reader
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|(idx, line)| {
            line.map(|l| {
                parse_record(&l).map_err(|error| LineError {
                    line: idx + 1,
                    error,
                })
            })
        })
}

#[derive(Debug, Error, PartialEq)]
pub enum FilterError {
    #[error("window start {start} is after window end {end}")]
    InvertedWindow { start: String, end: String },
}

/// Keyword / account / language / time-window filter.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestFilter {
    keywords: Vec<String>,
    follow_accounts: HashSet<String>,
    lang: Option<String>,
    window_start: Option<DateTime<FixedOffset>>,
    window_end: Option<DateTime<FixedOffset>>,
}

/// Tracked keywords and hashtags of the 2015 runoff collection.
pub const CAMPAIGN_KEYWORDS: &[&str] = &[
    "Cambiamos",
    "Cadena3Elecciones",
    "Argentina",
    "Elecciones2015",
    "macri",
    "fpv",
    "Balotaje",
    "ELECCIONES",
    "Scioli",
    "yolovotoamm",
    "peronismo",
    "MacriPresidente",
    "CambiamosConMacri",
    "VamosConMacri",
    "mm2015",
    "MeHackearonLaCuenta",
    "CampañaSucia",
    "CampañaDeMiedo",
    "YoVotoAScioli",
    "MacriNosMiente",
    "SiMacriGana",
    "SiGanaMacri",
    "ScioliPresidente",
    "MIVICTORIA",
    "Balotaje2015",
    "argentinadebate",
    "ganascioli",
    "QueGaneScioli",
    "Mesaza",
    "GanoMacri",
];

/// Followed accounts of the 2015 runoff collection.
pub const CAMPAIGN_ACCOUNTS: &[&str] = &[
    "danieloscioli",
    "clarincom",
    "pagina_12",
    "infobae",
    "CSN",
    "6780ficial",
    "mauriciomacri",
    "TRIBUNACOMAR",
    "todonoticias",
    "lanacion",
    "TV_PUBLICA",
];

/// Close of polls, Argentina time.
pub const CAMPAIGN_CUTOFF: &str = "2015-11-22T17:59:59-03:00";
pub const CAMPAIGN_START: &str = "2015-11-05T00:00:00-03:00";

impl IngestFilter {
    /// Accepts every record.
    pub fn accept_all() -> Self {
        IngestFilter::default()
    }

    pub fn new(
        keywords: impl IntoIterator<Item = impl AsRef<str>>,
        follow_accounts: impl IntoIterator<Item = impl AsRef<str>>,
        lang: Option<&str>,
        window_start: Option<DateTime<FixedOffset>>,
        window_end: Option<DateTime<FixedOffset>>,
    ) -> Result<Self, FilterError> {
        if let (Some(s), Some(e)) = (window_start, window_end) {
            if s > e {
                return Err(FilterError::InvertedWindow {
                    start: s.to_rfc3339(),
                    end: e.to_rfc3339(),
                });
            }
        }
        let mut kw: Vec<String> = Vec::new();
        for k in keywords {
            let k = k.as_ref().trim().to_lowercase();
            if !k.is_empty() && !kw.contains(&k) {
                kw.push(k);
            }
        }
        Ok(IngestFilter {
            keywords: kw,
            follow_accounts: follow_accounts
                .into_iter()
                .map(|a| a.as_ref().trim().trim_start_matches('@').to_lowercase())
                .filter(|a| !a.is_empty())
                .collect(),
            lang: lang.map(|l| l.trim().to_ascii_lowercase()),
            window_start,
            window_end,
        })
    }

    /// Campaign keywords and accounts, Spanish only, 5 Nov 2015 up to the
    /// close of polls.
    pub fn campaign_default() -> Self {
        IngestFilter::new(
            CAMPAIGN_KEYWORDS,
            CAMPAIGN_ACCOUNTS,
            Some("es"),
            DateTime::parse_from_rfc3339(CAMPAIGN_START).ok(),
            DateTime::parse_from_rfc3339(CAMPAIGN_CUTOFF).ok(),
        )
        .expect("valid default window")
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn passes(&self, record: &TweetRecord) -> bool {
        passes_filter(record, self)
    }
}

pub fn passes_filter(record: &TweetRecord, filter: &IngestFilter) -> bool {
    let topical = filter.keywords.is_empty() || {
        let text = record.text.to_lowercase();
        filter.keywords.iter().any(|k| text.contains(k.as_str()))
            || filter
                .follow_accounts
                .contains(&record.screen_name.to_lowercase())
    };
    let lang_ok = filter.lang.as_ref().is_none_or(|l| *l == record.lang);
    let after_start = filter.window_start.is_none_or(|s| record.created_at >= s);
    let before_end = filter.window_end.is_none_or(|e| record.created_at <= e);
    topical && lang_ok && after_start && before_end
}
