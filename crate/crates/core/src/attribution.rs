//! Candidate attribution and free-text location normalization.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const NO_PROVINCE: &str = "Sin Provincia";
pub const NO_COUNTRY: &str = "Sin País";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CandidateLabel {
    Macri,
    Scioli,
    #[serde(rename = "Scioli-Macri")]
    Both,
    #[serde(rename = "Sin Candidato")]
    None,
}

impl CandidateLabel {
    pub const ALL: [CandidateLabel; 4] = [
        CandidateLabel::Macri,
        CandidateLabel::Scioli,
        CandidateLabel::Both,
        CandidateLabel::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CandidateLabel::Macri => "Macri",
            CandidateLabel::Scioli => "Scioli",
            CandidateLabel::Both => "Scioli-Macri",
            CandidateLabel::None => "Sin Candidato",
        }
    }
}

impl fmt::Display for CandidateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CandidateLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CandidateLabel::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown candidate label {s:?}"))
    }
}

/// Which candidates the lower-cased text names, by plain substring test.
pub fn classify_candidate(text: &str) -> CandidateLabel {
    let lower = text.to_lowercase();
    match (lower.contains("macri"), lower.contains("scioli")) {
        (true, true) => CandidateLabel::Both,
        (true, false) => CandidateLabel::Macri,
        (false, true) => CandidateLabel::Scioli,
        (false, false) => CandidateLabel::None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocationEntry {
    pub province: String,
    pub country: String,
}

impl LocationEntry {
    pub fn new(province: impl Into<String>, country: impl Into<String>) -> Self {
        LocationEntry {
            province: province.into(),
            country: country.into(),
        }
    }

    pub fn unmatched() -> Self {
        LocationEntry::new(NO_PROVINCE, NO_COUNTRY)
    }

    pub fn is_unmatched(&self) -> bool {
        self.province == NO_PROVINCE && self.country == NO_COUNTRY
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct LocationRule {
    pub order: i64,
    /// Case-insensitive substring.
    pub pattern: String,
    pub province: String,
    pub country: String,
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("cannot read location rules: {0}")]
    Io(#[from] std::io::Error),
    #[error("location rules line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("location rule {order} has an empty pattern")]
    EmptyPattern { order: i64 },
    #[error("location rule order {order} is used twice")]
    DuplicateOrder { order: i64 },
}

/// Validated rules, sorted by `order`, with patterns lower-cased.
#[derive(Debug, Clone, Default)]
pub struct LocationRules {
    rules: Vec<LocationRule>,
}

impl LocationRules {
    pub fn new(mut rules: Vec<LocationRule>) -> Result<Self, RuleError> {
        let mut seen = HashSet::new();
        for rule in &mut rules {
            rule.pattern = rule.pattern.trim().to_lowercase();
            if rule.pattern.is_empty() {
                return Err(RuleError::EmptyPattern { order: rule.order });
            }
            if !seen.insert(rule.order) {
                return Err(RuleError::DuplicateOrder { order: rule.order });
            }
        }
        rules.sort_by_key(|r| r.order);
        Ok(LocationRules { rules })
    }

    /// Reads `order<TAB>pattern<TAB>province<TAB>country` lines; `#` starts a
    /// comment line.
    pub fn from_reader(reader: impl Read) -> Result<Self, RuleError> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .has_headers(false)
            .comment(Some(b'#'))
            .quoting(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rules = Vec::new();
        for row in rdr.deserialize() {
            let rule: LocationRule = row.map_err(|e| RuleError::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            rules.push(rule);
        }
        LocationRules::new(rules)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RuleError> {
        LocationRules::from_reader(std::fs::File::open(path)?)
    }

    pub fn rules(&self) -> &[LocationRule] {
        &self.rules
    }

    pub fn lookup(&self, raw: &str) -> Option<&LocationRule> {
        let lower = raw.to_lowercase();
        self.rules.iter().find(|r| lower.contains(&r.pattern))
    }
}

/// First matching rule wins; no match gives (Sin Provincia, Sin País).
pub fn normalize_location(raw: &str, rules: &LocationRules) -> LocationEntry {
    rules
        .lookup(raw)
        .map(|r| LocationEntry::new(&r.province, &r.country))
        .unwrap_or_else(LocationEntry::unmatched)
}

/// Rule table plus a memo keyed by distinct raw location string. Shareable
/// across threads; concurrent inserts of one key store equal values.
#[derive(Debug, Default)]
pub struct LocationResolver {
    rules: LocationRules,
    memo: RwLock<HashMap<String, LocationEntry>>,
}

impl LocationResolver {
    pub fn new(rules: LocationRules) -> Self {
        LocationResolver {
            rules,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn rules(&self) -> &LocationRules {
        &self.rules
    }

    pub fn resolve(&self, raw: &str) -> LocationEntry {
        if let Some(hit) = self.memo.read().unwrap().get(raw) {
            return hit.clone();
        }
        let entry = normalize_location(raw, &self.rules);
        self.memo
            .write()
            .unwrap()
            .entry(raw.to_string())
            .or_insert(entry)
            .clone()
    }

    /// Number of distinct raw strings seen so far.
    pub fn distinct_seen(&self) -> usize {
        self.memo.read().unwrap().len()
    }
}
