//! End-to-end replay of a tweet corpus:
//! parse → filter → dedupe → score → label → attribute → locate → fold.
//!
//! Lines are read in batches. Within a batch, parsing, filtering and
//! scoring run on the worker pool; the outcomes are then committed in line
//! order by a single thread that owns the id set and the aggregate state.
//! First occurrence of an id therefore wins regardless of thread count, and
//! a parallel run is identical to a sequential one.

use std::collections::HashSet;
use std::fs;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::aggregate::{tweet_score, AggregateState, LabeledTweet};
use crate::attribution::{classify_candidate, LocationResolver, LocationRules, RuleError};
use crate::ingest::{parse_record, IngestFilter, LineError};
use crate::lexicon::{load_lexicon, Lexicon, LexiconError, LexiconPaths};
use crate::nlp::{analyze_tweet, ScorerOptions};
use crate::report::{write_json, Measure, Report};
use crate::stats::{load_official, OfficialError};

const BATCH_LINES: usize = 16_384;
const CHUNK_LINES: usize = 512;
/// Malformed lines kept verbatim in the run summary.
const MAX_REPORTED_ERRORS: usize = 50;

pub const SUMMARY_FILE: &str = "report.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read {}: {source}", path.display())]
    Input { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Rules(#[from] RuleError),
    #[error(transparent)]
    Official(#[from] OfficialError),
    #[error("no records survived filtering")]
    EmptyCorpus,
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: io::Error },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

impl PipelineError {
    /// 2 for an empty corpus, 1 for any other failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::EmptyCorpus => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PipelineCounts {
    /// Non-blank lines read.
    pub lines: u64,
    pub parsed: u64,
    pub malformed: u64,
    pub filtered_out: u64,
    pub deduped: u64,
    pub scored: u64,
    /// Scored tweets whose location matched no rule.
    pub unlocatable: u64,
}

/// Everything a scoring worker needs; shared read-only across threads
/// apart from the location memo.
#[derive(Debug)]
pub struct Engine {
    pub lexicon: Lexicon,
    pub locations: LocationResolver,
    pub filter: IngestFilter,
    pub options: ScorerOptions,
}

enum Outcome {
    Malformed(LineError),
    Filtered,
    Scored { id: u64, tweet: LabeledTweet },
}

impl Engine {
    pub fn new(
        lexicon: Lexicon,
        rules: LocationRules,
        filter: IngestFilter,
        options: ScorerOptions,
    ) -> Self {
        Engine {
            lexicon,
            locations: LocationResolver::new(rules),
            filter,
            options,
        }
    }

    fn process(&self, line_no: usize, line: &str) -> Outcome {
        let record = match parse_record(line) {
            Ok(r) => r,
            Err(error) => {
                return Outcome::Malformed(LineError {
                    line: line_no,
                    error,
                })
            }
        };
        if !self.filter.passes(&record) {
            return Outcome::Filtered;
        }
        let scores: Vec<i64> = analyze_tweet(&record, &self.lexicon, self.options)
            .into_iter()
            .map(|s| s.sentiment_score)
            .collect();
        let location = self
            .locations
            .resolve(record.user_location.as_deref().unwrap_or_default());
        Outcome::Scored {
            id: record.id,
            tweet: LabeledTweet {
                sentiment: tweet_score(&scores),
                candidate: classify_candidate(&record.text),
                location,
            },
        }
    }

    /// Streams `reader` through the engine on `threads` workers.
    pub fn run(&self, reader: impl BufRead, threads: usize) -> Result<Folded, PipelineError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| PipelineError::Pool(e.to_string()))?;
        let mut folded = Folded::default();
        let mut seen: HashSet<u64> = HashSet::new();
        let mut batch: Vec<(usize, String)> = Vec::with_capacity(BATCH_LINES);
        let mut lines = reader.lines().enumerate();
        loop {
            batch.clear();
            for (idx, line) in lines.by_ref() {
                let line = line.map_err(|source| PipelineError::Input {
                    path: PathBuf::from("<corpus>"),
                    source,
                })?;
                if line.trim().is_empty() {
                    continue;
                }
                batch.push((idx + 1, line));
                if batch.len() == BATCH_LINES {
                    break;
                }
            }
            if batch.is_empty() {
                break;
            }
            let outcomes: Vec<Vec<Outcome>> = if threads > 1 {
                pool.install(|| {
                    batch
                        .par_chunks(CHUNK_LINES)
                        .map(|chunk| chunk.iter().map(|(n, l)| self.process(*n, l)).collect())
                        .collect()
                })
            } else {
                vec![batch.iter().map(|(n, l)| self.process(*n, l)).collect()]
            };
            for outcome in outcomes.into_iter().flatten() {
                folded.commit(outcome, &mut seen);
            }
        }
        Ok(folded)
    }
}

/// Result of streaming a corpus: the aggregate plus conservation counts.
#[derive(Debug, Clone, Default)]
pub struct Folded {
    pub state: AggregateState,
    pub counts: PipelineCounts,
    pub errors: Vec<String>,
}

impl Folded {
    fn commit(&mut self, outcome: Outcome, seen: &mut HashSet<u64>) {
        self.counts.lines += 1;
        match outcome {
            Outcome::Malformed(err) => {
                self.counts.malformed += 1;
                if self.errors.len() < MAX_REPORTED_ERRORS {
                    self.errors.push(err.to_string());
                }
            }
            Outcome::Filtered => {
                self.counts.parsed += 1;
                self.counts.filtered_out += 1;
            }
            Outcome::Scored { id, tweet } => {
                self.counts.parsed += 1;
                if !seen.insert(id) {
                    self.counts.deduped += 1;
                    return;
                }
                self.counts.scored += 1;
                if tweet.location.is_unmatched() {
                    self.counts.unlocatable += 1;
                }
                self.state.fold(&tweet);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub corpus: PathBuf,
    pub lexicon: LexiconPaths,
    pub locations: PathBuf,
    pub official: PathBuf,
    pub filter: IngestFilter,
    pub options: ScorerOptions,
    pub threads: usize,
    pub measure: Measure,
    /// Decimals used for percentages in province_table.csv.
    pub decimals: usize,
    /// Output directory; created if missing. `None` skips writing.
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub counts: PipelineCounts,
    pub errors: Vec<String>,
    pub report: Report,
}

#[derive(Serialize)]
struct Summary<'a> {
    counts: &'a PipelineCounts,
    malformed_lines: &'a [String],
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineReport, PipelineError> {
    let lexicon = load_lexicon(&config.lexicon)?;
    let rules = LocationRules::load(&config.locations)?;
    let official = load_official(&config.official)?;
    let corpus = fs::File::open(&config.corpus).map_err(|source| PipelineError::Input {
        path: config.corpus.clone(),
        source,
    })?;

    let engine = Engine::new(lexicon, rules, config.filter.clone(), config.options);
    let folded = engine.run(BufReader::new(corpus), config.threads)?;
    if folded.counts.scored == 0 {
        return Err(PipelineError::EmptyCorpus);
    }

    let report = Report::build(folded.state, &official, config.measure);
    let result = PipelineReport {
        counts: folded.counts,
        errors: folded.errors,
        report,
    };
    if let Some(dir) = &config.out_dir {
        write_outputs(&result, dir, config.decimals)?;
    }
    Ok(result)
}

fn write_outputs(
    result: &PipelineReport,
    dir: &Path,
    decimals: usize,
) -> Result<(), PipelineError> {
    let output = |source| PipelineError::Output {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(output)?;
    result.report.write_to(dir, decimals).map_err(output)?;
    write_json(
        &dir.join(SUMMARY_FILE),
        &Summary {
            counts: &result.counts,
            malformed_lines: &result.errors,
        },
    )
    .map_err(output)
}
