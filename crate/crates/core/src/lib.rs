//! Lexicon-based sentiment analytics over replayed tweet corpora.
//!
//! Tweets are scored sentence by sentence against curated dictionaries,
//! collapsed to a sign per tweet, attributed to a candidate and a province,
//! and folded into mergeable counters. From those counters the crate derives
//! national positive-tweet shares, a per-province comparison against
//! official vote tallies, and Pearson correlations with t-test p-values.

pub mod aggregate;
pub mod attribution;
pub mod ingest;
pub mod lexicon;
pub mod nlp;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod synth;

pub use aggregate::{
    national_shares, province_table, tweet_score, AggregateState, LabeledTweet, NationalShares,
    ProvinceRow, ProvinceTable, SentimentLabel,
};
pub use attribution::{
    classify_candidate, normalize_location, CandidateLabel, LocationEntry, LocationResolver,
    LocationRule, LocationRules,
};
pub use ingest::{parse_record, passes_filter, IngestFilter, TweetRecord};
pub use lexicon::{load_lexicon, suggest_terms, Lexicon, LexiconPaths, TermFrequency};
pub use nlp::{
    analyze_tweet, score_sentence, segment_sentences, tokenize, ScorerOptions, SentenceSentiment,
};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineCounts, PipelineError, PipelineReport};
pub use stats::{correlation_test, pearson_r, CorrelationResult, OfficialResult};
