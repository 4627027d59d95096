//! C ABI over `pulso-core`.
//!
//! Conventions:
//! - Every fallible function returns a [`PulsoStatus`]; on failure a
//!   description is available from [`pulso_last_error_message`] on the same
//!   thread until the next failing call.
//! - Objects are opaque handles created by `*_new`/`*_load` and released by
//!   the matching `*_free`. Passing NULL to a `*_free` function is a no-op.
//! - Strings are NUL-terminated UTF-8. Strings returned through out
//!   parameters are owned by the caller and released with
//!   [`pulso_string_free`].
//! - Panics never cross the boundary; they surface as `PULSO_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use pulso_core::aggregate::{AggregateState, LabeledTweet, SentimentLabel};
use pulso_core::attribution::{
    classify_candidate, normalize_location, CandidateLabel, LocationEntry, LocationRules,
};
use pulso_core::ingest::IngestFilter;
use pulso_core::lexicon::{load_lexicon, Lexicon, LexiconPaths};
use pulso_core::nlp::{analyze_text, ScorerOptions};
use pulso_core::report::Measure;
use pulso_core::stats::{correlation_test, pearson_r, StatsError};
use pulso_core::{national_shares, run_pipeline, tweet_score, PipelineConfig, PipelineError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulsoStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// A file could not be read or written.
    Io = 3,
    /// An input file or value was malformed.
    Parse = 4,
    /// Arguments were well-formed but not acceptable (e.g. too few points).
    InvalidArgument = 5,
    /// No record survived filtering.
    EmptyCorpus = 6,
    /// The requested quantity is undefined for this input (e.g. shares of
    /// an aggregate without positive candidate tweets).
    Undefined = 7,
    /// An internal panic was caught.
    Panic = 99,
}

/// Candidate attribution of a tweet.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulsoCandidate {
    Macri = 0,
    Scioli = 1,
    Both = 2,
    None = 3,
}

impl From<CandidateLabel> for PulsoCandidate {
    fn from(c: CandidateLabel) -> Self {
        match c {
            CandidateLabel::Macri => PulsoCandidate::Macri,
            CandidateLabel::Scioli => PulsoCandidate::Scioli,
            CandidateLabel::Both => PulsoCandidate::Both,
            CandidateLabel::None => PulsoCandidate::None,
        }
    }
}

/// National positive-tweet shares.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PulsoShares {
    pub n_macri: u64,
    pub n_scioli: u64,
    pub pct_macri: f64,
    pub pct_scioli: f64,
}

/// Pearson correlation with its two-sided p-value.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PulsoCorrelation {
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
    /// True for an exact linear relation (|r| = 1, p = 0).
    pub degenerate: bool,
}

/// Loaded sentiment dictionaries.
pub struct PulsoLexicon {
    inner: Lexicon,
}

/// Ordered location rules.
pub struct PulsoLocationRules {
    inner: LocationRules,
}

/// Mergeable aggregate counters.
pub struct PulsoAggregate {
    inner: AggregateState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let msg = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(PulsoStatus, String);

impl Failure {
    fn new(status: PulsoStatus, msg: impl ToString) -> Self {
        Failure(status, msg.to_string())
    }
}

type FfiResult<T = ()> = Result<T, Failure>;

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> FfiResult) -> PulsoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PulsoStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PulsoStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure::new(
            PulsoStatus::NullArgument,
            format!("{name} is NULL"),
        ));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(PulsoStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref()
        .ok_or_else(|| Failure::new(PulsoStatus::NullArgument, format!("{name} is NULL")))
}

unsafe fn mut_arg<'a, T>(p: *mut T, name: &str) -> FfiResult<&'a mut T> {
    p.as_mut()
        .ok_or_else(|| Failure::new(PulsoStatus::NullArgument, format!("{name} is NULL")))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, name: &str) -> FfiResult<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::new(
            PulsoStatus::NullArgument,
            format!("{name} is NULL"),
        ));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn owned_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

fn stats_failure(e: StatsError) -> Failure {
    Failure::new(PulsoStatus::InvalidArgument, e)
}

/// Message describing the last failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn pulso_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn pulso_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn pulso_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---------------------------------------------------------------- lexicon

/// Loads white_list.txt, normalization.tsv, pos_words.txt and neg_words.txt
/// from `dir`.
///
/// # Safety
/// `dir` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pulso_lexicon_load(
    dir: *const c_char,
    out: *mut *mut PulsoLexicon,
) -> PulsoStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        *out = ptr::null_mut();
        let dir = str_arg(dir, "dir")?;
        let inner = load_lexicon(&LexiconPaths::in_dir(dir)).map_err(|e| {
            let status = match e {
                pulso_core::lexicon::LexiconError::Io { .. } => PulsoStatus::Io,
                _ => PulsoStatus::Parse,
            };
            Failure::new(status, e)
        })?;
        *out = Box::into_raw(Box::new(PulsoLexicon { inner }));
        Ok(())
    })
}

/// # Safety
/// `lexicon` must be NULL or a handle from [`pulso_lexicon_load`].
#[no_mangle]
pub unsafe extern "C" fn pulso_lexicon_free(lexicon: *mut PulsoLexicon) {
    if !lexicon.is_null() {
        drop(Box::from_raw(lexicon));
    }
}

/// Scores `text` sentence by sentence with default tokenizer options.
/// Writes the sum of sentence scores to `out_total` and the tweet label
/// (-1, 0 or 1) to `out_label`; either may be NULL. `out_sentences`, if not
/// NULL, receives the number of sentences.
///
/// # Safety
/// Pointers must be valid; `text` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pulso_analyze_text(
    lexicon: *const PulsoLexicon,
    text: *const c_char,
    out_total: *mut i64,
    out_label: *mut i32,
    out_sentences: *mut usize,
) -> PulsoStatus {
    guard(|| {
        let lexicon = ref_arg(lexicon, "lexicon")?;
        let text = str_arg(text, "text")?;
        let scores: Vec<i64> = analyze_text(text, &lexicon.inner, ScorerOptions::default())
            .into_iter()
            .map(|s| s.score)
            .collect();
        if let Some(t) = out_total.as_mut() {
            *t = scores.iter().sum();
        }
        if let Some(l) = out_label.as_mut() {
            *l = tweet_score(&scores).value() as i32;
        }
        if let Some(n) = out_sentences.as_mut() {
            *n = scores.len();
        }
        Ok(())
    })
}

/// Candidate named by `text`.
///
/// # Safety
/// `text` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pulso_classify_candidate(
    text: *const c_char,
    out: *mut PulsoCandidate,
) -> PulsoStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        *out = classify_candidate(str_arg(text, "text")?).into();
        Ok(())
    })
}

// --------------------------------------------------------------- locations

/// Loads tab-separated location rules from `path`.
///
/// # Safety
/// `path` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pulso_rules_load(
    path: *const c_char,
    out: *mut *mut PulsoLocationRules,
) -> PulsoStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let inner = LocationRules::load(path).map_err(|e| {
            let status = match e {
                pulso_core::attribution::RuleError::Io(_) => PulsoStatus::Io,
                _ => PulsoStatus::Parse,
            };
            Failure::new(status, e)
        })?;
        *out = Box::into_raw(Box::new(PulsoLocationRules { inner }));
        Ok(())
    })
}

/// # Safety
/// `rules` must be NULL or a handle from [`pulso_rules_load`].
#[no_mangle]
pub unsafe extern "C" fn pulso_rules_free(rules: *mut PulsoLocationRules) {
    if !rules.is_null() {
        drop(Box::from_raw(rules));
    }
}

/// Maps a free-text location to (province, country). Unmatched input yields
/// ("Sin Provincia", "Sin País"). Both out strings must be released with
/// [`pulso_string_free`].
///
/// # Safety
/// Pointers must be valid; `raw` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pulso_normalize_location(
    rules: *const PulsoLocationRules,
    raw: *const c_char,
    out_province: *mut *mut c_char,
    out_country: *mut *mut c_char,
) -> PulsoStatus {
    guard(|| {
        let rules = ref_arg(rules, "rules")?;
        let raw = str_arg(raw, "raw")?;
        let province = mut_arg(out_province, "out_province")?;
        let country = mut_arg(out_country, "out_country")?;
        let entry = normalize_location(raw, &rules.inner);
        *province = owned_string(&entry.province);
        *country = owned_string(&entry.country);
        Ok(())
    })
}

// --------------------------------------------------------------- aggregate

/// Empty aggregate. Never returns NULL.
#[no_mangle]
pub extern "C" fn pulso_aggregate_new() -> *mut PulsoAggregate {
    Box::into_raw(Box::new(PulsoAggregate {
        inner: AggregateState::new(),
    }))
}

/// # Safety
/// `agg` must be NULL or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn pulso_aggregate_free(agg: *mut PulsoAggregate) {
    if !agg.is_null() {
        drop(Box::from_raw(agg));
    }
}

/// Counts one labelled tweet. `candidate` is a `PulsoCandidate` value and
/// `sentiment` is -1, 0 or 1.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pulso_aggregate_fold(
    agg: *mut PulsoAggregate,
    country: *const c_char,
    province: *const c_char,
    candidate: i32,
    sentiment: i32,
) -> PulsoStatus {
    guard(|| {
        let agg = mut_arg(agg, "agg")?;
        let candidate = match candidate {
            0 => CandidateLabel::Macri,
            1 => CandidateLabel::Scioli,
            2 => CandidateLabel::Both,
            3 => CandidateLabel::None,
            other => {
                return Err(Failure::new(
                    PulsoStatus::InvalidArgument,
                    format!("unknown candidate code {other}"),
                ))
            }
        };
        let sentiment = match sentiment {
            -1 => SentimentLabel::Negativo,
            0 => SentimentLabel::Neutro,
            1 => SentimentLabel::Positivo,
            other => {
                return Err(Failure::new(
                    PulsoStatus::InvalidArgument,
                    format!("sentiment must be -1, 0 or 1, got {other}"),
                ))
            }
        };
        agg.inner.fold(&LabeledTweet {
            sentiment,
            candidate,
            location: LocationEntry::new(
                str_arg(province, "province")?,
                str_arg(country, "country")?,
            ),
        });
        Ok(())
    })
}

/// Adds every count of `src` into `dst`. `src` is left unchanged.
///
/// # Safety
/// Both handles must be valid and distinct.
#[no_mangle]
pub unsafe extern "C" fn pulso_aggregate_merge(
    dst: *mut PulsoAggregate,
    src: *const PulsoAggregate,
) -> PulsoStatus {
    guard(|| {
        if ptr::eq(dst, src) {
            return Err(Failure::new(
                PulsoStatus::InvalidArgument,
                "dst and src are the same handle",
            ));
        }
        let src = ref_arg(src, "src")?;
        mut_arg(dst, "dst")?.inner.merge(&src.inner);
        Ok(())
    })
}

/// Number of tweets counted, or 0 for NULL.
///
/// # Safety
/// `agg` must be NULL or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn pulso_aggregate_total(agg: *const PulsoAggregate) -> u64 {
    agg.as_ref().map_or(0, |a| a.inner.considered_total())
}

/// Shares of positive tweets naming only Macri or only Scioli.
/// Returns `PULSO_STATUS_UNDEFINED` when there are none.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pulso_aggregate_national_shares(
    agg: *const PulsoAggregate,
    out: *mut PulsoShares,
) -> PulsoStatus {
    guard(|| {
        let agg = ref_arg(agg, "agg")?;
        let out = mut_arg(out, "out")?;
        let s = national_shares(&agg.inner).map_err(|e| Failure::new(PulsoStatus::Undefined, e))?;
        *out = PulsoShares {
            n_macri: s.n_macri,
            n_scioli: s.n_scioli,
            pct_macri: s.pct_macri,
            pct_scioli: s.pct_scioli,
        };
        Ok(())
    })
}

/// Reads an aggregate CSV (country,province,candidate,sentiment,count).
///
/// # Safety
/// `path` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pulso_aggregate_read_csv(
    path: *const c_char,
    out: *mut *mut PulsoAggregate,
) -> PulsoStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let file = fs::File::open(path)
            .map_err(|e| Failure::new(PulsoStatus::Io, format!("{path}: {e}")))?;
        let inner = AggregateState::read_csv(BufReader::new(file))
            .map_err(|e| Failure::new(PulsoStatus::Parse, format!("{path}: {e}")))?;
        *out = Box::into_raw(Box::new(PulsoAggregate { inner }));
        Ok(())
    })
}

/// Writes the aggregate as CSV in canonical order.
///
/// # Safety
/// `agg` valid; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pulso_aggregate_write_csv(
    agg: *const PulsoAggregate,
    path: *const c_char,
) -> PulsoStatus {
    guard(|| {
        let agg = ref_arg(agg, "agg")?;
        let path = str_arg(path, "path")?;
        let io = |e: std::io::Error| Failure::new(PulsoStatus::Io, format!("{path}: {e}"));
        let mut w = BufWriter::new(fs::File::create(path).map_err(io)?);
        agg.inner
            .write_csv(&mut w)
            .map_err(|e| Failure::new(PulsoStatus::Io, format!("{path}: {e}")))?;
        w.flush().map_err(io)
    })
}

// ------------------------------------------------------------------- stats

/// Pearson correlation coefficient of two series of length `len`.
///
/// # Safety
/// `x` and `y` must point to `len` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pulso_pearson(
    x: *const f64,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> PulsoStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        *out =
            pearson_r(slice_arg(x, len, "x")?, slice_arg(y, len, "y")?).map_err(stats_failure)?;
        Ok(())
    })
}

/// Pearson r with a two-sided t-test p-value on `len - 2` degrees of
/// freedom. Requires at least three points.
///
/// # Safety
/// `x` and `y` must point to `len` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pulso_correlation_test(
    x: *const f64,
    y: *const f64,
    len: usize,
    out: *mut PulsoCorrelation,
) -> PulsoStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        let res = correlation_test(slice_arg(x, len, "x")?, slice_arg(y, len, "y")?)
            .map_err(stats_failure)?;
        *out = PulsoCorrelation {
            r: res.r,
            p_value: res.p_value,
            n: res.n,
            degenerate: res.degenerate,
        };
        Ok(())
    })
}

// ---------------------------------------------------------------- pipeline

/// Replays `corpus` with the default campaign filter and writes every
/// report file into `out_dir`. `threads` of 0 means 1.
///
/// # Safety
/// All strings must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn pulso_run_pipeline(
    corpus: *const c_char,
    lexicon_dir: *const c_char,
    locations: *const c_char,
    official: *const c_char,
    out_dir: *const c_char,
    threads: usize,
) -> PulsoStatus {
    guard(|| {
        let config = PipelineConfig {
            corpus: PathBuf::from(str_arg(corpus, "corpus")?),
            lexicon: LexiconPaths::in_dir(str_arg(lexicon_dir, "lexicon_dir")?),
            locations: PathBuf::from(str_arg(locations, "locations")?),
            official: PathBuf::from(str_arg(official, "official")?),
            filter: IngestFilter::campaign_default(),
            options: ScorerOptions::default(),
            threads: threads.max(1),
            measure: Measure::Counts,
            decimals: 2,
            out_dir: Some(PathBuf::from(str_arg(out_dir, "out_dir")?)),
        };
        run_pipeline(&config).map(drop).map_err(|e| {
            let status = match &e {
                PipelineError::EmptyCorpus => PulsoStatus::EmptyCorpus,
                PipelineError::Input { .. } | PipelineError::Output { .. } => PulsoStatus::Io,
                PipelineError::Pool(_) => PulsoStatus::InvalidArgument,
                _ => PulsoStatus::Parse,
            };
            Failure::new(status, e)
        })
    })
}
