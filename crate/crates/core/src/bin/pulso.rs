use std::collections::HashMap;
use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pulso_core::aggregate::AggregateState;
use pulso_core::ingest::{
    parse_timestamp, read_records, IngestFilter, CAMPAIGN_ACCOUNTS, CAMPAIGN_CUTOFF,
    CAMPAIGN_KEYWORDS, CAMPAIGN_START,
};
use pulso_core::lexicon::{load_lexicon, suggest_terms, LexiconPaths};
use pulso_core::report::{Measure, Report};
use pulso_core::stats::load_official;
use pulso_core::synth::{generate_jsonl, SynthConfig};
use pulso_core::{run_pipeline, LocationRules, PipelineConfig, ScorerOptions};

#[derive(Parser)]
#[command(
    name = "pulso",
    version,
    about = "Lexicon sentiment analytics over replayed tweet corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a corpus and write aggregate, shares, province table and correlations.
    Run(RunArgs),
    /// Inspect and tune the sentiment dictionaries.
    #[command(subcommand)]
    Lexicon(LexiconCommand),
    /// Inspect location normalization.
    #[command(subcommand)]
    Locations(LocationsCommand),
    /// Correlate an aggregate with official results and print JSON.
    Correlate(CorrelateArgs),
    /// Rebuild every report file from a saved aggregate.
    Report(ReportArgs),
    /// Write a seeded synthetic corpus as JSON lines.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Directory holding white_list.txt, normalization.tsv, pos_words.txt, neg_words.txt.
    #[arg(long)]
    lexicon: PathBuf,
    /// Ordered location rules (order, pattern, province, country; tab-separated).
    #[arg(long)]
    locations: PathBuf,
    /// Official per-province results (tab-separated, with header).
    #[arg(long)]
    official: PathBuf,
    /// Window start (RFC 3339 or "YYYY-MM-DD HH:MM:SS±HH:MM").
    #[arg(long, default_value = CAMPAIGN_START)]
    from: String,
    /// Window end, inclusive.
    #[arg(long, default_value = CAMPAIGN_CUTOFF)]
    to: String,
    /// Required language; "any" disables the check.
    #[arg(long, default_value = "es")]
    lang: String,
    /// Keyword to track (repeatable); replaces the built-in campaign list.
    #[arg(long = "keyword")]
    keywords: Vec<String>,
    /// Account to follow (repeatable); replaces the built-in campaign list.
    #[arg(long = "follow")]
    follow: Vec<String>,
    /// Keep every record regardless of keywords and accounts.
    #[arg(long, conflicts_with_all = ["keywords", "follow"])]
    no_keywords: bool,
    /// Worker threads.
    #[arg(long, env = "PULSO_THREADS", default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    out: PathBuf,
    /// Decimals for percentages in province_table.csv.
    #[arg(long, default_value_t = 2)]
    decimals: usize,
    /// Correlate within-province shares instead of raw counts.
    #[arg(long)]
    percent: bool,
    #[arg(long)]
    filter_links: bool,
    #[arg(long)]
    filter_mentions: bool,
    #[arg(long)]
    filter_hashtags: bool,
}

#[derive(Subcommand)]
enum LexiconCommand {
    /// Load the dictionaries and report their sizes.
    Validate {
        #[arg(long)]
        lexicon: PathBuf,
    },
    /// List the most frequent corpus terms missing from every dictionary.
    Suggest {
        #[arg(long, default_value_t = 20)]
        top: usize,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
    },
}

#[derive(Subcommand)]
enum LocationsCommand {
    /// Distinct raw locations that match no rule, most frequent first.
    Unmatched {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        locations: PathBuf,
    },
}

#[derive(Args)]
struct CorrelateArgs {
    #[arg(long)]
    aggregate: PathBuf,
    #[arg(long)]
    official: PathBuf,
    #[arg(long)]
    percent: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    aggregate: PathBuf,
    #[arg(long)]
    official: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2)]
    decimals: usize,
    #[arg(long)]
    percent: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn measure(percent: bool) -> Measure {
    if percent {
        Measure::Percent
    } else {
        Measure::Counts
    }
}

fn timestamp(s: &str, flag: &str) -> Result<chrono::DateTime<chrono::FixedOffset>> {
    parse_timestamp(s).with_context(|| format!("--{flag}: unrecognized timestamp {s:?}"))
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let (keywords, follow): (Vec<String>, Vec<String>) = if args.no_keywords {
        (Vec::new(), Vec::new())
    } else if args.keywords.is_empty() && args.follow.is_empty() {
        (
            CAMPAIGN_KEYWORDS.iter().map(|s| s.to_string()).collect(),
            CAMPAIGN_ACCOUNTS.iter().map(|s| s.to_string()).collect(),
        )
    } else {
        (args.keywords, args.follow)
    };
    let lang = (!args.lang.eq_ignore_ascii_case("any")).then_some(args.lang.as_str());
    let filter = IngestFilter::new(
        keywords,
        follow,
        lang,
        Some(timestamp(&args.from, "from")?),
        Some(timestamp(&args.to, "to")?),
    )?;
    let config = PipelineConfig {
        corpus: args.corpus,
        lexicon: LexiconPaths::in_dir(&args.lexicon),
        locations: args.locations,
        official: args.official,
        filter,
        options: ScorerOptions {
            filter_links: args.filter_links,
            filter_user_mentions: args.filter_mentions,
            filter_hashtags: args.filter_hashtags,
        },
        threads: args.threads.max(1),
        measure: measure(args.percent),
        decimals: args.decimals,
        out_dir: Some(args.out.clone()),
    };
    let result = match run_pipeline(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("pulso: {e}");
            return Ok(ExitCode::from(e.exit_code() as u8));
        }
    };
    let c = result.counts;
    eprintln!(
        "lines {} parsed {} malformed {} filtered {} deduped {} scored {} unlocatable {}",
        c.lines, c.parsed, c.malformed, c.filtered_out, c.deduped, c.scored, c.unlocatable
    );
    eprintln!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn lexicon(cmd: LexiconCommand) -> Result<()> {
    match cmd {
        LexiconCommand::Validate { lexicon } => {
            let lex = load_lexicon(&LexiconPaths::in_dir(&lexicon))?;
            println!(
                "attributes {} synonyms {} positive {} negative {} longest phrase {}",
                lex.attributes().len(),
                lex.synonyms().len(),
                lex.positive_words().len(),
                lex.negative_words().len(),
                lex.max_phrase_len()
            );
        }
        LexiconCommand::Suggest {
            top,
            corpus,
            lexicon,
        } => {
            let lex = load_lexicon(&LexiconPaths::in_dir(&lexicon))?;
            let texts = corpus_records(&corpus)?
                .into_iter()
                .map(|r| r.text)
                .collect::<Vec<_>>();
            let mut out = io::stdout().lock();
            for t in suggest_terms(texts.iter().map(String::as_str), &lex, top) {
                writeln!(out, "{}\t{}", t.count, t.term)?;
            }
        }
    }
    Ok(())
}

/// Well-formed records of a corpus; malformed lines are reported and skipped.
fn corpus_records(path: &Path) -> Result<Vec<pulso_core::TweetRecord>> {
    let file = fs::File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut records = Vec::new();
    for item in read_records(BufReader::new(file)) {
        match item? {
            Ok(r) => records.push(r),
            Err(e) => eprintln!("pulso: skipping {e}"),
        }
    }
    Ok(records)
}

fn locations(cmd: LocationsCommand) -> Result<()> {
    let LocationsCommand::Unmatched { corpus, locations } = cmd;
    let rules = LocationRules::load(&locations)?;
    let mut counts: HashMap<String, u64> = HashMap::new();
    for r in corpus_records(&corpus)? {
        let Some(loc) = r.user_location else { continue };
        if !loc.trim().is_empty() && rules.lookup(&loc).is_none() {
            *counts.entry(loc).or_default() += 1;
        }
    }
    let mut rows: Vec<_> = counts.into_iter().collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut out = io::stdout().lock();
    for (loc, n) in rows {
        writeln!(out, "{n}\t{loc}")?;
    }
    Ok(())
}

fn build_report(aggregate: &Path, official: &Path, percent: bool) -> Result<Report> {
    let file = fs::File::open(aggregate)
        .with_context(|| format!("cannot read {}", aggregate.display()))?;
    let state = AggregateState::read_csv(BufReader::new(file))
        .with_context(|| format!("invalid aggregate {}", aggregate.display()))?;
    let official = load_official(official)
        .with_context(|| format!("invalid official results {}", official.display()))?;
    Ok(Report::build(state, &official, measure(percent)))
}

#[derive(Serialize)]
struct CorrelationLine {
    candidate: String,
    r: Option<f64>,
    p: Option<f64>,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn correlate(args: CorrelateArgs) -> Result<()> {
    let report = build_report(&args.aggregate, &args.official, args.percent)?;
    let lines: Vec<CorrelationLine> = report
        .correlations
        .into_iter()
        .map(|c| CorrelationLine {
            candidate: c.candidate.to_string(),
            r: c.r,
            p: c.p,
            n: c.n,
            error: c.error,
        })
        .collect();
    println!("{}", serde_json::to_string_pretty(&lines)?);
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let report = build_report(&args.aggregate, &args.official, args.percent)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    report
        .write_to(&args.out, args.decimals)
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    if args.count == 0 {
        bail!("--count must be positive");
    }
    let corpus = generate_jsonl(&SynthConfig::new(args.count, args.seed));
    match args.out {
        Some(path) => {
            let mut w = BufWriter::new(
                fs::File::create(&path)
                    .with_context(|| format!("cannot write {}", path.display()))?,
            );
            w.write_all(corpus.as_bytes())?;
            w.flush()?;
        }
        None => io::stdout().lock().write_all(corpus.as_bytes())?,
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(args) => return run(args),
        Command::Lexicon(cmd) => lexicon(cmd)?,
        Command::Locations(cmd) => locations(cmd)?,
        Command::Correlate(args) => correlate(args)?,
        Command::Report(args) => report(args)?,
        Command::Synth(args) => synth(args)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("pulso: {e:#}");
            ExitCode::from(1)
        }
    }
}
