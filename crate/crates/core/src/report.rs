//! Report assembly and the output files of a run.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::aggregate::{
    national_shares, province_table, AggregateState, NationalShares, ProvinceTable, SharesError,
};
use crate::attribution::CandidateLabel;
use crate::stats::{correlation_test, OfficialResult};

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const SHARES_FILE: &str = "shares.json";
pub const PROVINCE_TABLE_FILE: &str = "province_table.csv";
pub const CORRELATION_FILE: &str = "correlation.json";

/// What each province contributes to the correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// Positive tweet counts against vote counts.
    #[default]
    Counts,
    /// Within-province tweet share against within-province vote share.
    Percent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateCorrelation {
    pub candidate: CandidateLabel,
    pub measure: Measure,
    pub r: Option<f64>,
    pub p: Option<f64>,
    pub n: usize,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Correlates each candidate's per-province tweets with their votes over
/// the official provinces of `table`.
pub fn correlate_table(table: &ProvinceTable, measure: Measure) -> Vec<CandidateCorrelation> {
    [CandidateLabel::Scioli, CandidateLabel::Macri]
        .into_iter()
        .map(|candidate| {
            let (x, y): (Vec<f64>, Vec<f64>) = table
                .official_rows()
                .filter_map(|row| {
                    let scioli = candidate == CandidateLabel::Scioli;
                    match measure {
                        Measure::Counts => {
                            let tw = if scioli {
                                row.tweets_scioli
                            } else {
                                row.tweets_macri
                            };
                            let v = if scioli {
                                row.votes_scioli
                            } else {
                                row.votes_macri
                            };
                            Some((tw as f64, v? as f64))
                        }
                        Measure::Percent => {
                            let tw = if scioli {
                                row.pct_tw_scioli
                            } else {
                                row.pct_tw_macri
                            };
                            let v = if scioli {
                                row.pct_v_scioli
                            } else {
                                row.pct_v_macri
                            };
                            Some((tw?, v?))
                        }
                    }
                })
                .unzip();
            let n = x.len();
            match correlation_test(&x, &y) {
                Ok(res) => CandidateCorrelation {
                    candidate,
                    measure,
                    r: Some(res.r),
                    p: Some(res.p_value),
                    n,
                    degenerate: res.degenerate,
                    error: None,
                },
                Err(e) => CandidateCorrelation {
                    candidate,
                    measure,
                    r: None,
                    p: None,
                    n,
                    degenerate: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Report {
    pub state: AggregateState,
    pub shares: Result<NationalShares, SharesError>,
    pub table: ProvinceTable,
    pub correlations: Vec<CandidateCorrelation>,
}

impl Report {
    pub fn build(state: AggregateState, official: &[OfficialResult], measure: Measure) -> Report {
        let shares = national_shares(&state);
        let table = province_table(&state, official);
        let correlations = correlate_table(&table, measure);
        Report {
            state,
            shares,
            table,
            correlations,
        }
    }

    pub fn shares_json(&self) -> serde_json::Value {
        let coverage = json!({
            "positive_total": self.table.positive_total,
            "located_total": self.table.located_total,
            "coverage_pct": self.table.coverage_pct(),
        });
        match &self.shares {
            Ok(s) => json!({
                "n_macri": s.n_macri,
                "n_scioli": s.n_scioli,
                "total": s.total,
                "pct_macri": s.pct_macri,
                "pct_scioli": s.pct_scioli,
                "considered_total": self.state.considered_total(),
                "geo": coverage,
            }),
            Err(e) => json!({
                "error": e.to_string(),
                "considered_total": self.state.considered_total(),
                "geo": coverage,
            }),
        }
    }

    /// Writes aggregate.csv, shares.json, province_table.csv and
    /// correlation.json into `dir`, which must exist.
    pub fn write_to(&self, dir: &Path, decimals: usize) -> io::Result<()> {
        let mut w = BufWriter::new(fs::File::create(dir.join(AGGREGATE_FILE))?);
        self.state.write_csv(&mut w).map_err(io::Error::other)?;
        w.flush()?;

        write_json(&dir.join(SHARES_FILE), &self.shares_json())?;

        let mut w = BufWriter::new(fs::File::create(dir.join(PROVINCE_TABLE_FILE))?);
        self.table
            .write_csv(&mut w, decimals)
            .map_err(io::Error::other)?;
        w.flush()?;

        write_json(&dir.join(CORRELATION_FILE), &self.correlations)
    }
}

pub(crate) fn write_json(path: &Path, value: &impl Serialize) -> io::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()
}
