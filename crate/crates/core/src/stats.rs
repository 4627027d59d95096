//! Pearson correlation and its Student-t significance test.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("vector is constant; correlation is undefined")]
    ZeroVariance,
    #[error("non-finite value in input")]
    NonFinite,
}

/// Official runoff tally for one province.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OfficialResult {
    pub province: String,
    pub votes_scioli: u64,
    pub votes_macri: u64,
    #[serde(default)]
    pub population: Option<u64>,
}

impl OfficialResult {
    pub fn new(province: impl Into<String>, votes_scioli: u64, votes_macri: u64) -> Self {
        OfficialResult {
            province: province.into(),
            votes_scioli,
            votes_macri,
            population: None,
        }
    }

    pub fn total(&self) -> u64 {
        self.votes_scioli + self.votes_macri
    }
}

#[derive(Debug, Error)]
pub enum OfficialError {
    #[error("cannot read official results: {0}")]
    Io(#[from] std::io::Error),
    #[error("official results: {0}")]
    Csv(#[from] csv::Error),
    #[error("official results list {0:?} twice")]
    Duplicate(String),
}

/// Reads a tab-separated file with header
/// `province votes_scioli votes_macri [population]`.
pub fn read_official(reader: impl Read) -> Result<Vec<OfficialResult>, OfficialError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out: Vec<OfficialResult> = Vec::new();
    for row in rdr.deserialize() {
        let row: OfficialResult = row?;
        if out.iter().any(|o| o.province == row.province) {
            return Err(OfficialError::Duplicate(row.province));
        }
        out.push(row);
    }
    Ok(out)
}

pub fn load_official(path: impl AsRef<Path>) -> Result<Vec<OfficialResult>, OfficialError> {
    read_official(std::fs::File::open(path)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
    /// |r| = 1: the t statistic is infinite and `p_value` is reported as 0.
    pub degenerate: bool,
}

fn centered_moments(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFew {
            needed: 2,
            got: x.len(),
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok((sxy, sxx, syy))
}

/// Product-moment correlation coefficient.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let (sxy, sxx, syy) = centered_moments(x, y)?;
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let denom = match (sxx * syy).sqrt() {
        d if d.is_finite() && d > 0.0 => d,
        _ => sxx.sqrt() * syy.sqrt(),
    };
    let r = (sxy / denom).clamp(-1.0, 1.0);
    // exact linear fits can land a few ulps short of ±1
    if 1.0 - r.abs() <= 4.0 * f64::EPSILON {
        Ok(r.signum())
    } else {
        Ok(r)
    }
}

/// Pearson r with a two-sided p-value from t = r·√(n−2)/√(1−r²) on n−2
/// degrees of freedom.
pub fn correlation_test(x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    if x.len() == y.len() && x.len() < 3 {
        return Err(StatsError::TooFew {
            needed: 3,
            got: x.len(),
        });
    }
    let r = pearson_r(x, y)?;
    let n = x.len();
    let df = (n - 2) as f64;
    if r.abs() >= 1.0 {
        return Ok(CorrelationResult {
            r,
            p_value: 0.0,
            n,
            degenerate: true,
        });
    }
    // Two-sided tail of |t| equals I_{df/(df+t²)}(df/2, 1/2), and
    // df/(df+t²) simplifies to 1 − r² = (1 − r)(1 + r).
    let p_value = regularized_incomplete_beta(df / 2.0, 0.5, (1.0 - r) * (1.0 + r));
    Ok(CorrelationResult {
        r,
        p_value,
        n,
        degenerate: false,
    })
}

/// Two-sided tail probability P(|T| ≥ |t|) for Student's t with `df` degrees
/// of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
}

const LANCZOS_G: f64 = 7.0;
// standard coefficients, kept verbatim
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0 (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Regularized incomplete beta I_x(a, b), via its continued fraction
/// (modified Lentz), using the symmetry I_x(a,b) = 1 − I_{1−x}(b,a) to stay
/// in the fast-converging region.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "shape parameters must be positive");
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        (ln_front.exp() * beta_continued_fraction(a, b, x) / a).clamp(0.0, 1.0)
    } else {
        (1.0 - ln_front.exp() * beta_continued_fraction(b, a, 1.0 - x) / b).clamp(0.0, 1.0)
    }
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-16;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}
