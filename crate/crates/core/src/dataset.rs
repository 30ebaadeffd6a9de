//! Club records, CSV ingestion and the bundled reference tables.
//!
//! Money is millions of euros everywhere except in [`TransactionCase`], which
//! keeps the yen amounts it was recorded in. Follower counts stay raw
//! integers until a model asks for them in millions.

use std::fmt;
use std::io;

use thiserror::Error;

/// Exact header line of the club CSV format.
pub const CLUB_CSV_HEADER: &str = "name,league,sns_followers,revenue_meur,player_market_value_meur,broadcasting_meur,wage_cost_ratio,player_wages_meur,stadium_owned";

const CLUB_COLUMNS: usize = 9;
const REQUIRED_COLUMNS: usize = 5;

const JLEAGUE_CSV: &str = include_str!("../data/jleague.csv");
const EUROPEAN_CSV: &str = include_str!("../data/european_reference.csv");
const TRANSACTIONS_CSV: &str = include_str!("../data/transactions.csv");

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    HeaderMismatch { expected: String, found: String },
    #[error("line {line}: expected {expected} fields, found {found}")]
    RowArity { line: u64, expected: usize, found: usize },
    #[error("line {line}: field `{field}` is not numeric: `{value}`")]
    NonNumeric { field: &'static str, line: u64, value: String },
    #[error("line {line}: field `{field}` is negative")]
    NegativeValue { field: &'static str, line: u64 },
    #[error("line {line}: field `{field}` is out of range")]
    OutOfRange { field: &'static str, line: u64 },
    #[error("line {line}: club name is empty")]
    EmptyName { line: u64 },
    #[error("invalid exchange rate {0}: must be finite and positive")]
    InvalidFxRate(f64),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

/// One club's predictor observations.
#[derive(Debug, Clone, PartialEq)]
pub struct ClubRecord {
    pub name: String,
    pub league: String,
    pub sns_followers: u64,
    pub revenue: f64,
    pub player_market_value: f64,
    pub broadcasting_revenue: Option<f64>,
    pub wage_cost_ratio: Option<f64>,
    pub player_wages: Option<f64>,
    pub stadium_owned: Option<bool>,
}

impl ClubRecord {
    /// Record with only the three core predictors populated.
    pub fn new(
        name: impl Into<String>,
        league: impl Into<String>,
        sns_followers: u64,
        revenue: f64,
        player_market_value: f64,
    ) -> Self {
        Self {
            name: name.into(),
            league: league.into(),
            sns_followers,
            revenue,
            player_market_value,
            broadcasting_revenue: None,
            wage_cost_ratio: None,
            player_wages: None,
            stadium_owned: None,
        }
    }

    /// Checks the record invariants that the CSV parser enforces.
    pub fn validate(&self) -> Result<(), String> {
        if self.name.trim().is_empty() {
            return Err("name is empty".into());
        }
        let money = [
            ("revenue", Some(self.revenue)),
            ("player_market_value", Some(self.player_market_value)),
            ("broadcasting_revenue", self.broadcasting_revenue),
            ("player_wages", self.player_wages),
        ];
        for (field, v) in money {
            if let Some(v) = v {
                if !v.is_finite() || v < 0.0 {
                    return Err(format!("{field} must be finite and non-negative"));
                }
            }
        }
        if let Some(w) = self.wage_cost_ratio {
            if !(0.0..=2.0).contains(&w) {
                return Err("wage_cost_ratio must lie in [0, 2]".into());
            }
        }
        Ok(())
    }

    pub fn sns_followers_millions(&self) -> f64 {
        followers_to_millions(self.sns_followers)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcquisitionPattern {
    CapitalIncrease,
    ShareTransfer,
}

impl fmt::Display for AcquisitionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CapitalIncrease => "Capital increase",
            Self::ShareTransfer => "Share transfer",
        })
    }
}

/// A historical change of control in a J.League club.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionCase {
    pub club: String,
    pub pattern: AcquisitionPattern,
    /// Thousands of yen per share.
    pub par_value_kyen: Option<f64>,
    /// Thousands of yen per share.
    pub stock_price_kyen: Option<f64>,
    /// Millions of yen needed to hold 51% of the shares.
    pub price_for_51pct_myen: Option<f64>,
    pub method_label: String,
}

/// Published enterprise value next to both formula outputs, all in m€.
#[derive(Debug, Clone, PartialEq)]
pub struct EuropeanReference {
    pub club: String,
    pub ev_kpmg: f64,
    pub fv1: f64,
    pub fv2: f64,
}

/// Yen per euro.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FxRate(f64);

impl FxRate {
    pub const DEFAULT_YEN_PER_EURO: f64 = 150.0;

    pub fn new(yen_per_euro: f64) -> Result<Self, DatasetError> {
        if yen_per_euro.is_finite() && yen_per_euro > 0.0 {
            Ok(Self(yen_per_euro))
        } else {
            Err(DatasetError::InvalidFxRate(yen_per_euro))
        }
    }

    pub fn yen_per_euro(self) -> f64 {
        self.0
    }
}

impl Default for FxRate {
    fn default() -> Self {
        Self(Self::DEFAULT_YEN_PER_EURO)
    }
}

pub fn yen_to_eur(amount_myen: f64, fx: FxRate) -> f64 {
    amount_myen / fx.0
}

pub fn eur_to_yen(amount_meur: f64, fx: FxRate) -> f64 {
    amount_meur * fx.0
}

pub fn followers_to_millions(count: u64) -> f64 {
    count as f64 / 1_000_000.0
}

fn parse_f64(raw: &str, field: &'static str, line: u64) -> Result<f64, DatasetError> {
    let v: f64 = raw.trim().parse().map_err(|_| DatasetError::NonNumeric {
        field,
        line,
        value: raw.to_string(),
    })?;
    if !v.is_finite() {
        return Err(DatasetError::NonNumeric {
            field,
            line,
            value: raw.to_string(),
        });
    }
    if v < 0.0 {
        return Err(DatasetError::NegativeValue { field, line });
    }
    Ok(v)
}

fn parse_opt_f64(raw: &str, field: &'static str, line: u64) -> Result<Option<f64>, DatasetError> {
    if raw.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(raw, field, line).map(Some)
    }
}

fn parse_followers(raw: &str, line: u64) -> Result<u64, DatasetError> {
    let t = raw.trim();
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    match t.parse::<i64>() {
        Ok(v) if v < 0 => Err(DatasetError::NegativeValue {
            field: "sns_followers",
            line,
        }),
        _ => Err(DatasetError::NonNumeric {
            field: "sns_followers",
            line,
            value: raw.to_string(),
        }),
    }
}

fn parse_bool(raw: &str, line: u64) -> Result<Option<bool>, DatasetError> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "" => Ok(None),
        "true" | "1" | "yes" => Ok(Some(true)),
        "false" | "0" | "no" => Ok(Some(false)),
        _ => Err(DatasetError::NonNumeric {
            field: "stadium_owned",
            line,
            value: raw.to_string(),
        }),
    }
}

/// Parses the club CSV format. The first line must equal [`CLUB_CSV_HEADER`].
/// Rows may stop after the five required columns or carry all nine.
pub fn parse_club_csv(text: &str) -> Result<Vec<ClubRecord>, DatasetError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let first = text.lines().next().unwrap_or("");
    let first = first.strip_suffix('\r').unwrap_or(first);
    if first != CLUB_CSV_HEADER {
        return Err(DatasetError::HeaderMismatch {
            expected: CLUB_CSV_HEADER.to_string(),
            found: first.to_string(),
        });
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != CLUB_COLUMNS && row.len() != REQUIRED_COLUMNS {
            return Err(DatasetError::RowArity {
                line,
                expected: CLUB_COLUMNS,
                found: row.len(),
            });
        }
        let get = |i: usize| row.get(i).unwrap_or("");
        let name = get(0).trim().to_string();
        if name.is_empty() {
            return Err(DatasetError::EmptyName { line });
        }
        let wage_cost_ratio = parse_opt_f64(get(6), "wage_cost_ratio", line)?;
        if matches!(wage_cost_ratio, Some(w) if w > 2.0) {
            return Err(DatasetError::OutOfRange {
                field: "wage_cost_ratio",
                line,
            });
        }
        out.push(ClubRecord {
            name,
            league: get(1).trim().to_string(),
            sns_followers: parse_followers(get(2), line)?,
            revenue: parse_f64(get(3), "revenue_meur", line)?,
            player_market_value: parse_f64(get(4), "player_market_value_meur", line)?,
            broadcasting_revenue: parse_opt_f64(get(5), "broadcasting_meur", line)?,
            wage_cost_ratio,
            player_wages: parse_opt_f64(get(7), "player_wages_meur", line)?,
            stadium_owned: parse_bool(get(8), line)?,
        });
    }
    Ok(out)
}

fn opt_to_string<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes records in the club CSV format (LF line endings). Floats use the
/// shortest representation that parses back to the same value.
pub fn write_club_csv<W: io::Write>(records: &[ClubRecord], out: W) -> Result<(), DatasetError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CLUB_CSV_HEADER.split(','))?;
    for r in records {
        w.write_record([
            r.name.clone(),
            r.league.clone(),
            r.sns_followers.to_string(),
            r.revenue.to_string(),
            r.player_market_value.to_string(),
            opt_to_string(r.broadcasting_revenue),
            opt_to_string(r.wage_cost_ratio),
            opt_to_string(r.player_wages),
            opt_to_string(r.stadium_owned),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn club_csv_string(records: &[ClubRecord]) -> String {
    let mut buf = Vec::new();
    write_club_csv(records, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

/// J.League clubs with the predictor columns of the published valuation table.
pub fn bundled_jleague_dataset() -> Vec<ClubRecord> {
    parse_club_csv(JLEAGUE_CSV).expect("bundled J.League table is well formed")
}

pub fn bundled_european_reference() -> Vec<EuropeanReference> {
    let mut reader = csv::Reader::from_reader(EUROPEAN_CSV.as_bytes());
    reader
        .records()
        .map(|row| {
            let row = row.expect("bundled European table is well formed");
            let num = |i: usize| row[i].parse::<f64>().expect("numeric European value");
            EuropeanReference {
                club: row[0].to_string(),
                ev_kpmg: num(1),
                fv1: num(2),
                fv2: num(3),
            }
        })
        .collect()
}

pub fn bundled_transactions() -> Vec<TransactionCase> {
    let mut reader = csv::Reader::from_reader(TRANSACTIONS_CSV.as_bytes());
    reader
        .records()
        .map(|row| {
            let row = row.expect("bundled transaction table is well formed");
            let opt = |i: usize| {
                let s = row[i].trim();
                (!s.is_empty()).then(|| s.parse::<f64>().expect("numeric transaction value"))
            };
            TransactionCase {
                club: row[0].to_string(),
                pattern: match &row[1] {
                    "capital_increase" => AcquisitionPattern::CapitalIncrease,
                    _ => AcquisitionPattern::ShareTransfer,
                },
                par_value_kyen: opt(2),
                stock_price_kyen: opt(3),
                price_for_51pct_myen: opt(4),
                method_label: row[5].to_string(),
            }
        })
        .collect()
}
