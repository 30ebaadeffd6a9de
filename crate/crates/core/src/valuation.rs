//! Applying linear-through-origin valuation formulae to clubs, aggregating the
//! results, and comparing them with actual transaction prices.

use std::fmt;

use thiserror::Error;

use crate::dataset::{ClubRecord, FxRate, TransactionCase};
use crate::parallel::Execution;
use crate::published::{sns_market_value_model, sns_revenue_model, PublishedModel};

/// Share of the club the transaction prices buy.
pub const DEFAULT_STAKE: f64 = 0.51;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValuationError {
    #[error("club `{club}` has no value for predictor `{predictor}`")]
    MissingPredictor { club: String, predictor: Predictor },
    #[error("club `{0}`: FV2 is zero, FV1/FV2 is undefined")]
    DegenerateRatio(String),
    #[error("no input to aggregate")]
    EmptyInput,
    #[error("{records} records but {results} valuation results")]
    LengthMismatch { records: usize, results: usize },
    #[error("transaction for `{0}` has no price")]
    MissingPrice(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Club-level predictors a valuation model can reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Predictor {
    /// Total SNS followers, in millions.
    SnsFollowers,
    Revenue,
    PlayerMarketValue,
    BroadcastingRevenue,
    WageCostRatio,
    PlayerWages,
}

impl Predictor {
    pub const ALL: [Predictor; 6] = [
        Predictor::SnsFollowers,
        Predictor::Revenue,
        Predictor::PlayerMarketValue,
        Predictor::BroadcastingRevenue,
        Predictor::WageCostRatio,
        Predictor::PlayerWages,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Predictor::SnsFollowers => "sns_followers_m",
            Predictor::Revenue => "revenue_meur",
            Predictor::PlayerMarketValue => "player_market_value_meur",
            Predictor::BroadcastingRevenue => "broadcasting_meur",
            Predictor::WageCostRatio => "wage_cost_ratio",
            Predictor::PlayerWages => "player_wages_meur",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.id() == id)
    }

    /// The value the model sees; SNS is converted to millions here.
    pub fn value(self, record: &ClubRecord) -> Option<f64> {
        match self {
            Predictor::SnsFollowers => Some(record.sns_followers_millions()),
            Predictor::Revenue => Some(record.revenue),
            Predictor::PlayerMarketValue => Some(record.player_market_value),
            Predictor::BroadcastingRevenue => record.broadcasting_revenue,
            Predictor::WageCostRatio => record.wage_cost_ratio,
            Predictor::PlayerWages => record.player_wages,
        }
    }
}

impl fmt::Display for Predictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// `value = Σ coefficient × predictor`, no intercept. Coefficients in m€ per unit.
#[derive(Debug, Clone, PartialEq)]
pub struct ValuationModel {
    name: String,
    terms: Vec<(Predictor, f64)>,
    provenance: String,
}

impl ValuationModel {
    pub fn new(
        name: impl Into<String>,
        terms: Vec<(Predictor, f64)>,
        provenance: impl Into<String>,
    ) -> Result<Self, ValuationError> {
        if terms.is_empty() {
            return Err(ValuationError::InvalidModel("a model needs at least one term".into()));
        }
        if let Some((p, c)) = terms.iter().find(|(_, c)| !c.is_finite()) {
            return Err(ValuationError::InvalidModel(format!("coefficient for {p} is {c}")));
        }
        for (i, (p, _)) in terms.iter().enumerate() {
            if terms[..i].iter().any(|(q, _)| q == p) {
                return Err(ValuationError::InvalidModel(format!("predictor {p} appears twice")));
            }
        }
        Ok(Self {
            name: name.into(),
            terms,
            provenance: provenance.into(),
        })
    }

    fn from_published(short: &str, published: &PublishedModel) -> Self {
        let terms = published
            .terms
            .iter()
            .map(|t| (Predictor::from_id(t.variable).expect("published variable is a predictor"), t.coefficient))
            .collect();
        Self::new(short, terms, published.name).expect("published model is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn terms(&self) -> &[(Predictor, f64)] {
        &self.terms
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }
}

/// SNS followers (m) and revenue (m€).
pub fn formula_1() -> ValuationModel {
    ValuationModel::from_published("Formula 1", &sns_revenue_model())
}

/// SNS followers (m) and player market value (m€).
pub fn formula_2() -> ValuationModel {
    ValuationModel::from_published("Formula 2", &sns_market_value_model())
}

pub fn apply_model(model: &ValuationModel, record: &ClubRecord) -> Result<f64, ValuationError> {
    model.terms.iter().try_fold(0.0, |acc, &(p, coeff)| {
        let v = p.value(record).ok_or_else(|| ValuationError::MissingPredictor {
            club: record.name.clone(),
            predictor: p,
        })?;
        Ok(acc + coeff * v)
    })
}

/// One row of the valuation table.
#[derive(Debug, Clone, PartialEq)]
pub struct ValuationResult {
    pub club: String,
    pub fv1: f64,
    pub fv2: f64,
    /// `100 × fv1 / fv2`.
    pub ratio_pct: f64,
}

pub fn valuate(
    record: &ClubRecord,
    f1: &ValuationModel,
    f2: &ValuationModel,
) -> Result<ValuationResult, ValuationError> {
    let fv1 = apply_model(f1, record)?;
    let fv2 = apply_model(f2, record)?;
    if fv2 == 0.0 {
        return Err(ValuationError::DegenerateRatio(record.name.clone()));
    }
    Ok(ValuationResult {
        club: record.name.clone(),
        fv1,
        fv2,
        ratio_pct: 100.0 * fv1 / fv2,
    })
}

/// Valuates every record; fails on the first record (in input order) that errors.
pub fn valuate_all(
    records: &[ClubRecord],
    f1: &ValuationModel,
    f2: &ValuationModel,
    exec: Execution,
) -> Result<Vec<ValuationResult>, ValuationError> {
    exec.map(records, |r| valuate(r, f1, f2)).into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateRow {
    pub sns_followers: f64,
    pub revenue: f64,
    pub player_market_value: f64,
    pub fv1: f64,
    pub fv2: f64,
    /// Same statistic applied to the per-club ratios.
    pub ratio_pct: f64,
}

/// How a summary FV1/FV2 percentage is formed from per-club values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioAggregation {
    MeanOfRatios,
    RatioOfMeans,
}

impl fmt::Display for RatioAggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MeanOfRatios => "mean of per-club ratios",
            Self::RatioOfMeans => "mean FV1 / mean FV2",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregates {
    pub mean: AggregateRow,
    pub median: AggregateRow,
    /// `100 × mean(fv1) / mean(fv2)`.
    pub ratio_of_means_pct: f64,
}

impl Aggregates {
    pub fn ratio(&self, how: RatioAggregation) -> f64 {
        match how {
            RatioAggregation::MeanOfRatios => self.mean.ratio_pct,
            RatioAggregation::RatioOfMeans => self.ratio_of_means_pct,
        }
    }

    /// Aggregations whose value lies within `tol_pp` of `printed_pct`.
    pub fn matching_ratio_aggregations(&self, printed_pct: f64, tol_pp: f64) -> Vec<RatioAggregation> {
        [RatioAggregation::MeanOfRatios, RatioAggregation::RatioOfMeans]
            .into_iter()
            .filter(|&how| (self.ratio(how) - printed_pct).abs() <= tol_pp)
            .collect()
    }
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

/// Mean and median rows over paired records and results.
pub fn aggregate(results: &[ValuationResult], records: &[ClubRecord]) -> Result<Aggregates, ValuationError> {
    if results.is_empty() || records.is_empty() {
        return Err(ValuationError::EmptyInput);
    }
    if results.len() != records.len() {
        return Err(ValuationError::LengthMismatch {
            records: records.len(),
            results: results.len(),
        });
    }
    let sns: Vec<f64> = records.iter().map(|r| r.sns_followers as f64).collect();
    let rev: Vec<f64> = records.iter().map(|r| r.revenue).collect();
    let pmv: Vec<f64> = records.iter().map(|r| r.player_market_value).collect();
    let fv1: Vec<f64> = results.iter().map(|r| r.fv1).collect();
    let fv2: Vec<f64> = results.iter().map(|r| r.fv2).collect();
    let ratio: Vec<f64> = results.iter().map(|r| r.ratio_pct).collect();
    let row = |stat: fn(&[f64]) -> Option<f64>| AggregateRow {
        sns_followers: stat(&sns).unwrap(),
        revenue: stat(&rev).unwrap(),
        player_market_value: stat(&pmv).unwrap(),
        fv1: stat(&fv1).unwrap(),
        fv2: stat(&fv2).unwrap(),
        ratio_pct: stat(&ratio).unwrap(),
    };
    let mean_row = row(mean);
    Ok(Aggregates {
        mean: mean_row,
        median: row(median),
        ratio_of_means_pct: 100.0 * mean_row.fv1 / mean_row.fv2,
    })
}

/// Model-implied value of the traded stake against the price actually paid.
#[derive(Debug, Clone, PartialEq)]
pub struct PremiumResult {
    pub club: String,
    pub model_name: String,
    /// m¥.
    pub implied_stake_value: f64,
    /// m¥.
    pub price: f64,
    /// Fraction: 3.04 means the model value is 304% above the price.
    pub premium: f64,
}

pub fn transaction_premium(
    case: &TransactionCase,
    model_name: &str,
    fv_meur: f64,
    fx: FxRate,
    stake: f64,
) -> Result<PremiumResult, ValuationError> {
    let price = match case.price_for_51pct_myen {
        Some(p) if p > 0.0 => p,
        _ => return Err(ValuationError::MissingPrice(case.club.clone())),
    };
    if !(stake > 0.0 && stake <= 1.0) {
        return Err(ValuationError::InvalidInput(format!("stake {stake} must lie in (0, 1]")));
    }
    if !(fv_meur > 0.0 && fv_meur.is_finite()) {
        return Err(ValuationError::InvalidInput(format!(
            "firm value of `{}` must be positive, got {fv_meur}",
            case.club
        )));
    }
    let implied = fv_meur * fx.yen_per_euro() * stake;
    Ok(PremiumResult {
        club: case.club.clone(),
        model_name: model_name.to_string(),
        implied_stake_value: implied,
        price,
        premium: implied / price - 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PremiumRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PremiumSummary {
    /// (Formula 1, Formula 2) premiums per priced case, in case order.
    pub cases: Vec<(PremiumResult, PremiumResult)>,
    /// Cases skipped, with the reason.
    pub skipped: Vec<(String, String)>,
    pub fv1_range: PremiumRange,
    pub fv2_range: PremiumRange,
    pub fx: FxRate,
    pub stake: f64,
}

fn range_of(values: impl Iterator<Item = f64>) -> PremiumRange {
    values.fold(
        PremiumRange {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        },
        |r, v| PremiumRange {
            min: r.min.min(v),
            max: r.max.max(v),
        },
    )
}

/// Premiums for every case that has a price and a valuation for its club
/// (matched by name); the rest are listed as skipped.
pub fn premium_ranges(
    cases: &[TransactionCase],
    results: &[ValuationResult],
    fx: FxRate,
    stake: f64,
) -> Result<PremiumSummary, ValuationError> {
    let mut priced = Vec::new();
    let mut skipped = Vec::new();
    for case in cases {
        let Some(v) = results.iter().find(|r| r.club == case.club) else {
            skipped.push((case.club.clone(), "no valuation for club".to_string()));
            continue;
        };
        match (
            transaction_premium(case, "Formula 1", v.fv1, fx, stake),
            transaction_premium(case, "Formula 2", v.fv2, fx, stake),
        ) {
            (Ok(a), Ok(b)) => priced.push((a, b)),
            (Err(ValuationError::MissingPrice(_)), _) => {
                skipped.push((case.club.clone(), "no transaction price".to_string()))
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    if priced.is_empty() {
        return Err(ValuationError::EmptyInput);
    }
    Ok(PremiumSummary {
        fv1_range: range_of(priced.iter().map(|(a, _)| a.premium)),
        fv2_range: range_of(priced.iter().map(|(_, b)| b.premium)),
        cases: priced,
        skipped,
        fx,
        stake,
    })
}
